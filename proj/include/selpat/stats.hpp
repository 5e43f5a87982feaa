#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selpat/dataset.hpp"
#include "selpat/miner.hpp"
#include "selpat/selection_event.hpp"
#include "selpat/truncated_normal.hpp"
#include "selpat/truncation_search.hpp"

namespace selpat {

enum class Direction { Upper, Lower };

/// Positive mode tests the upper tail; signed and sequential modes follow the
/// sign recorded at discovery.
Direction test_direction(const DiscoveryResult& discovery, std::size_t index);

/// Tail probability of eta^T y under N(0, sigma^2 ||eta||^2).
double naive_p_value(const LineQuery& q, double sigma, Direction direction);

struct SelectivePValue {
    double p;
    /// The statistic fell (numerically) outside [L, U] and was clamped.
    bool clamped;
};

/// Tail probability of eta^T y under N(0, sigma^2 ||eta||^2) truncated to [L, U].
SelectivePValue selective_p_value(const LineQuery& q, const TruncationInterval& interval, double sigma,
                                  Direction direction);

/// Which p-value drives the decisions of a report.
enum class Method { Naive, Split, Select };

Method parse_method(const std::string& name);
std::string to_string(Method method);

struct InferenceRecord {
    Pattern pattern;
    double score = 0.0;
    int sign = 1;
    /// eta^T y: the pattern score, or the least-squares coefficient in sequential mode.
    double statistic = 0.0;
    std::optional<double> selective_p;
    double naive_p = 1.0;
    /// min(1, k * p) for the method's p-value.
    double adjusted_p = 1.0;
    bool positive = false;
    std::optional<TruncationInterval> interval;
    std::optional<SearchStats> search_stats;
    /// Split only: the pattern does not occur in the inference half.
    bool absent_in_holdout = false;
    bool clamped = false;
};

struct InferenceReport {
    Mode mode = Mode::Positive;
    Method method = Method::Select;
    std::size_t k = 0;
    std::size_t max_size = 0;
    double alpha = 0.05;
    double sigma = 1.0;
    bool sigma_estimated = false;
    bool rank_deficient = false;
    /// Sorted by adjusted p ascending.
    std::vector<InferenceRecord> records;
    TraversalStats mining_stats;
    double mining_seconds = 0.0;
    double inference_seconds = 0.0;

    std::size_t num_positive() const noexcept;
};

double bonferroni(double p, std::size_t k) noexcept;

/// Selective p-values (and the naive ones alongside) for every discovered
/// pattern, with decisions on the Bonferroni-adjusted selective p-values.
InferenceReport report(const TransactionDatabase& db, const DiscoveryResult& discovery, const EventSpec& spec,
                       double alpha, const SearchOptions& search = {});

/// Naive p-values of the discovered patterns on the full data.
InferenceReport naive_report(const TransactionDatabase& db, const DiscoveryResult& discovery, double alpha);

struct InferenceOptions {
    Mode mode = Mode::Signed;
    std::size_t k = 5;
    std::size_t max_size = 3;
    double alpha = 0.05;
    Method method = Method::Select;
    bool pruning = true;
    std::uint64_t seed = 0;
};

/// Random 50/50 split by seed: discovery on one half (responses re-centered
/// within it), naive p-values on the other half (re-centered within it).
InferenceReport split_inference(const TransactionDatabase& db, std::size_t max_size, std::size_t k, Mode mode,
                                double alpha, std::uint64_t seed);

/// Discovery followed by inference with the requested method.
InferenceReport infer(const TransactionDatabase& db, const InferenceOptions& options);

} // namespace selpat
