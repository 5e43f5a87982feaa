#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selpat/dataset.hpp"
#include "selpat/miner.hpp"
#include "selpat/stats.hpp"

namespace selpat {

enum class Scenario { Individual, Sequential };
enum class Truth { Null, Signal };

Scenario parse_scenario(const std::string& name);
std::string to_string(Scenario scenario);
std::string to_string(Truth truth);

/// Individual scenario mines with signed top-k, sequential with the greedy miner.
Mode mode_for(Scenario scenario) noexcept;

struct SyntheticConfig {
    std::size_t n = 100;
    std::size_t d = 100;
    std::size_t k = 5;
    std::size_t r = 5;
    double alpha = 0.05;
    double sigma = 0.5;
    /// Each item is left out of each transaction with probability zeta.
    double zeta = 0.6;
    Scenario scenario = Scenario::Individual;
    Truth truth = Truth::Null;
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    /// Wall-clock budget per trial for unpruned timing runs.
    double timeout_secs = 600.0;
    /// Worker threads for trial-level parallelism; 0 picks the hardware count.
    std::size_t threads = 0;

    /// Throws ValidationError on out-of-range fields.
    void validate() const;
};

struct SyntheticData {
    TransactionDatabase db;
    /// Planted patterns (empty under the null).
    std::vector<Pattern> truth;
};

/// Deterministic in (config, trial). Responses are centered; sigma is known.
SyntheticData generate(const SyntheticConfig& config, std::size_t trial);

/// Planted patterns of a scenario, 0-indexed.
std::vector<Pattern> truth_patterns(Scenario scenario);

inline constexpr std::array<Method, 3> kAllMethods{Method::Naive, Method::Split, Method::Select};

struct MethodOutcome {
    Method method = Method::Select;
    std::vector<Pattern> discovered;
    std::vector<bool> positive;
    /// Unadjusted p-values driving the method (selective for select).
    std::vector<double> p_values;
    bool any_positive = false;
    /// Planted patterns that were discovered, and those also declared positive.
    std::size_t truth_discovered = 0;
    std::size_t truth_positive = 0;
    double seconds = 0.0;
};

struct TrialOutcome {
    std::size_t trial = 0;
    std::size_t num_truth = 0;
    /// Indexed like kAllMethods.
    std::array<MethodOutcome, 3> methods;
    double mining_seconds = 0.0;
    TraversalStats mining_stats;
    TraversalStats search_stats;

    const MethodOutcome& outcome(Method m) const;
};

/// One trial: shared discovery for naive and select, an independent split run.
TrialOutcome run_trial(const SyntheticConfig& config, std::size_t trial);

/// All trials of a configuration, in trial order regardless of thread count.
std::vector<TrialOutcome> run_trials(const SyntheticConfig& config);

struct Proportion {
    std::size_t hits = 0;
    std::size_t total = 0;

    double rate() const noexcept;
    /// Binomial standard error sqrt(p (1 - p) / total).
    double se() const noexcept;
    /// Wilson score interval at 95%.
    std::pair<double, double> ci95() const noexcept;
};

struct FprRow {
    Method method;
    /// Trials with at least one positive.
    Proportion fwer;
};

struct FprSummary {
    SyntheticConfig config;
    std::vector<FprRow> rows;
    /// Select only: discovered patterns with unadjusted selective p < alpha.
    Proportion pooled_selective;
    double seconds = 0.0;
};

/// Family-wise false positive rates under the null.
FprSummary run_fpr(const SyntheticConfig& config);
FprSummary summarize_fpr(const SyntheticConfig& config, const std::vector<TrialOutcome>& trials);

struct TprRow {
    Method method;
    /// Mean fraction of planted patterns discovered and declared positive.
    double tpr = 0.0;
    double tpr_se = 0.0;
    /// Mean fraction of planted patterns discovered, regardless of the test.
    double discovery_rate = 0.0;
};

struct TprSummary {
    SyntheticConfig config;
    std::vector<TprRow> rows;
    double seconds = 0.0;
};

TprSummary run_tpr(const SyntheticConfig& config);
TprSummary summarize_tpr(const SyntheticConfig& config, const std::vector<TrialOutcome>& trials);

struct TimingRow {
    std::size_t trial = 0;
    double pruned_seconds = 0.0;
    /// Absent when the unpruned run hit the timeout.
    std::optional<double> unpruned_seconds;
    std::uint64_t pruned_visited = 0;
    std::uint64_t unpruned_visited = 0;
    /// Pruned and unpruned intervals agreed on every query (checked when both finished).
    bool agree = true;
};

struct TimingSummary {
    SyntheticConfig config;
    std::vector<TimingRow> rows;
    double pruned_median = 0.0;
    double pruned_max = 0.0;
    /// Timed-out runs enter as the timeout value.
    double unpruned_median = 0.0;
    double unpruned_max = 0.0;
    std::size_t timeouts = 0;

    double speedup() const noexcept;
};

/// Inference-phase wall clock with and without pruning, on the same
/// discoveries. Trials run serially so that timings do not compete.
TimingSummary run_timing(const SyntheticConfig& config, bool run_unpruned = true);

double median(std::vector<double> v);

/// Configurations swept by the experiment CLI: a single point unless the
/// full grids are requested, in which the swept parameter takes the grid values.
std::vector<SyntheticConfig> fpr_tpr_grid(const SyntheticConfig& base, bool full);
std::vector<SyntheticConfig> timing_grid(const SyntheticConfig& base, bool full);

} // namespace selpat
