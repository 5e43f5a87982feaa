#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "selpat/dataset.hpp"
#include "selpat/miner.hpp"
#include "selpat/pattern_tree.hpp"
#include "selpat/selection_event.hpp"

namespace selpat {

/// Test statistic eta^T y along the line y + theta * eta.
struct LineQuery {
    std::vector<double> y;
    std::vector<double> eta;
    /// Set when eta came from a rank-deficient design (minimum-norm convention).
    bool rank_deficient = false;

    LineQuery(std::vector<double> y, std::vector<double> eta, bool rank_deficient = false);

    double statistic() const noexcept { return statistic_; }
    double eta_norm2() const noexcept { return eta_norm2_; }

private:
    double statistic_;
    double eta_norm2_;
};

/// eta = tau_j of the i-th discovered pattern (0-based).
LineQuery pattern_line_query(std::span<const double> y, const DiscoveryResult& discovery, std::size_t index);

/// eta = ((Gamma^{K_k})^+)^T e_j for the j-th selected column (0-based), so
/// that eta^T y is the j-th least-squares coefficient of the final model.
LineQuery sequential_line_query(std::span<const double> y, const DiscoveryResult& discovery, std::size_t index);
LineQuery sequential_line_query(const TransactionDatabase& db, const DiscoveryResult& discovery, std::size_t index);

/// Identifies one constraint: tree t, compared pattern, sign s.
struct ConstraintId {
    std::size_t tree = 0;
    std::vector<Item> compared;
    int sign = -1;
};

struct TruncationInterval {
    double theta_min;
    double theta_max;
    double lower;
    double upper;
    std::optional<ConstraintId> argmin;
    std::optional<ConstraintId> argmax;
};

struct SearchStats {
    TraversalStats traversal;
    /// Nodes at which tree t still had an active side.
    std::vector<std::uint64_t> evaluated_per_tree;
    /// Nodes at which tree t lost its last active side.
    std::vector<std::uint64_t> closed_per_tree;
};

struct SearchOptions {
    bool pruning = true;
    /// Throws TimeoutError once passed (checked every few thousand nodes).
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct SearchResult {
    TruncationInterval interval;
    SearchStats stats;
};

/// theta_min / theta_max over every constraint of the event, by a single
/// depth-first pass over the pattern tree that evaluates all k trees jointly.
/// A (tree, sign, side) triple is switched off below a node once no
/// descendant can move that side's running bound; the subtree is skipped when
/// everything is switched off. Throws ConsistencyError if y violates the event.
SearchResult search_interval(const PatternEnumerator& tree, const EventSpec& spec, const LineQuery& q,
                             const SearchOptions& options = {});
SearchResult search_interval(const TransactionDatabase& db, const EventSpec& spec, const LineQuery& q,
                             const SearchOptions& options = {});

/// Direct evaluation over materialized half-spaces, no pruning.
TruncationInterval oracle_interval(std::span<const HalfSpace> halfspaces, const LineQuery& q);

/// Unpruned reference: the oracle over materialized constraints while the
/// pattern count fits the cap, otherwise a full traversal without pruning.
TruncationInterval unpruned_interval(const PatternEnumerator& tree, const EventSpec& spec, const LineQuery& q,
                                     const MaterializeOptions& cap = {},
                                     std::optional<std::chrono::steady_clock::time_point> deadline = {});

} // namespace selpat
