#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "selpat/bitvec.hpp"
#include "selpat/dataset.hpp"
#include "selpat/pattern_tree.hpp"

namespace selpat {

enum class Mode { Positive, Signed, Sequential };

Mode parse_mode(const std::string& name);
std::string to_string(Mode mode);

struct Discovery {
    Pattern pattern;
    BitVec occurrence;
    /// tau^T y for positive/signed; r_{h-1}^T tau at the selection step for sequential.
    double score = 0.0;
    /// +1 or -1; zero scores count as +1.
    int sign = 1;
};

struct DiscoveryResult {
    Mode mode = Mode::Positive;
    /// Positive/signed: ordered by (score or |score| desc, pattern asc).
    /// Sequential: in selection order.
    std::vector<Discovery> selected;
    /// Sequential only: ||r_h|| after step h, and the least-squares
    /// coefficients of the model fitted after step h.
    std::vector<double> residual_norms;
    std::vector<std::vector<double>> coefficients;
    bool rank_deficient = false;
    TraversalStats stats;
};

struct MineOptions {
    bool pruning = true;
};

/// Top-k patterns by s_j = tau_j^T y. Subtrees are skipped when the sum of the
/// positive responses covered by the node is strictly below the current k-th
/// best score.
DiscoveryResult mine_top_k_positive(const PatternEnumerator& tree, std::span<const double> y,
                                    std::size_t k, const MineOptions& options = {});

/// Top-k patterns by |s_j|, with signs recorded.
DiscoveryResult mine_top_k_signed(const PatternEnumerator& tree, std::span<const double> y,
                                  std::size_t k, const MineOptions& options = {});

/// Greedy selection maximizing |r_{h-1}^T tau_j| with least-squares refits.
/// Patterns whose occurrence lies in the span of the selected columns are
/// never selected.
DiscoveryResult mine_sequential(const PatternEnumerator& tree, std::span<const double> y,
                                std::size_t k, const MineOptions& options = {});

DiscoveryResult mine(const TransactionDatabase& db, std::size_t max_size, std::size_t k, Mode mode,
                     const MineOptions& options = {});

/// Lexicographic comparison of a raw item span against a pattern.
bool items_less(std::span<const Item> a, std::span<const Item> b) noexcept;

} // namespace selpat
