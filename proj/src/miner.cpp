#include "selpat/miner.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "selpat/error.hpp"
#include "selpat/linalg.hpp"

namespace selpat {

Mode parse_mode(const std::string& name) {
    if (name == "positive") return Mode::Positive;
    if (name == "signed") return Mode::Signed;
    if (name == "sequential") return Mode::Sequential;
    throw ValidationError("unknown mode '" + name + "' (expected positive, signed or sequential)");
}

std::string to_string(Mode mode) {
    switch (mode) {
    case Mode::Positive: return "positive";
    case Mode::Signed: return "signed";
    case Mode::Sequential: return "sequential";
    }
    return "?";
}

bool items_less(std::span<const Item> a, std::span<const Item> b) noexcept {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

namespace {

struct Candidate {
    std::vector<Item> items;
    BitVec occurrence;
    double score = 0.0;
    double key = 0.0;
};

// Keeps the k best candidates ordered by (key desc, items asc).
class TopK {
public:
    explicit TopK(std::size_t k) : k_(k) {}

    bool full() const noexcept { return best_.size() == k_; }
    double threshold() const noexcept { return best_.back().key; }

    bool admits(double key, std::span<const Item> items) const noexcept {
        if (!full()) return true;
        const auto& worst = best_.back();
        return key > worst.key || (key == worst.key && items_less(items, worst.items));
    }

    void insert(const NodeView& node, double score, double key) {
        Candidate c{{node.items.begin(), node.items.end()}, node.occurrence, score, key};
        auto pos = std::find_if(best_.begin(), best_.end(), [&](const Candidate& o) {
            return key > o.key || (key == o.key && items_less(c.items, o.items));
        });
        best_.insert(pos, std::move(c));
        if (best_.size() > k_) best_.pop_back();
    }

    std::vector<Candidate>& items() noexcept { return best_; }

private:
    std::size_t k_;
    std::vector<Candidate> best_;
};

void require_k(std::size_t k) {
    if (k == 0) throw ValidationError("k must be at least 1");
}

void require_length(const PatternEnumerator& tree, std::span<const double> y) {
    if (tree.num_transactions() != y.size()) throw ValidationError("response length does not match n");
}

DiscoveryResult mine_top_k(const PatternEnumerator& tree, std::span<const double> y, std::size_t k,
                           const MineOptions& options, bool absolute) {
    require_k(k);
    require_length(tree, y);
    TopK top(k);
    const auto stats = tree.traverse([&](const NodeView& node) {
        const SignedSums s = signed_sums(node.occurrence, y);
        const double key = absolute ? std::abs(s.total) : s.total;
        if (top.admits(key, node.items)) top.insert(node, s.total, key);
        if (options.pruning && top.full()) {
            const double bound = absolute ? std::max(s.pos, -s.neg) : s.pos;
            if (bound < top.threshold()) return Visit::Prune;
        }
        return Visit::Continue;
    });
    if (!top.full()) {
        throw ValidationError("k = " + std::to_string(k) + " exceeds the number of patterns (" +
                              std::to_string(top.items().size()) + ")");
    }

    DiscoveryResult result;
    result.mode = absolute ? Mode::Signed : Mode::Positive;
    result.stats = stats;
    for (auto& c : top.items()) {
        result.selected.push_back(Discovery{Pattern(std::move(c.items)), std::move(c.occurrence), c.score,
                                            c.score < 0.0 ? -1 : 1});
    }
    return result;
}

// Back substitution for the upper-triangular R stored column-wise.
std::vector<double> solve_upper(const std::vector<std::vector<double>>& r_cols, std::span<const double> rhs) {
    const std::size_t h = r_cols.size();
    std::vector<double> beta(h, 0.0);
    for (std::size_t jj = h; jj-- > 0;) {
        double s = rhs[jj];
        for (std::size_t c = jj + 1; c < h; ++c) s -= r_cols[c][jj] * beta[c];
        beta[jj] = s / r_cols[jj][jj];
    }
    return beta;
}

} // namespace

DiscoveryResult mine_top_k_positive(const PatternEnumerator& tree, std::span<const double> y, std::size_t k,
                                    const MineOptions& options) {
    return mine_top_k(tree, y, k, options, false);
}

DiscoveryResult mine_top_k_signed(const PatternEnumerator& tree, std::span<const double> y, std::size_t k,
                                  const MineOptions& options) {
    return mine_top_k(tree, y, k, options, true);
}

DiscoveryResult mine_sequential(const PatternEnumerator& tree, std::span<const double> y, std::size_t k,
                                const MineOptions& options) {
    require_k(k);
    require_length(tree, y);
    const std::size_t n = y.size();

    DiscoveryResult result;
    result.mode = Mode::Sequential;
    OrthonormalBasis basis(n);
    std::vector<std::vector<double>> r_cols;  // R of the incremental QR, column-wise
    std::vector<std::vector<double>> columns; // dense Gamma, for the rank-deficient fallback
    std::vector<double> residual(y.begin(), y.end());

    for (std::size_t step = 0; step < k; ++step) {
        double abs_sum = 0.0;
        for (double v : residual) abs_sum += std::abs(v);
        const double zero_tol = 1e-12 * abs_sum;

        bool found = false;
        Candidate best;
        const auto stats = tree.traverse([&](const NodeView& node) {
            const SignedSums s = signed_sums(node.occurrence, residual);
            const double key = std::abs(s.total);
            const bool selected = std::any_of(result.selected.begin(), result.selected.end(),
                                              [&](const Discovery& d) {
                                                  return std::ranges::equal(d.pattern.items(), node.items);
                                              });
            const bool better =
                !found || key > best.key || (key == best.key && items_less(node.items, best.items));
            if (!selected && better) {
                // A zero-correlation candidate may be in the span of the model; those are ineligible.
                const bool eligible =
                    key > zero_tol ||
                    (!node.occurrence.none() &&
                     basis.residual_norm2(node.occurrence) > 1e-20 * static_cast<double>(node.occurrence.count()));
                if (eligible) {
                    best = Candidate{{node.items.begin(), node.items.end()}, node.occurrence, s.total, key};
                    found = true;
                }
            }
            if (options.pruning && found && std::max(s.pos, -s.neg) < best.key) return Visit::Prune;
            return Visit::Continue;
        });
        result.stats += stats;
        if (!found) {
            throw ValidationError("k = " + std::to_string(k) + " exceeds the number of selectable patterns (" +
                                  std::to_string(step) + ")");
        }

        const auto dense = best.occurrence.to_dense();
        std::vector<double> r_col;
        if (!basis.add(dense, &r_col)) result.rank_deficient = true;
        columns.push_back(dense);
        r_cols.push_back(std::move(r_col));

        result.selected.push_back(
            Discovery{Pattern(std::move(best.items)), std::move(best.occurrence), best.score, best.score < 0.0 ? -1 : 1});

        residual = basis.project_out(y);
        result.residual_norms.push_back(std::sqrt(norm2(residual)));
        if (result.rank_deficient) {
            result.coefficients.push_back(least_squares(columns, y));
        } else {
            std::vector<double> qty(basis.rank());
            for (std::size_t j = 0; j < basis.rank(); ++j) qty[j] = dot(basis.vector(j), y);
            result.coefficients.push_back(solve_upper(r_cols, qty));
        }
    }
    return result;
}

DiscoveryResult mine(const TransactionDatabase& db, std::size_t max_size, std::size_t k, Mode mode,
                     const MineOptions& options) {
    const ItemsetTree tree(db, max_size);
    switch (mode) {
    case Mode::Positive: return mine_top_k_positive(tree, db.y(), k, options);
    case Mode::Signed: return mine_top_k_signed(tree, db.y(), k, options);
    case Mode::Sequential: return mine_sequential(tree, db.y(), k, options);
    }
    throw ValidationError("unknown mode");
}

} // namespace selpat
