#include "selpat/truncation_search.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "selpat/error.hpp"
#include "selpat/linalg.hpp"

namespace selpat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Denominators at or below this magnitude are treated as zero.
constexpr double kTinyDenominator = 1e-300;
// A denominator this small relative to the magnitude of its summands is
// cancellation noise from a constraint that vanishes in exact arithmetic.
constexpr double kCancellation = 1e-10;

double consistency_tolerance(std::span<const double> y) {
    double s = 0.0;
    for (double v : y) s += std::abs(v);
    return 1e-9 * std::max(1.0, s);
}

// Running theta_min / theta_max over constraints c + theta * e >= 0 that hold
// at theta = 0. Replacement is strict, so the first constraint reaching the
// extreme value is reported.
class IntervalAccumulator {
public:
    explicit IntervalAccumulator(double tolerance) : tolerance_(tolerance) {}

    double theta_min = -kInf;
    double theta_max = kInf;
    std::optional<ConstraintId> argmin;
    std::optional<ConstraintId> argmax;

    // e_scale bounds the summed magnitudes that produced e.
    template <typename MakeId>
    void add(double c, double e, double e_scale, bool use_min, bool use_max, MakeId&& make_id) {
        if (c < 0.0) {
            if (c < -tolerance_) {
                const auto id = make_id();
                throw ConsistencyError("observed response violates constraint (tree " + std::to_string(id.tree) +
                                       ", sign " + std::to_string(id.sign) + "): a^T y = " + std::to_string(c));
            }
            c = 0.0;
        }
        if (std::abs(e) <= kCancellation * e_scale) return;
        if (e > kTinyDenominator) {
            const double cand = -c / e;
            if (use_min && cand > theta_min) {
                theta_min = cand;
                argmin = make_id();
            }
        } else if (e < -kTinyDenominator) {
            const double cand = -c / e;
            if (use_max && cand < theta_max) {
                theta_max = cand;
                argmax = make_id();
            }
        }
    }

    TruncationInterval finish(const LineQuery& q) const {
        TruncationInterval out{theta_min, theta_max, -kInf, kInf, argmin, argmax};
        if (std::isfinite(theta_min)) out.lower = q.statistic() + theta_min * q.eta_norm2();
        if (std::isfinite(theta_max)) out.upper = q.statistic() + theta_max * q.eta_norm2();
        return out;
    }

private:
    double tolerance_;
};

enum SideBits : std::uint8_t { kMinSide = 1, kMaxSide = 2 };

} // namespace

LineQuery::LineQuery(std::vector<double> y_, std::vector<double> eta_, bool rank_deficient_)
    : y(std::move(y_)), eta(std::move(eta_)), rank_deficient(rank_deficient_) {
    if (y.size() != eta.size()) throw ValidationError("y and eta must have the same length");
    statistic_ = selpat::dot(std::span<const double>(eta), std::span<const double>(y));
    eta_norm2_ = norm2(eta);
    if (!(eta_norm2_ > 0.0)) throw ValidationError("eta must be non-zero");
}

LineQuery pattern_line_query(std::span<const double> y, const DiscoveryResult& discovery, std::size_t index) {
    if (index >= discovery.selected.size()) throw ValidationError("pattern index out of range");
    const auto& tau = discovery.selected[index].occurrence;
    if (tau.size() != y.size()) throw ValidationError("occurrence length does not match n");
    return LineQuery({y.begin(), y.end()}, tau.to_dense());
}

LineQuery sequential_line_query(std::span<const double> y, const DiscoveryResult& discovery, std::size_t index) {
    if (index >= discovery.selected.size()) throw ValidationError("coefficient index out of range");
    std::vector<std::vector<double>> columns;
    for (const auto& d : discovery.selected) {
        if (d.occurrence.size() != y.size()) throw ValidationError("occurrence length does not match n");
        columns.push_back(d.occurrence.to_dense());
    }
    auto rows = pseudo_inverse_rows(columns);
    return LineQuery({y.begin(), y.end()}, std::move(rows[index]), discovery.rank_deficient);
}

LineQuery sequential_line_query(const TransactionDatabase& db, const DiscoveryResult& discovery, std::size_t index) {
    return sequential_line_query(db.y(), discovery, index);
}

SearchResult search_interval(const PatternEnumerator& tree, const EventSpec& spec, const LineQuery& q,
                             const SearchOptions& options) {
    if (tree.num_transactions() != spec.n()) throw ValidationError("enumerator does not match the event");
    const LineFamily family(spec, q.y, q.eta);
    const auto signs = spec.constraint_signs();
    const std::size_t num_trees = family.trees.size();
    const std::size_t num_slots = num_trees * signs.size();
    const std::size_t num_groups = family.groups.size();

    IntervalAccumulator acc(consistency_tolerance(q.y));
    SearchStats stats;
    stats.evaluated_per_tree.assign(num_trees, 0);
    stats.closed_per_tree.assign(num_trees, 0);

    // active[depth][slot] holds the sides still open at that depth; depth 0 is the root.
    std::vector<std::vector<std::uint8_t>> active(1, std::vector<std::uint8_t>(num_slots, kMinSide | kMaxSide));
    std::vector<SignedSums> sums_y(num_groups);
    std::vector<SignedSums> sums_eta(num_groups);
    std::vector<std::uint8_t> group_needed(num_groups);

    std::uint64_t since_check = 0;
    stats.traversal = tree.traverse([&](const NodeView& node) {
        if (options.deadline && ++since_check == 4096) {
            since_check = 0;
            if (std::chrono::steady_clock::now() > *options.deadline) throw TimeoutError("truncation search timed out");
        }
        const std::size_t depth = node.depth();
        if (active.size() <= depth) active.resize(depth + 1, std::vector<std::uint8_t>(num_slots));
        auto& flags = active[depth];
        flags = active[depth - 1];

        std::fill(group_needed.begin(), group_needed.end(), 0);
        for (std::size_t t = 0; t < num_trees; ++t) {
            bool any = false;
            for (std::size_t s = 0; s < signs.size(); ++s) any = any || flags[t * signs.size() + s] != 0;
            if (any) {
                group_needed[family.trees[t].group] = 1;
                ++stats.evaluated_per_tree[t];
            }
        }
        for (std::size_t g = 0; g < num_groups; ++g) {
            if (!group_needed[g]) continue;
            sums_y[g] = signed_sums(node.occurrence, family.groups[g].z_y);
            sums_eta[g] = signed_sums(node.occurrence, family.groups[g].z_eta);
        }

        const int sel = spec.selection_index(node.items);
        bool any_open = false;
        for (std::size_t t = 0; t < num_trees; ++t) {
            const auto& tr = family.trees[t];
            const SignedSums& sy = sums_y[tr.group];
            const SignedSums& se = sums_eta[tr.group];
            const bool compared = spec.compared_in_tree(sel, t);
            bool tree_was_open = false;
            bool tree_open = false;
            for (std::size_t si = 0; si < signs.size(); ++si) {
                std::uint8_t& f = flags[t * signs.size() + si];
                if (!f) continue;
                tree_was_open = true;
                const double s = signs[si];
                if (compared) {
                    const double c = tr.base_y + s * sy.total;
                    const double e = tr.base_eta + s * se.total;
                    acc.add(c, e, tr.base_eta_scale + se.pos - se.neg, f & kMinSide, f & kMaxSide, [&] {
                        return ConstraintId{t, {node.items.begin(), node.items.end()}, static_cast<int>(s)};
                    });
                }
                if (options.pruning) {
                    // Bounds over every descendant l': tau_l'^T z lies in [neg, pos] of the node.
                    const double c_lo = tr.base_y + (s > 0 ? sy.neg : -sy.pos);
                    const double e_lo = tr.base_eta + (s > 0 ? se.neg : -se.pos);
                    const double e_hi = tr.base_eta + (s > 0 ? se.pos : -se.neg);
                    if ((f & kMinSide) &&
                        (e_hi <= 0.0 || (c_lo >= 0.0 && -c_lo / e_hi <= acc.theta_min))) {
                        f &= static_cast<std::uint8_t>(~kMinSide);
                    }
                    if ((f & kMaxSide) &&
                        (e_lo >= 0.0 || (c_lo >= 0.0 && -c_lo / e_lo >= acc.theta_max))) {
                        f &= static_cast<std::uint8_t>(~kMaxSide);
                    }
                }
                tree_open = tree_open || f != 0;
            }
            if (tree_was_open && !tree_open) ++stats.closed_per_tree[t];
            any_open = any_open || tree_open;
        }
        return any_open ? Visit::Continue : Visit::Prune;
    });

    return {acc.finish(q), std::move(stats)};
}

SearchResult search_interval(const TransactionDatabase& db, const EventSpec& spec, const LineQuery& q,
                             const SearchOptions& options) {
    return search_interval(ItemsetTree(db, spec.max_size()), spec, q, options);
}

TruncationInterval oracle_interval(std::span<const HalfSpace> halfspaces, const LineQuery& q) {
    IntervalAccumulator acc(consistency_tolerance(q.y));
    for (const auto& h : halfspaces) {
        if (h.a.size() != q.y.size()) throw ValidationError("half-space length does not match n");
        const double c = selpat::dot(std::span<const double>(h.a), std::span<const double>(q.y));
        double e = 0.0;
        double e_scale = 0.0;
        for (std::size_t i = 0; i < h.a.size(); ++i) {
            e += h.a[i] * q.eta[i];
            e_scale += std::abs(h.a[i] * q.eta[i]);
        }
        acc.add(c, e, e_scale, true, true, [&] {
            return ConstraintId{h.tree, {h.compared.items().begin(), h.compared.items().end()}, h.sign};
        });
    }
    return acc.finish(q);
}

TruncationInterval unpruned_interval(const PatternEnumerator& tree, const EventSpec& spec, const LineQuery& q,
                                     const MaterializeOptions& cap,
                                     std::optional<std::chrono::steady_clock::time_point> deadline) {
    try {
        const auto halfspaces = materialize(tree, spec, cap);
        if (deadline && std::chrono::steady_clock::now() > *deadline) throw TimeoutError("materialization timed out");
        return oracle_interval(halfspaces, q);
    } catch (const CapExceededError&) {
        return search_interval(tree, spec, q, SearchOptions{false, deadline}).interval;
    }
}

} // namespace selpat
