#include "selpat/selection_event.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "selpat/error.hpp"

namespace selpat {

namespace {

constexpr std::array<int, 1> kPositiveSigns{-1};
constexpr std::array<int, 2> kPairedSigns{+1, -1};
constexpr double kObservedTolerance = 1e-9;
// Constraint vectors this small relative to their two parts are rounding noise.
constexpr double kVacuous = 1e-10;

} // namespace

EventSpec::EventSpec(const DiscoveryResult& discovery, std::size_t max_size)
    : mode_(discovery.mode),
      max_size_(max_size),
      n_(discovery.selected.empty() ? 0 : discovery.selected.front().occurrence.size()),
      selected_(discovery.selected),
      basis_(n_) {
    if (selected_.empty()) throw ValidationError("selection event needs at least one discovered pattern");
    if (mode_ == Mode::Sequential) {
        for (const auto& d : selected_) {
            rank_before_.push_back(basis_.rank());
            basis_.add(d.occurrence.to_dense());
        }
    }
}

std::span<const int> EventSpec::constraint_signs() const noexcept {
    if (mode_ == Mode::Positive) return kPositiveSigns;
    return kPairedSigns;
}

int EventSpec::selection_index(std::span<const Item> items) const noexcept {
    for (std::size_t i = 0; i < selected_.size(); ++i) {
        const auto sel = selected_[i].pattern.items();
        if (sel.size() == items.size() && std::equal(sel.begin(), sel.end(), items.begin())) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

bool EventSpec::compared_in_tree(int selection_index, std::size_t tree) const noexcept {
    if (selection_index < 0) return true;
    // Comparing a pattern with itself leaves only its sign constraint, or nothing when positive.
    if (mode_ == Mode::Positive) return false;
    const auto i = static_cast<std::size_t>(selection_index);
    return i == tree || (mode_ == Mode::Sequential && i > tree);
}

std::vector<double> EventSpec::project(std::span<const double> v, std::size_t tree) const {
    if (mode_ != Mode::Sequential) return {v.begin(), v.end()};
    return basis_.project_out(v, rank_before_[tree]);
}

std::vector<double> EventSpec::base(std::size_t tree) const {
    const auto& d = selected_[tree];
    std::vector<double> b = project(d.occurrence.to_dense(), tree);
    if (mode_ != Mode::Positive && d.sign < 0) {
        for (double& x : b) x = -x;
    }
    return b;
}

LineFamily::LineFamily(const EventSpec& spec_, std::span<const double> y, std::span<const double> eta)
    : spec(&spec_) {
    if (y.size() != spec_.n() || eta.size() != spec_.n()) {
        throw ValidationError("line query length does not match the selection event");
    }
    groups.resize(spec_.num_projection_groups());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        groups[g].z_y = spec_.project(y, g);
        groups[g].z_eta = spec_.project(eta, g);
    }
    trees.resize(spec_.num_trees());
    for (std::size_t t = 0; t < trees.size(); ++t) {
        const auto& d = spec_.selected()[t];
        const std::size_t g = spec_.projection_group(t);
        // base_t^T v = sgn * tau_t^T (M_t v) since M_t is a symmetric projector.
        const double sgn = (spec_.mode() != Mode::Positive && d.sign < 0) ? -1.0 : 1.0;
        trees[t].group = g;
        trees[t].base_y = sgn * selpat::dot(d.occurrence, groups[g].z_y);
        const auto eta_sums = signed_sums(d.occurrence, groups[g].z_eta);
        trees[t].base_eta = sgn * eta_sums.total;
        trees[t].base_eta_scale = eta_sums.pos - eta_sums.neg;
    }
}

std::vector<HalfSpace> materialize(const PatternEnumerator& tree, const EventSpec& spec,
                                   const MaterializeOptions& options) {
    if (tree.num_transactions() != spec.n()) throw ValidationError("enumerator does not match the event");
    std::uint64_t count = 0;
    tree.traverse([&](const NodeView&) { return ++count > options.cap ? Visit::Prune : Visit::Continue; });
    if (count > options.cap) {
        throw CapExceededError("pattern count exceeds the materialization cap of " + std::to_string(options.cap) +
                               "; use the lazy search instead");
    }

    std::vector<std::vector<double>> bases;
    for (std::size_t t = 0; t < spec.num_trees(); ++t) bases.push_back(spec.base(t));

    std::vector<HalfSpace> out;
    tree.traverse([&](const NodeView& node) {
        const int sel = spec.selection_index(node.items);
        const auto dense = node.occurrence.to_dense();
        for (std::size_t t = 0; t < spec.num_trees(); ++t) {
            if (!spec.compared_in_tree(sel, t)) continue;
            const auto m_tau = spec.project(dense, t);
            double scale = 0.0;
            for (std::size_t i = 0; i < spec.n(); ++i) scale = std::max({scale, std::abs(bases[t][i]), std::abs(m_tau[i])});
            for (int s : spec.constraint_signs()) {
                HalfSpace h;
                h.a.resize(spec.n());
                double largest = 0.0;
                for (std::size_t i = 0; i < spec.n(); ++i) {
                    h.a[i] = bases[t][i] + s * m_tau[i];
                    largest = std::max(largest, std::abs(h.a[i]));
                }
                // Zero in exact arithmetic (equal projected columns): the constraint is vacuous.
                if (largest <= kVacuous * scale) continue;
                h.tree = t;
                h.compared = node.pattern();
                h.sign = s;
                out.push_back(std::move(h));
            }
        }
        return Visit::Continue;
    });
    return out;
}

std::vector<HalfSpace> materialize(const TransactionDatabase& db, const EventSpec& spec,
                                   const MaterializeOptions& options) {
    return materialize(ItemsetTree(db, spec.max_size()), spec, options);
}

bool verify_observed(const PatternEnumerator& tree, const EventSpec& spec, std::span<const double> y) {
    const std::vector<double> zero(y.size(), 0.0);
    const LineFamily family(spec, y, zero);
    std::vector<double> node_y(family.groups.size());
    bool ok = true;
    tree.traverse([&](const NodeView& node) {
        if (!ok) return Visit::Prune;
        const int sel = spec.selection_index(node.items);
        for (std::size_t g = 0; g < family.groups.size(); ++g) {
            node_y[g] = selpat::dot(node.occurrence, family.groups[g].z_y);
        }
        for (std::size_t t = 0; t < family.trees.size() && ok; ++t) {
            if (!spec.compared_in_tree(sel, t)) continue;
            const auto& tr = family.trees[t];
            for (int s : spec.constraint_signs()) {
                if (tr.base_y + s * node_y[tr.group] < -kObservedTolerance) ok = false;
            }
        }
        return ok ? Visit::Continue : Visit::Prune;
    });
    return ok;
}

bool verify_observed(const TransactionDatabase& db, const EventSpec& spec) {
    return verify_observed(ItemsetTree(db, spec.max_size()), spec, db.y());
}

} // namespace selpat
