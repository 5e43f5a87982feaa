#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "selpat/bitvec.hpp"
#include "selpat/dataset.hpp"
#include "selpat/linalg.hpp"
#include "selpat/miner.hpp"
#include "selpat/pattern_tree.hpp"

namespace selpat {

/// a^T y >= 0.
struct HalfSpace {
    std::vector<double> a;
    /// Diagnostics: which tree (selected pattern or step), which compared
    /// pattern, and the sign s in (base + s * tau').
    std::size_t tree = 0;
    Pattern compared;
    int sign = -1;
};

/// The event "these patterns (and signs) were discovered", independent of the
/// response vector it is evaluated against.
///
/// Every constraint has the form (base_t + s * M_t tau')^T y >= 0 where t
/// indexes a tree (a selected pattern, or a step in sequential mode), tau' is
/// the occurrence of a compared pattern and s is +1 or -1:
///   positive:   base_t = tau_t,              M_t = I,        s = -1
///   signed:     base_t = sgn_t tau_t,        M_t = I,        s = +-1
///   sequential: base_t = sgn_t P_{t-1} tau_t, M_t = P_{t-1}, s = +-1
/// with P_h the projector onto the orthogonal complement of the first h
/// selected columns. Compared patterns exclude every selected pattern
/// (positive/signed) or the patterns selected up to and including step t.
class EventSpec {
public:
    EventSpec(const DiscoveryResult& discovery, std::size_t max_size);

    Mode mode() const noexcept { return mode_; }
    std::size_t k() const noexcept { return selected_.size(); }
    std::size_t max_size() const noexcept { return max_size_; }
    std::size_t n() const noexcept { return n_; }
    const std::vector<Discovery>& selected() const noexcept { return selected_; }

    std::size_t num_trees() const noexcept { return selected_.size(); }
    std::span<const int> constraint_signs() const noexcept;

    /// Index of the pattern among the selected ones, or -1.
    int selection_index(std::span<const Item> items) const noexcept;
    /// Whether a pattern with the given selection index is compared in tree t.
    /// A selected pattern meets its own tree, which pins its sign.
    bool compared_in_tree(int selection_index, std::size_t tree) const noexcept;

    /// M_t^T v (M_t is symmetric).
    std::vector<double> project(std::span<const double> v, std::size_t tree) const;
    /// base_t as a dense vector.
    std::vector<double> base(std::size_t tree) const;
    /// Number of distinct M_t; trees share index 0 outside sequential mode.
    std::size_t projection_group(std::size_t tree) const noexcept { return mode_ == Mode::Sequential ? tree : 0; }
    std::size_t num_projection_groups() const noexcept { return mode_ == Mode::Sequential ? k() : 1; }

private:
    Mode mode_;
    std::size_t max_size_;
    std::size_t n_;
    std::vector<Discovery> selected_;
    OrthonormalBasis basis_;
    std::vector<std::size_t> rank_before_;
};

/// Constraint family specialised to a line y + theta * eta: per tree the
/// scalars base_t^T y and base_t^T eta, per projection group the vectors
/// M^T y and M^T eta. Built once per query.
struct LineFamily {
    struct Tree {
        std::size_t group = 0;
        double base_y = 0.0;
        double base_eta = 0.0;
        /// Sum of the magnitudes of the terms of base_eta.
        double base_eta_scale = 0.0;
    };
    struct Group {
        std::vector<double> z_y;
        std::vector<double> z_eta;
    };

    LineFamily(const EventSpec& spec, std::span<const double> y, std::span<const double> eta);

    const EventSpec* spec;
    std::vector<Tree> trees;
    std::vector<Group> groups;
};

struct MaterializeOptions {
    std::uint64_t cap = 1'000'000;
};

/// Every non-vacuous constraint of the event. Refuses (CapExceededError) when
/// the pattern count exceeds the cap; the lazy path in truncation_search has
/// no such limit.
std::vector<HalfSpace> materialize(const PatternEnumerator& tree, const EventSpec& spec,
                                   const MaterializeOptions& options = {});
std::vector<HalfSpace> materialize(const TransactionDatabase& db, const EventSpec& spec,
                                   const MaterializeOptions& options = {});

/// True iff y satisfies every constraint to within 1e-9. Stops at the first violation.
bool verify_observed(const PatternEnumerator& tree, const EventSpec& spec, std::span<const double> y);
bool verify_observed(const TransactionDatabase& db, const EventSpec& spec);

} // namespace selpat
