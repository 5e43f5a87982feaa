#pragma once

// Independent reference implementations used as test oracles. Nothing here
// goes through the library's tree, miner, basis or search code: patterns are
// enumerated by plain recursion, occurrences are dense 0/1 vectors built from
// the transactions, and projections come from an SVD.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "selpat/dataset.hpp"
#include "selpat/error.hpp"
#include "selpat/miner.hpp"
#include "selpat/pattern_tree.hpp"

namespace oracle {

using selpat::Item;
using selpat::Pattern;

inline selpat::TransactionDatabase random_db(std::size_t n, std::size_t d, double density, std::uint64_t seed,
                                             bool center = true, double sigma = 1.0) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution present(density);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<std::vector<Item>> tx(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            if (present(rng)) tx[i].push_back(static_cast<Item>(j));
        }
        y[i] = noise(rng);
    }
    selpat::TransactionDatabase::Options opts;
    opts.center = center;
    opts.num_items = d;
    opts.sigma = sigma;
    return selpat::TransactionDatabase(std::move(tx), std::move(y), opts);
}

/// Every itemset of size 1..r over d items, by recursion.
inline std::vector<Pattern> all_patterns(std::size_t d, std::size_t r) {
    std::vector<Pattern> out;
    std::vector<Item> cur;
    auto rec = [&](auto&& self, std::size_t start) -> void {
        for (std::size_t j = start; j < d; ++j) {
            cur.push_back(static_cast<Item>(j));
            out.emplace_back(cur);
            if (cur.size() < r) self(self, j + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

inline std::vector<double> dense_occurrence(const selpat::TransactionDatabase& db, const Pattern& p) {
    std::vector<double> tau(db.n(), 0.0);
    for (std::size_t i = 0; i < db.n(); ++i) {
        const auto t = db.transaction(i);
        if (std::includes(t.begin(), t.end(), p.items().begin(), p.items().end())) tau[i] = 1.0;
    }
    return tau;
}

inline double dense_dot(const std::vector<double>& a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Score summed in index order over the occurring transactions.
inline double dense_score(const std::vector<double>& tau, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (tau[i] != 0.0) s += y[i];
    }
    return s;
}

struct Scored {
    Pattern pattern;
    double score;
};

/// Top-k by score (positive) or |score| (signed), ties by items ascending.
inline std::vector<Scored> brute_top_k(const selpat::TransactionDatabase& db, std::size_t r, std::size_t k,
                                       bool absolute) {
    std::vector<Scored> all;
    for (auto& p : all_patterns(db.d(), r)) {
        const double s = dense_score(dense_occurrence(db, p), db.y());
        all.push_back({std::move(p), s});
    }
    std::stable_sort(all.begin(), all.end(), [&](const Scored& a, const Scored& b) {
        const double ka = absolute ? std::abs(a.score) : a.score;
        const double kb = absolute ? std::abs(b.score) : b.score;
        if (ka != kb) return ka > kb;
        return a.pattern < b.pattern;
    });
    all.resize(std::min(k, all.size()));
    return all;
}

inline Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& columns, std::size_t n) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = columns[j][i];
    }
    return x;
}

/// Moore-Penrose pseudo-inverse by SVD.
inline Eigen::MatrixXd svd_pinv(const Eigen::MatrixXd& x) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double tol = 1e-10 * (s.size() ? s(0) : 0.0);
    Eigen::VectorXd inv(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) inv(i) = s(i) > tol ? 1.0 / s(i) : 0.0;
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// I - X X^+, the projector onto the orthogonal complement of the columns.
inline Eigen::MatrixXd complement_projector(const std::vector<std::vector<double>>& columns, std::size_t n) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    if (columns.empty()) return p;
    const Eigen::MatrixXd x = to_matrix(columns, n);
    return p - x * svd_pinv(x);
}

inline Eigen::VectorXd as_vector(std::span<const double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
    return out;
}

inline std::size_t matrix_rank(const std::vector<std::vector<double>>& columns, std::size_t n) {
    if (columns.empty()) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_matrix(columns, n));
    svd.setThreshold(1e-10);
    return static_cast<std::size_t>(svd.rank());
}

struct SequentialStep {
    Pattern pattern;
    double score;
};

/// Greedy selection by |residual correlation| among patterns that raise the
/// rank, residuals from an SVD refit, ties by items ascending.
inline std::vector<SequentialStep> brute_sequential(const selpat::TransactionDatabase& db, std::size_t r,
                                                    std::size_t k) {
    const auto patterns = all_patterns(db.d(), r);
    std::vector<std::vector<double>> taus;
    for (const auto& p : patterns) taus.push_back(dense_occurrence(db, p));
    const Eigen::VectorXd y = as_vector(db.y());

    std::vector<std::vector<double>> chosen;
    std::vector<bool> used(patterns.size(), false);
    std::vector<SequentialStep> out;
    for (std::size_t h = 0; h < k; ++h) {
        const Eigen::VectorXd res = complement_projector(chosen, db.n()) * y;
        const std::size_t rank = matrix_rank(chosen, db.n());
        std::size_t best = patterns.size();
        double best_abs = -1.0;
        double best_score = 0.0;
        for (std::size_t j = 0; j < patterns.size(); ++j) {
            if (used[j]) continue;
            auto trial = chosen;
            trial.push_back(taus[j]);
            if (matrix_rank(trial, db.n()) <= rank) continue;
            const double s = as_vector(taus[j]).dot(res);
            if (std::abs(s) > best_abs) {
                best = j;
                best_abs = std::abs(s);
                best_score = s;
            }
        }
        if (best == patterns.size()) break;
        used[best] = true;
        chosen.push_back(taus[best]);
        out.push_back({patterns[best], best_score});
    }
    return out;
}

/// Every constraint of the selection event written out densely from its definition.
inline std::vector<std::vector<double>> dense_constraints(const selpat::TransactionDatabase& db,
                                                          const selpat::DiscoveryResult& disc, std::size_t r) {
    const auto patterns = all_patterns(db.d(), r);
    const std::size_t n = db.n();
    std::vector<std::vector<double>> out;
    std::vector<std::vector<double>> previous;
    for (std::size_t t = 0; t < disc.selected.size(); ++t) {
        const auto& sel = disc.selected[t];
        const auto tau_t = dense_occurrence(db, sel.pattern);
        Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        if (disc.mode == selpat::Mode::Sequential) proj = complement_projector(previous, n);
        const double sgn = disc.mode == selpat::Mode::Positive ? 1.0 : sel.sign;
        const Eigen::VectorXd base = sgn * (proj * as_vector(tau_t));

        for (const auto& p : patterns) {
            bool excluded = false;
            for (std::size_t u = 0; u < disc.selected.size(); ++u) {
                // Each pattern meets itself, which pins the sign of its score.
                const bool counts = u != t && (disc.mode == selpat::Mode::Sequential ? u < t : true);
                if (counts && disc.selected[u].pattern == p) excluded = true;
            }
            if (excluded) continue;
            const Eigen::VectorXd other = proj * as_vector(dense_occurrence(db, p));
            std::vector<int> signs = disc.mode == selpat::Mode::Positive ? std::vector<int>{-1} : std::vector<int>{1, -1};
            const double scale = std::max(base.cwiseAbs().maxCoeff(), other.cwiseAbs().maxCoeff());
            for (int s : signs) {
                const Eigen::VectorXd a = base + s * other;
                // Vanishes in exact arithmetic (equal projected columns).
                if (a.cwiseAbs().maxCoeff() <= 1e-10 * scale) continue;
                out.emplace_back(a.data(), a.data() + a.size());
            }
        }
        previous.push_back(tau_t);
    }
    return out;
}

struct Bounds {
    double theta_min = -std::numeric_limits<double>::infinity();
    double theta_max = std::numeric_limits<double>::infinity();
};

/// Direct line search over explicit constraints a^T (y + theta eta) >= 0.
inline Bounds line_bounds(const std::vector<std::vector<double>>& constraints, std::span<const double> y,
                          std::span<const double> eta) {
    Bounds b;
    for (const auto& a : constraints) {
        const double c = std::max(0.0, dense_dot(a, y));
        double e = 0.0;
        double scale = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            e += a[i] * eta[i];
            scale += std::abs(a[i] * eta[i]);
        }
        // Zero in exact arithmetic: the constraint does not restrict the line.
        if (std::abs(e) <= 1e-10 * scale) continue;
        if (e > 1e-300) b.theta_min = std::max(b.theta_min, -c / e);
        if (e < -1e-300) b.theta_max = std::min(b.theta_max, -c / e);
    }
    return b;
}

/// Equal to a relative 1e-9, or both beyond 1e8 in magnitude on the same side
/// (a denominator that is zero in exact arithmetic may round to either side of zero).
inline bool same_bound(double a, double b, double rel = 1e-9) {
    if (a == b) return true;
    if (std::abs(a) > 1e8 && std::abs(b) > 1e8) return (a > 0) == (b > 0);
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

/// A random instance with n <= 30, d <= 10, r <= 3 and k <= 5.
struct Instance {
    selpat::TransactionDatabase db;
    std::size_t r;
    selpat::DiscoveryResult disc;
};

inline Instance random_instance(std::uint64_t seed, selpat::Mode mode) {
    std::mt19937_64 rng(seed);
    const std::size_t n = 8 + rng() % 23;  // 8..30
    const std::size_t d = 3 + rng() % 8;   // 3..10
    const std::size_t r = 1 + rng() % 3;   // 1..3
    const double density = 0.3 + 0.4 * std::uniform_real_distribution<double>()(rng);
    auto db = random_db(n, d, density, seed * 7919 + 1);
    const std::size_t k = std::min<std::size_t>(1 + rng() % 5, selpat::pattern_count(d, r));
    try {
        auto disc = selpat::mine(db, r, k, mode);
        return {std::move(db), r, std::move(disc)};
    } catch (const selpat::ValidationError&) {
        // Too few independent columns for the greedy miner: ask for one.
        auto disc = selpat::mine(db, r, 1, mode);
        return {std::move(db), r, std::move(disc)};
    }
}

} // namespace oracle
