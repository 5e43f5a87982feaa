#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "selpat/bitvec.hpp"

namespace selpat {

/// Orthonormal basis of the span of a growing set of columns, maintained by
/// modified Gram-Schmidt with one re-orthogonalization pass. Columns whose
/// residual norm falls below a relative tolerance are reported as dependent
/// and leave the basis unchanged.
class OrthonormalBasis {
public:
    explicit OrthonormalBasis(std::size_t n, double rel_tol = 1e-10) : n_(n), rel_tol_(rel_tol) {}

    std::size_t dim() const noexcept { return n_; }
    std::size_t rank() const noexcept { return q_.size(); }
    std::span<const double> vector(std::size_t i) const noexcept { return q_[i]; }

    /// Appends the column; returns false when it lies in the current span.
    /// r_column receives the coefficients of the column in the basis
    /// (length rank() before the call, plus the new diagonal when independent).
    bool add(std::span<const double> column, std::vector<double>* r_column = nullptr);

    /// v - Q Q^T v, restricted to the first `use` basis vectors.
    std::vector<double> project_out(std::span<const double> v, std::size_t use) const;
    std::vector<double> project_out(std::span<const double> v) const { return project_out(v, rank()); }

    /// Squared norm of the part of a 0/1 column orthogonal to the basis.
    double residual_norm2(const BitVec& tau) const;

private:
    std::size_t n_;
    double rel_tol_;
    std::vector<std::vector<double>> q_;
};

/// Minimum-norm pseudo-inverse of the n x h matrix whose columns are given,
/// returned row-major as h rows of length n.
std::vector<std::vector<double>> pseudo_inverse_rows(const std::vector<std::vector<double>>& columns);

/// Minimum-norm least-squares coefficients of y on the given columns.
std::vector<double> least_squares(const std::vector<std::vector<double>>& columns, std::span<const double> y);

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double norm2(std::span<const double> a) noexcept;

} // namespace selpat
