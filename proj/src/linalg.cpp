#include "selpat/linalg.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace selpat {

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) noexcept { return dot(a, a); }

bool OrthonormalBasis::add(std::span<const double> column, std::vector<double>* r_column) {
    std::vector<double> v(column.begin(), column.end());
    const double original = std::sqrt(norm2(v));
    std::vector<double> coeffs(q_.size(), 0.0);
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < q_.size(); ++j) {
            const double c = dot(q_[j], v);
            coeffs[j] += c;
            for (std::size_t i = 0; i < n_; ++i) v[i] -= c * q_[j][i];
        }
    }
    const double rest = std::sqrt(norm2(v));
    const bool independent = original > 0.0 && rest > rel_tol_ * original;
    if (independent) {
        for (double& x : v) x /= rest;
        q_.push_back(std::move(v));
        coeffs.push_back(rest);
    }
    if (r_column) *r_column = std::move(coeffs);
    return independent;
}

std::vector<double> OrthonormalBasis::project_out(std::span<const double> v, std::size_t use) const {
    std::vector<double> out(v.begin(), v.end());
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < use; ++j) {
            const double c = dot(q_[j], out);
            for (std::size_t i = 0; i < n_; ++i) out[i] -= c * q_[j][i];
        }
    }
    return out;
}

double OrthonormalBasis::residual_norm2(const BitVec& tau) const {
    const auto dense = tau.to_dense();
    return norm2(project_out(dense));
}

namespace {

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& columns) {
    const auto h = static_cast<Eigen::Index>(columns.size());
    const auto n = h ? static_cast<Eigen::Index>(columns[0].size()) : 0;
    Eigen::MatrixXd g(n, h);
    for (Eigen::Index j = 0; j < h; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) g(i, j) = columns[j][i];
    }
    return g;
}

} // namespace

std::vector<std::vector<double>> pseudo_inverse_rows(const std::vector<std::vector<double>>& columns) {
    if (columns.empty()) return {};
    const Eigen::MatrixXd g = to_matrix(columns);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(g);
    const Eigen::MatrixXd pinv = cod.pseudoInverse();
    std::vector<std::vector<double>> rows(pinv.rows(), std::vector<double>(pinv.cols()));
    for (Eigen::Index j = 0; j < pinv.rows(); ++j) {
        for (Eigen::Index i = 0; i < pinv.cols(); ++i) rows[j][i] = pinv(j, i);
    }
    return rows;
}

std::vector<double> least_squares(const std::vector<std::vector<double>>& columns, std::span<const double> y) {
    if (columns.empty()) return {};
    const Eigen::MatrixXd g = to_matrix(columns);
    const Eigen::Map<const Eigen::VectorXd> rhs(y.data(), static_cast<Eigen::Index>(y.size()));
    const Eigen::VectorXd beta = g.completeOrthogonalDecomposition().solve(rhs);
    return {beta.data(), beta.data() + beta.size()};
}

} // namespace selpat
