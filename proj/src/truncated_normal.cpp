#include "selpat/truncated_normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "selpat/error.hpp"

namespace selpat {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Mills ratio (1 - Phi(z)) / phi(z) by backward evaluation of the continued
// fraction 1 / (z + 1 / (z + 2 / (z + 3 / (z + ...)))). Only used for z >= 30,
// where 60 terms are far beyond convergence.
double mills_ratio(double z) {
    double tail = z;
    for (int k = 60; k >= 1; --k) tail = z + k / tail;
    return 1.0 / tail;
}

// P(lo < Z < hi) for lo < hi, arranged so that no branch subtracts two
// probabilities close to one.
double upper_mass(double lo, double hi) {
    if (lo >= 0.0) return normal_sf(lo) - normal_sf(hi);
    if (hi <= 0.0) return normal_sf(-hi) - normal_sf(-lo);
    return 0.5 * (std::erf(hi * kInvSqrt2) - std::erf(lo * kInvSqrt2));
}

} // namespace

double normal_sf(double z) {
    if (z < 30.0) return 0.5 * std::erfc(z * kInvSqrt2);
    return std::exp(log_normal_sf(z));
}

double normal_cdf(double z) { return normal_sf(-z); }

double log_normal_sf(double z) {
    if (z == kInf) return -kInf;
    if (z == -kInf) return 0.0;
    if (z < 0.0) return std::log1p(-0.5 * std::erfc(-z * kInvSqrt2));
    if (z < 30.0) return std::log(0.5 * std::erfc(z * kInvSqrt2));
    const double log_pdf = -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi);
    return log_pdf + std::log(mills_ratio(z));
}

TruncatedNormal::TruncatedNormal(double mean_, double sd_, double lower_, double upper_)
    : mean(mean_), sd(sd_), lower(lower_), upper(upper_) {
    if (!(sd > 0.0) || !std::isfinite(sd)) throw ValidationError("standard deviation must be positive");
    if (std::isnan(lower) || std::isnan(upper) || !(lower < upper)) {
        throw InvalidIntervalError("truncation interval requires L < U");
    }
}

double TruncatedNormal::sf(double x) const {
    x = std::clamp(x, lower, upper);
    const double a = (lower - mean) / sd;
    const double b = (upper - mean) / sd;
    const double t = (x - mean) / sd;
    if (t >= b) return 0.0;
    if (t <= a) return 1.0;
    if (a == -kInf && b == kInf) return normal_sf(t);

    if (a >= 0.0) {
        // Entire interval in the upper tail: ratios of log survival values.
        const double la = log_normal_sf(a);
        const double lt = log_normal_sf(t);
        const double lb = log_normal_sf(b);
        const double num = -std::expm1(lb - lt);
        const double den = -std::expm1(lb - la);
        return std::clamp(std::exp(lt - la) * num / den, 0.0, 1.0);
    }
    if (b <= 0.0) {
        // Mirror into the upper tail: P(t < Z < b) / P(a < Z < b) with -b <= -t <= -a.
        const double l_hi = log_normal_sf(-b);
        const double l_t = log_normal_sf(-t);
        const double l_lo = log_normal_sf(-a);
        return std::clamp(std::expm1(l_t - l_hi) / std::expm1(l_lo - l_hi), 0.0, 1.0);
    }
    return std::clamp(upper_mass(t, b) / upper_mass(a, b), 0.0, 1.0);
}

double TruncatedNormal::cdf(double x) const {
    return TruncatedNormal(-mean, sd, -upper, -lower).sf(-x);
}

} // namespace selpat
