#pragma once

namespace selpat {

/// Standard normal upper tail 1 - Phi(z), accurate in relative terms for large z.
double normal_sf(double z);
/// log(1 - Phi(z)); finite for every finite z.
double log_normal_sf(double z);
double normal_cdf(double z);

/// N(mean, sd^2) truncated to [lower, upper]; bounds may be infinite.
struct TruncatedNormal {
    double mean = 0.0;
    double sd = 1.0;
    double lower;
    double upper;

    /// Throws ValidationError for sd <= 0, InvalidIntervalError for lower >= upper.
    TruncatedNormal(double mean, double sd, double lower, double upper);

    /// P(X > x). x is clamped into [lower, upper].
    double sf(double x) const;
    /// P(X < x). x is clamped into [lower, upper].
    double cdf(double x) const;
    bool contains(double x) const noexcept { return x >= lower && x <= upper; }
};

} // namespace selpat
