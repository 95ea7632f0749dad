#pragma once

#include "curvlab/errors.hpp"

#include <cmath>
#include <utility>

namespace curvlab {

/// Neumaier compensated accumulator. The Hessian form is a difference of
/// large terms near the curvature infimum, so all bulk sums go through this.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }

    double value() const { return sum + comp; }
};

inline bool rel_close(double a, double b, double rtol, double atol) {
    return std::abs(a - b) <= atol + rtol * std::max(std::abs(a), std::abs(b));
}

namespace detail {

// Relative spread below which the quotient forms of theta and its partials
// cancel; the series below is exact to machine precision well past this cut.
inline constexpr double kLogMeanTaylorCut = 1e-2;

// theta(s,t) = m * g(z) with m = (s+t)/2, z = (s-t)/(s+t),
// g(z) = 1 - z^2/3 - 4 z^4/45 - 44 z^6/945 + O(z^8).
inline double logmean_g(double z2) {
    return 1.0 - z2 * (1.0 / 3.0 + z2 * (4.0 / 45.0 + z2 * (44.0 / 945.0)));
}

inline double logmean_gprime(double z) {
    const double z2 = z * z;
    return -z * (2.0 / 3.0 + z2 * (16.0 / 45.0 + z2 * (88.0 / 315.0)));
}

// d1 theta = (g(z) + (1-z) g'(z)) / 2; the mirror z -> -z gives d2.
inline double logmean_d1_series(double z) {
    return 0.5 * (logmean_g(z * z) + (1.0 - z) * logmean_gprime(z));
}

} // namespace detail

/// Logarithmic mean theta(s,t) = (s-t)/(log s - log t), theta(t,t) = t,
/// extended by continuity with theta(0,t) = 0. Exactly symmetric in (s,t).
inline double log_mean(double s, double t) {
    if (s < 0.0 || t < 0.0) throw DomainError("log_mean: negative argument");
    if (s == 0.0 || t == 0.0) return 0.0;
    if (s == t) return s;
    const double hi = std::max(s, t);
    const double lo = std::min(s, t);
    if (hi - lo <= detail::kLogMeanTaylorCut * hi) {
        const double z = (hi - lo) / (hi + lo);
        return 0.5 * (hi + lo) * detail::logmean_g(z * z);
    }
    return (hi - lo) / std::log1p((hi - lo) / lo);
}

/// Partial derivatives (d1, d2) of the logarithmic mean at (s,t), s,t > 0.
/// They satisfy s*d1 + t*d2 = theta(s,t) and d1(s,t) = d2(t,s) exactly.
inline std::pair<double, double> log_mean_partials(double s, double t) {
    if (!(s > 0.0) || !(t > 0.0))
        throw DomainError("log_mean_partials: arguments must be positive");
    if (s == t) return {0.5, 0.5};
    const double hi = std::max(s, t);
    const double lo = std::min(s, t);
    double d_hi, d_lo;
    if (hi - lo <= detail::kLogMeanTaylorCut * hi) {
        const double z = (hi - lo) / (hi + lo);
        d_hi = detail::logmean_d1_series(z);
        d_lo = detail::logmean_d1_series(-z);
    } else {
        const double d = std::log1p((hi - lo) / lo);
        const double theta = (hi - lo) / d;
        d_hi = (1.0 - theta / hi) / d;
        d_lo = (theta / lo - 1.0) / d;
    }
    return s >= t ? std::pair{d_hi, d_lo} : std::pair{d_lo, d_hi};
}

} // namespace curvlab
