#pragma once

// Test-only independent oracles. These deliberately avoid the closed forms
// used by the library so they can serve as a second route.

#include <cmath>
#include <utility>

namespace oracles {

/// theta(s,t) = integral_0^1 s^a t^(1-a) da by composite Simpson quadrature.
inline double logmean_quadrature(double s, double t, int panels = 4096) {
    auto f = [&](double a) { return std::pow(s, a) * std::pow(t, 1.0 - a); };
    const double h = 1.0 / panels;
    double acc = f(0.0) + f(1.0);
    for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return acc * h / 3.0;
}

/// Central finite differences of a scalar binary function.
template <typename F>
std::pair<double, double> central_partials(F&& f, double s, double t, double step = 1e-6) {
    const double hs = step * std::max(1.0, std::abs(s));
    const double ht = step * std::max(1.0, std::abs(t));
    return {(f(s + hs, t) - f(s - hs, t)) / (2.0 * hs),
            (f(s, t + ht) - f(s, t - ht)) / (2.0 * ht)};
}

} // namespace oracles
