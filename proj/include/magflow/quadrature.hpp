#pragma once

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace magflow {

/// Adaptive 15-point Gauss-Kronrod quadrature with an absolute tolerance.
/// Boost terminates on error <= tol * L1, so the L1 norm is estimated with
/// one fixed rule first and the relative target derived from it.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double abs_tol,
                          unsigned max_depth = 30) {
    using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
    if (a == b) return 0.0;
    double l1 = 0.0;
    Rule::integrate(f, a, b, 0, 0.0, nullptr, &l1);
    const double rel = std::clamp(abs_tol / std::max(l1, abs_tol), 1e-15, 1.0);
    return Rule::integrate(f, a, b, max_depth, rel);
}

}  // namespace magflow
