#pragma once
// Independent reference computations for the test suite.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>

namespace oracle {

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                           double fm, double fb, double whole, double tol, int depth, int forced) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || (forced <= 0 && std::abs(delta) <= 15.0 * tol)) return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, forced - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, forced - 1);
}

/// Adaptive Simpson with Richardson correction, absolute tolerance `tol`.
/// The first five levels are always split so coincidental early agreement
/// cannot end the refinement.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int depth = 40) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, depth, 5);
}

/// K(k) from its defining integral.
inline double complete_K(double k) {
    return adaptive_simpson(
        [k](double phi) { return 1.0 / std::sqrt(1.0 - k * k * std::sin(phi) * std::sin(phi)); },
        0.0, 0.5 * std::numbers::pi, 1e-14);
}

/// int_{za}^{zb} dz / sqrt((1 - z^2)(2E - (p - z)^2)) for za, zb inside the
/// oval [lo, hi], via z = mid + half sin(theta).
inline double oval_integral(double lo, double hi, double outer_a, double outer_b, double za,
                            double zb) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    auto theta_of = [&](double z) {
        if (z <= lo) return -0.5 * std::numbers::pi;
        if (z >= hi) return 0.5 * std::numbers::pi;
        return std::asin(std::clamp((z - mid) / half, -1.0, 1.0));
    };
    return adaptive_simpson(
        [&](double th) {
            const double z = mid + half * std::sin(th);
            return 1.0 / std::sqrt((z - outer_a) * (outer_b - z));
        },
        theta_of(za), theta_of(zb), 1e-13);
}

struct Level {
    double energy;
    double momentum;
};

/// Random non-degenerate level with E < 1/2 whose roots keep a gap of at
/// least `gap`, with both turning roots strictly inside (-1, 1) if `trapped`.
inline Level random_level(std::mt19937_64& rng, bool trapped, double gap = 1e-2) {
    std::uniform_real_distribution<double> e_dist(0.02, 0.48);
    std::uniform_real_distribution<double> p_dist(-0.95, 0.95);
    for (;;) {
        const double e = e_dist(rng), p = p_dist(rng);
        const double r = std::sqrt(2.0 * e);
        const double z1 = p - r, z2 = p + r;
        const double roots[4] = {-1.0, 1.0, z1, z2};
        bool ok = true;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) ok = ok && std::abs(roots[i] - roots[j]) > gap;
        if (!ok) continue;
        const bool inside = z1 > -1.0 && z2 < 1.0;
        if (trapped && !inside) continue;
        return {e, p};
    }
}

}  // namespace oracle
