#include "magflow/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "magflow/errors.hpp"

namespace magflow {
namespace {

constexpr double kNormTol = 1e-10;
constexpr double kSymmetricTol = 1e-14;

// Q(z) = z^2 - s z + p written with the reciprocal coordinate:
// Q(1/v) v^2 = 1 - s v + p v^2.
double scaled_quadratic_at_infinity(double s, double p, double v) noexcept {
    return 1.0 - s * v + p * v * v;
}

void check_normalisation(const LegendreReduction& red) {
    const QuarticCurve& c = red.curve;
    const double targets[4] = {-1.0, 1.0, -1.0 / red.k, 1.0 / red.k};
    const double roots[4] = {c.a1, c.a2, c.a3, c.a4};
    for (int i = 0; i < 4; ++i) {
        const double got = xi_of_z(red, roots[i]);
        const double want = targets[i];
        if (!(std::abs(got - want) <= kNormTol * std::max(1.0, std::abs(want)))) {
            throw ReductionInconsistency("reduce_to_legendre: xi(root " + std::to_string(i) +
                                         ") = " + std::to_string(got) + ", expected " +
                                         std::to_string(want));
        }
    }
    if (!(red.k2 > 0.0 && red.k2 < 1.0)) {
        throw ReductionInconsistency("reduce_to_legendre: k^2 = " + std::to_string(red.k2) +
                                     " outside (0, 1)");
    }
    if (!(red.scale > 0.0)) {
        throw ReductionInconsistency("reduce_to_legendre: nonpositive C");
    }
}

LegendreReduction reduce_symmetric(const QuarticCurve& c) {
    LegendreReduction red;
    red.reduction_case = ReductionCase::Symmetric;
    red.curve = c;
    red.sym_scale = std::abs(c.a1);
    red.k2 = (c.a1 * c.a1) / (c.a3 * c.a3);
    red.k = std::sqrt(red.k2);
    // z = |a1| xi turns w into |a1||a3| eta.
    red.scale = 1.0 / std::abs(c.a3);
    return red;
}

LegendreReduction reduce_general(const QuarticCurve& c) {
    const double a1 = c.a1, a2 = c.a2, a3 = c.a3, a4 = c.a4;
    const double s1 = a1 + a2, p1 = a1 * a2;
    const double s2 = a3 + a4, p2 = a3 * a4;

    // mu, nu solve d t^2 - 2 n t + m = 0 (harmonic with respect to both
    // root pairs). The large root is kept as a reciprocal.
    const double d = s1 - s2;
    const double n = p1 - p2;
    const double m = p1 * s2 - p2 * s1;
    const double disc = n * n - d * m;
    if (!(disc > 0.0)) {
        throw ReductionInconsistency("reduce_to_legendre: harmonic quadratic has no real roots");
    }
    const double q = n + std::copysign(std::sqrt(disc), n);
    // Roots: q/d and m/q.
    double root_small = m / q;
    double inv_root_big = d / q;

    LegendreReduction red;
    red.reduction_case = ReductionCase::General;
    red.curve = c;
    if (root_small > a1 && root_small < a2) {
        red.nu = root_small;
        red.inv_mu = inv_root_big;
    } else {
        red.nu = 1.0 / inv_root_big;
        red.inv_mu = 1.0 / root_small;
    }
    const double nu = red.nu, v = red.inv_mu;
    if (!(nu > a1 && nu < a2)) {
        throw ReductionInconsistency("reduce_to_legendre: no harmonic point inside the oval");
    }

    const double one_minus_a1v = 1.0 - a1 * v;
    const double one_minus_a3v = 1.0 - a3 * v;
    const double one_minus_nuv = 1.0 - nu * v;

    red.lambda = (a1 - nu) * v / one_minus_a1v;
    const double r1 = (nu - a1) / (nu - a3);
    const double r2 = one_minus_a3v / one_minus_a1v;
    red.k2 = r1 * r1 * r2 * r2;
    red.k = std::sqrt(red.k2);

    const double P_nu = c.eval(nu);
    red.scale = (a1 - nu) * (nu * v - 1.0) / (one_minus_a1v * std::sqrt(P_nu));

    // Q_j(z) = B_j (z - mu)^2 + C_j (z - nu)^2.
    const double denom = one_minus_nuv * one_minus_nuv;
    const double Q1_nu = (nu - a1) * (nu - a2);
    const double Q2_nu = (nu - a3) * (nu - a4);
    red.B1 = Q1_nu * v * v / denom;
    red.B2 = Q2_nu * v * v / denom;
    red.C1 = scaled_quadratic_at_infinity(s1, p1, v) / denom;
    red.C2 = scaled_quadratic_at_infinity(s2, p2, v) / denom;

    red.eigen1 = scaled_quadratic_at_infinity(s1, p1, v) / scaled_quadratic_at_infinity(s2, p2, v);
    red.eigen2 = Q1_nu / Q2_nu;
    return red;
}

}  // namespace

double QuarticCurve::eval(double z) const noexcept {
    return (z - a1) * (z - a2) * (z - a3) * (z - a4);
}

double QuarticCurve::outer_factor(double z) const noexcept {
    return std::sqrt(std::max(0.0, (z - a3) * (a4 - z)));
}

QuarticCurve quartic_from_params(double energy, double momentum) {
    if (!(energy > 0.0) || !std::isfinite(energy) || !std::isfinite(momentum)) {
        throw DomainError("quartic_from_params: need finite E > 0 and finite p");
    }
    const double r = std::sqrt(2.0 * energy);
    std::array<double, 4> roots = {-1.0, 1.0, momentum - r, momentum + r};
    std::sort(roots.begin(), roots.end());

    QuarticCurve c;
    c.energy = energy;
    c.momentum = momentum;
    c.a3 = roots[0];
    c.a1 = roots[1];
    c.a2 = roots[2];
    c.a4 = roots[3];
    c.min_gap = std::min({roots[1] - roots[0], roots[2] - roots[1], roots[3] - roots[2]});
    c.degenerate = c.min_gap < kDegenerateGap;
    return c;
}

double LegendreReduction::mu() const noexcept {
    return inv_mu == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / inv_mu;
}

LegendreReduction reduce_to_legendre(const QuarticCurve& curve, const ReductionOptions& opts) {
    if (curve.degenerate) {
        throw DegenerateCurve("reduce_to_legendre: root gap " + std::to_string(curve.min_gap) +
                              " below the degeneracy threshold");
    }
    const bool symmetric = std::abs(curve.a1 + curve.a2) <= kSymmetricTol &&
                           std::abs(curve.a3 + curve.a4) <= kSymmetricTol;
    LegendreReduction red =
        (symmetric && !opts.force_general) ? reduce_symmetric(curve) : reduce_general(curve);
    check_normalisation(red);
    return red;
}

double xi_of_z(const LegendreReduction& red, double z) noexcept {
    if (red.reduction_case == ReductionCase::Symmetric) return z / red.sym_scale;
    const double a1 = red.curve.a1;
    const double v = red.inv_mu;
    const double alpha = (1.0 - a1 * v) / (a1 - red.nu);
    return alpha * (z - red.nu) / (z * v - 1.0);
}

double z_of_xi(const LegendreReduction& red, double xi) noexcept {
    if (red.reduction_case == ReductionCase::Symmetric) return xi * red.sym_scale;
    const double a1 = red.curve.a1;
    const double v = red.inv_mu;
    const double alpha = (1.0 - a1 * v) / (a1 - red.nu);
    return (xi - alpha * red.nu) / (xi * v - alpha);
}

double map_z_to_xi(const LegendreReduction& red, double z) {
    const double a1 = red.curve.a1, a2 = red.curve.a2;
    if (!(z >= a1 && z <= a2)) {
        throw DomainError("map_z_to_xi: z outside the bounded oval [a1, a2]");
    }
    if (z == a1) return -1.0;
    if (z == a2) return 1.0;
    return std::clamp(xi_of_z(red, z), -1.0, 1.0);
}

double map_xi_to_z(const LegendreReduction& red, double xi) {
    if (!(xi >= -1.0 && xi <= 1.0)) {
        throw DomainError("map_xi_to_z: xi outside [-1, 1]");
    }
    if (xi == -1.0) return red.curve.a1;
    if (xi == 1.0) return red.curve.a2;
    return std::clamp(z_of_xi(red, xi), red.curve.a1, red.curve.a2);
}

}  // namespace magflow
