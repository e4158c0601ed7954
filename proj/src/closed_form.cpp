#include "magflow/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "magflow/errors.hpp"
#include "magflow/quadrature.hpp"

namespace magflow {
namespace {

constexpr double kHalfPi = 0.5 * kPi;
constexpr double kYTolerance = 1e-11;

int sign_of(double v, int fallback) noexcept { return v > 0.0 ? 1 : (v < 0.0 ? -1 : fallback); }

// Angle A in [0, pi] with 1 - cos A = lo and 1 + cos A = hi (lo + hi = 2),
// taken from whichever gap is smaller.
double swing_angle(double lo, double hi) noexcept {
    if (lo <= hi) return 2.0 * std::asin(std::sqrt(std::clamp(0.5 * lo, 0.0, 1.0)));
    return kPi - 2.0 * std::asin(std::sqrt(std::clamp(0.5 * hi, 0.0, 1.0)));
}

// d z / d(1 + xi) near xi = -1 and d z / d(1 - xi) near xi = +1 for the
// inverse Möbius map, evaluated at xi.
struct GapFactors {
    double lo;
    double hi;
};

GapFactors gap_factors(const LegendreReduction& red, double xi) noexcept {
    if (red.reduction_case == ReductionCase::Symmetric) return {red.sym_scale, red.sym_scale};
    const double v = red.inv_mu;
    const double alpha = (1.0 - red.curve.a1 * v) / (red.curve.a1 - red.nu);
    const double det = -alpha + alpha * red.nu * v;
    const double mid = xi * v - alpha;
    return {det / (mid * (-v - alpha)), det / ((v - alpha) * mid)};
}

}  // namespace

OvalRegime oval_regime(const QuarticCurve& c) noexcept {
    const bool lower = c.a1 == -1.0;
    const bool upper = c.a2 == 1.0;
    if (lower && upper) return OvalRegime::Winding;
    if (lower) return OvalRegime::CrossingLower;
    if (upper) return OvalRegime::CrossingUpper;
    return OvalRegime::Trapped;
}

const char* to_string(OvalRegime r) noexcept {
    switch (r) {
        case OvalRegime::Trapped: return "Trapped";
        case OvalRegime::CrossingLower: return "CrossingLower";
        case OvalRegime::CrossingUpper: return "CrossingUpper";
        case OvalRegime::Winding: return "Winding";
    }
    return "?";
}

const char* to_string(Strip s) noexcept {
    switch (s) {
        case Strip::CosPositive: return "cos>0";
        case Strip::CosNegative: return "cos<0";
        case Strip::Both: return "both";
        case Strip::Crossing: return "crossing";
    }
    return "?";
}

ClosedFormSolution::Pointwise ClosedFormSolution::pointwise(double u) const {
    const double K = modulus_.quarter_period;
    const double period = 4.0 * K;
    const double shifted = u + K;
    const double cycle = std::floor(shifted / period);
    const double w = shifted - cycle * period;

    const double phi = amplitude(u, modulus_);
    const double xi = std::sin(phi);
    const double one_plus = 2.0 * std::pow(std::sin(0.5 * (phi + kHalfPi)), 2);
    const double one_minus = 2.0 * std::pow(std::sin(0.5 * (kHalfPi - phi)), 2);
    const GapFactors g = gap_factors(reduction_, xi);
    const double lo = g.lo * one_plus;
    const double hi = g.hi * one_minus;
    const QuarticCurve& c = reduction_.curve;
    const double z = lo <= hi ? c.a1 + lo : c.a2 - hi;
    return {std::clamp(z, c.a1, c.a2), std::max(lo, 0.0), std::max(hi, 0.0), w, cycle};
}

double ClosedFormSolution::x_of(const Pointwise& pw, double u, int& xdot_sign) const {
    const double K = modulus_.quarter_period;
    const double two_k = 2.0 * K;
    const int rising = pw.w < two_k ? 1 : -1;  // sign of d(sin x)/dt
    const double offset = kTwoPi * turns_;
    switch (regime_) {
        case OvalRegime::Trapped: {
            const double s = std::asin(pw.z);
            if (branch_ == Strip::CosPositive) {
                xdot_sign = rising;
                return offset + s;
            }
            xdot_sign = -rising;
            return offset + kPi - s;
        }
        case OvalRegime::CrossingLower: {
            const double parity = std::fmod(std::abs(pw.cycle - cycle0_), 2.0) == 0.0 ? 1.0 : -1.0;
            const double psi = sigma_ * parity * swing_angle(pw.lo_gap, pw.hi_gap + (1.0 - reduction_.curve.a2));
            xdot_sign = static_cast<int>(sigma_ * parity) * rising;
            return offset - kHalfPi + psi;
        }
        case OvalRegime::CrossingUpper: {
            const double period = 4.0 * K;
            const double shifted = u - K;
            const double cycle = std::floor(shifted / period);
            const double w = shifted - cycle * period;
            const double parity = std::fmod(std::abs(cycle - cycle0_), 2.0) == 0.0 ? 1.0 : -1.0;
            const double psi = sigma_ * parity * swing_angle(pw.hi_gap, pw.lo_gap + (reduction_.curve.a1 + 1.0));
            xdot_sign = static_cast<int>(sigma_ * parity) * (w < two_k ? 1 : -1);
            return offset + kHalfPi + psi;
        }
        case OvalRegime::Winding: {
            const double a = swing_angle(pw.lo_gap, pw.hi_gap);
            const double h = pw.w <= two_k ? a : kTwoPi - a;
            xdot_sign = sigma_;
            return offset - kHalfPi + sigma_ * (kTwoPi * (pw.cycle - cycle0_) + h);
        }
    }
    return 0.0;
}

double ClosedFormSolution::z_integral_from_anchor(double u) const {
    const double K = modulus_.quarter_period;
    const double period = 4.0 * K;
    const double shifted = u + K;
    const double cycle = std::floor(shifted / period);
    const double rest = shifted - cycle * period;
    auto integrand = [this](double v) { return pointwise(v).z; };
    const double tol = kYTolerance / reduction_.scale;
    return cycle * cycle_integral_ + integrate_adaptive(integrand, -K, -K + rest, tol);
}

double ClosedFormSolution::sin_x(double t) const {
    return pointwise(phase0_ + t / reduction_.scale).z;
}

PhaseState ClosedFormSolution::eval(double t) const { return eval_impl(t, true); }

PhaseState ClosedFormSolution::eval_local(double t) const { return eval_impl(t, false); }

PhaseState ClosedFormSolution::eval_impl(double t, bool with_y) const {
    const double u = phase0_ + t / reduction_.scale;
    const Pointwise pw = pointwise(u);
    int sign = 1;
    const double x = x_of(pw, u, sign);
    const QuarticCurve& c = reduction_.curve;

    // 2E - (p - z)^2 = (z - z1)(z2 - z), using the accurate oval gaps.
    double xdot_sq = 0.0;
    switch (regime_) {
        case OvalRegime::Trapped: xdot_sq = pw.lo_gap * pw.hi_gap; break;
        case OvalRegime::CrossingLower: xdot_sq = (pw.z - c.a3) * pw.hi_gap; break;
        case OvalRegime::CrossingUpper: xdot_sq = pw.lo_gap * (c.a4 - pw.z); break;
        case OvalRegime::Winding: xdot_sq = (pw.z - c.a3) * (c.a4 - pw.z); break;
    }
    const double y = with_y ? y0_ + momentum_ * t -
                                  reduction_.scale * (z_integral_from_anchor(u) - start_integral_)
                            : y0_;
    return {x, y, sign * std::sqrt(std::max(0.0, xdot_sq)), momentum_ - pw.z};
}

ClosedFormSolution build_solution(double x0, double y0, double energy, double momentum,
                                  int xdot_sign) {
    if (energy == 0.0) {
        throw UnsupportedRegime("build_solution: E = 0 is a fixed point, not an orbit");
    }
    const PhaseState start = state_from_integrals(x0, y0, energy, momentum, xdot_sign);
    const QuarticCurve curve = quartic_from_params(energy, momentum);
    if (curve.degenerate) {
        throw DegenerateCurve("build_solution: separatrix level (root gap " +
                              std::to_string(curve.min_gap) + ")");
    }

    ClosedFormSolution sol;
    sol.reduction_ = reduce_to_legendre(curve);
    sol.modulus_ = EllipticModulus(sol.reduction_.k);
    sol.regime_ = oval_regime(curve);
    sol.energy_ = energy;
    sol.momentum_ = momentum;
    sol.x0_ = x0;
    sol.y0_ = y0;

    const double K = sol.modulus_.quarter_period;
    const int s = sign_of(start.xdot, xdot_sign < 0 ? -1 : 1);
    const double zdot0 = std::cos(x0) * start.xdot;

    // Initial phase: F(am) with am recovered from the accurate gap nearest
    // to the oval end.
    const double z0 = std::sin(x0);
    const double lo0 = curve.a1 == -1.0 ? 2.0 * std::pow(std::sin(0.5 * x0 + 0.25 * kPi), 2)
                                        : z0 - curve.a1;
    const double hi0 = curve.a2 == 1.0 ? 2.0 * std::pow(std::sin(0.25 * kPi - 0.5 * x0), 2)
                                       : curve.a2 - z0;
    const double xi_guess = xi_of_z(sol.reduction_, std::clamp(z0, curve.a1, curve.a2));
    const GapFactors g = gap_factors(sol.reduction_, std::clamp(xi_guess, -1.0, 1.0));
    const double one_plus = std::clamp(std::max(lo0, 0.0) / g.lo, 0.0, 2.0);
    const double one_minus = std::clamp(std::max(hi0, 0.0) / g.hi, 0.0, 2.0);
    const double phi0 = one_plus <= one_minus
                            ? -0.5 * kPi + 2.0 * std::asin(std::sqrt(0.5 * one_plus))
                            : 0.5 * kPi - 2.0 * std::asin(std::sqrt(0.5 * one_minus));
    const double F0 = incomplete_F(phi0, sol.modulus_);
    sol.phase0_ = zdot0 < 0.0 ? 2.0 * K - F0 : F0;

    const double u0 = sol.phase0_;
    const auto pw0 = sol.pointwise(u0);
    const double period = 4.0 * K;
    switch (sol.regime_) {
        case OvalRegime::Trapped: {
            const bool positive = std::cos(x0) > 0.0;
            sol.branch_ = positive ? Strip::CosPositive : Strip::CosNegative;
            const double base = positive ? std::asin(pw0.z) : kPi - std::asin(pw0.z);
            sol.turns_ = std::round((x0 - base) / kTwoPi);
            break;
        }
        case OvalRegime::CrossingLower: {
            sol.branch_ = Strip::Crossing;
            const double psi0 = std::remainder(x0 + 0.5 * kPi, kTwoPi);
            sol.sigma_ = sign_of(psi0, s);
            sol.cycle0_ = std::floor((u0 + K) / period);
            sol.turns_ = std::round((x0 + 0.5 * kPi - psi0) / kTwoPi);
            break;
        }
        case OvalRegime::CrossingUpper: {
            sol.branch_ = Strip::Crossing;
            const double psi0 = std::remainder(x0 - 0.5 * kPi, kTwoPi);
            sol.sigma_ = sign_of(psi0, s);
            sol.cycle0_ = std::floor((u0 - K) / period);
            sol.turns_ = std::round((x0 - 0.5 * kPi - psi0) / kTwoPi);
            break;
        }
        case OvalRegime::Winding: {
            sol.branch_ = Strip::Crossing;
            sol.sigma_ = s;
            sol.cycle0_ = pw0.cycle;
            const double a = swing_angle(pw0.lo_gap, pw0.hi_gap);
            const double h = pw0.w <= 2.0 * K ? a : kTwoPi - a;
            sol.turns_ = std::round((x0 + 0.5 * kPi - s * h) / kTwoPi);
            break;
        }
    }
    sol.z_multiplicity_ = (sol.regime_ == OvalRegime::CrossingLower ||
                           sol.regime_ == OvalRegime::CrossingUpper)
                              ? 2.0
                              : 1.0;

    auto integrand = [&sol](double v) { return sol.pointwise(v).z; };
    const double tol = kYTolerance / sol.reduction_.scale;
    sol.cycle_integral_ = integrate_adaptive(integrand, -K, 3.0 * K, tol);
    sol.start_integral_ = sol.z_integral_from_anchor(u0);
    sol.delta_y_ = sol.z_multiplicity_ *
                   (momentum * sol.z_period() - sol.reduction_.scale * sol.cycle_integral_);

    int sign0 = 1;
    const double x_check = sol.x_of(pw0, u0, sign0);
    if (!(std::abs(x_check - x0) < 1e-6)) {
        throw ReductionInconsistency("build_solution: phase reconstruction misses x0 by " +
                                     std::to_string(x_check - x0));
    }
    return sol;
}

PhaseState eval_solution(const ClosedFormSolution& sol, double t) { return sol.eval(t); }

double x_period(const ClosedFormSolution& sol) { return sol.x_period(); }

}  // namespace magflow
