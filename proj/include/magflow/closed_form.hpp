#pragma once

#include "magflow/dynamics.hpp"
#include "magflow/jacobi.hpp"
#include "magflow/legendre.hpp"

namespace magflow {

/// Where the bounded oval [a1, a2] of sin x sits relative to [-1, 1].
enum class OvalRegime {
    Trapped,        ///< -1 < a1 < a2 < 1: both turning roots inside
    CrossingLower,  ///< a1 = -1: x swings through -pi/2
    CrossingUpper,  ///< a2 = 1: x swings through +pi/2
    Winding,        ///< a1 = -1, a2 = 1: x is monotone
};

OvalRegime oval_regime(const QuarticCurve& curve) noexcept;

/// Which x-strip an orbit occupies.
enum class Strip { CosPositive, CosNegative, Both, Crossing };

const char* to_string(OvalRegime r) noexcept;
const char* to_string(Strip s) noexcept;

/// Exact trajectory t -> (x, y, xdot, ydot) of one orbit:
/// sin x(t) = z(sn((t + D)/C, k)) with z(.) the inverse Legendre map, and
/// y(t) = y0 + p t - int_0^t sin x.
///
/// Immutable after construction; evaluation is thread-safe.
class ClosedFormSolution {
public:
    const LegendreReduction& reduction() const noexcept { return reduction_; }
    const EllipticModulus& modulus() const noexcept { return modulus_; }
    OvalRegime regime() const noexcept { return regime_; }
    Strip branch() const noexcept { return branch_; }

    double energy() const noexcept { return energy_; }
    double momentum() const noexcept { return momentum_; }
    double x0() const noexcept { return x0_; }
    double y0() const noexcept { return y0_; }
    /// D in (t + D)/C.
    double phase_constant() const noexcept { return phase0_ * reduction_.scale; }
    double scale() const noexcept { return reduction_.scale; }

    /// Period of sin x: 4 C K.
    double z_period() const noexcept { return 4.0 * reduction_.scale * modulus_.quarter_period; }
    /// Time after which x returns to its start with the same direction.
    double x_period() const noexcept { return z_multiplicity_ * z_period(); }
    /// y increment over one x_period.
    double delta_y() const noexcept { return delta_y_; }

    double sin_x(double t) const;
    PhaseState eval(double t) const;
    /// As eval, without the y quadrature: the returned y is y0.
    PhaseState eval_local(double t) const;

private:
    friend ClosedFormSolution build_solution(double, double, double, double, int);

    struct Pointwise {
        double z;         // sin x
        double lo_gap;    // z - a1, accurate near a1
        double hi_gap;    // a2 - z, accurate near a2
        double w;         // (u + K) mod 4K
        double cycle;     // floor((u + K) / 4K)
    };

    ClosedFormSolution() = default;
    Pointwise pointwise(double u) const;
    double x_of(const Pointwise& pw, double u, int& xdot_sign) const;
    double z_integral_from_anchor(double u) const;
    PhaseState eval_impl(double t, bool with_y) const;

    LegendreReduction reduction_;
    EllipticModulus modulus_;
    OvalRegime regime_ = OvalRegime::Trapped;
    Strip branch_ = Strip::CosPositive;
    double energy_ = 0.0, momentum_ = 0.0, x0_ = 0.0, y0_ = 0.0;
    double phase0_ = 0.0;     // u at t = 0
    int sigma_ = 1;           // swing orientation for crossing/winding regimes
    double cycle0_ = 0.0;     // reference z-cycle index for the swing parity
    double turns_ = 0.0;      // 2 pi offset of x
    double cycle_integral_ = 0.0;  // int over one z-cycle of z du
    double start_integral_ = 0.0;  // int from anchor to phase0_
    double z_multiplicity_ = 1.0;
    double delta_y_ = 0.0;
};

/// Build the solution through (x0, y0) on the level (E, p). xdot_sign picks
/// the direction of xdot(0); it is ignored at turning points.
/// Throws DomainError for inadmissible data, DegenerateCurve on separatrices
/// and vertical lines, UnsupportedRegime for E = 0.
ClosedFormSolution build_solution(double x0, double y0, double energy, double momentum,
                                  int xdot_sign);

PhaseState eval_solution(const ClosedFormSolution& sol, double t);
double x_period(const ClosedFormSolution& sol);

}  // namespace magflow
