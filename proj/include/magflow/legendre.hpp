#pragma once

#include <array>

namespace magflow {

/// Absolute root gap below which a quartic is treated as degenerate.
inline constexpr double kDegenerateGap = 1e-9;

/// The real quartic w^2 = P(z) = (1 - z^2)(2E - (p - z)^2) of one (E, p)
/// level. Roots are labelled a3 < a1 < a2 < a4 so that [a1, a2] is the
/// bounded oval on which sin x moves.
struct QuarticCurve {
    double energy = 0.0;
    double momentum = 0.0;
    double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;
    bool degenerate = false;
    double min_gap = 0.0;

    /// P(z) in factored form (monic, equal to (1 - z^2)(2E - (p - z)^2)).
    double eval(double z) const noexcept;
    /// Roots in increasing order {a3, a1, a2, a4}.
    std::array<double, 4> sorted_roots() const noexcept { return {a3, a1, a2, a4}; }
    double oval_mid() const noexcept { return 0.5 * (a1 + a2); }
    double oval_half_width() const noexcept { return 0.5 * (a2 - a1); }
    /// sqrt((z - a3)(a4 - z)): the part of sqrt(P) left after the
    /// substitution z = mid + half * sin(theta) has absorbed the oval roots.
    double outer_factor(double z) const noexcept;
};

/// Throws DomainError for E <= 0.
QuarticCurve quartic_from_params(double energy, double momentum);

enum class ReductionCase { Symmetric, General };

/// Fractional-linear map of the oval [a1, a2] onto [-1, 1] carrying dz/w
/// to C dxi/eta with eta^2 = (1 - xi^2)(1 - k^2 xi^2).
///
/// General case: xi = (1/lambda) (z - nu)/(z - mu), lambda = (a1 - nu)/(mu - a1).
/// mu is stored through its reciprocal so the p = 0 limit (mu at infinity)
/// stays representable when the general route is forced.
struct LegendreReduction {
    ReductionCase reduction_case = ReductionCase::Symmetric;
    double k2 = 0.0;
    double k = 0.0;
    double scale = 1.0;  ///< C in dz/w = C dxi/eta

    // General-case data; mu = 1/inv_mu.
    double nu = 0.0;
    double inv_mu = 0.0;
    double lambda = 0.0;
    double eigen1 = 0.0;  ///< Q1 - eigen1 Q2 is a multiple of (z - mu)^2
    double eigen2 = 0.0;  ///< Q1 - eigen2 Q2 is a multiple of (z - nu)^2
    double B1 = 0.0, B2 = 0.0, C1 = 0.0, C2 = 0.0;

    // Symmetric case: xi = z / |a1|.
    double sym_scale = 1.0;

    QuarticCurve curve;

    double mu() const noexcept;
};

struct ReductionOptions {
    /// Run the general route even when the roots come in +/- pairs.
    bool force_general = false;
};

/// Throws DegenerateCurve for flagged curves and ReductionInconsistency when
/// the normalisation xi(a1) = -1, xi(a2) = 1, xi(a3) = -1/k, xi(a4) = 1/k
/// fails by more than 1e-10.
LegendreReduction reduce_to_legendre(const QuarticCurve& curve,
                                     const ReductionOptions& opts = {});

/// Forward map on the bounded oval; DomainError outside [a1, a2].
double map_z_to_xi(const LegendreReduction& red, double z);
/// Inverse map on [-1, 1]; DomainError outside.
double map_xi_to_z(const LegendreReduction& red, double xi);

/// Unchecked forward map, defined for every z != mu.
double xi_of_z(const LegendreReduction& red, double z) noexcept;
/// Unchecked inverse map.
double z_of_xi(const LegendreReduction& red, double xi) noexcept;

}  // namespace magflow
