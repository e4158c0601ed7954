#pragma once

#include <numbers>

namespace magflow {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// A point (x, y, xdot, ydot) of the tangent bundle of the flat torus.
/// Angles are kept on the real line; wrap them only for display.
struct PhaseState {
    double x = 0.0;
    double y = 0.0;
    double xdot = 0.0;
    double ydot = 0.0;

    bool operator==(const PhaseState&) const = default;
};

/// Time derivative of a PhaseState.
struct PhaseDerivative {
    double xdot = 0.0;
    double ydot = 0.0;
    double xddot = 0.0;
    double yddot = 0.0;
};

/// The two first integrals of the flow.
struct FlowIntegrals {
    double energy = 0.0;
    double momentum = 0.0;
};

/// Right-hand side of xddot = cos x * ydot, yddot = -cos x * xdot.
PhaseDerivative eval_rhs(const PhaseState& s) noexcept;

/// (xdot^2 + ydot^2) / 2.
double energy(const PhaseState& s) noexcept;

/// y-momentum ydot + sin x.
double momentum(const PhaseState& s) noexcept;

FlowIntegrals integrals(const PhaseState& s) noexcept;

/// Reduced Lagrangian sqrt(2E)|qdot| + sin x * ydot on the level E.
double reduced_lagrangian(const PhaseState& s, double energy_level);

/// Reconstruct a state from its integrals. ydot = p - sin x0 and
/// xdot = xdot_sign * sqrt(2E - (p - sin x0)^2).
/// Throws DomainError when (x0, E, p) lies in the forbidden region.
PhaseState state_from_integrals(double x0, double y0, double energy_level,
                                double momentum_value, int xdot_sign);

/// Wrap an angle into [0, 2pi).
double wrap_angle(double a) noexcept;

}  // namespace magflow
