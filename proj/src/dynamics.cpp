#include "magflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "magflow/errors.hpp"

namespace magflow {

PhaseDerivative eval_rhs(const PhaseState& s) noexcept {
    const double c = std::cos(s.x);
    return {s.xdot, s.ydot, c * s.ydot, -c * s.xdot};
}

double energy(const PhaseState& s) noexcept {
    return 0.5 * (s.xdot * s.xdot + s.ydot * s.ydot);
}

double momentum(const PhaseState& s) noexcept { return s.ydot + std::sin(s.x); }

FlowIntegrals integrals(const PhaseState& s) noexcept {
    return {energy(s), momentum(s)};
}

double reduced_lagrangian(const PhaseState& s, double energy_level) {
    if (energy_level < 0.0) {
        throw DomainError("reduced_lagrangian: energy level must be nonnegative");
    }
    const double speed = std::hypot(s.xdot, s.ydot);
    return std::sqrt(2.0 * energy_level) * speed + std::sin(s.x) * s.ydot;
}

PhaseState state_from_integrals(double x0, double y0, double energy_level,
                                double momentum_value, int xdot_sign) {
    if (!(energy_level >= 0.0) || !std::isfinite(energy_level)) {
        throw DomainError("state_from_integrals: energy must be finite and nonnegative");
    }
    const double ydot = momentum_value - std::sin(x0);
    const double radicand = 2.0 * energy_level - ydot * ydot;
    // A few ulps of slack so turning points reconstructed from their own
    // integrals are not rejected.
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() *
                         std::max(1.0, 2.0 * energy_level);
    if (radicand < -slack) {
        throw DomainError("state_from_integrals: (p - sin x0)^2 = " +
                          std::to_string(ydot * ydot) + " exceeds 2E = " +
                          std::to_string(2.0 * energy_level));
    }
    const double sign = xdot_sign < 0 ? -1.0 : 1.0;
    return {x0, y0, sign * std::sqrt(std::max(0.0, radicand)), ydot};
}

double wrap_angle(double a) noexcept {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

}  // namespace magflow
