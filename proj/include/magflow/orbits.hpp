#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>

#include "magflow/closed_form.hpp"
#include "magflow/dynamics.hpp"
#include "magflow/integrator.hpp"

namespace magflow {

enum class OrbitKind {
    TrappedOval,
    CrossingLibrator,
    Winding,
    Separatrix,
    VerticalLine,
    Forbidden,  ///< no admissible state on this (E, p) level
};

const char* to_string(OrbitKind k) noexcept;

/// Orbit type of the (E, p) level, with per-x-cycle data where the cycle
/// integrals converge.
struct OrbitClassification {
    OrbitKind kind = OrbitKind::Forbidden;
    double energy = 0.0;
    double momentum = 0.0;
    double z1 = 0.0;  ///< p - sqrt(2E)
    double z2 = 0.0;  ///< p + sqrt(2E)
    Strip strip = Strip::Both;
    std::optional<double> delta_y;
    std::optional<double> period;
    std::optional<double> action;
    bool contractible = false;
};

OrbitClassification classify(double energy, double momentum);

/// Integrals over one x-cycle of an oscillating or winding orbit.
struct CycleIntegrals {
    double period = 0.0;
    double delta_y = 0.0;
    double kinetic = 0.0;  ///< int xdot^2 dt
    double action = 0.0;   ///< kinetic + p * delta_y
};

/// Throws WrongRegime unless the level is a non-degenerate trapped oval,
/// crossing librator or winding orbit.
CycleIntegrals x_cycle_integrals(double energy, double momentum);

/// y increment per x-cycle of a trapped oval. Odd in p with sign -sign(p).
/// Throws WrongRegime outside the TrappedOval regime.
double delta_y(double energy, double momentum);

/// Simple contractible orbit (p = 0) in the chosen strip, started at
/// x0 = center + phase_x0 with center 0 (cos x > 0) or pi (cos x < 0).
/// Throws DomainError for E outside (0, 1/2) or |sin phase_x0| > sqrt(2E).
ClosedFormSolution contractible_orbit(double energy, Strip strip, double phase_x0,
                                      double y0 = 0.0, int xdot_sign = 1);

/// A k-fold iterate of a simple closed orbit. Iterates are not re-integrated.
struct OrbitIterate {
    ClosedFormSolution simple;
    int multiplicity = 1;

    double period() const noexcept { return multiplicity * simple.x_period(); }
    double action_from_simple(double simple_action) const noexcept {
        return multiplicity * simple_action;
    }
};

/// Closed curve t -> state on [0, period].
struct CurveSampler {
    std::function<PhaseState(double)> at;
    double period = 0.0;
};

CurveSampler sampler_of(const ClosedFormSolution& sol);
CurveSampler sampler_of(const Trajectory& traj);

/// Tolerance on endpoint mismatch, modulo 2pi in x and y, for a closed curve.
inline constexpr double kClosureTolerance = 1e-6;

/// int L_E dt by composite Simpson, doubling the grid until two successive
/// values agree to 1e-8. Throws OpenCurve if the endpoints do not match.
double action_direct(const CurveSampler& curve, double energy);
double action_direct(const Trajectory& traj, double energy);

/// int xdot^2 dt + p * delta_y over the closed curve.
double action_increment(const CurveSampler& curve, double momentum);
double action_increment(const Trajectory& traj, double momentum);

/// 2 int_{-a}^{a} sqrt(2E - sin^2 x) dx, a = arcsin sqrt(2E), for 0 < E < 1/2.
double action_contractible_formula(double energy);

struct CylinderStrip {
    double xa = 0.0;
    double xb = 0.0;
};

struct OrbitDisc {
    ClosedFormSolution boundary;
};

struct Film {
    std::variant<CylinderStrip, OrbitDisc> shape;
    double energy = 0.0;
};

/// sqrt(2E) length(boundary) + flux of cos x dx^dy through the film.
double film_action(const Film& film);

/// The strip between x = pi/2 and x = 3pi/2.
CylinderStrip minimizing_strip() noexcept;

struct StripSearchResult {
    double xa = 0.0;
    double xb = 0.0;
    double action = 0.0;
};

/// Grid search of film_action over strips with xa = 2 pi i/n and widths
/// 2 pi j/n, 0 < j < n.
StripSearchResult search_strip_minimum(double energy, int grid_n);

/// sup over an x-grid of (1/2) sin^2 x, the Hamiltonian with gauge f = 0.
/// Throws DomainError for grid_n < 8.
double mane_level_scan(int grid_n);

struct LagrangianScan {
    double energy = 0.0;
    std::size_t samples = 0;
    std::size_t negative = 0;
    double min_value = 0.0;
    PhaseState argmin;
};

/// Sign survey of L_E over unit-speed directions: a structured grid of
/// (x, direction) pairs plus `random_samples` pseudo-random ones.
LagrangianScan scan_lagrangian_sign(double energy, std::size_t random_samples,
                                    std::uint64_t seed = 0x6d61676eULL);

}  // namespace magflow
