#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "magflow/dynamics.hpp"

namespace magflow {

inline constexpr double kMinTolerance = 1e-13;
inline constexpr double kMaxTolerance = 1e-3;

enum class EventKind { XTurning, XReturn, YWrap };

const char* to_string(EventKind k) noexcept;

struct Sample {
    double t = 0.0;
    PhaseState state;
};

struct Event {
    double t = 0.0;
    EventKind kind = EventKind::XTurning;
    PhaseState state;
};

struct IntegrateOptions {
    /// Points of a uniform output grid on [0, t_end], both ends included.
    /// Zero disables the grid.
    std::size_t grid_points = 0;
    /// Integrate dX/ds = -f(X); sample times are then elapsed reversed time.
    bool reverse_time = false;
    bool detect_events = true;
    std::size_t max_steps = 50'000'000;
};

/// Output of one adaptive Dormand-Prince 5(4) run.
///
/// `samples` merges accepted step ends with the uniform grid; `grid` holds
/// only the uniform grid. Every accepted step keeps its continuous extension,
/// so the trajectory can be evaluated at any time in [0, t_end].
class Trajectory {
public:
    std::vector<Sample> samples;
    std::vector<Sample> grid;
    std::vector<Event> events;
    double tol = 0.0;

    double t_end() const noexcept { return samples.empty() ? 0.0 : samples.back().t; }
    std::size_t step_count() const noexcept { return steps_.size(); }
    /// Dense-output evaluation; t is clamped to [0, t_end].
    PhaseState at(double t) const;

private:
    friend Trajectory integrate(const PhaseState&, double, double, const IntegrateOptions&);

    struct DenseStep {
        double t0;
        double h;
        std::array<std::array<double, 4>, 5> coeff;
    };
    static PhaseState eval_step(const DenseStep& step, double t) noexcept;

    std::vector<DenseStep> steps_;
};

/// Throws DomainError for t_end <= 0 or tol outside [1e-13, 1e-3], and
/// StepFailure if the step size underflows.
Trajectory integrate(const PhaseState& state0, double t_end, double tol,
                     const IntegrateOptions& opts = {});

struct ConservationReport {
    double max_energy_drift = 0.0;
    double max_momentum_drift = 0.0;
};

/// Maximal drifts of E and p over all samples relative to the first one.
ConservationReport conservation_report(const Trajectory& traj);

struct ReturnInfo {
    std::vector<double> turning_times;  ///< xdot = 0 crossings
    double return_time = 0.0;           ///< first return of (x mod 2pi, xdot)
    double delta_y = 0.0;               ///< y(return) - y(0)
    PhaseState return_state;
};

/// First return to the starting point of the reduced (x mod 2pi, xdot) orbit,
/// localised on the dense output. Throws NoReturnFound.
ReturnInfo find_return(const Trajectory& traj);
ReturnInfo find_return(const PhaseState& state0, double t_end, double tol);

}  // namespace magflow
