#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "magflow/closed_form.hpp"
#include "magflow/errors.hpp"
#include "magflow/integrator.hpp"
#include "magflow/jacobi.hpp"

using namespace magflow;
using doctest::Approx;

namespace {

double sup_difference(const Trajectory& a, const Trajectory& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.grid.size(); ++i) {
        const PhaseState& s = a.grid[i].state;
        const PhaseState& r = b.grid[i].state;
        d = std::max({d, std::abs(s.x - r.x), std::abs(s.y - r.y), std::abs(s.xdot - r.xdot),
                      std::abs(s.ydot - r.ydot)});
    }
    return d;
}

Trajectory on_grid(const PhaseState& s0, double t_end, double tol, std::size_t n = 201) {
    IntegrateOptions o;
    o.grid_points = n;
    return integrate(s0, t_end, tol, o);
}

}  // namespace

TEST_CASE("vertical line x = pi/2") {
    const Trajectory tr = on_grid({kPi / 2, 0, 0, 1}, 10.0, 1e-12);
    for (const Sample& s : tr.samples) {
        CHECK(std::abs(s.state.x - kPi / 2) < 1e-12);
        CHECK(s.state.y == Approx(s.t).epsilon(1e-13).scale(1.0));
    }
    const ConservationReport r = conservation_report(tr);
    CHECK(r.max_energy_drift < 1e-12);
    CHECK(r.max_momentum_drift < 1e-12);
    for (const Event& e : tr.events) CHECK(e.kind != EventKind::XTurning);
    // The reduced orbit is a fixed point: there is no oscillation to return from.
    CHECK_THROWS_AS(find_return(tr), NoReturnFound);
}

TEST_CASE("sample times increase and grid covers both ends") {
    const Trajectory tr = on_grid({0, 0, 0.5, 0}, 12.0, 1e-10, 51);
    REQUIRE(tr.grid.size() == 51);
    CHECK(tr.grid.front().t == 0.0);
    CHECK(tr.grid.back().t == 12.0);
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
        CHECK(tr.samples[i].t > tr.samples[i - 1].t);
    }
    CHECK(tr.tol == 1e-10);
}

TEST_CASE("one period of the symmetric orbit") {
    const double T = 4.0 * complete_K(0.5);
    const Trajectory tr = integrate({0, 0, 0.5, 0}, T, 1e-11);
    const PhaseState end = tr.samples.back().state;
    CHECK(std::abs(std::sin(end.x)) < 1e-6);
    CHECK(std::abs(end.xdot - 0.5) < 1e-6);
    CHECK(std::abs(end.ydot) < 1e-6);
    const PhaseState near_end = integrate({0, 0, 0.5, 0}, 6.7430016, 1e-11).samples.back().state;
    CHECK(std::abs(std::sin(near_end.x)) < 1e-6);
    CHECK(std::abs(near_end.xdot - 0.5) < 1e-6);
}

TEST_CASE("fixed point stays put") {
    const Trajectory tr = on_grid({1.0, 2.0, 0, 0}, 5.0, 1e-9);
    for (const Sample& s : tr.grid) CHECK(s.state == PhaseState{1.0, 2.0, 0, 0});
    const ConservationReport r = conservation_report(tr);
    CHECK(r.max_energy_drift == 0.0);
    CHECK(r.max_momentum_drift == 0.0);
}

TEST_CASE("conservation on a generic orbit") {
    const PhaseState s0 = state_from_integrals(0.0, 0.0, 0.3, 0.2, 1);
    const Trajectory tr = integrate(s0, 100.0, 1e-11);
    const ConservationReport r = conservation_report(tr);
    CHECK(r.max_energy_drift < 1e-9);
    CHECK(r.max_momentum_drift < 1e-9);
}

TEST_CASE("turning events of the symmetric orbit") {
    const double T = 4.0 * complete_K(0.5);
    const ReturnInfo info = find_return({0, 0, 0.5, 0}, 1.5 * T, 1e-12);
    REQUIRE(info.turning_times.size() >= 2);
    CHECK(info.turning_times[0] == Approx(0.25 * T).epsilon(1e-10));
    CHECK(info.turning_times[1] == Approx(0.75 * T).epsilon(1e-10));
    CHECK(info.return_time == Approx(T).epsilon(1e-10));
    CHECK(std::abs(info.delta_y) < 1e-9);
}

TEST_CASE("return of a tilted trapped oval measures a negative y shift") {
    const ClosedFormSolution sol = build_solution(std::asin(0.5), 0.0, 0.0625, 0.5, 1);
    const ReturnInfo info = find_return(sol.eval(0.0), 3 * sol.x_period(), 1e-12);
    CHECK(info.delta_y < 0.0);
    CHECK(info.delta_y == Approx(sol.delta_y()).epsilon(1e-8));
    CHECK(info.return_time == Approx(sol.x_period()).epsilon(1e-9));
    const ReturnInfo mirrored = find_return(build_solution(-std::asin(0.5), 0.0, 0.0625, -0.5, 1).eval(0.0),
                                            3 * sol.x_period(), 1e-12);
    CHECK(mirrored.delta_y > 0.0);
}

TEST_CASE("winding orbit returns after one x revolution") {
    const ClosedFormSolution sol = build_solution(0.3, 0.0, 1.2, 0.4, 1);
    const ReturnInfo info = find_return(sol.eval(0.0), 2.5 * sol.x_period(), 1e-12);
    CHECK(info.return_time == Approx(sol.x_period()).epsilon(1e-9));
    CHECK(info.delta_y == Approx(sol.delta_y()).epsilon(1e-8));
}

TEST_CASE("no return within a short horizon") {
    CHECK_THROWS_AS(find_return({0, 0, 0.5, 0}, 1.0, 1e-10), NoReturnFound);
}

TEST_CASE("y wrap events") {
    const Trajectory tr = integrate({kPi / 2, 0, 0, 1}, 20.0, 1e-10);
    int wraps = 0;
    for (const Event& e : tr.events) {
        if (e.kind == EventKind::YWrap) {
            ++wraps;
            CHECK(std::abs(std::remainder(e.state.y, kTwoPi)) < 1e-9);
        }
    }
    CHECK(wraps == 3);
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(integrate({0, 0, 1, 0}, 0.0, 1e-9), DomainError);
    CHECK_THROWS_AS(integrate({0, 0, 1, 0}, -1.0, 1e-9), DomainError);
    CHECK_THROWS_AS(integrate({0, 0, 1, 0}, 1.0, 1e-14), DomainError);
    CHECK_THROWS_AS(integrate({0, 0, 1, 0}, 1.0, 1e-2), DomainError);
    CHECK_THROWS_AS(integrate({NAN, 0, 1, 0}, 1.0, 1e-9), DomainError);
    IntegrateOptions o;
    o.max_steps = 5;
    try {
        integrate({0, 0, 1, 0}, 100.0, 1e-12, o);
        FAIL("expected StepFailure");
    } catch (const StepFailure& e) {
        CHECK(e.time() > 0.0);
        CHECK(e.time() < 100.0);
    }
}

TEST_CASE("self convergence under tolerance halving") {
    const PhaseState s0 = state_from_integrals(0.1, 0.0, 0.3, 0.2, 1);
    const Trajectory ref = on_grid(s0, 20.0, 1e-13);
    double prev = 1e300;
    int monotone_breaks = 0;
    for (double tol = 1e-5; tol >= 1e-11; tol *= 0.5) {
        const double d = sup_difference(on_grid(s0, 20.0, tol), ref);
        if (!(d < prev)) ++monotone_breaks;
        prev = d;
    }
    CHECK(monotone_breaks == 0);
}

TEST_CASE("drift scales with tolerance") {
    const PhaseState s0 = state_from_integrals(0.1, 0.0, 0.3, 0.2, 1);
    auto drift = [&](double tol) {
        const ConservationReport r = conservation_report(integrate(s0, 100.0, tol));
        return std::max(r.max_energy_drift, r.max_momentum_drift);
    };
    CHECK(drift(1e-7) / drift(1e-9) > 10.0);
}

TEST_CASE("time reversal returns to the start") {
    const PhaseState s0 = state_from_integrals(0.1, 0.0, 0.3, 0.2, 1);
    const double t_end = 30.0;
    const ClosedFormSolution exact = build_solution(0.1, 0.0, 0.3, 0.2, 1);
    const Trajectory fwd = integrate(s0, t_end, 1e-10);
    const PhaseState end = fwd.samples.back().state;
    const PhaseState truth = exact.eval(t_end);
    const double one_way = std::max({std::abs(end.x - truth.x), std::abs(end.y - truth.y),
                                     std::abs(end.xdot - truth.xdot), std::abs(end.ydot - truth.ydot)});
    IntegrateOptions back;
    back.reverse_time = true;
    const PhaseState home = integrate(end, t_end, 1e-10, back).samples.back().state;
    const double error = std::max({std::abs(home.x - s0.x), std::abs(home.y - s0.y),
                                   std::abs(home.xdot - s0.xdot), std::abs(home.ydot - s0.ydot)});
    CHECK(error < 10.0 * one_way);
}

TEST_CASE("dense output matches the closed form between steps") {
    const ClosedFormSolution exact = build_solution(0.0, 0.0, 0.2, 0.1, 1);
    const Trajectory tr = integrate(exact.eval(0.0), 40.0, 1e-12);
    for (int i = 0; i <= 997; ++i) {
        const double t = 40.0 * i / 997.0;
        const PhaseState a = tr.at(t), b = exact.eval(t);
        CHECK(std::abs(a.x - b.x) < 1e-8);
        CHECK(std::abs(a.y - b.y) < 1e-8);
    }
    CHECK(tr.step_count() > 10);
}
