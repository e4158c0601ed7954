#include "magflow/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "magflow/errors.hpp"

namespace magflow {
namespace {

using Vec = std::array<double, 4>;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension (Hairer's contd5).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// Step-size controller (PI, Hairer's defaults).
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kSafety = 0.9;
constexpr double kMaxShrink = 0.2;  // hnew >= 0.2 h
constexpr double kMaxGrow = 10.0;   // hnew <= 10 h

constexpr double kEventTol = 1e-12;
constexpr double kTurnFloor = 1e-13;

Vec to_vec(const PhaseState& s) noexcept { return {s.x, s.y, s.xdot, s.ydot}; }
PhaseState to_state(const Vec& v) noexcept { return {v[0], v[1], v[2], v[3]}; }

Vec rhs(const Vec& v, double direction) noexcept {
    const PhaseDerivative d = eval_rhs(to_state(v));
    return {direction * d.xdot, direction * d.ydot, direction * d.xddot, direction * d.yddot};
}

template <class... Terms>
Vec combine(const Vec& y, double h, const Terms&... terms) noexcept {
    Vec out = y;
    for (std::size_t i = 0; i < 4; ++i) {
        double acc = 0.0;
        ((acc += terms.first * (*terms.second)[i]), ...);
        out[i] += h * acc;
    }
    return out;
}

std::pair<double, const Vec*> term(double c, const Vec& v) { return {c, &v}; }

double error_norm(const Vec& y0, const Vec& y1, const Vec& err, double tol) noexcept {
    double sum = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const double sk = tol * std::max({1.0, std::abs(y0[i]), std::abs(y1[i])});
        const double r = err[i] / sk;
        sum += r * r;
    }
    return std::sqrt(sum / 4.0);
}

double initial_step(const Vec& y0, const Vec& f0, double tol, double direction, double span) {
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const double sk = tol * std::max(1.0, std::abs(y0[i]));
        dnf += (f0[i] / sk) * (f0[i] / sk);
        dny += (y0[i] / sk) * (y0[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
    h = std::min(h, span);
    const Vec y1 = combine(y0, h, term(1.0, f0));
    const Vec f1 = rhs(y1, direction);
    double der2 = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const double sk = tol * std::max(1.0, std::abs(y0[i]));
        der2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::min({100.0 * h, h1, span});
}

// Bisection on a continuous function over [lo, hi] with a sign change.
double bisect(const std::function<double(double)>& g, double lo, double hi, double g_lo) {
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (std::abs(gm) < kEventTol || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid))) {
            return mid;
        }
        if ((gm < 0.0) == (g_lo < 0.0)) {
            lo = mid;
            g_lo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double wrapped_difference(double a, double b) noexcept { return std::remainder(a - b, kTwoPi); }

}  // namespace

const char* to_string(EventKind k) noexcept {
    switch (k) {
        case EventKind::XTurning: return "x-turning";
        case EventKind::XReturn: return "x-return";
        case EventKind::YWrap: return "y-wrap";
    }
    return "?";
}

PhaseState Trajectory::eval_step(const DenseStep& step, double t) noexcept {
    const double theta = step.h == 0.0 ? 0.0 : (t - step.t0) / step.h;
    const double theta1 = 1.0 - theta;
    const auto& r = step.coeff;
    Vec out{};
    for (std::size_t i = 0; i < 4; ++i) {
        out[i] = r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])));
    }
    return to_state(out);
}

PhaseState Trajectory::at(double t) const {
    if (steps_.empty()) return samples.empty() ? PhaseState{} : samples.front().state;
    t = std::clamp(t, 0.0, t_end());
    auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                               [](double value, const DenseStep& s) { return value < s.t0; });
    if (it != steps_.begin()) --it;
    return eval_step(*it, t);
}

Trajectory integrate(const PhaseState& state0, double t_end, double tol,
                     const IntegrateOptions& opts) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw DomainError("integrate: t_end must be positive and finite");
    }
    if (!(tol >= kMinTolerance && tol <= kMaxTolerance)) {
        throw DomainError("integrate: tol must lie in [1e-13, 1e-3]");
    }
    if (!std::isfinite(state0.x) || !std::isfinite(state0.y) || !std::isfinite(state0.xdot) ||
        !std::isfinite(state0.ydot)) {
        throw DomainError("integrate: initial state must be finite");
    }

    const double direction = opts.reverse_time ? -1.0 : 1.0;
    Trajectory traj;
    traj.tol = tol;
    traj.samples.push_back({0.0, state0});

    std::size_t next_grid = 0;
    const std::size_t grid_n = opts.grid_points;
    auto grid_time = [&](std::size_t i) {
        return grid_n <= 1 ? 0.0 : t_end * static_cast<double>(i) / static_cast<double>(grid_n - 1);
    };
    if (grid_n > 0) {
        traj.grid.push_back({0.0, state0});
        next_grid = 1;
    }

    // Return-section geometry in the reduced (x mod 2pi, xdot) plane.
    const PhaseDerivative d0 = eval_rhs(state0);
    const double tangent_x = direction * d0.xdot;
    const double tangent_v = direction * d0.xddot;
    const bool has_section = std::hypot(tangent_x, tangent_v) > 1e-14;
    double max_excursion = 0.0;
    auto section = [&](const PhaseState& s) {
        return wrapped_difference(s.x, state0.x) * tangent_x + (s.xdot - state0.xdot) * tangent_v;
    };
    auto distance = [&](const PhaseState& s) {
        return std::abs(wrapped_difference(s.x, state0.x)) + std::abs(s.xdot - state0.xdot);
    };

    Vec y = to_vec(state0);
    Vec k1 = rhs(y, direction);
    double t = 0.0;
    double h = initial_step(y, k1, tol, direction, t_end);
    double facold = 1e-4;
    bool last_rejected = false;

    for (std::size_t step = 0; t < t_end; ++step) {
        if (step >= opts.max_steps) {
            throw StepFailure("integrate: step budget exhausted", t);
        }
        if (h < 10.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
            throw StepFailure("integrate: step size underflow at t = " + std::to_string(t), t);
        }
        const bool final_step = t + 1.01 * h >= t_end;
        if (final_step) h = t_end - t;

        const Vec k2 = rhs(combine(y, h, term(a21, k1)), direction);
        const Vec k3 = rhs(combine(y, h, term(a31, k1), term(a32, k2)), direction);
        const Vec k4 = rhs(combine(y, h, term(a41, k1), term(a42, k2), term(a43, k3)), direction);
        const Vec k5 = rhs(combine(y, h, term(a51, k1), term(a52, k2), term(a53, k3), term(a54, k4)),
                           direction);
        const Vec k6 = rhs(combine(y, h, term(a61, k1), term(a62, k2), term(a63, k3), term(a64, k4),
                                   term(a65, k5)),
                           direction);
        const Vec y1 = combine(y, h, term(a71, k1), term(a73, k3), term(a74, k4), term(a75, k5),
                               term(a76, k6));
        const Vec k7 = rhs(y1, direction);
        Vec err{};
        for (std::size_t i = 0; i < 4; ++i) {
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        }
        const double en = error_norm(y, y1, err, tol);
        const double fac11 = std::pow(en, kExpo);

        if (en > 1.0) {
            h /= std::min(1.0 / kMaxShrink, fac11 / kSafety);
            last_rejected = true;
            continue;
        }

        // Accepted: record the continuous extension.
        Trajectory::DenseStep ds{t, h, {}};
        for (std::size_t i = 0; i < 4; ++i) {
            const double dy = y1[i] - y[i];
            const double bspl = h * k1[i] - dy;
            ds.coeff[0][i] = y[i];
            ds.coeff[1][i] = dy;
            ds.coeff[2][i] = bspl;
            ds.coeff[3][i] = dy - h * k7[i] - bspl;
            ds.coeff[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                                  d7 * k7[i]);
        }
        const double t_new = final_step ? t_end : t + h;
        auto dense = [&ds](double tt) { return Trajectory::eval_step(ds, tt); };

        while (next_grid < grid_n && grid_time(next_grid) <= t_new) {
            const double tg = grid_time(next_grid);
            traj.grid.push_back({tg, next_grid == grid_n - 1 ? to_state(y1) : dense(tg)});
            if (tg > traj.samples.back().t) traj.samples.push_back(traj.grid.back());
            ++next_grid;
        }

        if (opts.detect_events) {
            const PhaseState s_old = to_state(y);
            const PhaseState s_new = to_state(y1);
            // x turning points.
            // Sign flips of xdot at rounding level (e.g. on x = +-pi/2) are not turnings.
            const double turn_floor =
                kTurnFloor * std::max(1.0, std::hypot(s_new.xdot, s_new.ydot));
            const bool flips =
                (s_old.xdot < 0.0 && s_new.xdot >= 0.0) || (s_old.xdot > 0.0 && s_new.xdot <= 0.0);
            if (flips && std::max(std::abs(s_old.xdot), std::abs(s_new.xdot)) > turn_floor) {
                auto g = [&](double tt) { return dense(tt).xdot; };
                const double te = s_new.xdot == 0.0 ? t_new : bisect(g, t, t_new, s_old.xdot);
                traj.events.push_back({te, EventKind::XTurning, dense(te)});
            }
            // y crossing a multiple of 2 pi.
            const double m_old = std::floor(s_old.y / kTwoPi);
            const double m_new = std::floor(s_new.y / kTwoPi);
            // One step may cross several levels when y is nearly linear.
            for (double m = std::min(m_old, m_new) + 1.0; m <= std::max(m_old, m_new); m += 1.0) {
                const double level = kTwoPi * m;
                auto g = [&](double tt) { return dense(tt).y - level; };
                const double te = bisect(g, t, t_new, s_old.y - level);
                traj.events.push_back({te, EventKind::YWrap, dense(te)});
            }
            // Return through the transverse section at the start.
            if (has_section) {
                max_excursion = std::max(max_excursion, distance(s_new));
                const double g_old = section(s_old);
                const double g_new = section(s_new);
                if (t > 0.0 && g_old < 0.0 && g_new >= 0.0) {
                    auto g = [&](double tt) { return section(dense(tt)); };
                    const double te = g_new == 0.0 ? t_new : bisect(g, t, t_new, g_old);
                    const PhaseState se = dense(te);
                    if (distance(se) < std::max(1e-6, 0.05 * max_excursion)) {
                        traj.events.push_back({te, EventKind::XReturn, se});
                    }
                }
            }
        }

        traj.steps_.push_back(ds);
        if (t_new > traj.samples.back().t) traj.samples.push_back({t_new, to_state(y1)});

        // PI step-size update.
        double fac = fac11 / std::pow(facold, kBeta);
        fac = std::clamp(fac / kSafety, 1.0 / kMaxGrow, 1.0 / kMaxShrink);
        double h_new = h / fac;
        if (last_rejected) h_new = std::min(h_new, h);
        facold = std::max(en, 1e-4);
        last_rejected = false;

        y = y1;
        k1 = k7;
        t = t_new;
        h = h_new;
    }

    std::sort(traj.events.begin(), traj.events.end(),
              [](const Event& a, const Event& b) { return a.t < b.t; });
    return traj;
}

ConservationReport conservation_report(const Trajectory& traj) {
    if (traj.samples.empty()) throw DomainError("conservation_report: empty trajectory");
    const FlowIntegrals ref = integrals(traj.samples.front().state);
    ConservationReport rep;
    for (const Sample& s : traj.samples) {
        const FlowIntegrals cur = integrals(s.state);
        rep.max_energy_drift = std::max(rep.max_energy_drift, std::abs(cur.energy - ref.energy));
        rep.max_momentum_drift =
            std::max(rep.max_momentum_drift, std::abs(cur.momentum - ref.momentum));
    }
    return rep;
}

ReturnInfo find_return(const Trajectory& traj) {
    if (traj.samples.empty()) throw DomainError("find_return: empty trajectory");
    ReturnInfo info;
    bool found = false;
    for (const Event& e : traj.events) {
        if (e.kind == EventKind::XTurning) info.turning_times.push_back(e.t);
        if (e.kind == EventKind::XReturn && !found) {
            found = true;
            info.return_time = e.t;
            info.return_state = e.state;
            info.delta_y = e.state.y - traj.samples.front().state.y;
        }
    }
    if (!found) {
        throw NoReturnFound("find_return: no return within t_end = " + std::to_string(traj.t_end()));
    }
    return info;
}

ReturnInfo find_return(const PhaseState& state0, double t_end, double tol) {
    return find_return(integrate(state0, t_end, tol));
}

}  // namespace magflow
