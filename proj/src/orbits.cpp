#include "magflow/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "magflow/errors.hpp"
#include "magflow/legendre.hpp"
#include "magflow/quadrature.hpp"

namespace magflow {
namespace {

constexpr double kCycleTol = 1e-12;
constexpr double kActionStable = 1e-8;
constexpr double kContractibleTol = 1e-10;

OrbitKind kind_of(double z1, double z2) noexcept {
    if (z2 - z1 < kDegenerateGap) return OrbitKind::Separatrix;
    for (double z : {z1, z2}) {
        if (std::abs(z - 1.0) < kDegenerateGap || std::abs(z + 1.0) < kDegenerateGap) {
            return OrbitKind::VerticalLine;
        }
    }
    const bool in1 = z1 > -1.0 && z1 < 1.0;
    const bool in2 = z2 > -1.0 && z2 < 1.0;
    if (in1 && in2) return OrbitKind::TrappedOval;
    if (in1 || in2) return OrbitKind::CrossingLibrator;
    if (z1 < -1.0 && z2 > 1.0) return OrbitKind::Winding;
    return OrbitKind::Forbidden;
}

// Composite Simpson on n (even) intervals of [0, T].
template <class F>
double simpson(F&& f, double T, std::size_t n) {
    const double h = T / static_cast<double>(n);
    double sum = f(0.0) + f(T);
    for (std::size_t i = 1; i < n; ++i) {
        sum += (i % 2 == 1 ? 4.0 : 2.0) * f(h * static_cast<double>(i));
    }
    return sum * h / 3.0;
}

template <class F>
double simpson_refined(F&& f, double T) {
    std::size_t n = 64;
    double prev = simpson(f, T, n);
    for (int level = 0; level < 16; ++level) {
        n *= 2;
        const double cur = simpson(f, T, n);
        if (std::abs(cur - prev) < kActionStable) return cur;
        prev = cur;
    }
    throw NumericError("action quadrature did not stabilise to 1e-8");
}

void require_closed(const CurveSampler& curve) {
    const PhaseState a = curve.at(0.0);
    const PhaseState b = curve.at(curve.period);
    const double mismatch = std::max({std::abs(std::remainder(b.x - a.x, kTwoPi)),
                                      std::abs(std::remainder(b.y - a.y, kTwoPi)),
                                      std::abs(b.xdot - a.xdot), std::abs(b.ydot - a.ydot)});
    if (!(mismatch <= kClosureTolerance)) {
        throw OpenCurve("curve endpoints differ by " + std::to_string(mismatch));
    }
}

// Trapped-oval y increment folded onto theta in [0, pi/2]: the integrand is
// -4 r^2 p sin^2 / (...) with a positive denominator, so the sign is -sign(p).
double trapped_delta_y(double energy, double momentum) {
    const double r = std::sqrt(2.0 * energy);
    auto integrand = [&](double theta) {
        const double s = std::sin(theta);
        const double za = momentum + r * s;
        const double zb = momentum - r * s;
        const double ca = std::sqrt((1.0 - za) * (1.0 + za));
        const double cb = std::sqrt((1.0 - zb) * (1.0 + zb));
        return -4.0 * r * r * momentum * s * s / ((ca + cb) * ca * cb);
    };
    // + 0.0 turns the p = 0 result -0 into +0.
    return 2.0 * integrate_adaptive(integrand, 0.0, 0.5 * kPi, kCycleTol) + 0.0;
}

}  // namespace

const char* to_string(OrbitKind k) noexcept {
    switch (k) {
        case OrbitKind::TrappedOval: return "TrappedOval";
        case OrbitKind::CrossingLibrator: return "CrossingLibrator";
        case OrbitKind::Winding: return "Winding";
        case OrbitKind::Separatrix: return "Separatrix";
        case OrbitKind::VerticalLine: return "VerticalLine";
        case OrbitKind::Forbidden: return "Forbidden";
    }
    return "?";
}

CycleIntegrals x_cycle_integrals(double energy, double momentum) {
    if (!(energy > 0.0)) throw DomainError("x_cycle_integrals: E must be positive");
    const double r = std::sqrt(2.0 * energy);
    const OrbitKind kind = kind_of(momentum - r, momentum + r);
    if (kind != OrbitKind::TrappedOval && kind != OrbitKind::CrossingLibrator &&
        kind != OrbitKind::Winding) {
        throw WrongRegime(std::string("x_cycle_integrals: no x-cycle on a ") + to_string(kind) +
                          " level");
    }
    const QuarticCurve c = quartic_from_params(energy, momentum);
    const double mid = c.oval_mid();
    const double half = c.oval_half_width();
    // z = mid + half sin(theta) turns dz/w into dtheta / outer(z).
    auto weighted = [&](auto&& g) {
        return [&, g](double theta) {
            const double z = mid + half * std::sin(theta);
            return g(z) / c.outer_factor(z);
        };
    };
    const double lo = -0.5 * kPi, hi = 0.5 * kPi;
    const double t_half = integrate_adaptive(weighted([](double) { return 1.0; }), lo, hi, kCycleTol);
    const double kin_half = integrate_adaptive(
        weighted([&](double z) { return 2.0 * energy - (momentum - z) * (momentum - z); }), lo, hi,
        kCycleTol);
    const double m = kind == OrbitKind::CrossingLibrator ? 2.0 : 1.0;

    CycleIntegrals out;
    out.period = 2.0 * m * t_half;
    out.kinetic = 2.0 * m * kin_half;
    if (kind == OrbitKind::TrappedOval) {
        out.delta_y = trapped_delta_y(energy, momentum);
    } else {
        const double y_half = integrate_adaptive(
            weighted([&](double z) { return momentum - z; }), lo, hi, kCycleTol);
        out.delta_y = 2.0 * m * y_half;
    }
    out.action = out.kinetic + momentum * out.delta_y;
    return out;
}

OrbitClassification classify(double energy, double momentum) {
    if (!(energy > 0.0) || !std::isfinite(energy) || !std::isfinite(momentum)) {
        throw DomainError("classify: need finite E > 0 and finite p");
    }
    OrbitClassification out;
    const double r = std::sqrt(2.0 * energy);
    out.energy = energy;
    out.momentum = momentum;
    out.z1 = momentum - r;
    out.z2 = momentum + r;
    out.kind = kind_of(out.z1, out.z2);
    switch (out.kind) {
        case OrbitKind::TrappedOval: out.strip = Strip::Both; break;
        case OrbitKind::CrossingLibrator:
        case OrbitKind::Winding: out.strip = Strip::Crossing; break;
        default: out.strip = Strip::Both; break;
    }
    if (out.kind == OrbitKind::TrappedOval || out.kind == OrbitKind::CrossingLibrator ||
        out.kind == OrbitKind::Winding) {
        const CycleIntegrals ci = x_cycle_integrals(energy, momentum);
        out.delta_y = ci.delta_y;
        out.period = ci.period;
        out.action = ci.action;
    }
    out.contractible = out.kind == OrbitKind::TrappedOval &&
                       std::abs(*out.delta_y) < kContractibleTol &&
                       std::abs(momentum) < kContractibleTol;
    return out;
}

double delta_y(double energy, double momentum) {
    if (!(energy > 0.0)) throw DomainError("delta_y: E must be positive");
    const double r = std::sqrt(2.0 * energy);
    const OrbitKind kind = kind_of(momentum - r, momentum + r);
    if (kind != OrbitKind::TrappedOval) {
        throw WrongRegime(std::string("delta_y: defined on trapped ovals, level is ") +
                          to_string(kind));
    }
    return trapped_delta_y(energy, momentum);
}

ClosedFormSolution contractible_orbit(double energy, Strip strip, double phase_x0, double y0,
                                      int xdot_sign) {
    if (energy >= 0.5) {
        throw DomainError("contractible_orbit: there are no contractible closed orbits for E >= 1/2");
    }
    if (!(energy > 0.0)) throw DomainError("contractible_orbit: E must be positive");
    if (strip != Strip::CosPositive && strip != Strip::CosNegative) {
        throw DomainError("contractible_orbit: strip must be cos>0 or cos<0");
    }
    if (std::abs(std::sin(phase_x0)) > std::sqrt(2.0 * energy) || std::abs(phase_x0) > 0.5 * kPi) {
        throw DomainError("contractible_orbit: |sin phase| exceeds the oval amplitude sqrt(2E)");
    }
    const double center = strip == Strip::CosPositive ? 0.0 : kPi;
    return build_solution(center + phase_x0, y0, energy, 0.0, xdot_sign);
}

CurveSampler sampler_of(const ClosedFormSolution& sol) {
    return {[&sol](double t) { return sol.eval(t); }, sol.x_period()};
}

CurveSampler sampler_of(const Trajectory& traj) {
    return {[&traj](double t) { return traj.at(t); }, traj.t_end()};
}

double action_direct(const CurveSampler& curve, double energy) {
    if (!(curve.period > 0.0)) return 0.0;
    require_closed(curve);
    auto integrand = [&](double t) { return reduced_lagrangian(curve.at(t), energy); };
    return simpson_refined(integrand, curve.period);
}

double action_direct(const Trajectory& traj, double energy) {
    if (traj.samples.size() < 2) return 0.0;
    return action_direct(sampler_of(traj), energy);
}

double action_increment(const CurveSampler& curve, double momentum) {
    if (!(curve.period > 0.0)) return 0.0;
    require_closed(curve);
    auto integrand = [&](double t) {
        const double v = curve.at(t).xdot;
        return v * v;
    };
    const double dy = curve.at(curve.period).y - curve.at(0.0).y;
    return simpson_refined(integrand, curve.period) + momentum * dy;
}

double action_increment(const Trajectory& traj, double momentum) {
    if (traj.samples.size() < 2) return 0.0;
    return action_increment(sampler_of(traj), momentum);
}

double action_contractible_formula(double energy) {
    if (!(energy > 0.0 && energy < 0.5)) {
        throw DomainError("action_contractible_formula: need 0 < E < 1/2");
    }
    const double amp = std::asin(std::sqrt(2.0 * energy));
    // x = amp sin(theta) removes the square-root endpoint behaviour.
    auto integrand = [&](double theta) {
        const double x = amp * std::sin(theta);
        const double s = std::sin(x);
        return std::sqrt(std::max(0.0, 2.0 * energy - s * s)) * amp * std::cos(theta);
    };
    return 2.0 * integrate_adaptive(integrand, -0.5 * kPi, 0.5 * kPi, 1e-12);
}

CylinderStrip minimizing_strip() noexcept { return {0.5 * kPi, 1.5 * kPi}; }

double film_action(const Film& film) {
    if (!(film.energy >= 0.0)) throw DomainError("film_action: E must be nonnegative");
    const double root = std::sqrt(2.0 * film.energy);
    if (const auto* strip = std::get_if<CylinderStrip>(&film.shape)) {
        const double width = strip->xb - strip->xa;
        if (!(width > 0.0 && width < kTwoPi)) {
            throw DomainError("film_action: strip width must lie in (0, 2pi)");
        }
        // Two boundary circles of length 2pi, flux 2pi (sin xb - sin xa).
        return root * 2.0 * kTwoPi + kTwoPi * (std::sin(strip->xb) - std::sin(strip->xa));
    }
    const ClosedFormSolution& orbit = std::get<OrbitDisc>(film.shape).boundary;
    if (!(std::abs(orbit.delta_y()) < kContractibleTol && orbit.regime() == OvalRegime::Trapped)) {
        throw DomainError("film_action: disc boundary must be a contractible closed orbit");
    }
    // Stokes: the flux of F through the disc is the circulation of sin x dy.
    const double T = orbit.x_period();
    auto speed = [&](double t) {
        const PhaseState s = orbit.eval_local(t);
        return std::hypot(s.xdot, s.ydot);
    };
    auto circulation = [&](double t) {
        const PhaseState s = orbit.eval_local(t);
        return std::sin(s.x) * s.ydot;
    };
    const double length = simpson_refined(speed, T);
    const double flux = simpson_refined(circulation, T);
    return root * length + flux;
}

StripSearchResult search_strip_minimum(double energy, int grid_n) {
    if (grid_n < 2) throw DomainError("search_strip_minimum: grid_n must be >= 2");
    StripSearchResult best{0.0, 0.0, std::numeric_limits<double>::infinity()};
    for (int i = 0; i < grid_n; ++i) {
        const double xa = kTwoPi * i / grid_n;
        for (int j = 1; j < grid_n; ++j) {
            const double xb = xa + kTwoPi * j / grid_n;
            const double value = film_action({CylinderStrip{xa, xb}, energy});
            if (value < best.action) best = {xa, xb, value};
        }
    }
    return best;
}

double mane_level_scan(int grid_n) {
    if (grid_n < 8) throw DomainError("mane_level_scan: grid_n must be >= 8");
    double sup = 0.0;
    for (int i = 0; i < grid_n; ++i) {
        const double s = std::sin(kTwoPi * i / grid_n);
        sup = std::max(sup, 0.5 * s * s);
    }
    return sup;
}

LagrangianScan scan_lagrangian_sign(double energy, std::size_t random_samples, std::uint64_t seed) {
    if (!(energy >= 0.0)) throw DomainError("scan_lagrangian_sign: E must be nonnegative");
    LagrangianScan scan;
    scan.energy = energy;
    scan.min_value = std::numeric_limits<double>::infinity();
    auto visit = [&](double x, double angle) {
        const PhaseState s{x, 0.0, std::cos(angle), std::sin(angle)};
        const double value = reduced_lagrangian(s, energy);
        ++scan.samples;
        if (value < 0.0) ++scan.negative;
        if (value < scan.min_value) {
            scan.min_value = value;
            scan.argmin = s;
        }
    };
    constexpr int kGrid = 64;
    for (int i = 0; i < kGrid; ++i) {
        for (int j = 0; j < kGrid; ++j) {
            visit(-kPi + kTwoPi * i / kGrid, kTwoPi * j / kGrid);
        }
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (std::size_t n = 0; n < random_samples; ++n) {
        const double x = angle(rng);
        visit(x, angle(rng));
    }
    return scan;
}

}  // namespace magflow
