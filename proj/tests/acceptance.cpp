// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "magflow/closed_form.hpp"
#include "magflow/errors.hpp"
#include "magflow/integrator.hpp"
#include "magflow/jacobi.hpp"
#include "magflow/legendre.hpp"
#include "magflow/orbits.hpp"
#include "oracle.hpp"

using namespace magflow;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    double budget_s = 0.0;  // 0 = no runtime bound
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.budget_s > 0.0 && secs >= o.budget_s) {
        o.pass = false;
        o.detail += " (runtime over budget)";
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %2d  %-34s %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double agm_oracle(double a, double b) {
    for (int i = 0; i < 64 && std::abs(a - b) > 1e-16 * a; ++i) {
        const double m = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = m;
    }
    return 0.5 * (a + b);
}

Outcome conservation() {
    const PhaseState s0 = state_from_integrals(0.0, 0.0, 0.3, 0.2, 1);
    const ConservationReport r = conservation_report(integrate(s0, 100.0, 1e-11));
    return {r.max_energy_drift < 1e-9 && r.max_momentum_drift < 1e-9,
            fmt("max|dE| = %.2e, max|dp| = %.2e", r.max_energy_drift, r.max_momentum_drift), 5.0};
}

Outcome closed_vs_numeric() {
    std::mt19937_64 rng(2024);
    std::bernoulli_distribution coin;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const auto lv = oracle::random_level(rng, false, 2e-2);
        const double r = std::sqrt(2.0 * lv.energy);
        std::uniform_real_distribution<double> zd(std::max(-1.0, lv.momentum - r),
                                                  std::min(1.0, lv.momentum + r));
        const double z = zd(rng);
        const double x0 = coin(rng) ? std::asin(z) : kPi - std::asin(z);
        const ClosedFormSolution sol = build_solution(x0, 0.0, lv.energy, lv.momentum, coin(rng) ? 1 : -1);
        IntegrateOptions opts;
        opts.grid_points = 2001;
        opts.detect_events = false;
        const Trajectory tr = integrate(sol.eval(0.0), 50.0, 1e-11, opts);
        for (const Sample& s : tr.grid) {
            worst = std::max(worst, std::abs(sol.sin_x(s.t) - std::sin(s.state.x)));
        }
    }
    return {worst < 1e-6, fmt("sup|sin x_closed - sin x_numeric| = %.2e over 20 levels", worst), 30.0};
}

Outcome symmetric_reduction() {
    const LegendreReduction red = reduce_to_legendre(quartic_from_params(0.125, 0.0));
    const double K = kPi / (2.0 * agm_oracle(1.0, std::sqrt(0.75)));
    const double period = 4.0 * K;
    const ClosedFormSolution sol = build_solution(0.0, 0.0, 0.125, 0.0, 1);
    const ReturnInfo ret = find_return(sol.eval(0.0), 1.5 * period, 1e-12);
    const bool ok = red.reduction_case == ReductionCase::Symmetric && std::abs(red.k2 - 0.25) < 1e-12 &&
                    std::abs(sol.x_period() - period) < 1e-12 &&
                    std::abs(ret.return_time - period) < 1e-6 && std::abs(period - 6.7430016) < 1e-6;
    return {ok, fmt("k2 - 0.25 = %.1e, 4K = %.9f, |T_numeric - 4K| = %.1e", red.k2 - 0.25, period,
                    std::abs(ret.return_time - period))};
}

Outcome pullback() {
    std::mt19937_64 rng(77);
    double worst = 0.0;
    int curves = 0;
    while (curves < 10) {
        const auto lv = oracle::random_level(rng, false, 1e-2);
        if (std::abs(lv.momentum) < 1e-3) continue;
        const LegendreReduction red = reduce_to_legendre(quartic_from_params(lv.energy, lv.momentum));
        if (red.reduction_case != ReductionCase::General) continue;
        ++curves;
        const QuarticCurve& c = red.curve;
        std::uniform_real_distribution<double> zd(c.a1, c.a2);
        for (int s = 0; s < 5; ++s) {
            double za = zd(rng), zb = zd(rng);
            if (za > zb) std::swap(za, zb);
            const double lhs = oracle::oval_integral(c.a1, c.a2, c.a3, c.a4, za, zb);
            const double k = red.k;
            const double rhs = red.scale * oracle::adaptive_simpson(
                                               [k](double f) {
                                                   return 1.0 / std::sqrt(1.0 - k * k * std::sin(f) * std::sin(f));
                                               },
                                               std::asin(map_z_to_xi(red, za)),
                                               std::asin(map_z_to_xi(red, zb)), 1e-13);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return {worst < 1e-8, fmt("max |int dz/w - C int dxi/eta| = %.2e (50 subintervals)", worst)};
}

Outcome jacobi_kernel() {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ku(0.0, 0.99), uu(-20.0, 20.0);
    double ident = 0.0, zero_k = 0.0, period = 0.0;
    const double h = 1e-5;
    for (int i = 0; i < 200; ++i) {
        const double k = ku(rng), u = uu(rng);
        const double d = (sn(u + h, k) - sn(u - h, k)) / (2 * h);
        const double s = sn(u, k);
        ident = std::max(ident, std::abs(d * d - (1 - s * s) * (1 - k * k * s * s)));
    }
    for (int i = 0; i <= 1000; ++i) {
        const double u = -50.0 + 0.1 * i;
        zero_k = std::max(zero_k, std::abs(sn(u, 0.0) - std::sin(u)));
    }
    for (int i = 0; i < 100; ++i) {
        const double k = ku(rng), u = uu(rng);
        period = std::max(period, std::abs(sn(u + 4.0 * complete_K(k), k) - sn(u, k)));
    }
    return {ident < 1e-7 && zero_k < 1e-13 && period < 1e-11,
            fmt("identity %.1e, |sn(u,0) - sin u| %.1e, 4K-periodicity %.1e", ident, zero_k, period)};
}

Outcome contractible_action() {
    double min_action = 1e300, worst_inc = 0.0, worst_formula = 0.0;
    for (double e : {0.05, 0.125, 0.25, 0.4, 0.49}) {
        const ClosedFormSolution sol = contractible_orbit(e, Strip::CosPositive, 0.0);
        const CurveSampler curve = sampler_of(sol);
        const double direct = action_direct(curve, e);
        min_action = std::min(min_action, direct);
        worst_inc = std::max(worst_inc, std::abs(direct - action_increment(curve, 0.0)));
        worst_formula = std::max(worst_formula, std::abs(direct - action_contractible_formula(e)));
    }
    return {min_action > 1e-4 && worst_inc < 1e-7 && worst_formula < 1e-6,
            fmt("min S = %.4f, |direct - increment| %.1e, |direct - formula| %.1e", min_action, worst_inc,
                worst_formula)};
}

Outcome film_minimum() {
    const double pi_value = film_action({minimizing_strip(), 0.125});
    bool ok = std::abs(pi_value + kTwoPi) < 1e-12;
    double worst_pos = 0.0;
    for (double e : {0.125, 0.3}) {
        const StripSearchResult best = search_strip_minimum(e, 200);
        const double dxa = std::abs(std::remainder(best.xa - 0.5 * kPi, kTwoPi));
        const double dxb = std::abs(std::remainder(best.xb - 1.5 * kPi, kTwoPi));
        worst_pos = std::max({worst_pos, dxa, dxb});
        ok = ok && dxa < 1e-3 && dxb < 1e-3 &&
             std::abs(best.action - film_action({minimizing_strip(), e})) < 1e-12;
    }
    return {ok, fmt("S(Pi, 1/8) + 2 pi = %.1e, grid argmin offset from Pi %.1e", pi_value + kTwoPi, worst_pos)};
}

Outcome no_contractible_above_half() {
    int throws = 0, contractible = 0;
    for (double e : {0.5, 0.7}) {
        try {
            contractible_orbit(e, Strip::CosPositive, 0.0);
        } catch (const DomainError&) {
            ++throws;
        }
        for (int i = 0; i <= 100; ++i) {
            const double p = -2.5 + 5.0 * i / 100.0;
            const OrbitClassification c = classify(e, p);
            if (c.contractible || c.kind == OrbitKind::TrappedOval) ++contractible;
        }
    }
    return {throws == 2 && contractible == 0,
            fmt("domain errors %.0f/2, contractible classifications %.0f/202", throws, contractible)};
}

Outcome sign_law() {
    std::mt19937_64 rng(909);
    int wrong = 0;
    for (int i = 0; i < 50; ++i) {
        const auto lv = oracle::random_level(rng, true, 1e-3);
        const double dy = delta_y(lv.energy, lv.momentum);
        if ((dy > 0.0) != (lv.momentum < 0.0) || dy == 0.0) ++wrong;
    }
    double zero = 0.0;
    for (double e : {0.01, 0.125, 0.3, 0.49}) zero = std::max(zero, std::abs(delta_y(e, 0.0)));
    return {wrong == 0 && zero < 1e-10, fmt("sign violations %.0f/50, max |dy(p=0)| = %.1e", wrong, zero)};
}

Outcome mane_level() {
    bool ok = true;
    for (int n : {8, 16, 100, 256, 1000}) ok = ok && mane_level_scan(n) == 0.5;
    const LagrangianScan lo = scan_lagrangian_sign(0.4, 1000);
    const LagrangianScan mid = scan_lagrangian_sign(0.5, 1000);
    const LagrangianScan hi = scan_lagrangian_sign(0.6, 1000);
    ok = ok && lo.negative > 0 && hi.negative == 0 && mid.min_value >= -1e-9 &&
         std::abs(mid.min_value) < 1e-9 && std::abs(std::sin(mid.argmin.x) + 1.0) < 1e-6 &&
         std::abs(mid.argmin.xdot) < 1e-6;
    return {ok, fmt("negatives at E=0.4: %.0f, E=0.6: %.0f, min at E=1/2: %.1e", lo.negative, hi.negative,
                    mid.min_value)};
}

}  // namespace

int main() {
    report(1, "conservation", conservation);
    report(2, "closed form vs numerics", closed_vs_numeric);
    report(3, "symmetric reduction and period", symmetric_reduction);
    report(4, "pullback identity", pullback);
    report(5, "Jacobi kernel", jacobi_kernel);
    report(6, "contractible orbit actions", contractible_action);
    report(7, "minimizing film", film_minimum);
    report(8, "no contractible orbits for E >= 1/2", no_contractible_above_half);
    report(9, "y-shift sign law", sign_law);
    report(10, "Mane critical level", mane_level);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
