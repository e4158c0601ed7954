#include "magflow/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "magflow/closed_form.hpp"
#include "magflow/errors.hpp"
#include "magflow/integrator.hpp"
#include "magflow/orbits.hpp"

namespace magflow::cli {
namespace {

using Json = nlohmann::ordered_json;

constexpr double kMinimizerTol = 1e-9;

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

int grid_or(const RunConfig& cfg, int fallback) { return cfg.grid_n > 0 ? cfg.grid_n : fallback; }

Strip parse_strip(const std::string& s) {
    if (s == "positive" || s == "1" || s == "cos+") return Strip::CosPositive;
    if (s == "negative" || s == "2" || s == "cos-") return Strip::CosNegative;
    throw DomainError("unknown strip '" + s + "' (expected positive or negative)");
}

const char* format_name(Format f) {
    switch (f) {
        case Format::Csv: return "csv";
        case Format::Json: return "json";
        case Format::Tsv: return "tsv";
    }
    return "?";
}

void require_format(const RunConfig& cfg, std::initializer_list<Format> allowed) {
    if (!cfg.format) return;
    if (std::find(allowed.begin(), allowed.end(), *cfg.format) == allowed.end()) {
        throw DomainError(std::string("format ") + format_name(*cfg.format) + " is not available for " +
                          to_string(cfg.command));
    }
}

void write_csv_header(std::ostream& out) { out << "t,x,y,xdot,ydot,E_inst,p_inst\n"; }

void write_csv_row(std::ostream& out, double t, const PhaseState& s) {
    out << format_number(t) << ',' << format_number(wrap_angle(s.x)) << ','
        << format_number(wrap_angle(s.y)) << ',' << format_number(s.xdot) << ','
        << format_number(s.ydot) << ',' << format_number(energy(s)) << ','
        << format_number(momentum(s)) << '\n';
}

void dump(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

// --- commands --------------------------------------------------------------

void cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    require_format(cfg, {Format::Csv});
    const PhaseState s0 =
        state_from_integrals(cfg.x0, cfg.y0, cfg.energy, cfg.momentum, cfg.xdot_sign);
    write_csv_header(out);
    if (s0.xdot == 0.0 && s0.ydot == 0.0) {
        write_csv_row(out, 0.0, s0);
        return;
    }
    IntegrateOptions opts;
    opts.grid_points = static_cast<std::size_t>(grid_or(cfg, 1001));
    opts.detect_events = false;
    const Trajectory traj = integrate(s0, cfg.t_end, cfg.tol, opts);
    for (const Sample& s : traj.grid) write_csv_row(out, s.t, s.state);
}

void cmd_compare(const RunConfig& cfg, std::ostream& out) {
    require_format(cfg, {Format::Json});
    const ClosedFormSolution sol =
        build_solution(cfg.x0, cfg.y0, cfg.energy, cfg.momentum, cfg.xdot_sign);
    const PhaseState s0 =
        state_from_integrals(cfg.x0, cfg.y0, cfg.energy, cfg.momentum, cfg.xdot_sign);
    IntegrateOptions opts;
    opts.grid_points = static_cast<std::size_t>(grid_or(cfg, 2001));
    opts.detect_events = false;
    const Trajectory traj = integrate(s0, cfg.t_end, cfg.tol, opts);
    double err_sinx = 0.0, err_y = 0.0;
    for (const Sample& s : traj.grid) {
        const PhaseState c = sol.eval(s.t);
        err_sinx = std::max(err_sinx, std::abs(std::sin(c.x) - std::sin(s.state.x)));
        err_y = std::max(err_y, std::abs(c.y - s.state.y));
    }
    const LegendreReduction& red = sol.reduction();
    Json j;
    j["E"] = cfg.energy;
    j["p"] = cfg.momentum;
    j["reduction"] = red.reduction_case == ReductionCase::Symmetric ? "Symmetric" : "General";
    j["regime"] = to_string(sol.regime());
    j["k2"] = red.k2;
    j["C"] = red.scale;
    j["D"] = sol.phase_constant();
    j["x_period"] = sol.x_period();
    j["z_period"] = sol.z_period();
    j["delta_y"] = sol.delta_y();
    j["sup_err_sinx"] = err_sinx;
    j["sup_err_y"] = err_y;
    j["samples"] = traj.grid.size();
    dump(out, j);
}

Json classification_json(const OrbitClassification& c) {
    Json j;
    j["kind"] = to_string(c.kind);
    j["E"] = c.energy;
    j["p"] = c.momentum;
    j["z1"] = c.z1;
    j["z2"] = c.z2;
    j["strip"] = to_string(c.strip);
    j["delta_y"] = optional_number(c.delta_y);
    j["period"] = optional_number(c.period);
    j["action"] = optional_number(c.action);
    j["contractible"] = c.contractible;
    return j;
}

void cmd_classify(const RunConfig& cfg, std::ostream& out) {
    require_format(cfg, {Format::Json});
    dump(out, classification_json(classify(cfg.energy, cfg.momentum)));
}

void cmd_orbit(const RunConfig& cfg, std::ostream& out) {
    require_format(cfg, {Format::Json, Format::Csv});
    const Strip strip = parse_strip(cfg.strip);
    const ClosedFormSolution sol = contractible_orbit(cfg.energy, strip, cfg.phase, cfg.y0);
    const int n = grid_or(cfg, 1001);
    if (cfg.format == Format::Csv) {
        write_csv_header(out);
        for (int i = 0; i < n; ++i) {
            const double t = sol.x_period() * i / (n - 1);
            write_csv_row(out, t, sol.eval(t));
        }
        return;
    }
    double max_sin = 0.0;
    for (int i = 0; i < n; ++i) {
        max_sin = std::max(max_sin, std::abs(std::sin(sol.eval_local(sol.x_period() * i / n).x)));
    }
    const CurveSampler curve = sampler_of(sol);
    Json j;
    j["E"] = cfg.energy;
    j["strip"] = to_string(strip);
    j["x0"] = sol.x0();
    j["period"] = sol.x_period();
    j["amplitude"] = std::asin(std::sqrt(2.0 * cfg.energy));
    j["max_abs_sin_x"] = max_sin;
    j["delta_y"] = sol.delta_y();
    j["k2"] = sol.reduction().k2;
    j["action_direct"] = action_direct(curve, cfg.energy);
    j["action_increment"] = action_increment(curve, 0.0);
    j["action_formula"] = action_contractible_formula(cfg.energy);
    dump(out, j);
}

// Vertical line x = +-pi/2 on a level whose double root sits at z = +-1.
std::optional<double> vertical_root(double energy, double momentum) {
    for (double z : {1.0, -1.0}) {
        if (std::abs(std::abs(momentum - z) - std::sqrt(2.0 * energy)) < kDegenerateGap) return z;
    }
    return std::nullopt;
}

void cmd_action(const RunConfig& cfg, std::ostream& out) {
    require_format(cfg, {Format::Json});
    Json j;
    j["E"] = cfg.energy;
    j["p"] = cfg.momentum;
    if (cfg.momentum == 0.0 && cfg.energy > 0.0 && cfg.energy < 0.5) {
        const ClosedFormSolution sol =
            contractible_orbit(cfg.energy, parse_strip(cfg.strip), cfg.phase, cfg.y0);
        const CurveSampler curve = sampler_of(sol);
        j["orbit"] = "contractible";
        j["closed"] = true;
        j["period"] = sol.x_period();
        j["action_direct"] = action_direct(curve, cfg.energy);
        j["action_increment"] = action_increment(curve, 0.0);
        j["action_formula"] = action_contractible_formula(cfg.energy);
        dump(out, j);
        return;
    }
    if (!(cfg.energy > 0.0)) throw DomainError("action: E must be positive");
    if (const auto z = vertical_root(cfg.energy, cfg.momentum)) {
        const double vy = cfg.momentum - *z;
        const double x = *z * 0.5 * kPi;
        const double y0 = cfg.y0;
        const CurveSampler line{[=](double t) { return PhaseState{x, y0 + vy * t, 0.0, vy}; },
                                kTwoPi / std::abs(vy)};
        j["orbit"] = "vertical_line";
        j["closed"] = true;
        j["period"] = line.period;
        j["action_direct"] = action_direct(line, cfg.energy);
        j["action_increment"] = action_increment(line, cfg.momentum);
        dump(out, j);
        return;
    }
    const OrbitClassification c = classify(cfg.energy, cfg.momentum);
    if (!c.action) {
        throw WrongRegime(std::string("action: no x-cycle on a ") + to_string(c.kind) + " level");
    }
    const CycleIntegrals ci = x_cycle_integrals(cfg.energy, cfg.momentum);
    j["orbit"] = to_string(c.kind);
    j["closed"] = c.contractible;
    j["period"] = ci.period;
    j["delta_y"] = ci.delta_y;
    j["kinetic"] = ci.kinetic;
    j["action_increment"] = ci.action;
    dump(out, j);
}

void cmd_film(const RunConfig& cfg, std::ostream& out) {
    require_format(cfg, {Format::Json});
    Json j;
    j["E"] = cfg.energy;
    j["pi_action"] = film_action({minimizing_strip(), cfg.energy});
    if (cfg.xa || cfg.xb) {
        if (!cfg.xa || !cfg.xb) throw DomainError("film: --xa and --xb go together");
        const double value = film_action({CylinderStrip{*cfg.xa, *cfg.xb}, cfg.energy});
        j["shape"] = "strip";
        j["xa"] = *cfg.xa;
        j["xb"] = *cfg.xb;
        j["action"] = value;
        j["minimizer"] = std::abs(std::sin(*cfg.xb) - std::sin(*cfg.xa) + 2.0) < kMinimizerTol;
    } else {
        const ClosedFormSolution sol =
            contractible_orbit(cfg.energy, parse_strip(cfg.strip), cfg.phase, cfg.y0);
        j["shape"] = "disc";
        j["action"] = film_action({OrbitDisc{sol}, cfg.energy});
        j["minimizer"] = false;
    }
    dump(out, j);
}

struct SweepRow {
    double energy = 0.0, momentum = 0.0;
    std::string kind;
    std::optional<double> delta_y, period, action;
};

void cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    require_format(cfg, {Format::Tsv});
    if (!(cfg.e_min > 0.0) || !(cfg.e_max >= cfg.e_min) || !(cfg.p_max >= cfg.p_min)) {
        throw DomainError("sweep: need 0 < e-min <= e-max and p-min <= p-max");
    }
    const int n = grid_or(cfg, 21);
    std::vector<SweepRow> rows(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    const auto cell = [&](std::size_t idx) {
        const std::size_t i = idx / static_cast<std::size_t>(n);
        const std::size_t j = idx % static_cast<std::size_t>(n);
        SweepRow& row = rows[idx];
        row.energy = cfg.e_min + (cfg.e_max - cfg.e_min) * static_cast<double>(i) / (n - 1);
        row.momentum = cfg.p_min + (cfg.p_max - cfg.p_min) * static_cast<double>(j) / (n - 1);
        const OrbitClassification c = classify(row.energy, row.momentum);
        row.kind = to_string(c.kind);
        row.delta_y = c.delta_y;
        row.period = c.period;
        row.action = c.action;
    };
    const unsigned workers = std::min<unsigned>(sweep_threads(), static_cast<unsigned>(rows.size()));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t idx = w; idx < rows.size(); idx += workers) cell(idx);
            } catch (...) {
                failures[w] = std::current_exception();
            }
        });
    }
    for (std::thread& t : pool) t.join();
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
    const auto cell_text = [](const std::optional<double>& v) {
        return v ? format_number(*v) : std::string("nan");
    };
    out << "E\tp\tkind\tdelta_y\tperiod\taction\n";
    for (const SweepRow& r : rows) {
        out << format_number(r.energy) << '\t' << format_number(r.momentum) << '\t' << r.kind
            << '\t' << cell_text(r.delta_y) << '\t' << cell_text(r.period) << '\t'
            << cell_text(r.action) << '\n';
    }
}

// --- configuration ---------------------------------------------------------

// Flag values; unset entries fall back to the config file, then defaults.
struct Flags {
    std::optional<double> e, p, x0, y0, t_end, tol, e_min, e_max, p_min, p_max, xa, xb, phase;
    std::optional<int> sign, grid_n;
    std::optional<std::string> strip, out, format;
    std::string config;
};

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    if (s == "tsv" || s == "tsv-plot") return Format::Tsv;
    throw DomainError("unknown format '" + s + "'");
}

template <class T>
void merge(T& target, const std::optional<T>& flag, const Json& file, const char* key) {
    if (flag) {
        target = *flag;
    } else if (file.contains(key)) {
        target = file.at(key).get<T>();
    }
}

template <class T>
void merge(std::optional<T>& target, const std::optional<T>& flag, const Json& file,
           const char* key) {
    if (flag) {
        target = flag;
    } else if (file.contains(key)) {
        target = file.at(key).get<T>();
    }
}

Json load_config(const std::string& path) {
    if (path.empty()) return Json::object();
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::exception& e) {
        throw DomainError("invalid config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw DomainError("config file " + path + " must hold a JSON object");
    return j;
}

RunConfig resolve(Command command, const Flags& f) {
    const Json file = load_config(f.config);
    RunConfig cfg;
    cfg.command = command;
    try {
        merge(cfg.energy, f.e, file, "e");
        merge(cfg.momentum, f.p, file, "p");
        merge(cfg.x0, f.x0, file, "x0");
        merge(cfg.y0, f.y0, file, "y0");
        merge(cfg.xdot_sign, f.sign, file, "sign");
        merge(cfg.t_end, f.t_end, file, "t-end");
        merge(cfg.tol, f.tol, file, "tol");
        merge(cfg.e_min, f.e_min, file, "e-min");
        merge(cfg.e_max, f.e_max, file, "e-max");
        merge(cfg.p_min, f.p_min, file, "p-min");
        merge(cfg.p_max, f.p_max, file, "p-max");
        merge(cfg.grid_n, f.grid_n, file, "grid-n");
        merge(cfg.xa, f.xa, file, "xa");
        merge(cfg.xb, f.xb, file, "xb");
        merge(cfg.strip, f.strip, file, "strip");
        merge(cfg.phase, f.phase, file, "phase");
        merge(cfg.out, f.out, file, "out");
        std::optional<std::string> format;
        merge(format, f.format, file, "format");
        if (format) cfg.format = parse_format(*format);
    } catch (const Json::exception& e) {
        throw DomainError(std::string("config value has the wrong type: ") + e.what());
    }
    return cfg;
}

}  // namespace

const char* to_string(Command c) noexcept {
    switch (c) {
        case Command::Simulate: return "simulate";
        case Command::Compare: return "compare";
        case Command::Classify: return "classify";
        case Command::Orbit: return "orbit";
        case Command::Action: return "action";
        case Command::Film: return "film";
        case Command::Sweep: return "sweep";
    }
    return "?";
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void validate(const RunConfig& cfg) {
    if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) throw DomainError("t-end must be positive");
    if (!(cfg.tol >= kMinTolerance && cfg.tol <= kMaxTolerance)) {
        throw DomainError("tol must lie in [1e-13, 1e-3]");
    }
    if (cfg.xdot_sign != 1 && cfg.xdot_sign != -1) throw DomainError("sign must be +1 or -1");
    if (cfg.grid_n != 0 && cfg.grid_n < 2) throw DomainError("grid-n must be at least 2");
    for (double v : {cfg.energy, cfg.momentum, cfg.x0, cfg.y0, cfg.phase}) {
        if (!std::isfinite(v)) throw DomainError("parameters must be finite");
    }
}

unsigned sweep_threads() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MAGFLOW_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, static_cast<unsigned>(cap));
    }
    return n;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        validate(cfg);
        std::ostringstream buffer;
        switch (cfg.command) {
            case Command::Simulate: cmd_simulate(cfg, buffer); break;
            case Command::Compare: cmd_compare(cfg, buffer); break;
            case Command::Classify: cmd_classify(cfg, buffer); break;
            case Command::Orbit: cmd_orbit(cfg, buffer); break;
            case Command::Action: cmd_action(cfg, buffer); break;
            case Command::Film: cmd_film(cfg, buffer); break;
            case Command::Sweep: cmd_sweep(cfg, buffer); break;
        }
        if (cfg.out.empty()) {
            out << buffer.str();
        } else {
            std::ofstream file(cfg.out, std::ios::binary);
            if (!file) throw DomainError("cannot write " + cfg.out);
            file << buffer.str();
        }
        return 0;
    } catch (const Error& e) {
        err << "magflow " << to_string(cfg.command) << ": " << e.what() << '\n';
        return e.exit_code();
    }
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Magnetic geodesic flow on the flat torus with field cos x dx^dy", "magflow"};
    app.fallthrough();
    app.require_subcommand(1);
    Flags f;
    app.add_option("--e", f.e, "energy E");
    app.add_option("--p", f.p, "y-momentum p");
    app.add_option("--x0", f.x0, "initial x");
    app.add_option("--y0", f.y0, "initial y");
    app.add_option("--sign", f.sign, "sign of xdot(0), +1 or -1");
    app.add_option("--t-end", f.t_end, "integration horizon");
    app.add_option("--tol", f.tol, "integrator tolerance in [1e-13, 1e-3]");
    app.add_option("--e-min", f.e_min, "sweep: smallest E");
    app.add_option("--e-max", f.e_max, "sweep: largest E");
    app.add_option("--p-min", f.p_min, "sweep: smallest p");
    app.add_option("--p-max", f.p_max, "sweep: largest p");
    app.add_option("--grid-n", f.grid_n, "grid points (samples or sweep cells per axis)");
    app.add_option("--xa", f.xa, "film: lower strip edge");
    app.add_option("--xb", f.xb, "film: upper strip edge");
    app.add_option("--strip", f.strip, "positive (cos x > 0) or negative (cos x < 0)");
    app.add_option("--phase", f.phase, "offset of x0 from the strip center");
    app.add_option("--out", f.out, "output file (default stdout)");
    app.add_option("--format", f.format, "csv, json or tsv");
    app.add_option("--config", f.config, "JSON file with flag values; flags override it");

    const std::pair<Command, const char*> commands[] = {
        {Command::Simulate, "integrate the flow numerically and write a CSV trajectory"},
        {Command::Compare, "closed form against numerical integration"},
        {Command::Classify, "orbit type of the (E, p) level"},
        {Command::Orbit, "contractible closed orbit in a strip"},
        {Command::Action, "action of a closed orbit"},
        {Command::Film, "film action of a cylinder strip or orbit disc"},
        {Command::Sweep, "classification over an (E, p) grid as TSV"},
    };
    std::vector<std::pair<Command, CLI::App*>> subs;
    for (const auto& [cmd, help] : commands) subs.emplace_back(cmd, app.add_subcommand(to_string(cmd), help));

    std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(rest.begin(), rest.end());
    try {
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }
    Command command = Command::Classify;
    for (const auto& [cmd, sub] : subs) {
        if (sub->parsed()) command = cmd;
    }
    RunConfig cfg;
    try {
        cfg = resolve(command, f);
    } catch (const Error& e) {
        err << "magflow: " << e.what() << '\n';
        return e.exit_code();
    }
    return run(cfg, out, err);
}

}  // namespace magflow::cli
