#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace magflow::cli {

enum class Command { Simulate, Compare, Classify, Orbit, Action, Film, Sweep };
enum class Format { Csv, Json, Tsv };

const char* to_string(Command c) noexcept;

/// Fully resolved settings of one invocation (file values overridden by flags).
struct RunConfig {
    Command command = Command::Classify;
    double energy = 0.125;
    double momentum = 0.0;
    double x0 = 0.0;
    double y0 = 0.0;
    int xdot_sign = 1;
    double t_end = 50.0;
    double tol = 1e-11;
    double e_min = 0.05, e_max = 1.0;
    double p_min = -1.0, p_max = 1.0;
    int grid_n = 0;  ///< 0 selects the per-command default
    std::optional<double> xa, xb;
    std::string strip = "positive";
    double phase = 0.0;
    std::string out;
    std::optional<Format> format;
};

/// Throws DomainError on t_end <= 0, tol outside [1e-13, 1e-3], sign not
/// +-1, or an explicit grid count below 2.
void validate(const RunConfig& cfg);

/// Formats a double with 17 significant digits, locale independent.
std::string format_number(double v);

/// Runs one command and writes its report to `out`. Returns the exit code:
/// 0 success, 2 domain or regime error, 3 numeric failure.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv (including argv[0]), merges an optional --config JSON file
/// and runs the selected command.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Number of sweep worker threads: MAGFLOW_THREADS if set and positive,
/// otherwise the hardware concurrency, at least 1.
unsigned sweep_threads();

}  // namespace magflow::cli
