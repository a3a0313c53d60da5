#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace kmzi::cli {

/// Bad command line or config file; maps to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Command {
    QfiVsTime,
    QfiVsNmaxInput,
    QfiVsNmaxPhase,
    Calibrate,
    Plateau,
    GainMap,
    Benchmark,
    Selfcheck,
};

const char* command_name(Command command);

/// Fully validated run configuration. Numeric defaults are zero; fields that
/// a command does not use keep their defaults, so value comparison works for
/// the round-trip check.
struct RunConfig {
    Command command = Command::Selfcheck;

    double r = 0.0;
    double phi = 0.0;
    double chi = 0.0;
    double gamma = 0.0;
    double alpha_re = 0.0;
    double alpha_im = 0.0;

    int t_max = 0;        // qfi-vs-time, benchmark
    int t = 0;            // nmax sweeps: evaluation time
    int t_plateau = 0;    // plateau
    double conv_tol = 0.0;
    int probe_steps = 0;  // 0 = automatic window
    int t_horizon = 0;    // 0 = automatic horizon
    int points = 0;       // generated phase grid size

    double n = 0.0;      // benchmark photon budget
    double n_cap = 0.0;  // calibration photon cap

    std::vector<double> n_grid;
    std::vector<double> phi_grid;
    double phi_from = 0.0;
    double phi_to = 0.0;
    std::vector<double> gamma_grid;
    std::vector<double> nmax_grid;

    std::string out;
    int threads = 0;  // 0 = hardware concurrency

    bool operator==(const RunConfig&) const = default;
};

/// Parses "0.1", "31778pi/1000000", "34pi/1000", "pi/2" or "pi" to radians.
/// Throws std::invalid_argument on malformed input.
double parse_angle(const std::string& text);

/// Parses the command line. Flags take "--key value" or "--key=value" form;
/// "--config file.json" supplies defaults from a flat JSON object whose keys
/// match the flag names, with explicit flags taking precedence. Unknown keys
/// raise UsageError naming the key.
RunConfig parse_config(int argc, const char* const* argv);

/// Flat JSON form of a config; parse_config on it reproduces the config.
nlohmann::json serialize_config(const RunConfig& config);

std::string usage_text();

}  // namespace kmzi::cli
