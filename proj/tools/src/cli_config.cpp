#include "cli_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace kmzi::cli {

namespace {

double parse_plain_double(const std::string& text) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw std::invalid_argument("'" + text + "' is not a number");
    }
    return value;
}

/// Merged view over command-line flags and the optional config file. Typed
/// getters consume keys; anything left unconsumed is unknown and rejected.
class Args {
  public:
    Args(std::map<std::string, std::string> flags, nlohmann::json file)
        : flags_(std::move(flags)), file_(std::move(file)) {}

    bool has(const std::string& key) const {
        return flags_.count(key) > 0 || file_.contains(key);
    }

    std::optional<std::string> take_string(const std::string& key) {
        consumed_.insert(key);
        if (const auto it = flags_.find(key); it != flags_.end()) {
            return it->second;
        }
        if (file_.contains(key)) {
            const nlohmann::json& value = file_.at(key);
            if (value.is_string()) {
                return value.get<std::string>();
            }
            throw UsageError("config key '" + key + "' must be a string");
        }
        return std::nullopt;
    }

    std::optional<double> take_double(const std::string& key) {
        consumed_.insert(key);
        if (const auto it = flags_.find(key); it != flags_.end()) {
            try {
                return parse_plain_double(it->second);
            } catch (const std::invalid_argument& error) {
                throw UsageError("--" + key + ": " + error.what());
            }
        }
        if (file_.contains(key)) {
            const nlohmann::json& value = file_.at(key);
            if (value.is_number()) {
                return value.get<double>();
            }
            throw UsageError("config key '" + key + "' must be a number");
        }
        return std::nullopt;
    }

    std::optional<double> take_angle(const std::string& key) {
        consumed_.insert(key);
        std::string text;
        if (const auto it = flags_.find(key); it != flags_.end()) {
            text = it->second;
        } else if (file_.contains(key)) {
            const nlohmann::json& value = file_.at(key);
            if (value.is_number()) {
                return value.get<double>();
            }
            if (value.is_string()) {
                text = value.get<std::string>();
            } else {
                throw UsageError("config key '" + key + "' must be a number or angle literal");
            }
        } else {
            return std::nullopt;
        }
        try {
            return parse_angle(text);
        } catch (const std::invalid_argument& error) {
            throw UsageError("--" + key + ": " + error.what());
        }
    }

    std::optional<int> take_int(const std::string& key) {
        const auto value = take_double(key);
        if (!value) {
            return std::nullopt;
        }
        if (*value != std::floor(*value) || std::abs(*value) > 2e9) {
            throw UsageError("--" + key + " must be an integer");
        }
        return static_cast<int>(*value);
    }

    std::optional<std::vector<double>> take_list(const std::string& key, bool angles) {
        consumed_.insert(key);
        std::vector<std::string> items;
        if (const auto it = flags_.find(key); it != flags_.end()) {
            std::stringstream stream(it->second);
            std::string item;
            while (std::getline(stream, item, ',')) {
                items.push_back(item);
            }
        } else if (file_.contains(key)) {
            const nlohmann::json& value = file_.at(key);
            if (!value.is_array()) {
                throw UsageError("config key '" + key + "' must be an array");
            }
            std::vector<double> out;
            for (const nlohmann::json& element : value) {
                if (element.is_number()) {
                    out.push_back(element.get<double>());
                } else if (element.is_string() && angles) {
                    out.push_back(parse_angle(element.get<std::string>()));
                } else {
                    throw UsageError("config key '" + key + "' has a non-numeric entry");
                }
            }
            return out;
        } else {
            return std::nullopt;
        }
        std::vector<double> out;
        for (const std::string& item : items) {
            try {
                out.push_back(angles ? parse_angle(item) : parse_plain_double(item));
            } catch (const std::invalid_argument& error) {
                throw UsageError("--" + key + ": " + error.what());
            }
        }
        return out;
    }

    /// Rejects any key that no getter asked for.
    void finish(const std::string& command) const {
        for (const auto& [key, value] : flags_) {
            if (!consumed_.count(key)) {
                throw UsageError("unknown option --" + key + " for command '" + command + "'");
            }
        }
        for (const auto& [key, value] : file_.items()) {
            if (!consumed_.count(key)) {
                throw UsageError("unknown config key '" + key + "' for command '" + command +
                                 "'");
            }
        }
    }

  private:
    std::map<std::string, std::string> flags_;
    nlohmann::json file_;
    std::set<std::string> consumed_;
};

std::optional<Command> command_from_name(const std::string& name) {
    if (name == "qfi-vs-time") return Command::QfiVsTime;
    if (name == "qfi-vs-nmax-input") return Command::QfiVsNmaxInput;
    if (name == "qfi-vs-nmax-phase") return Command::QfiVsNmaxPhase;
    if (name == "calibrate") return Command::Calibrate;
    if (name == "plateau") return Command::Plateau;
    if (name == "gain-map") return Command::GainMap;
    if (name == "benchmark") return Command::Benchmark;
    if (name == "selfcheck") return Command::Selfcheck;
    return std::nullopt;
}

double require(std::optional<double> value, const char* key) {
    if (!value) {
        throw UsageError(std::string("missing required --") + key);
    }
    return *value;
}

int require(std::optional<int> value, const char* key) {
    if (!value) {
        throw UsageError(std::string("missing required --") + key);
    }
    return *value;
}

void check(bool ok, const std::string& message) {
    if (!ok) {
        throw UsageError(message);
    }
}

}  // namespace

const char* command_name(Command command) {
    switch (command) {
        case Command::QfiVsTime: return "qfi-vs-time";
        case Command::QfiVsNmaxInput: return "qfi-vs-nmax-input";
        case Command::QfiVsNmaxPhase: return "qfi-vs-nmax-phase";
        case Command::Calibrate: return "calibrate";
        case Command::Plateau: return "plateau";
        case Command::GainMap: return "gain-map";
        case Command::Benchmark: return "benchmark";
        case Command::Selfcheck: return "selfcheck";
    }
    return "?";
}

double parse_angle(const std::string& text) {
    const std::size_t pos = text.find("pi");
    if (pos == std::string::npos) {
        return parse_plain_double(text);
    }
    const std::string prefix = text.substr(0, pos);
    const std::string suffix = text.substr(pos + 2);

    double numerator = 1.0;
    if (prefix == "-") {
        numerator = -1.0;
    } else if (!prefix.empty()) {
        numerator = parse_plain_double(prefix);
    }
    double denominator = 1.0;
    if (!suffix.empty()) {
        if (suffix.front() != '/') {
            throw std::invalid_argument("'" + text + "' is not a valid angle literal");
        }
        denominator = parse_plain_double(suffix.substr(1));
        if (denominator == 0.0) {
            throw std::invalid_argument("'" + text + "' divides by zero");
        }
    }
    return numerator * std::numbers::pi / denominator;
}

RunConfig parse_config(int argc, const char* const* argv) {
    if (argc < 2) {
        throw UsageError("missing command\n" + usage_text());
    }
    const std::string command_text = argv[1];
    const std::optional<Command> command = command_from_name(command_text);
    if (!command) {
        throw UsageError("unknown command '" + command_text + "'\n" + usage_text());
    }

    std::map<std::string, std::string> flags;
    for (int i = 2; i < argc; ++i) {
        std::string token = argv[i];
        if (token.rfind("--", 0) != 0 || token.size() <= 2) {
            throw UsageError("expected a --flag, got '" + token + "'");
        }
        token.erase(0, 2);
        std::string value;
        if (const std::size_t eq = token.find('='); eq != std::string::npos) {
            value = token.substr(eq + 1);
            token.erase(eq);
        } else {
            if (i + 1 >= argc) {
                throw UsageError("--" + token + " expects a value");
            }
            value = argv[++i];
        }
        flags[token] = value;
    }

    nlohmann::json file = nlohmann::json::object();
    if (const auto it = flags.find("config"); it != flags.end()) {
        std::ifstream stream(it->second);
        if (!stream) {
            throw UsageError("cannot open config file '" + it->second + "'");
        }
        try {
            stream >> file;
        } catch (const nlohmann::json::exception& error) {
            throw UsageError("config file '" + it->second + "': " + error.what());
        }
        if (!file.is_object()) {
            throw UsageError("config file '" + it->second + "' must hold a JSON object");
        }
        flags.erase(it);
    }

    Args args(std::move(flags), std::move(file));

    // A "command" key in the file must agree with the subcommand.
    if (const auto file_command = args.take_string("command")) {
        if (*file_command != command_text) {
            throw UsageError("config file command '" + *file_command +
                             "' does not match subcommand '" + command_text + "'");
        }
    }

    RunConfig config;
    config.command = *command;
    config.out = args.take_string("out").value_or("");
    if (const auto threads = args.take_int("threads")) {
        config.threads = *threads;
    } else if (const char* env = std::getenv("KICKED_MZI_THREADS")) {
        try {
            config.threads = static_cast<int>(parse_plain_double(env));
        } catch (const std::invalid_argument&) {
            throw UsageError("KICKED_MZI_THREADS is not a number");
        }
    }
    check(config.threads >= 0, "--threads must be >= 0");

    const auto take_kick_common = [&](bool phi_required) {
        config.r = require(args.take_double("r"), "r");
        check(config.r >= 0.0, "--r must be >= 0");
        if (phi_required) {
            config.phi = require(args.take_angle("phi"), "phi");
        }
        config.chi = args.take_angle("chi").value_or(0.0);
        config.gamma = args.take_double("gamma").value_or(0.0);
        check(config.gamma >= 0.0, "--gamma must be >= 0");
    };
    const auto take_alpha = [&] {
        config.alpha_re = args.take_double("alpha-re").value_or(0.0);
        config.alpha_im = args.take_double("alpha-im").value_or(0.0);
    };

    switch (*command) {
        case Command::QfiVsTime: {
            take_kick_common(true);
            take_alpha();
            config.t_max = require(args.take_int("t-max"), "t-max");
            check(config.t_max >= 1, "--t-max must be >= 1");
            break;
        }
        case Command::QfiVsNmaxInput: {
            take_kick_common(true);
            config.t = require(args.take_int("t"), "t");
            check(config.t >= 1, "--t must be >= 1");
            config.n_grid = args.take_list("n-grid", false).value_or([] {
                std::vector<double> grid;
                for (int n = 0; n <= 25; ++n) {
                    grid.push_back(static_cast<double>(n));
                }
                return grid;
            }());
            check(!config.n_grid.empty(), "--n-grid must be nonempty");
            for (const double n : config.n_grid) {
                check(n >= 0.0, "--n-grid entries must be >= 0");
            }
            break;
        }
        case Command::QfiVsNmaxPhase: {
            take_kick_common(false);
            check(config.r > 0.0, "--r must be > 0 for a phase sweep");
            take_alpha();
            config.t = require(args.take_int("t"), "t");
            check(config.t >= 1, "--t must be >= 1");
            if (const auto grid = args.take_list("phi-grid", true)) {
                config.phi_grid = *grid;
                check(!config.phi_grid.empty(), "--phi-grid must be nonempty");
                check(!args.has("phi-from") && !args.has("phi-to") && !args.has("points"),
                      "--phi-grid excludes --phi-from/--phi-to/--points");
            } else {
                config.phi_from = require(args.take_angle("phi-from"), "phi-from");
                config.phi_to = require(args.take_angle("phi-to"), "phi-to");
                config.points = args.take_int("points").value_or(20);
                check(config.points >= 2, "--points must be >= 2");
            }
            break;
        }
        case Command::Calibrate: {
            config.r = require(args.take_double("r"), "r");
            check(config.r > 0.0, "--r must be > 0");
            take_alpha();
            config.n_cap = require(args.take_double("n-cap"), "n-cap");
            check(config.n_cap > 0.0, "--n-cap must be > 0");
            config.probe_steps = args.take_int("probe-steps").value_or(0);
            check(config.probe_steps >= 0, "--probe-steps must be >= 0");
            break;
        }
        case Command::Plateau: {
            take_kick_common(true);
            check(config.gamma > 0.0, "--gamma must be > 0 for plateau extraction");
            take_alpha();
            config.t_plateau = args.take_int("t-plateau").value_or(4000);
            check(config.t_plateau >= 40, "--t-plateau must be >= 40");
            config.conv_tol = args.take_double("conv-tol").value_or(1e-3);
            check(config.conv_tol > 0.0, "--conv-tol must be > 0");
            break;
        }
        case Command::GainMap: {
            config.r = require(args.take_double("r"), "r");
            check(config.r >= 0.0, "--r must be >= 0");
            take_alpha();
            config.gamma_grid = *[&] {
                auto grid = args.take_list("gamma-grid", false);
                check(grid.has_value() && !grid->empty(), "missing required --gamma-grid");
                return grid;
            }();
            config.nmax_grid = *[&] {
                auto grid = args.take_list("nmax-grid", false);
                check(grid.has_value() && !grid->empty(), "missing required --nmax-grid");
                return grid;
            }();
            for (const double gamma : config.gamma_grid) {
                check(gamma >= 0.0, "--gamma-grid entries must be >= 0");
            }
            for (const double nmax : config.nmax_grid) {
                check(nmax > 0.0, "--nmax-grid entries must be > 0");
            }
            config.t_horizon = args.take_int("t-horizon").value_or(0);
            check(config.t_horizon >= 0, "--t-horizon must be >= 0");
            break;
        }
        case Command::Benchmark: {
            config.n = require(args.take_double("n"), "n");
            check(config.n >= 0.0, "--n must be >= 0");
            config.t_max = require(args.take_int("t-max"), "t-max");
            check(config.t_max >= 1, "--t-max must be >= 1");
            break;
        }
        case Command::Selfcheck: {
            break;
        }
    }

    if (*command != Command::Selfcheck) {
        check(!config.out.empty(), "missing required --out");
    }
    args.finish(command_text);
    return config;
}

nlohmann::json serialize_config(const RunConfig& config) {
    nlohmann::json out;
    out["command"] = command_name(config.command);
    if (!config.out.empty()) {
        out["out"] = config.out;
    }
    out["threads"] = config.threads;

    const auto put_kick_common = [&](bool with_phi) {
        out["r"] = config.r;
        if (with_phi) {
            out["phi"] = config.phi;
        }
        out["chi"] = config.chi;
        out["gamma"] = config.gamma;
    };
    const auto put_alpha = [&] {
        out["alpha-re"] = config.alpha_re;
        out["alpha-im"] = config.alpha_im;
    };

    switch (config.command) {
        case Command::QfiVsTime:
            put_kick_common(true);
            put_alpha();
            out["t-max"] = config.t_max;
            break;
        case Command::QfiVsNmaxInput:
            put_kick_common(true);
            out["t"] = config.t;
            out["n-grid"] = config.n_grid;
            break;
        case Command::QfiVsNmaxPhase:
            put_kick_common(false);
            put_alpha();
            out["t"] = config.t;
            if (!config.phi_grid.empty()) {
                out["phi-grid"] = config.phi_grid;
            } else {
                out["phi-from"] = config.phi_from;
                out["phi-to"] = config.phi_to;
                out["points"] = config.points;
            }
            break;
        case Command::Calibrate:
            out["r"] = config.r;
            put_alpha();
            out["n-cap"] = config.n_cap;
            out["probe-steps"] = config.probe_steps;
            break;
        case Command::Plateau:
            put_kick_common(true);
            put_alpha();
            out["t-plateau"] = config.t_plateau;
            out["conv-tol"] = config.conv_tol;
            break;
        case Command::GainMap:
            out["r"] = config.r;
            put_alpha();
            out["gamma-grid"] = config.gamma_grid;
            out["nmax-grid"] = config.nmax_grid;
            out["t-horizon"] = config.t_horizon;
            break;
        case Command::Benchmark:
            out["n"] = config.n;
            out["t-max"] = config.t_max;
            break;
        case Command::Selfcheck:
            break;
    }
    return out;
}

std::string usage_text() {
    return
        "usage: kicked-mzi <command> [--flag value ...] [--config file.json] --out path\n"
        "\n"
        "commands:\n"
        "  qfi-vs-time        QFI at every step of the kicked map\n"
        "                     --r --phi --t-max [--chi --gamma --alpha-re --alpha-im]\n"
        "  qfi-vs-nmax-input  QFI vs achieved photon number, sweeping the input state\n"
        "                     --r --phi --t [--gamma --chi --n-grid N0,N1,...]\n"
        "  qfi-vs-nmax-phase  QFI vs achieved photon number, sweeping the phase angle\n"
        "                     --r --t [--alpha-re --alpha-im] and either\n"
        "                     --phi-grid a,b,... or --phi-from A --phi-to B [--points K]\n"
        "  calibrate          smallest stable phase satisfying a photon cap\n"
        "                     --r --n-cap [--alpha-re --alpha-im --probe-steps]\n"
        "  plateau            long-time QFI of the lossy kicked map\n"
        "                     --r --phi --gamma [--alpha-re --alpha-im --t-plateau --conv-tol]\n"
        "  gain-map           max rescaled QFI, kicked vs non-kicked, over (gamma, nmax)\n"
        "                     --r --gamma-grid g1,g2,... --nmax-grid n1,n2,...\n"
        "                     [--alpha-re --alpha-im --t-horizon]\n"
        "  benchmark          coherent-state and N00N reference QFI\n"
        "                     --n --t-max\n"
        "  selfcheck          run the built-in consistency suites [--out]\n"
        "\n"
        "Angles accept radians (0.1) or rational multiples of pi (34pi/1000).\n"
        "--threads N sizes the worker pool (0 = auto); KICKED_MZI_THREADS is the\n"
        "fallback. Each run writes <out>.csv and <out>.json.\n";
}

}  // namespace kmzi::cli
