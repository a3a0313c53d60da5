#include "runner.hpp"

#include <cmath>
#include <complex>
#include <ctime>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "csv.hpp"
#include "kmzi/dynamics.hpp"
#include "kmzi/errors.hpp"
#include "kmzi/experiments.hpp"
#include "kmzi/gaussian.hpp"
#include "kmzi/qfi.hpp"
#include "kmzi/version.hpp"

namespace kmzi::cli {

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buffer;
}

std::string output_base(const std::string& out) {
    if (out.size() > 4 && out.substr(out.size() - 4) == ".csv") {
        return out.substr(0, out.size() - 4);
    }
    return out;
}

/// Derived quantities of the run's working point, for the metadata file.
nlohmann::json derived_block(const KickParams& params) {
    nlohmann::json derived;
    if (params.r > 0.0) {
        derived["phi_crit"] = critical_phase(params.r);
    }
    derived["stable_with_loss"] = is_stable_with_loss(params);
    if (params.chi == 0.0) {
        const SpectralData sd = spectral_data(params.phi, params.r);
        derived["stable"] = sd.stable;
        if (sd.stable) {
            derived["theta1"] = sd.theta1;
            derived["theta2"] = sd.theta2;
            derived["c_factor"] = sd.c_factor;
        }
    }
    return derived;
}

void write_outputs(const RunConfig& config, const CsvBuilder& csv, nlohmann::json metadata) {
    const std::string base = output_base(config.out);
    metadata["artifact_version"] = kVersion;
    metadata["generated_at"] = utc_timestamp();
    metadata["command"] = command_name(config.command);
    metadata["config"] = serialize_config(config);
    metadata["rows"] = csv.rows();
    write_file(base + ".csv", csv.bytes());
    write_file(base + ".json", metadata.dump(2) + "\n");
    std::cout << "wrote " << csv.rows() << " rows to " << base << ".csv\n";
}

std::vector<std::string> sweep_row(const SweepRecord& record, bool with_input) {
    std::vector<std::string> row{
        format_double(record.x),        format_double(record.qfi),
        format_double(record.rescaled), format_double(record.nmax),
        format_double(record.purity),   format_double(record.benchmark_cs),
        format_double(record.benchmark_noon)};
    if (with_input) {
        row.push_back(format_double(record.n_input));
    }
    return row;
}

const std::vector<std::string> kSweepHeader{"x",      "qfi",          "rescaled",
                                            "nmax",   "purity",       "benchmark_cs",
                                            "benchmark_noon", "n_input"};

int run_qfi_vs_time(const RunConfig& config) {
    TimeSweepConfig sweep;
    sweep.params = {config.phi, config.r, config.chi, config.gamma};
    sweep.alpha = {config.alpha_re, config.alpha_im};
    sweep.t_max = config.t_max;
    const std::vector<TimeSweepResult> results = sweep_qfi_vs_time({sweep});
    const TimeSweepResult& result = results.front();

    CsvBuilder csv({"t", "qfi", "rescaled", "nmax", "purity", "benchmark_cs", "benchmark_noon"});
    for (const SweepRecord& record : result.records) {
        csv.add_row({format_int(static_cast<long long>(record.x)), format_double(record.qfi),
                     format_double(record.rescaled), format_double(record.nmax),
                     format_double(record.purity), format_double(record.benchmark_cs),
                     format_double(record.benchmark_noon)});
    }
    nlohmann::json metadata;
    metadata["derived"] = derived_block(sweep.params);
    metadata["derived"]["nmax"] = result.nmax;
    write_outputs(config, csv, std::move(metadata));
    return 0;
}

int run_qfi_vs_nmax_input(const RunConfig& config) {
    const KickParams params{config.phi, config.r, config.chi, config.gamma};
    std::vector<ComplexAmplitude> alphas;
    alphas.reserve(config.n_grid.size());
    for (const double n : config.n_grid) {
        alphas.emplace_back(std::sqrt(n), 0.0);
    }
    const std::vector<SweepRecord> records =
        sweep_qfi_vs_nmax_by_input(params, config.t, alphas, config.threads);

    CsvBuilder csv(kSweepHeader);
    for (const SweepRecord& record : records) {
        csv.add_row(sweep_row(record, true));
    }
    nlohmann::json metadata;
    metadata["derived"] = derived_block(params);
    write_outputs(config, csv, std::move(metadata));
    return 0;
}

int run_qfi_vs_nmax_phase(const RunConfig& config) {
    const KickParams base{0.0, config.r, config.chi, config.gamma};
    const std::vector<double> grid =
        config.phi_grid.empty()
            ? phase_grid_toward_critical(config.r, config.phi_from, config.phi_to, config.points)
            : config.phi_grid;
    const ComplexAmplitude alpha{config.alpha_re, config.alpha_im};
    const std::vector<SweepRecord> records =
        sweep_qfi_vs_nmax_by_phase(base, config.t, alpha, grid, config.threads);

    CsvBuilder csv(kSweepHeader);
    for (const SweepRecord& record : records) {
        csv.add_row(sweep_row(record, true));
    }
    nlohmann::json metadata;
    metadata["derived"]["phi_crit"] = critical_phase(config.r);
    metadata["derived"]["phi_grid"] = grid;
    write_outputs(config, csv, std::move(metadata));
    return 0;
}

int run_calibrate(const RunConfig& config) {
    const ComplexAmplitude alpha{config.alpha_re, config.alpha_im};
    const CalibrationResult result =
        calibrate_phase(config.r, alpha, config.n_cap, config.probe_steps);

    CsvBuilder csv({"phi", "achieved_nmax", "iterations_used"});
    csv.add_row({format_double(result.phi), format_double(result.achieved_nmax),
                 format_int(result.iterations_used)});
    nlohmann::json metadata;
    metadata["derived"]["phi_crit"] = critical_phase(config.r);
    metadata["derived"]["phi"] = result.phi;
    metadata["derived"]["achieved_nmax"] = result.achieved_nmax;
    write_outputs(config, csv, std::move(metadata));
    return 0;
}

int run_plateau(const RunConfig& config) {
    const KickParams params{config.phi, config.r, config.chi, config.gamma};
    const GaussianState initial = make_coherent({config.alpha_re, config.alpha_im});
    const double value = plateau_value(params, initial, config.t_plateau, config.conv_tol);

    const double nmax = max_photon_number(initial, params);
    const EvolvedState end = propagate_with_tangent(initial, params, config.t_plateau);
    CsvBuilder csv({"t", "qfi", "rescaled", "nmax", "purity", "benchmark_cs", "benchmark_noon"});
    csv.add_row({format_int(config.t_plateau), format_double(value),
                 format_double(value / config.t_plateau), format_double(photon_number(end.state)),
                 format_double(purity(end.state)),
                 format_double(qfi_coherent_benchmark(2.0 * nmax, config.t_plateau)),
                 format_double(qfi_noon_benchmark(2.0 * nmax, config.t_plateau))});
    nlohmann::json metadata;
    metadata["derived"] = derived_block(params);
    metadata["derived"]["plateau"] = value;
    metadata["derived"]["nmax"] = nmax;
    write_outputs(config, csv, std::move(metadata));
    return 0;
}

int run_gain_map(const RunConfig& config) {
    const ComplexAmplitude alpha{config.alpha_re, config.alpha_im};
    const std::vector<GainCell> cells = gain_map(config.r, alpha, config.gamma_grid,
                                                 config.nmax_grid, config.t_horizon,
                                                 config.threads);

    CsvBuilder csv({"gamma", "nmax", "gain", "phi", "g_kicked", "t_opt_kicked", "g_ref",
                    "t_opt_ref"});
    nlohmann::json statuses = nlohmann::json::array();
    int ok_cells = 0;
    for (const GainCell& cell : cells) {
        csv.add_row({format_double(cell.gamma), format_double(cell.nmax),
                     format_double(cell.gain), format_double(cell.phi),
                     format_double(cell.g_kicked), format_int(cell.t_opt_kicked),
                     format_double(cell.g_ref), format_int(cell.t_opt_ref)});
        statuses.push_back({{"gamma", cell.gamma}, {"nmax_requested", cell.nmax},
                            {"status", cell.status}});
        if (cell.status == "ok") {
            ++ok_cells;
        }
    }
    nlohmann::json metadata;
    if (config.r > 0.0) {
        metadata["derived"]["phi_crit"] = critical_phase(config.r);
    }
    metadata["cells"] = statuses;
    write_outputs(config, csv, std::move(metadata));
    if (ok_cells == 0) {
        std::cerr << "error: every gain-map cell failed\n";
        return 1;
    }
    return 0;
}

int run_benchmark(const RunConfig& config) {
    CsvBuilder csv({"t", "benchmark_cs", "benchmark_noon"});
    for (int t = 1; t <= config.t_max; ++t) {
        csv.add_row({format_int(t), format_double(qfi_coherent_benchmark(config.n, t)),
                     format_double(qfi_noon_benchmark(config.n, t))});
    }
    write_outputs(config, csv, {});
    return 0;
}

// ---------------------------------------------------------------------------
// selfcheck

struct CheckResult {
    std::string name;
    bool pass = false;
};

double matrix_scale(const Mat2& m) {
    return std::max({std::abs(m.m00), std::abs(m.m01), std::abs(m.m10), std::abs(m.m11), 1.0});
}

double matrix_distance(const Mat2& a, const Mat2& b) {
    return std::max({std::abs(a.m00 - b.m00), std::abs(a.m01 - b.m01), std::abs(a.m10 - b.m10),
                     std::abs(a.m11 - b.m11)});
}

bool check_closed_form() {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> r_dist(0.05, 0.5);
    std::uniform_real_distribution<double> u_dist(1e-3, 1.0 - 1e-3);
    for (int trial = 0; trial < 20; ++trial) {
        const double r = r_dist(rng);
        const double phi_crit = critical_phase(r);
        const double phi = phi_crit + u_dist(rng) * (std::numbers::pi - 2.0 * phi_crit);
        Mat2 product{1.0, 0.0, 0.0, 1.0};
        const Mat2 step = step_matrix({phi, r, 0.0, 0.0});
        for (int t = 0; t <= 200; ++t) {
            const Mat2 closed = closed_form_step_power(phi, r, t);
            if (matrix_distance(closed, product) > 1e-9 * matrix_scale(product)) {
                return false;
            }
            product = step * product;
        }
    }
    return true;
}

bool check_tangent_against_finite_difference() {
    std::mt19937 rng(54321);
    std::uniform_real_distribution<double> r_dist(0.05, 0.4);
    std::uniform_real_distribution<double> u_dist(0.05, 0.95);
    for (int trial = 0; trial < 8; ++trial) {
        const double r = r_dist(rng);
        const double phi_crit = critical_phase(r);
        const double phi = phi_crit + u_dist(rng) * (0.5 * std::numbers::pi - phi_crit);
        const KickParams params{phi, r, 0.0, trial % 2 == 0 ? 0.0 : 0.01};
        const GaussianState initial = make_coherent({1.0, 0.0});
        const EvolvedState evolved = propagate_with_tangent(initial, params, 200);
        const double analytic = qfi_gaussian(evolved.state, evolved.tangent);
        const double numeric = qfi_finite_difference(initial, params, 200);
        if (std::abs(analytic - numeric) > 1e-5 * std::max(std::abs(analytic), 1e-30)) {
            return false;
        }
    }
    return true;
}

bool check_benchmark_closure() {
    for (const double n : {1.0, 4.0}) {
        const KickParams params{0.05, 0.0, 0.0, 0.0};
        const GaussianState initial = make_coherent({std::sqrt(n / 2.0), 0.0});
        const QfiSeries series = qfi_vs_time(initial, params, 100);
        for (const int t : {10, 100}) {
            const double expected = qfi_coherent_benchmark(n, t);
            if (std::abs(series[t - 1].qfi - expected) > 1e-9 * expected) {
                return false;
            }
        }
    }
    return true;
}

bool check_loss_semigroup() {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> dist(0.0, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        GaussianState state = make_coherent({dist(rng), dist(rng)});
        state = apply_symplectic(squeeze_matrix(dist(rng) * 0.4, dist(rng)), state);
        const double a = dist(rng);
        const double b = dist(rng);
        const double once = photon_number(apply_loss(state, a + b));
        const double twice = photon_number(apply_loss(apply_loss(state, a), b));
        if (std::abs(once - twice) > 1e-12 * std::max(1.0, std::abs(once))) {
            return false;
        }
    }
    return true;
}

bool check_symplectic_invariants() {
    std::mt19937 rng(999);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Mat2 s = rotation_matrix(dist(rng) * 3.0) *
                       squeeze_matrix(std::abs(dist(rng)) * 0.5, dist(rng) * 3.0) *
                       rotation_matrix(dist(rng) * 3.0);
        if (std::abs(s.det() - 1.0) > 1e-12) {
            return false;
        }
        // S omega S^T = omega reduces to det S = 1 in two dimensions, but
        // check the off-diagonal entries explicitly anyway.
        const double form01 = s.m00 * s.m11 - s.m01 * s.m10;
        if (std::abs(form01 - 1.0) > 1e-12) {
            return false;
        }
    }
    return true;
}

int run_selfcheck(const RunConfig& config) {
    const std::vector<CheckResult> results{
        {"closed-form-vs-iterated-product", check_closed_form()},
        {"tangent-vs-finite-difference-qfi", check_tangent_against_finite_difference()},
        {"coherent-benchmark-closure", check_benchmark_closure()},
        {"loss-channel-semigroup", check_loss_semigroup()},
        {"symplectic-invariants", check_symplectic_invariants()},
    };
    bool all_pass = true;
    for (const CheckResult& result : results) {
        std::cout << (result.pass ? "[PASS] " : "[FAIL] ") << result.name << "\n";
        all_pass &= result.pass;
    }
    if (!config.out.empty()) {
        CsvBuilder csv({"check", "status"});
        for (const CheckResult& result : results) {
            csv.add_row({result.name, result.pass ? "pass" : "fail"});
        }
        write_outputs(config, csv, {});
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int run(const RunConfig& config) {
    switch (config.command) {
        case Command::QfiVsTime: return run_qfi_vs_time(config);
        case Command::QfiVsNmaxInput: return run_qfi_vs_nmax_input(config);
        case Command::QfiVsNmaxPhase: return run_qfi_vs_nmax_phase(config);
        case Command::Calibrate: return run_calibrate(config);
        case Command::Plateau: return run_plateau(config);
        case Command::GainMap: return run_gain_map(config);
        case Command::Benchmark: return run_benchmark(config);
        case Command::Selfcheck: return run_selfcheck(config);
    }
    return 1;
}

}  // namespace kmzi::cli
