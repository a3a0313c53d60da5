#include "kmzi/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "kmzi/errors.hpp"

namespace kmzi {

namespace {

constexpr double kCalibrationRelBand = 1e-3;
constexpr int kCalibrationMaxEvals = 200;
constexpr int kLinearScanResolution = 4000;
constexpr double kPlateauZeroFloor = 1e-9;
constexpr int kGainHorizonCap = 100'000;

double nan_value() {
    return std::numeric_limits<double>::quiet_NaN();
}

/// Runs body(0..n-1) on a worker pool. Each index writes only its own slot,
/// so results do not depend on the thread count. The first exception is
/// rethrown after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    std::size_t workers = threads <= 0 ? std::thread::hardware_concurrency()
                                       : static_cast<std::size_t>(threads);
    workers = std::clamp<std::size_t>(workers, 1, n == 0 ? 1 : n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) {
                    return;
                }
                try {
                    body(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) {
                        first_error = std::current_exception();
                    }
                }
            }
        });
    }
    for (std::thread& worker : pool) {
        worker.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

void require_stable_with_loss(const KickParams& params, const char* what) {
    if (!is_stable_with_loss(params)) {
        throw UnstableParameterError(
            std::string(what) +
            ": parameters violate the stability condition |cos(phi)| < sech(r) "
            "(with loss: exp(-gamma_tau/2) * max|lambda| < 1); phi = " +
            std::to_string(params.phi) + ", r = " + std::to_string(params.r));
    }
}

SweepRecord evaluate_sweep_point(const KickParams& params, int t, ComplexAmplitude alpha) {
    const GaussianState initial = make_coherent(alpha);
    const double nmax = max_photon_number(initial, params);
    const EvolvedState evolved = propagate_with_tangent(initial, params, t);
    const double qfi = qfi_gaussian(evolved.state, evolved.tangent);
    SweepRecord record;
    record.x = nmax;
    record.qfi = qfi;
    record.rescaled = qfi / static_cast<double>(t);
    record.nmax = nmax;
    record.purity = purity(evolved.state);
    record.benchmark_cs = qfi_coherent_benchmark(2.0 * nmax, t);
    record.benchmark_noon = qfi_noon_benchmark(2.0 * nmax, t);
    record.n_input = photon_number(initial);
    return record;
}

int default_gain_horizon(double gamma_tau) {
    if (!(gamma_tau > 0.0)) {
        return kGainHorizonCap;
    }
    const double horizon = std::ceil(10.0 / gamma_tau);
    return static_cast<int>(std::min(horizon, static_cast<double>(kGainHorizonCap)));
}

}  // namespace

CalibrationResult calibrate_phase(double r, ComplexAmplitude alpha, double n_cap,
                                  int probe_steps) {
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw std::invalid_argument("calibration requires r > 0");
    }
    if (!std::isfinite(n_cap)) {
        throw std::invalid_argument("photon cap must be finite");
    }
    const GaussianState initial = make_coherent(alpha);
    const double input_photons = photon_number(initial);
    if (!(n_cap > input_photons)) {
        throw CalibrationError("photon cap " + std::to_string(n_cap) +
                               " does not exceed the input state's photon number " +
                               std::to_string(input_photons));
    }

    int evals = 0;
    const auto nmax_at = [&](double phi) -> double {
        ++evals;
        const KickParams params{phi, r, 0.0, 0.0};
        try {
            return max_photon_number(initial, params, probe_steps);
        } catch (const UnboundedGrowthError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    const double phi_crit = critical_phase(r);
    double lo = phi_crit;  // cap violated at and below here
    double hi = 0.5 * std::numbers::pi;
    double n_hi = nmax_at(hi);
    if (n_hi > n_cap) {
        throw CalibrationError("photon cap " + std::to_string(n_cap) +
                               " is not reachable: the maximum photon number is " +
                               std::to_string(n_hi) + " even at phi = pi/2");
    }

    while (evals < kCalibrationMaxEvals) {
        if (n_hi >= n_cap * (1.0 - kCalibrationRelBand)) {
            break;  // achieved maximum within the tolerance band of the cap
        }
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) {
            break;  // interval exhausted at double precision
        }
        const double n_mid = nmax_at(mid);
        if (n_mid > n_cap) {
            lo = mid;
        } else {
            hi = mid;
            n_hi = n_mid;
        }
    }

    // Bisection assumes the maximum photon number decreases with phi. Probe a
    // few angles on the violating side; a feasible one there means the cap
    // boundary is not monotone, and the paper-style linear scan takes over.
    bool monotone = true;
    if (lo > phi_crit) {
        for (int k = 1; k <= 6; ++k) {
            const double phi = phi_crit + (lo - phi_crit) * static_cast<double>(k) / 6.0;
            if (phi < hi && nmax_at(phi) <= n_cap) {
                monotone = false;
                break;
            }
        }
    }
    if (!monotone) {
        const double step = (0.5 * std::numbers::pi - phi_crit) / kLinearScanResolution;
        for (int k = 1; k <= kLinearScanResolution; ++k) {
            const double phi = phi_crit + step * static_cast<double>(k);
            const double n = nmax_at(phi);
            if (n <= n_cap) {
                return {phi, n, evals};
            }
        }
        throw CalibrationError("linear scan found no phase satisfying the photon cap");
    }

    return {hi, n_hi, evals};
}

std::vector<TimeSweepResult> sweep_qfi_vs_time(const std::vector<TimeSweepConfig>& configs) {
    std::vector<TimeSweepResult> results;
    results.reserve(configs.size());
    for (const TimeSweepConfig& config : configs) {
        config.params.validate();
        require_stable_with_loss(config.params, "qfi-vs-time sweep");
        const GaussianState initial = make_coherent(config.alpha);
        TimeSweepResult result;
        result.config = config;
        result.nmax = max_photon_number(initial, config.params);
        const QfiSeries series = qfi_vs_time(initial, config.params, config.t_max);
        result.records.reserve(series.size());
        const double budget = 2.0 * result.nmax;
        const double n_input = photon_number(initial);
        for (const QfiPoint& point : series) {
            SweepRecord record;
            record.x = static_cast<double>(point.t);
            record.qfi = point.qfi;
            record.rescaled = point.rescaled;
            record.nmax = point.photon_number;
            record.purity = point.purity;
            record.benchmark_cs = qfi_coherent_benchmark(budget, point.t);
            record.benchmark_noon = qfi_noon_benchmark(budget, point.t);
            record.n_input = n_input;
            result.records.push_back(record);
        }
        results.push_back(std::move(result));
    }
    return results;
}

std::vector<SweepRecord> sweep_qfi_vs_nmax_by_input(const KickParams& params, int t,
                                                    const std::vector<ComplexAmplitude>& alphas,
                                                    int threads) {
    params.validate();
    if (t < 1) {
        throw std::invalid_argument("t must be >= 1");
    }
    require_stable_with_loss(params, "input-photon sweep");
    std::vector<SweepRecord> records(alphas.size());
    parallel_for(alphas.size(), threads,
                 [&](std::size_t i) { records[i] = evaluate_sweep_point(params, t, alphas[i]); });
    return records;
}

std::vector<SweepRecord> sweep_qfi_vs_nmax_by_phase(const KickParams& base, int t,
                                                    ComplexAmplitude alpha,
                                                    const std::vector<double>& phis,
                                                    int threads) {
    base.validate();
    if (t < 1) {
        throw std::invalid_argument("t must be >= 1");
    }
    for (const double phi : phis) {
        KickParams params = base;
        params.phi = phi;
        require_stable_with_loss(params, "phase sweep");
    }
    std::vector<SweepRecord> records(phis.size());
    parallel_for(phis.size(), threads, [&](std::size_t i) {
        KickParams params = base;
        params.phi = phis[i];
        records[i] = evaluate_sweep_point(params, t, alpha);
    });
    return records;
}

std::vector<double> phase_grid_toward_critical(double r, double phi_from, double phi_to,
                                               int points) {
    if (points < 2) {
        throw std::invalid_argument("phase grid needs at least 2 points");
    }
    const double phi_crit = critical_phase(r);
    if (!(phi_from > phi_crit) || !(phi_to > phi_crit)) {
        throw UnstableParameterError("phase grid endpoints must lie above the critical phase " +
                                     std::to_string(phi_crit));
    }
    const double span_from = phi_from - phi_crit;
    const double span_to = phi_to - phi_crit;
    std::vector<double> grid(static_cast<std::size_t>(points));
    grid.front() = phi_from;
    grid.back() = phi_to;
    const double ratio = span_to / span_from;
    for (int i = 1; i + 1 < points; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(points - 1);
        grid[static_cast<std::size_t>(i)] = phi_crit + span_from * std::pow(ratio, u);
    }
    return grid;
}

double plateau_value(const KickParams& params, const GaussianState& initial, int t_plateau,
                     double conv_tol) {
    params.validate();
    if (!(params.gamma_tau > 0.0)) {
        throw std::invalid_argument("plateau extraction requires gamma_tau > 0");
    }
    if (t_plateau < 40) {
        throw std::invalid_argument("t_plateau must be >= 40 so the trailing window is nonempty");
    }
    if (!(conv_tol > 0.0)) {
        throw std::invalid_argument("conv_tol must be > 0");
    }
    require_stable_with_loss(params, "plateau extraction");

    const int window = t_plateau / 40;
    const PeriodMap map(params);
    GaussianState state = initial;
    TangentState tangent;
    double reference = 0.0;
    for (int t = 1; t <= t_plateau; ++t) {
        map.apply(state, tangent);
        if (t == t_plateau - window) {
            reference = qfi_gaussian(state, tangent);
        }
    }
    const double value = qfi_gaussian(state, tangent);
    if (value < kPlateauZeroFloor && reference < kPlateauZeroFloor) {
        return value;  // decayed to zero; the relative criterion is meaningless there
    }
    if (std::abs(value - reference) >= conv_tol * value) {
        throw NotConvergedError("QFI still changing by " +
                                std::to_string(std::abs(value - reference) / value) +
                                " (relative) over the last " + std::to_string(window) +
                                " steps at t = " + std::to_string(t_plateau));
    }
    return value;
}

std::vector<GainCell> gain_map(double r, ComplexAmplitude alpha,
                               const std::vector<double>& gamma_grid,
                               const std::vector<double>& nmax_grid, int t_horizon,
                               int threads) {
    if (gamma_grid.empty() || nmax_grid.empty()) {
        throw std::invalid_argument("gain map grids must be nonempty");
    }
    for (const double gamma : gamma_grid) {
        if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
            throw std::invalid_argument("gamma grid entries must be >= 0");
        }
    }
    for (const double cap : nmax_grid) {
        if (!(cap > 0.0) || !std::isfinite(cap)) {
            throw std::invalid_argument("nmax grid entries must be > 0");
        }
    }

    const std::size_t cells = gamma_grid.size() * nmax_grid.size();
    std::vector<GainCell> grid(cells);
    parallel_for(cells, threads, [&](std::size_t index) {
        const double gamma = gamma_grid[index / nmax_grid.size()];
        const double cap = nmax_grid[index % nmax_grid.size()];
        GainCell& cell = grid[index];
        cell.gamma = gamma;
        cell.nmax = cap;
        cell.gain = nan_value();
        cell.phi = nan_value();
        cell.g_kicked = nan_value();
        cell.g_ref = nan_value();
        try {
            double phi = 0.0;
            double achieved = 0.0;
            if (r == 0.0) {
                // No kicks: every phase keeps the photon number at the input value.
                phi = 0.5 * std::numbers::pi;
                achieved = photon_number(make_coherent(alpha));
            } else {
                const CalibrationResult calibration = calibrate_phase(r, alpha, cap);
                phi = calibration.phi;
                achieved = calibration.achieved_nmax;
            }
            if (!(achieved > 0.0)) {
                throw CalibrationError("achieved photon number is zero; no resource to compare");
            }
            const int horizon = t_horizon > 0 ? t_horizon : default_gain_horizon(gamma);

            const KickParams kicked{phi, r, 0.0, gamma};
            const QfiSeries kicked_series = qfi_vs_time(make_coherent(alpha), kicked, horizon);
            const RescaledMax kicked_max = max_rescaled_qfi(kicked_series);

            // Non-kicked reference with total photon budget 2 * nmax, i.e. the
            // same photon number in the active arm.
            const KickParams reference{0.0, 0.0, 0.0, gamma};
            const QfiSeries ref_series =
                qfi_vs_time(make_coherent(std::sqrt(achieved)), reference, horizon);
            const RescaledMax ref_max = max_rescaled_qfi(ref_series);

            cell.nmax = achieved;
            cell.phi = phi;
            cell.g_kicked = kicked_max.g_max;
            cell.g_ref = ref_max.g_max;
            cell.t_opt_kicked = kicked_max.t_opt;
            cell.t_opt_ref = ref_max.t_opt;
            cell.gain = kicked_max.g_max / ref_max.g_max;
            cell.status = "ok";
        } catch (const std::exception& error) {
            cell.status = error.what();
        }
    });
    return grid;
}

ScalingFit scaling_fit(const std::vector<SweepRecord>& records) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const SweepRecord& record : records) {
        if (record.x > 0.0 && record.qfi > 0.0) {
            xs.push_back(std::log(record.x));
            ys.push_back(std::log(record.qfi));
        }
    }
    if (xs.size() < 3) {
        throw std::invalid_argument("scaling fit needs at least 3 records with positive x and qfi");
    }
    const auto [min_x, max_x] = std::minmax_element(xs.begin(), xs.end());
    if (*max_x - *min_x < 1e-12) {
        throw std::invalid_argument("scaling fit rejected: degenerate x range");
    }

    const double n = static_cast<double>(xs.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mean_x;
        const double dy = ys[i] - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    ScalingFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

}  // namespace kmzi
