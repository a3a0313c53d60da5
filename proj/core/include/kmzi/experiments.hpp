#pragma once

#include <string>
#include <vector>

#include "kmzi/dynamics.hpp"
#include "kmzi/gaussian.hpp"
#include "kmzi/qfi.hpp"

namespace kmzi {

struct CalibrationResult {
    double phi = 0.0;
    double achieved_nmax = 0.0;
    int iterations_used = 0;
};

/// Finds the smallest stable phi in (critical_phase(r), pi/2] whose maximum
/// photon number stays under n_cap, i.e. the working point with the largest
/// squeezing allowed by the cap. Runs without loss; bisection terminates
/// once the achieved maximum is within relative 1e-3 of the cap, with a
/// linear scan fallback if the cap boundary turns out non-monotone.
/// probe_steps <= 0 selects the default probe window per evaluation.
CalibrationResult calibrate_phase(double r, ComplexAmplitude alpha, double n_cap,
                                  int probe_steps = 0);

/// One row of a sweep output. `x` is the independent variable of the sweep;
/// benchmark columns are evaluated with a total photon budget of twice the
/// achieved maximum photon number.
struct SweepRecord {
    double x = 0.0;
    double qfi = 0.0;
    double rescaled = 0.0;
    double nmax = 0.0;
    double purity = 0.0;
    double benchmark_cs = 0.0;
    double benchmark_noon = 0.0;
    double n_input = 0.0;  ///< photon number of the coherent input state
};

struct TimeSweepConfig {
    KickParams params;
    ComplexAmplitude alpha;
    int t_max = 0;
};

struct TimeSweepResult {
    TimeSweepConfig config;
    double nmax = 0.0;  ///< maximum photon number over the probe window
    std::vector<SweepRecord> records;  ///< x = t; nmax column holds the photon number at t
};

/// QFI vs time for each configuration, with per-step benchmark columns at
/// a photon budget of 2 * nmax.
std::vector<TimeSweepResult> sweep_qfi_vs_time(const std::vector<TimeSweepConfig>& configs);

/// QFI at fixed (r, phi, t) while the coherent input amplitude varies;
/// x = achieved maximum photon number, n_input records the input budget.
std::vector<SweepRecord> sweep_qfi_vs_nmax_by_input(const KickParams& params, int t,
                                                    const std::vector<ComplexAmplitude>& alphas,
                                                    int threads = 1);

/// QFI at fixed (r, alpha, t) while the phase-shift angle varies;
/// x = achieved maximum photon number.
std::vector<SweepRecord> sweep_qfi_vs_nmax_by_phase(const KickParams& base, int t,
                                                    ComplexAmplitude alpha,
                                                    const std::vector<double>& phis,
                                                    int threads = 1);

/// Grid of `points` angles from phi_from to phi_to spaced geometrically in
/// the distance to the critical phase, so the achieved photon numbers are
/// roughly log-uniform. Both endpoints must be stable for the given r.
std::vector<double> phase_grid_toward_critical(double r, double phi_from, double phi_to,
                                               int points);

/// Long-time QFI of the lossy kicked map. Accepted when the relative change
/// over the trailing window t_plateau/40 is below conv_tol, or when the QFI
/// has decayed below 1e-9 (a zero plateau); otherwise NotConvergedError.
double plateau_value(const KickParams& params, const GaussianState& initial, int t_plateau,
                     double conv_tol);

struct GainCell {
    double gamma = 0.0;
    double nmax = 0.0;  ///< achieved maximum photon number (the requested cap on failure)
    double gain = 0.0;  ///< max rescaled QFI, kicked / non-kicked reference
    double phi = 0.0;   ///< calibrated phase-shift angle
    double g_kicked = 0.0;
    double g_ref = 0.0;
    int t_opt_kicked = 0;
    int t_opt_ref = 0;
    std::string status;  ///< "ok" or the per-cell error message
};

/// For each (gamma, n_cap) cell: calibrate phi without loss, run the kicked
/// lossy series and a non-kicked coherent reference with total photon budget
/// 2 * nmax under the same loss, and compare their maximum rescaled QFI.
/// t_horizon <= 0 selects ceil(10 / gamma) capped at 1e5. Cell failures are
/// recorded in `status`, not thrown.
std::vector<GainCell> gain_map(double r, ComplexAmplitude alpha,
                               const std::vector<double>& gamma_grid,
                               const std::vector<double>& nmax_grid, int t_horizon = 0,
                               int threads = 1);

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares on (log x, log qfi) over records with positive
/// x and qfi; needs at least three such records and a non-degenerate
/// x range.
ScalingFit scaling_fit(const std::vector<SweepRecord>& records);

}  // namespace kmzi
