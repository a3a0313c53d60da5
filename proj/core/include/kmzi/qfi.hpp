#pragma once

#include <vector>

#include "kmzi/dynamics.hpp"
#include "kmzi/gaussian.hpp"

namespace kmzi {

struct QfiPoint {
    int t = 0;
    double qfi = 0.0;
    double rescaled = 0.0;  ///< qfi / t, defined for t >= 1
    double photon_number = 0.0;
    double purity = 0.0;
};

using QfiSeries = std::vector<QfiPoint>;

/// dP/dphi = -1/2 P Tr(sigma^{-1} dsigma/dphi).
double purity_derivative(const GaussianState& state, const TangentState& tangent);

/// Quantum Fisher information of a single-mode Gaussian state with respect
/// to the phase, from the first two moments and their derivatives:
///
///   I = 1/2 Tr[(sigma^{-1} dsigma)^2] / (1 + P^2)
///     + 2 (dP)^2 / (1 - P^4)
///     + (dmean)^T sigma^{-1} (dmean)
///
/// For pure states (|1 - P| < 1e-10) the purity term vanishes identically
/// and is set to zero; a pure state with |dP| > 1e-8 raises
/// TangentInconsistencyError. Tiny negative totals (>= -1e-9) are clipped
/// to zero.
double qfi_gaussian(const GaussianState& state, const TangentState& tangent);

/// QFI at every step 1..t_max of the kicked map, with photon number and
/// purity along the trajectory.
QfiSeries qfi_vs_time(const GaussianState& initial, const KickParams& params, int t_max);

/// Non-kicked interferometer fed with a coherent state of n_photons total
/// input photons: I = 2 N t^2.
double qfi_coherent_benchmark(double n_photons, int t);

/// Non-kicked interferometer fed with a N00N state: I = N^2 t^2.
double qfi_noon_benchmark(double n_photons, int t);

/// Independent check of qfi_gaussian: propagates at phi +/- h, forms the
/// moment derivatives by central differences and evaluates the same
/// three-term formula. h <= 0 selects 1e-6 * max(1, |phi|).
double qfi_finite_difference(const GaussianState& initial, const KickParams& params, int t,
                             double h = 0.0);

struct RescaledMax {
    int t_opt = 0;
    double g_max = 0.0;
};

/// Maximum of qfi / t over the series (t >= 1); ties go to the smaller t.
RescaledMax max_rescaled_qfi(const QfiSeries& series);

}  // namespace kmzi
