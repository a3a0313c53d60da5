#pragma once

#include <complex>
#include <vector>

#include "kmzi/gaussian.hpp"

namespace kmzi {

/// Physical parameters of one kicking period.
struct KickParams {
    double phi = 0.0;        ///< phase shift per period (radians)
    double r = 0.0;          ///< kick (squeeze) strength, >= 0
    double chi = 0.0;        ///< squeeze phase (radians)
    double gamma_tau = 0.0;  ///< loss exponent per period, >= 0

    /// Throws std::invalid_argument on non-finite or negative r / gamma_tau.
    void validate() const;
};

/// Derivative of a Gaussian state with respect to the phase parameter,
/// co-propagated alongside the state itself.
struct TangentState {
    MeanVector d_mean;
    SymMat2 d_cov;
};

/// Eigen-structure of the one-step map at chi = 0.
struct SpectralData {
    std::complex<double> lambda1;
    std::complex<double> lambda2;
    bool stable = false;
    double theta1 = 0.0;    ///< oscillation frequency in phase space (NaN if unstable)
    double theta2 = 0.0;    ///< orientation angle of the ellipse (NaN if unstable)
    double c_factor = 0.0;  ///< amplitude factor C (NaN if unstable)
};

struct TrajectoryPoint {
    int step = 0;
    GaussianState state;
    TangentState tangent;
};

using Trajectory = std::vector<TrajectoryPoint>;

/// One period of the kicked map: squeeze, rotate, then photon loss.
/// Precomputes the step matrix and its phi-derivative so long trajectories
/// pay only the per-step arithmetic.
class PeriodMap {
  public:
    explicit PeriodMap(const KickParams& params);

    void apply(GaussianState& state) const;

    /// Advances state and tangent together; the tangent update uses the
    /// pre-step state, so it must run first.
    void apply(GaussianState& state, TangentState& tangent) const;

    const SymplecticMatrix& step() const { return step_; }
    const Mat2& step_dphi() const { return step_dphi_; }

  private:
    SymplecticMatrix step_;
    Mat2 step_dphi_;
    double amp_decay_ = 1.0;  // exp(-gamma_tau / 2)
    double cov_decay_ = 1.0;  // exp(-gamma_tau)
};

/// One-step symplectic map S = rotation(phi) * squeeze(r, chi).
SymplecticMatrix step_matrix(const KickParams& params);

/// d/dphi of step_matrix; not symplectic.
Mat2 step_matrix_dphi(const KickParams& params);

/// Applies `steps` periods and returns the final state.
GaussianState propagate(const GaussianState& initial, const KickParams& params, int steps);

/// As propagate, but records every step (including step 0) together with the
/// co-propagated phase tangent.
Trajectory propagate_trajectory(const GaussianState& initial, const KickParams& params, int steps);

struct EvolvedState {
    GaussianState state;
    TangentState tangent;
};

/// Final state and its exact phase derivative after `steps` periods. The
/// tangent starts at zero: the input state does not depend on phi.
EvolvedState propagate_with_tangent(const GaussianState& initial, const KickParams& params,
                                    int steps);

/// The phi > 0 that saturates the stability condition, arccos(sech r).
/// Requires r > 0 (the criterion degenerates at r = 0).
double critical_phase(double r);

/// Strict stability criterion |cos phi| < sech r of the lossless kicked map
/// at chi = 0. The boundary counts as unstable.
bool is_stable(double phi, double r);

/// Largest eigenvalue modulus of a unit-determinant 2x2 map.
double spectral_radius(const Mat2& m);

/// Boundedness of the lossy map: exp(-gamma_tau/2) * spectral_radius < 1.
/// Reduces to the strict lossless criterion at gamma_tau = 0; with loss the
/// stable region is strictly larger.
bool is_stable_with_loss(const KickParams& params);

/// Eigenvalues of the one-step map at chi = 0, with the oscillation
/// frequency, orientation angle and amplitude factor in the stable regime.
SpectralData spectral_data(double phi, double r);

/// Closed-form t-th power of the one-step map at chi = 0; equals the
/// t-fold matrix product in the stable regime. Requires phi in (0, pi).
SymplecticMatrix closed_form_step_power(double phi, double r, int t);

/// Photon number above which propagation is treated as runaway growth.
inline constexpr double kPhotonNumberGuard = 1e9;

/// Probe window covering several phase-space revolutions:
/// max(4 * ceil(2 pi / theta1), 1000), clamped to 1e7.
int default_probe_steps(const KickParams& params);

/// Maximum mean photon number over steps 0..probe_steps. probe_steps <= 0
/// selects the default window. Throws UnboundedGrowthError once the photon
/// number exceeds the guard.
double max_photon_number(const GaussianState& initial, const KickParams& params,
                         int probe_steps = 0);

}  // namespace kmzi
