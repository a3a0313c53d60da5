#include "kmzi/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "kmzi/errors.hpp"

namespace kmzi {

namespace {

constexpr int kMaxProbeSteps = 10'000'000;

double nan_value() {
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

void KickParams::validate() const {
    if (!std::isfinite(phi) || !std::isfinite(r) || !std::isfinite(chi) ||
        !std::isfinite(gamma_tau)) {
        throw std::invalid_argument("kick parameters must be finite");
    }
    if (r < 0.0) {
        throw std::invalid_argument("kick strength r must be >= 0");
    }
    if (gamma_tau < 0.0) {
        throw std::invalid_argument("loss exponent gamma_tau must be >= 0");
    }
}

SymplecticMatrix step_matrix(const KickParams& params) {
    params.validate();
    return rotation_matrix(params.phi) * squeeze_matrix(params.r, params.chi);
}

Mat2 step_matrix_dphi(const KickParams& params) {
    params.validate();
    const double c = std::cos(params.phi);
    const double s = std::sin(params.phi);
    const Mat2 rotation_dphi{-s, c, -c, -s};
    return rotation_dphi * squeeze_matrix(params.r, params.chi);
}

PeriodMap::PeriodMap(const KickParams& params)
    : step_(step_matrix(params)),
      step_dphi_(step_matrix_dphi(params)),
      amp_decay_(std::exp(-0.5 * params.gamma_tau)),
      cov_decay_(amp_decay_ * amp_decay_) {}

void PeriodMap::apply(GaussianState& state) const {
    state.mean = step_ * state.mean;
    state.cov = congruence(step_, state.cov);
    state.mean.q *= amp_decay_;
    state.mean.p *= amp_decay_;
    state.cov.qq = cov_decay_ * state.cov.qq + (1.0 - cov_decay_);
    state.cov.qp = cov_decay_ * state.cov.qp;
    state.cov.pp = cov_decay_ * state.cov.pp + (1.0 - cov_decay_);
}

void PeriodMap::apply(GaussianState& state, TangentState& tangent) const {
    // d(mean)' = e^{-gt/2} (S' mean + S d(mean))
    const MeanVector forced = step_dphi_ * state.mean;
    const MeanVector carried = step_ * tangent.d_mean;
    tangent.d_mean = {amp_decay_ * (forced.q + carried.q), amp_decay_ * (forced.p + carried.p)};

    // d(cov)' = e^{-gt} (S' cov S^T + S cov S'^T + S d(cov) S^T)
    const SymMat2 forced_cov = symmetrized_congruence(step_dphi_, state.cov, step_);
    const SymMat2 carried_cov = congruence(step_, tangent.d_cov);
    tangent.d_cov = {cov_decay_ * (forced_cov.qq + carried_cov.qq),
                     cov_decay_ * (forced_cov.qp + carried_cov.qp),
                     cov_decay_ * (forced_cov.pp + carried_cov.pp)};

    apply(state);
}

GaussianState propagate(const GaussianState& initial, const KickParams& params, int steps) {
    if (steps < 0) {
        throw std::invalid_argument("step count must be >= 0");
    }
    const PeriodMap map(params);
    GaussianState state = initial;
    for (int t = 0; t < steps; ++t) {
        map.apply(state);
    }
    return state;
}

Trajectory propagate_trajectory(const GaussianState& initial, const KickParams& params,
                                int steps) {
    if (steps < 0) {
        throw std::invalid_argument("step count must be >= 0");
    }
    const PeriodMap map(params);
    Trajectory trajectory;
    trajectory.reserve(static_cast<std::size_t>(steps) + 1);
    GaussianState state = initial;
    TangentState tangent;
    trajectory.push_back({0, state, tangent});
    for (int t = 1; t <= steps; ++t) {
        map.apply(state, tangent);
        trajectory.push_back({t, state, tangent});
    }
    return trajectory;
}

EvolvedState propagate_with_tangent(const GaussianState& initial, const KickParams& params,
                                    int steps) {
    if (steps < 0) {
        throw std::invalid_argument("step count must be >= 0");
    }
    const PeriodMap map(params);
    EvolvedState out{initial, TangentState{}};
    for (int t = 0; t < steps; ++t) {
        map.apply(out.state, out.tangent);
    }
    return out;
}

double critical_phase(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw std::invalid_argument("critical phase requires r > 0");
    }
    return std::acos(1.0 / std::cosh(r));
}

bool is_stable(double phi, double r) {
    return std::abs(std::cos(phi)) < 1.0 / std::cosh(r);
}

double spectral_radius(const Mat2& m) {
    const double half_trace = 0.5 * m.trace();
    const double disc = half_trace * half_trace - 1.0;
    if (disc <= 0.0) {
        return 1.0;  // conjugate pair on the unit circle
    }
    return std::abs(half_trace) + std::sqrt(disc);
}

bool is_stable_with_loss(const KickParams& params) {
    const double half_trace = 0.5 * step_matrix(params).trace();
    if (params.gamma_tau == 0.0) {
        return std::abs(half_trace) < 1.0;
    }
    const double disc = half_trace * half_trace - 1.0;
    const double radius = disc <= 0.0 ? 1.0 : std::abs(half_trace) + std::sqrt(disc);
    return std::exp(-0.5 * params.gamma_tau) * radius < 1.0;
}

SpectralData spectral_data(double phi, double r) {
    const double e2r = std::exp(2.0 * r);
    const double sum = std::cos(phi) * (1.0 + e2r);  // lambda1 + lambda2, times e^r
    const double disc = sum * sum - 4.0 * e2r;
    const double emr = std::exp(-r);

    SpectralData out;
    if (disc < 0.0) {
        const double root = std::sqrt(-disc);
        out.lambda1 = 0.5 * emr * std::complex<double>(sum, root);
        out.lambda2 = std::conj(out.lambda1);
        out.stable = true;
        out.theta1 = std::atan2(root, sum);
        out.theta2 = std::atan2(root, std::cos(phi) * (e2r - 1.0));
        out.c_factor = std::sin(phi) / root;
    } else {
        const double root = std::sqrt(disc);
        out.lambda1 = 0.5 * emr * (sum + root);
        out.lambda2 = 0.5 * emr * (sum - root);
        out.stable = false;
        out.theta1 = nan_value();
        out.theta2 = nan_value();
        out.c_factor = nan_value();
    }
    return out;
}

SymplecticMatrix closed_form_step_power(double phi, double r, int t) {
    if (t < 0) {
        throw std::invalid_argument("power must be >= 0");
    }
    const SpectralData sd = spectral_data(phi, r);
    if (!sd.stable) {
        throw UnstableParameterError(
            "closed-form power requires the stable regime |cos(phi)| < sech(r)");
    }
    if (!(std::sin(phi) > 0.0)) {
        throw std::invalid_argument("closed-form power requires phi in (0, pi)");
    }
    const double er = std::exp(r);
    const double c = sd.c_factor;
    const double a = static_cast<double>(t) * sd.theta1;
    return {2.0 * er * c * std::sin(a + sd.theta2), 2.0 * c * std::sin(a),
            -2.0 * er * er * c * std::sin(a), 2.0 * er * c * std::sin(-a + sd.theta2)};
}

int default_probe_steps(const KickParams& params) {
    const double half_trace = 0.5 * step_matrix(params).trace();
    if (std::abs(half_trace) < 1.0) {
        const double theta1 =
            std::atan2(std::sqrt(1.0 - half_trace * half_trace), half_trace);
        const double revolutions = 4.0 * std::ceil(2.0 * std::numbers::pi / theta1);
        return static_cast<int>(
            std::clamp(revolutions, 1000.0, static_cast<double>(kMaxProbeSteps)));
    }
    return 1000;
}

double max_photon_number(const GaussianState& initial, const KickParams& params,
                         int probe_steps) {
    if (probe_steps <= 0) {
        probe_steps = default_probe_steps(params);
    }
    const PeriodMap map(params);
    GaussianState state = initial;
    double best = photon_number(state);
    for (int t = 1; t <= probe_steps; ++t) {
        map.apply(state);
        const double n = photon_number(state);
        if (n > kPhotonNumberGuard) {
            throw UnboundedGrowthError("photon number exceeded the 1e9 guard after " +
                                       std::to_string(t) +
                                       " steps; parameters are outside the stable regime");
        }
        if (n > best) {
            best = n;
        }
    }
    return best;
}

}  // namespace kmzi
