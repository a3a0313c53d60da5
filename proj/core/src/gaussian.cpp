#include "kmzi/gaussian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kmzi {

namespace {

constexpr double kSymplecticDetTol = 1e-6;

void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) {
        throw std::invalid_argument(std::string(name) + " must be finite");
    }
}

}  // namespace

GaussianState make_vacuum() {
    return GaussianState{};
}

GaussianState make_coherent(ComplexAmplitude alpha) {
    require_finite(alpha.real(), "alpha");
    require_finite(alpha.imag(), "alpha");
    GaussianState state;
    state.mean.q = 2.0 * alpha.real();
    state.mean.p = 2.0 * alpha.imag();
    return state;
}

SymplecticMatrix rotation_matrix(double phi) {
    require_finite(phi, "phi");
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    return {c, s, -s, c};
}

SymplecticMatrix squeeze_matrix(double r, double chi) {
    require_finite(r, "r");
    require_finite(chi, "chi");
    if (r < 0.0) {
        throw std::invalid_argument("squeeze strength r must be >= 0");
    }
    const double ch = std::cosh(r);
    const double sh = std::sinh(r);
    return {ch + sh * std::cos(chi), sh * std::sin(chi), sh * std::sin(chi),
            ch - sh * std::cos(chi)};
}

GaussianState apply_symplectic(const SymplecticMatrix& s, const GaussianState& state) {
    if (!(std::abs(s.det() - 1.0) <= kSymplecticDetTol)) {
        throw std::invalid_argument("matrix is not symplectic: |det - 1| = " +
                                    std::to_string(std::abs(s.det() - 1.0)) + " exceeds 1e-6");
    }
    return {s * state.mean, congruence(s, state.cov)};
}

GaussianState apply_loss(const GaussianState& state, double gamma_tau) {
    require_finite(gamma_tau, "gamma_tau");
    if (gamma_tau < 0.0) {
        throw std::invalid_argument("loss exponent gamma_tau must be >= 0");
    }
    const double amp = std::exp(-0.5 * gamma_tau);
    const double cov = amp * amp;
    GaussianState out;
    out.mean = {amp * state.mean.q, amp * state.mean.p};
    out.cov = {cov * state.cov.qq + (1.0 - cov), cov * state.cov.qp,
               cov * state.cov.pp + (1.0 - cov)};
    return out;
}

double photon_number(const GaussianState& state) {
    const MeanVector& d = state.mean;
    return (state.cov.qq + state.cov.pp + d.q * d.q + d.p * d.p - 2.0) / 4.0;
}

double purity(const GaussianState& state) {
    return 1.0 / std::sqrt(state.cov.det());
}

}  // namespace kmzi
