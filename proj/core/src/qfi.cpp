#include "kmzi/qfi.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "kmzi/errors.hpp"

namespace kmzi {

namespace {

constexpr double kDetPhysicalityFloor = 1.0 - 1e-9;
constexpr double kPurePurityWindow = 1e-10;
constexpr double kPureTangentGuard = 1e-8;
constexpr double kNegativeQfiFloor = -1e-9;

SymMat2 inverse_of(const SymMat2& s, double det) {
    return {s.pp / det, -s.qp / det, s.qq / det};
}

double quadratic_form(const SymMat2& m, const MeanVector& v) {
    return m.qq * v.q * v.q + 2.0 * m.qp * v.q * v.p + m.pp * v.p * v.p;
}

/// Tr(A B) for symmetric A, B.
double trace_product(const SymMat2& a, const SymMat2& b) {
    return a.qq * b.qq + 2.0 * a.qp * b.qp + a.pp * b.pp;
}

double three_term_qfi(const GaussianState& state, const SymMat2& d_cov,
                      const MeanVector& d_mean, double d_purity, bool check_tangent) {
    const double det = state.cov.det();
    if (det < kDetPhysicalityFloor) {
        throw std::invalid_argument("covariance determinant " + std::to_string(det) +
                                    " is below the physicality floor");
    }
    const SymMat2 inv = inverse_of(state.cov, det);
    const double pur = 1.0 / std::sqrt(det);
    const bool pure = std::abs(1.0 - pur) < kPurePurityWindow;

    // M = sigma^{-1} dsigma, a general 2x2
    const double m00 = inv.qq * d_cov.qq + inv.qp * d_cov.qp;
    const double m01 = inv.qq * d_cov.qp + inv.qp * d_cov.pp;
    const double m10 = inv.qp * d_cov.qq + inv.pp * d_cov.qp;
    const double m11 = inv.qp * d_cov.qp + inv.pp * d_cov.pp;
    const double trace_m2 = m00 * m00 + 2.0 * m01 * m10 + m11 * m11;

    const double term1 = 0.5 * trace_m2 / (pure ? 2.0 : 1.0 + pur * pur);

    double term2 = 0.0;
    if (pure) {
        if (check_tangent && std::abs(d_purity) > kPureTangentGuard) {
            throw TangentInconsistencyError(
                "pure state with non-zero purity derivative " + std::to_string(d_purity) +
                "; the tangent is inconsistent with the state");
        }
    } else {
        term2 = 2.0 * d_purity * d_purity / (1.0 - pur * pur * pur * pur);
    }

    const double term3 = quadratic_form(inv, d_mean);

    double total = term1 + term2 + term3;
    if (total < 0.0) {
        if (total < kNegativeQfiFloor) {
            throw std::logic_error("QFI evaluated to " + std::to_string(total) +
                                   ", below the rounding floor");
        }
        total = 0.0;
    }
    return total;
}

}  // namespace

double purity_derivative(const GaussianState& state, const TangentState& tangent) {
    const double det = state.cov.det();
    const SymMat2 inv = inverse_of(state.cov, det);
    return -0.5 * purity(state) * trace_product(inv, tangent.d_cov);
}

double qfi_gaussian(const GaussianState& state, const TangentState& tangent) {
    return three_term_qfi(state, tangent.d_cov, tangent.d_mean,
                          purity_derivative(state, tangent), /*check_tangent=*/true);
}

QfiSeries qfi_vs_time(const GaussianState& initial, const KickParams& params, int t_max) {
    if (t_max < 1) {
        throw std::invalid_argument("t_max must be >= 1");
    }
    const PeriodMap map(params);
    QfiSeries series;
    series.reserve(static_cast<std::size_t>(t_max));
    GaussianState state = initial;
    TangentState tangent;
    for (int t = 1; t <= t_max; ++t) {
        map.apply(state, tangent);
        const double value = qfi_gaussian(state, tangent);
        series.push_back(
            {t, value, value / static_cast<double>(t), photon_number(state), purity(state)});
    }
    return series;
}

double qfi_coherent_benchmark(double n_photons, int t) {
    if (!(n_photons >= 0.0)) {
        throw std::invalid_argument("photon number must be >= 0");
    }
    if (t < 0) {
        throw std::invalid_argument("t must be >= 0");
    }
    const double time = static_cast<double>(t);
    return 2.0 * n_photons * time * time;
}

double qfi_noon_benchmark(double n_photons, int t) {
    if (!(n_photons >= 0.0)) {
        throw std::invalid_argument("photon number must be >= 0");
    }
    if (t < 0) {
        throw std::invalid_argument("t must be >= 0");
    }
    const double time = static_cast<double>(t);
    return n_photons * n_photons * time * time;
}

double qfi_finite_difference(const GaussianState& initial, const KickParams& params, int t,
                             double h) {
    if (t < 0) {
        throw std::invalid_argument("t must be >= 0");
    }
    if (h <= 0.0) {
        h = 1e-6 * std::max(1.0, std::abs(params.phi));
    }
    KickParams lo = params;
    lo.phi -= h;
    KickParams hi = params;
    hi.phi += h;
    if (!is_stable_with_loss(lo) || !is_stable_with_loss(hi)) {
        throw UnstableParameterError("phi +/- h leaves the stable regime");
    }

    const GaussianState below = propagate(initial, lo, t);
    const GaussianState above = propagate(initial, hi, t);
    const GaussianState center = propagate(initial, params, t);

    const double inv_2h = 1.0 / (2.0 * h);
    const MeanVector d_mean{(above.mean.q - below.mean.q) * inv_2h,
                            (above.mean.p - below.mean.p) * inv_2h};
    const SymMat2 d_cov{(above.cov.qq - below.cov.qq) * inv_2h,
                        (above.cov.qp - below.cov.qp) * inv_2h,
                        (above.cov.pp - below.cov.pp) * inv_2h};
    const double d_purity = (purity(above) - purity(below)) * inv_2h;

    return three_term_qfi(center, d_cov, d_mean, d_purity, /*check_tangent=*/false);
}

RescaledMax max_rescaled_qfi(const QfiSeries& series) {
    if (series.empty()) {
        throw std::invalid_argument("series must be nonempty");
    }
    RescaledMax best{0, 0.0};
    for (const QfiPoint& point : series) {
        if (point.t < 1) {
            continue;
        }
        if (best.t_opt == 0 || point.rescaled > best.g_max) {
            best = {point.t, point.rescaled};
        }
    }
    if (best.t_opt == 0) {
        throw std::invalid_argument("series has no entries with t >= 1");
    }
    return best;
}

}  // namespace kmzi
