#pragma once

#include <complex>

namespace kmzi {

using ComplexAmplitude = std::complex<double>;

/// Quadrature expectation values in the convention q = a + a^dag,
/// p = i(a^dag - a), so the vacuum covariance is the identity.
struct MeanVector {
    double q = 0.0;
    double p = 0.0;
};

/// Symmetric 2x2 matrix stored by its three independent entries, so
/// symmetry cannot drift over long iterations.
struct SymMat2 {
    double qq = 0.0;
    double qp = 0.0;
    double pp = 0.0;

    double det() const { return qq * pp - qp * qp; }
    double trace() const { return qq + pp; }
};

using CovarianceMatrix = SymMat2;

struct GaussianState {
    MeanVector mean;
    CovarianceMatrix cov{1.0, 0.0, 1.0};
};

/// General real 2x2 matrix. Symplectic one-step maps (det = 1) reuse this
/// type; the determinant is checked at the points of use.
struct Mat2 {
    double m00 = 0.0, m01 = 0.0;
    double m10 = 0.0, m11 = 0.0;

    double det() const { return m00 * m11 - m01 * m10; }
    double trace() const { return m00 + m11; }
    Mat2 transposed() const { return {m00, m10, m01, m11}; }
};

using SymplecticMatrix = Mat2;

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
            a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
}

inline MeanVector operator*(const Mat2& m, const MeanVector& v) {
    return {m.m00 * v.q + m.m01 * v.p, m.m10 * v.q + m.m11 * v.p};
}

/// S X S^T for symmetric X; the result is symmetric by construction.
inline SymMat2 congruence(const Mat2& s, const SymMat2& x) {
    // rows of S * X
    const double a0 = s.m00 * x.qq + s.m01 * x.qp;
    const double a1 = s.m00 * x.qp + s.m01 * x.pp;
    const double b0 = s.m10 * x.qq + s.m11 * x.qp;
    const double b1 = s.m10 * x.qp + s.m11 * x.pp;
    return {a0 * s.m00 + a1 * s.m01, a0 * s.m10 + a1 * s.m11, b0 * s.m10 + b1 * s.m11};
}

/// A X B^T + B X A^T for symmetric X; symmetric by construction.
inline SymMat2 symmetrized_congruence(const Mat2& a, const SymMat2& x, const Mat2& b) {
    const double a0 = a.m00 * x.qq + a.m01 * x.qp;
    const double a1 = a.m00 * x.qp + a.m01 * x.pp;
    const double c0 = a.m10 * x.qq + a.m11 * x.qp;
    const double c1 = a.m10 * x.qp + a.m11 * x.pp;
    const double m00 = a0 * b.m00 + a1 * b.m01;
    const double m01 = a0 * b.m10 + a1 * b.m11;
    const double m10 = c0 * b.m00 + c1 * b.m01;
    const double m11 = c0 * b.m10 + c1 * b.m11;
    return {2.0 * m00, m01 + m10, 2.0 * m11};
}

/// Vacuum state: zero mean, identity covariance.
GaussianState make_vacuum();

/// Coherent state |alpha>: mean (2 Re alpha, 2 Im alpha), identity covariance.
GaussianState make_coherent(ComplexAmplitude alpha);

/// Phase-space rotation [[cos, sin], [-sin, cos]].
SymplecticMatrix rotation_matrix(double phi);

/// Single-mode squeezer with strength r >= 0 and phase chi.
SymplecticMatrix squeeze_matrix(double r, double chi);

/// mean' = S mean, cov' = S cov S^T. Rejects S with |det - 1| > 1e-6.
GaussianState apply_symplectic(const SymplecticMatrix& s, const GaussianState& state);

/// Zero-temperature loss channel: mean is damped by exp(-gamma_tau/2) and the
/// covariance relaxes toward the identity with weight 1 - exp(-gamma_tau).
GaussianState apply_loss(const GaussianState& state, double gamma_tau);

/// Mean photon number <a^dag a> = (sigma_qq + sigma_pp + q^2 + p^2 - 2) / 4.
double photon_number(const GaussianState& state);

/// Purity Tr[rho^2] = det(sigma)^{-1/2}; 1 for pure states.
double purity(const GaussianState& state);

}  // namespace kmzi
