#ifndef SPECSECT_OPCORE_HPP
#define SPECSECT_OPCORE_HPP

#include <functional>

#include "specsect/types.hpp"

namespace specsect {

/// Operator norm (largest singular value).
double op_norm(const Matrix& m);

/// ||M - M*||.
double hermiticity_defect(const Matrix& m);

/// Hermitian eigendecomposition with a deterministic convention:
/// eigenvalues ascending, eigenvector phases fixed (first component of
/// magnitude above threshold made real positive), and a canonical basis
/// inside each degenerate eigenspace (pivoted QR of the eigenprojector).
/// Rejects input whose hermiticity defect exceeds tolerance.
SpectralDecomposition eig(const TruncatedOperator& a, const Tolerances& tol = {});
SpectralDecomposition eig_hermitian(const Matrix& m, const Tolerances& tol = {});

/// U g(lambda) U* for a scalar function g.
Matrix apply_spectral(const SpectralDecomposition& d,
                      const std::function<double(double)>& g);
Matrix apply_spectral_complex(const SpectralDecomposition& d,
                              const std::function<Complex(double)>& g);

/// Scalar bounded transform and its inverse.
inline double f_scalar(double x) { return x / std::sqrt(1.0 + x * x); }
inline double f_inverse_scalar(double a) { return a / std::sqrt(1.0 - a * a); }

/// f(A) = A (1 + A*A)^{-1/2}; eigenvalues land strictly inside (-1, 1).
Matrix bounded_transform(const TruncatedOperator& a, const Tolerances& tol = {});
Matrix bounded_transform(const SpectralDecomposition& d);

/// f^{-1}(a) = a (1 - a*a)^{-1/2}; rejects spectral radius >= 1 - margin.
TruncatedOperator inverse_bounded_transform(const Matrix& a, const TailDescriptor& tail,
                                            double margin = 1e-12,
                                            const Tolerances& tol = {});

/// kappa(A) = (A - i)(A + i)^{-1}, unitary.
Matrix cayley(const TruncatedOperator& a, const Tolerances& tol = {});
Matrix cayley(const SpectralDecomposition& d);

/// Scalar Cayley transform kappa(x) = (x - i)/(x + i).
inline Complex cayley_scalar(double x) {
    return Complex(x, -1.0) / Complex(x, 1.0);
}

/// P = sum of eigenprojectors with eigenvalue in J. Rejects eigenvalues
/// within gap tolerance of a finite endpoint.
ProjectionMatrix spectral_projection(const TruncatedOperator& a, const IntervalSpec& j,
                                     const Tolerances& tol = {});
ProjectionMatrix spectral_projection(const SpectralDecomposition& d, const IntervalSpec& j,
                                     const TailDescriptor& tail, const Tolerances& tol = {});

/// Positive spectral projection chi^+(A) = 1_{[0,+inf)}(A).
ProjectionMatrix chi_plus(const TruncatedOperator& a, const Tolerances& tol = {});
ProjectionMatrix chi_plus(const SpectralDecomposition& d, const TailDescriptor& tail,
                          const Tolerances& tol = {});

/// ||f(A) - f(B)|| and ||kappa(A) - kappa(B)||; both reject mismatched
/// dimensions or tail descriptors.
double riesz_distance(const TruncatedOperator& a, const TruncatedOperator& b,
                      const Tolerances& tol = {});
double graph_distance(const TruncatedOperator& a, const TruncatedOperator& b,
                      const Tolerances& tol = {});

/// Finite-window distances without the tail compatibility guard; used by
/// family diagnostics where the mismatch itself is the finding.
double riesz_distance_window(const TruncatedOperator& a, const TruncatedOperator& b);
double graph_distance_window(const TruncatedOperator& a, const TruncatedOperator& b);

/// kat(a) = (a - i sqrt(1 - a^2))^2, the unit-circle factor of the
/// Cayley transform: kappa = kat o f.
Complex kat(double a);

/// phi(e^{it}) = cos(t/2) on the lower arc t in [-pi, 0]; inverse of kat
/// restricted to [0, 1]. Rejects points off the arc.
double phi(Complex z, double arc_tol = 1e-9);

/// phi applied spectrally to a unitary with spectrum on the lower arc,
/// computed as sqrt((1 + (K + K*)/2) / 2). Independent of eig(A).
Matrix phi_of_unitary(const Matrix& k);

}  // namespace specsect

#endif
