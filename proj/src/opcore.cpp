#include "specsect/opcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace specsect {

double op_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    // Largest singular value via the smaller Gram matrix; roundoff in
    // forming it scales with ||m||^2, so the square root stays accurate.
    const Matrix gram = m.rows() <= m.cols() ? Matrix(m * m.adjoint())
                                             : Matrix(m.adjoint() * m);
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double hermiticity_defect(const Matrix& m) {
    return op_norm(Matrix(m - m.adjoint()));
}

namespace {

void fix_column_phase(Matrix& u, int col) {
    const int n = static_cast<int>(u.rows());
    for (int i = 0; i < n; ++i) {
        const double mag = std::abs(u(i, col));
        if (mag > 1e-10) {
            u.col(col) *= std::conj(u(i, col)) / mag;
            return;
        }
    }
}

// Canonical orthonormal basis of a degenerate eigenspace: pivoted QR of
// the eigenprojector, so the basis depends only on the subspace.
void canonicalize_cluster(Matrix& u, int begin, int end) {
    const int m = end - begin;
    if (m <= 1) return;
    Matrix block = u.middleCols(begin, m);
    Matrix proj = block * block.adjoint();
    Eigen::ColPivHouseholderQR<Matrix> qr(proj);
    Matrix q = qr.householderQ();
    u.middleCols(begin, m) = q.leftCols(m);
}

}  // namespace

SpectralDecomposition eig_hermitian(const Matrix& m, const Tolerances& tol) {
    const double scale = 1.0 + m.cwiseAbs().maxCoeff();
    const double defect = hermiticity_defect(m);
    if (defect > tol.hermiticity * scale) {
        std::ostringstream os;
        os << "matrix is not Hermitian: defect " << defect
           << " exceeds tolerance " << tol.hermiticity * scale;
        throw Error("not_hermitian", os.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es((m + m.adjoint()) / 2.0);
    if (es.info() != Eigen::Success)
        throw Error("eig_failed", "Hermitian eigensolver did not converge");

    SpectralDecomposition d;
    d.eigenvalues = es.eigenvalues();
    d.eigenvectors = es.eigenvectors();

    const int n = static_cast<int>(d.eigenvalues.size());
    const double cluster_tol = 1e-12 * (1.0 + d.eigenvalues.cwiseAbs().maxCoeff());
    int begin = 0;
    for (int i = 1; i <= n; ++i) {
        if (i == n || d.eigenvalues(i) - d.eigenvalues(i - 1) > cluster_tol) {
            canonicalize_cluster(d.eigenvectors, begin, i);
            begin = i;
        }
    }
    for (int j = 0; j < n; ++j) fix_column_phase(d.eigenvectors, j);
    return d;
}

SpectralDecomposition eig(const TruncatedOperator& a, const Tolerances& tol) {
    if (a.dim < 1) throw Error("bad_operator", "operator dimension must be >= 1");
    return eig_hermitian(a.entries, tol);
}

Matrix apply_spectral(const SpectralDecomposition& d,
                      const std::function<double(double)>& g) {
    const int n = static_cast<int>(d.eigenvalues.size());
    RealVector vals(n);
    for (int i = 0; i < n; ++i) vals(i) = g(d.eigenvalues(i));
    return d.eigenvectors * vals.asDiagonal() * d.eigenvectors.adjoint();
}

Matrix apply_spectral_complex(const SpectralDecomposition& d,
                              const std::function<Complex(double)>& g) {
    const int n = static_cast<int>(d.eigenvalues.size());
    Eigen::VectorXcd vals(n);
    for (int i = 0; i < n; ++i) vals(i) = g(d.eigenvalues(i));
    return d.eigenvectors * vals.asDiagonal() * d.eigenvectors.adjoint();
}

Matrix bounded_transform(const SpectralDecomposition& d) {
    return apply_spectral(d, f_scalar);
}

Matrix bounded_transform(const TruncatedOperator& a, const Tolerances& tol) {
    return bounded_transform(eig(a, tol));
}

TruncatedOperator inverse_bounded_transform(const Matrix& a, const TailDescriptor& tail,
                                            double margin, const Tolerances& tol) {
    SpectralDecomposition d = eig_hermitian(a, tol);
    const double radius = d.eigenvalues.cwiseAbs().maxCoeff();
    if (radius >= 1.0 - margin) {
        std::ostringstream os;
        os << "spectral radius " << radius << " >= " << 1.0 - margin
           << "; 1 - a*a must stay injective";
        throw Error("outside_f_image", os.str());
    }
    return TruncatedOperator(apply_spectral(d, f_inverse_scalar), tail);
}

Matrix cayley(const SpectralDecomposition& d) {
    return apply_spectral_complex(d, [](double x) { return cayley_scalar(x); });
}

Matrix cayley(const TruncatedOperator& a, const Tolerances& tol) {
    return cayley(eig(a, tol));
}

namespace {

TailType tail_type_for(const TailDescriptor& tail, const IntervalSpec& j) {
    switch (tail.kind) {
        case TailKind::PositiveGrowth: return j.upper == kInf ? TailType::Identity : TailType::Zero;
        case TailKind::NegativeGrowth: return j.lower == -kInf ? TailType::Identity : TailType::Zero;
        case TailKind::MixedSigned:
            return (j.lower == -kInf && j.upper == kInf) ? TailType::Identity : TailType::Zero;
    }
    return TailType::Zero;
}

}  // namespace

ProjectionMatrix spectral_projection(const SpectralDecomposition& d, const IntervalSpec& j,
                                     const TailDescriptor& tail, const Tolerances& tol) {
    if (j.lower > j.upper) throw Error("bad_interval", "interval lower bound exceeds upper");
    const int n = static_cast<int>(d.eigenvalues.size());
    for (int i = 0; i < n; ++i) {
        const double lam = d.eigenvalues(i);
        for (double endpoint : {j.lower, j.upper}) {
            if (std::isfinite(endpoint) && std::abs(lam - endpoint) <= tol.gap) {
                std::ostringstream os;
                os << "eigenvalue " << lam << " collides with interval endpoint "
                   << endpoint << " (gap tolerance " << tol.gap << ")";
                throw Error("endpoint_collision", os.str());
            }
        }
    }
    Matrix p = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        if (j.contains(d.eigenvalues(i)))
            p += d.eigenvectors.col(i) * d.eigenvectors.col(i).adjoint();
    }
    ProjectionMatrix out;
    out.entries = std::move(p);
    out.tail_type = tail_type_for(tail, j);
    out.tolerance = tol.idempotency;
    return out;
}

ProjectionMatrix spectral_projection(const TruncatedOperator& a, const IntervalSpec& j,
                                     const Tolerances& tol) {
    return spectral_projection(eig(a, tol), j, a.tail, tol);
}

ProjectionMatrix chi_plus(const SpectralDecomposition& d, const TailDescriptor& tail,
                          const Tolerances& tol) {
    return spectral_projection(d, IntervalSpec{0.0, kInf, true, true}, tail, tol);
}

ProjectionMatrix chi_plus(const TruncatedOperator& a, const Tolerances& tol) {
    return chi_plus(eig(a, tol), a.tail, tol);
}

namespace {

void check_compatible(const TruncatedOperator& a, const TruncatedOperator& b) {
    if (a.dim != b.dim)
        throw Error("dim_mismatch", "operators have different dimensions");
    if (!(a.tail == b.tail))
        throw Error("tail_mismatch",
                    "operators have incompatible tail descriptors; distance undefined");
}

}  // namespace

double riesz_distance_window(const TruncatedOperator& a, const TruncatedOperator& b) {
    return op_norm(Matrix(bounded_transform(a) - bounded_transform(b)));
}

double graph_distance_window(const TruncatedOperator& a, const TruncatedOperator& b) {
    return op_norm(Matrix(cayley(a) - cayley(b)));
}

double riesz_distance(const TruncatedOperator& a, const TruncatedOperator& b,
                      const Tolerances&) {
    check_compatible(a, b);
    return riesz_distance_window(a, b);
}

double graph_distance(const TruncatedOperator& a, const TruncatedOperator& b,
                      const Tolerances&) {
    check_compatible(a, b);
    return graph_distance_window(a, b);
}

Complex kat(double a) {
    if (std::abs(a) > 1.0 + 1e-12)
        throw Error("out_of_range", "kat requires |a| <= 1");
    a = std::clamp(a, -1.0, 1.0);
    const Complex w(a, -std::sqrt(std::max(0.0, 1.0 - a * a)));
    return w * w;
}

double phi(Complex z, double arc_tol) {
    if (std::abs(std::abs(z) - 1.0) > arc_tol)
        throw Error("off_arc", "phi argument is not on the unit circle");
    const double t = std::arg(z);
    if (t > arc_tol)
        throw Error("off_arc", "phi argument is not on the lower arc");
    return std::cos(std::min(t, 0.0) / 2.0);
}

Matrix phi_of_unitary(const Matrix& k) {
    Matrix re = (k + k.adjoint()) / 2.0;
    SpectralDecomposition d = eig_hermitian(re);
    return apply_spectral(d, [](double c) {
        return std::sqrt(std::max(0.0, (1.0 + c) / 2.0));
    });
}

}  // namespace specsect
