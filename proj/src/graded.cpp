#include "specsect/graded.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace specsect {

namespace {

double anticommutator_norm(const Matrix& sigma, const Matrix& m) {
    return op_norm(Matrix(sigma * m + m * sigma));
}

// Signature (#pos - #neg eigenvalues) of sigma compressed to the span
// of the given orthonormal columns; the span must be sigma-invariant,
// so the compression is itself a symmetry.
int compressed_signature(const Matrix& sigma, const Matrix& basis, const Tolerances& tol) {
    if (basis.cols() == 0) return 0;
    const Matrix comp = basis.adjoint() * sigma * basis;
    SpectralDecomposition d = eig_hermitian(comp, tol);
    int sig = 0;
    for (int i = 0; i < d.eigenvalues.size(); ++i) {
        if (std::abs(std::abs(d.eigenvalues(i)) - 1.0) > 1e-6)
            throw Error("not_invariant",
                        "subspace is not invariant under the grading symmetry");
        sig += d.eigenvalues(i) > 0.0 ? 1 : -1;
    }
    return sig;
}

// Orthonormal basis of the null space of m, singular values below thr.
Matrix null_space(const Matrix& m, double thr) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int rank = 0;
    while (rank < sv.size() && sv(rank) > thr) ++rank;
    return svd.matrixV().rightCols(m.cols() - rank);
}

}  // namespace

Grading Grading::from_matrix(const Matrix& sigma, const Tolerances& tol) {
    if (sigma.rows() != sigma.cols())
        throw Error("bad_grading", "grading symmetry must be square");
    const int n = static_cast<int>(sigma.rows());
    if (hermiticity_defect(sigma) > tol.hermiticity)
        throw Error("bad_grading", "grading symmetry is not Hermitian");
    if (op_norm(Matrix(sigma * sigma - Matrix::Identity(n, n))) > tol.unitarity)
        throw Error("bad_grading", "grading symmetry does not square to 1");
    Grading g;
    g.sigma = sigma;
    SpectralDecomposition d = eig_hermitian(sigma, tol);
    for (int i = 0; i < n; ++i)
        (d.eigenvalues(i) > 0.0 ? g.plus_dim : g.minus_dim) += 1;
    return g;
}

Matrix Grading::plus_basis(const Tolerances& tol) const {
    SpectralDecomposition d = eig_hermitian(sigma, tol);
    Matrix out(sigma.rows(), plus_dim);
    int c = 0;
    for (int i = 0; i < d.eigenvalues.size(); ++i)
        if (d.eigenvalues(i) > 0.0) out.col(c++) = d.eigenvectors.col(i);
    return out;
}

Matrix Grading::minus_basis(const Tolerances& tol) const {
    SpectralDecomposition d = eig_hermitian(sigma, tol);
    Matrix out(sigma.rows(), minus_dim);
    int c = 0;
    for (int i = 0; i < d.eigenvalues.size(); ++i)
        if (d.eigenvalues(i) < 0.0) out.col(c++) = d.eigenvectors.col(i);
    return out;
}

void OddOperator::validate(const Tolerances& tol) const {
    if (grading.sigma.rows() != base.entries.rows())
        throw Error("bad_grading", "grading and operator dimensions differ");
    const double scale = 1.0 + op_norm(base.entries);
    const double defect = anticommutator_norm(grading.sigma, base.entries);
    if (defect > 1e-8 * scale) {
        std::ostringstream os;
        os << "operator does not anticommute with the grading: ||sigma A + A sigma|| = "
           << defect;
        throw Error("not_odd", os.str());
    }
}

OddOperator hat(const Matrix& a, const TailDescriptor& tail) {
    const int k = static_cast<int>(a.cols());
    const int kp = static_cast<int>(a.rows());
    Matrix m = Matrix::Zero(k + kp, k + kp);
    m.topRightCorner(k, kp) = a.adjoint();
    m.bottomLeftCorner(kp, k) = a;
    Matrix sigma = Matrix::Zero(k + kp, k + kp);
    sigma.topLeftCorner(k, k) = Matrix::Identity(k, k);
    sigma.bottomRightCorner(kp, kp) = -Matrix::Identity(kp, kp);
    OddOperator out{TruncatedOperator(std::move(m), tail), Grading::from_matrix(sigma)};
    return out;
}

Matrix nu(const ProjectionMatrix& p, const Grading& g, const Tolerances& tol) {
    const int n = static_cast<int>(g.sigma.rows());
    const Matrix defect =
        g.sigma * p.entries * g.sigma - (Matrix::Identity(n, n) - p.entries);
    const double dnorm = op_norm(defect);
    if (dnorm > 1e-8) {
        std::ostringstream os;
        os << "projection is not Cl(1)-compatible: ||sigma P sigma - (1-P)|| = " << dnorm;
        throw Error("not_cl1", os.str());
    }
    if (g.plus_dim != g.minus_dim)
        throw Error("unbalanced_grading",
                    "Cl(1) identification needs equal graded halves");
    const Matrix t = 2.0 * p.entries - Matrix::Identity(n, n);
    const Matrix v = g.minus_basis(tol).adjoint() * t * g.plus_basis(tol);
    const double udef =
        op_norm(Matrix(v.adjoint() * v - Matrix::Identity(v.cols(), v.cols())));
    if (udef > 1e-8)
        throw Error("not_cl1", "extracted block is not unitary: defect " +
                                   std::to_string(udef));
    return v;
}

ProjectionMatrix nu_inverse(const Matrix& v, const Grading& g, TailType tail_type,
                            const Tolerances& tol) {
    if (g.plus_dim != g.minus_dim || v.rows() != g.minus_dim || v.cols() != g.plus_dim)
        throw Error("bad_grading", "unitary does not match the graded halves");
    if (op_norm(Matrix(v.adjoint() * v - Matrix::Identity(v.cols(), v.cols()))) >
        1e-8)
        throw Error("not_unitary", "nu_inverse requires a unitary block");
    const Matrix vp = g.plus_basis(tol);
    const Matrix vm = g.minus_basis(tol);
    const Matrix t = vm * v * vp.adjoint() + vp * v.adjoint() * vm.adjoint();
    const int n = static_cast<int>(g.sigma.rows());
    return {(Matrix::Identity(n, n) + t) / 2.0, tail_type, tol.idempotency};
}

std::function<double(double)> even_bump_profile(double r) {
    return [r](double t) { return r * std::max(0.0, 1.0 - (t / r) * (t / r)); };
}

OddTrivializerResult odd_trivializer(const OddOperator& a, double r,
                                     const std::function<double(double)>& psi_even,
                                     const Tolerances& tol) {
    a.validate(tol);
    if (r <= 0.0) throw Error("bad_cutoff", "cutoff r must be positive");
    const auto psi = psi_even ? psi_even : even_bump_profile(r);
    SpectralDecomposition d = eig(a.base, tol);
    for (int i = 0; i < d.eigenvalues.size(); ++i) {
        const double lam = d.eigenvalues(i);
        const double p = psi(lam);
        if (lam * lam + p * p < 1e-12)
            throw Error("profile_too_small",
                        "psi(lambda)^2 + lambda^2 vanishes at a kernel mode");
    }
    OddTrivializerResult out;
    const Matrix psi_a = apply_spectral(d, psi);
    out.correction = a.grading.sigma * psi_a;
    const Matrix shifted = a.base.entries + out.correction;
    out.identity_defect = op_norm(
        Matrix(shifted * shifted - a.base.entries * a.base.entries - psi_a * psi_a));
    SpectralDecomposition sd = eig_hermitian(shifted, tol);
    out.min_abs_eig = sd.eigenvalues.cwiseAbs().minCoeff();
    out.section = chi_plus(sd, a.base.tail, tol);
    return out;
}

namespace {

Matrix kernel_basis(const OddOperator& a, const Tolerances& tol) {
    SpectralDecomposition d = eig(a.base, tol);
    const double thr = 1e-9 * (1.0 + d.eigenvalues.cwiseAbs().maxCoeff());
    int n_kernel = 0;
    for (int i = 0; i < d.eigenvalues.size(); ++i) {
        const double mag = std::abs(d.eigenvalues(i));
        if (mag <= thr) {
            ++n_kernel;
        } else if (mag < 16.0 * thr) {
            std::ostringstream os;
            os << "eigenvalue " << d.eigenvalues(i)
               << " straddles the kernel threshold " << thr;
            throw Error("kernel_ambiguous", os.str());
        }
    }
    Matrix basis(a.base.dim, n_kernel);
    int c = 0;
    for (int i = 0; i < d.eigenvalues.size(); ++i)
        if (std::abs(d.eigenvalues(i)) <= thr) basis.col(c++) = d.eigenvectors.col(i);
    return basis;
}

}  // namespace

int kernel_signature(const OddOperator& a, const Tolerances& tol) {
    a.validate(tol);
    return compressed_signature(a.grading.sigma, kernel_basis(a, tol), tol);
}

int window_signature(const OddOperator& a, double r, const Tolerances& tol) {
    a.validate(tol);
    SpectralDecomposition d = eig(a.base, tol);
    int n_window = 0;
    for (int i = 0; i < d.eigenvalues.size(); ++i) {
        if (std::abs(std::abs(d.eigenvalues(i)) - r) <= tol.gap)
            throw Error("endpoint_collision", "eigenvalue collides with window radius");
        if (std::abs(d.eigenvalues(i)) < r) ++n_window;
    }
    Matrix basis(a.base.dim, n_window);
    int c = 0;
    for (int i = 0; i < d.eigenvalues.size(); ++i)
        if (std::abs(d.eigenvalues(i)) < r) basis.col(c++) = d.eigenvectors.col(i);
    return compressed_signature(a.grading.sigma, basis, tol);
}

int kernel_signature_checked(const OddOperator& a, double r, const Tolerances& tol) {
    const int sig = kernel_signature(a, tol);
    const int wsig = window_signature(a, r, tol);
    if (sig != wsig)
        throw Error("invariant_violation",
                    "kernel and window signatures disagree: " + std::to_string(sig) +
                        " vs " + std::to_string(wsig));
    return sig;
}

bool is_cl1_section(const OddOperator& a, const ProjectionMatrix& p, double r,
                    double* anticommute_defect, const Tolerances& tol) {
    a.validate(tol);
    const int n = a.base.dim;
    const double defect = op_norm(Matrix(
        a.grading.sigma * p.entries * a.grading.sigma -
        (Matrix::Identity(n, n) - p.entries)));
    if (anticommute_defect) *anticommute_defect = defect;
    if (defect > 1e-8) return false;
    return is_spectral_section(a.base, p, r, tol).ok;
}

OddGammaResult odd_gamma(const OddOperator& a, const ProjectionMatrix& p, double r,
                         const CutoffProfile& psi, const Tolerances& tol) {
    double cl1_defect = 0.0;
    if (!is_cl1_section(a, p, r, &cl1_defect, tol))
        throw Error("not_cl1_section",
                    "odd_gamma requires a Cl(1) section; anticommutation defect " +
                        std::to_string(cl1_defect));
    OddGammaResult out;
    out.base = gamma(a.base, p, r, psi, tol);
    out.oddness_defect = anticommutator_norm(a.grading.sigma, out.base.correction);
    return out;
}

ProjectionMatrix cl1_section_of_hat(const Matrix& a, const Tolerances& tol) {
    const OddOperator odd = hat(a);
    const int sig = kernel_signature(odd, tol);
    if (sig != 0)
        throw Error("index_obstruction",
                    "index " + std::to_string(-sig) +
                        " is nonzero: no Cl(1) section exists");
    const int k = static_cast<int>(a.cols());
    const int kp = static_cast<int>(a.rows());
    const int n = k + kp;
    const double thr = 1e-9 * (1.0 + op_norm(a));
    const Matrix u0 = null_space(a, thr);            // ker A, in C^k
    const Matrix w0 = null_space(a.adjoint(), thr);  // ker A*, in C^kp
    const int m = static_cast<int>(u0.cols());

    SpectralDecomposition d = eig(odd.base, tol);
    Matrix p = Matrix::Zero(n, n);
    for (int i = 0; i < d.eigenvalues.size(); ++i)
        if (d.eigenvalues(i) > thr)
            p += d.eigenvectors.col(i) * d.eigenvectors.col(i).adjoint();
    // Pairing projection on the kernel: each ker A mode is matched with a
    // ker A* mode through the identity in the chosen orthonormal bases.
    for (int i = 0; i < m; ++i) {
        Eigen::VectorXcd z = Eigen::VectorXcd::Zero(n);
        z.head(k) = u0.col(i);
        z.tail(kp) = w0.col(i);
        p += (z * z.adjoint()) / 2.0;
    }
    return {std::move(p), TailType::Zero, tol.idempotency};
}

NonsaResult nonsa_correction(const Matrix& a, double r, const Tolerances& tol) {
    if (r <= 0.0) throw Error("bad_cutoff", "cutoff r must be positive");
    const OddOperator odd = hat(a);
    const ProjectionMatrix p = cl1_section_of_hat(a, tol);
    const OddGammaResult g = odd_gamma(odd, p, r, smoothstep_profile(), tol);

    const int k = static_cast<int>(a.cols());
    const int kp = static_cast<int>(a.rows());
    NonsaResult out;
    out.correction = g.base.correction.bottomLeftCorner(kp, k);

    Eigen::JacobiSVD<Matrix> svd(Matrix(a + out.correction));
    out.min_singular = svd.singularValues().minCoeff();

    // Window confinement against AA* and A*A below r^2.
    const auto window_complement = [&](const Matrix& square, int dim) {
        SpectralDecomposition sd = eig_hermitian(square, tol);
        Matrix w = Matrix::Identity(dim, dim);
        for (int i = 0; i < sd.eigenvalues.size(); ++i)
            if (sd.eigenvalues(i) < r * r)
                w -= sd.eigenvectors.col(i) * sd.eigenvectors.col(i).adjoint();
        return w;
    };
    out.range_defect = op_norm(Matrix(window_complement(a * a.adjoint(), kp) * out.correction));
    out.kernel_defect = op_norm(Matrix(out.correction * window_complement(a.adjoint() * a, k)));
    return out;
}

std::pair<Grading, Matrix> supersymmetrize(const Matrix& j, const Matrix& a_tilde,
                                           const Tolerances& tol) {
    if (hermiticity_defect(j) > tol.hermiticity)
        throw Error("bad_grading", "J must be Hermitian");
    SpectralDecomposition dj = eig_hermitian(j, tol);
    if (dj.eigenvalues.cwiseAbs().minCoeff() <= 1e-10)
        throw Error("singular", "J is singular within 1e-10");
    const Matrix sigma = apply_spectral(dj, [](double x) { return x > 0.0 ? 1.0 : -1.0; });
    Grading g = Grading::from_matrix(sigma, tol);
    const Matrix a_bar = (a_tilde - sigma * a_tilde * sigma) / 2.0;
    return {std::move(g), a_bar};
}

Matrix sigma_trick(const Matrix& a, const Grading& g, const Tolerances& tol) {
    const Matrix a_bar = (a - g.sigma * a * g.sigma) / 2.0;
    return a_bar + g.sigma;
}

ProjectionMatrix ess_odd_projection(const Matrix& a, const Grading& g,
                                    double* deformation_size, const Tolerances& tol) {
    if (op_norm(a) > 1.0 + 1e-12)
        throw Error("out_of_range", "ess_odd_projection requires ||a|| <= 1");
    const int n = static_cast<int>(a.rows());
    const Matrix b = (a - g.sigma * a * g.sigma) / 2.0;
    SpectralDecomposition db = eig_hermitian(b, tol);
    const Matrix root = apply_spectral(
        db, [](double x) { return std::sqrt(std::max(0.0, 1.0 - x * x)); });
    const Matrix u = b + g.sigma * root;
    const Matrix p = (u + Matrix::Identity(n, n)) / 2.0;
    if (deformation_size)
        *deformation_size = op_norm(Matrix(p - (a + Matrix::Identity(n, n)) / 2.0));
    return {p, TailType::Zero, tol.idempotency};
}

Matrix SymbolPoint::evaluate(const RealVector& xi) const {
    if (coeffs.empty()) throw Error("bad_symbol", "symbol has no coefficients");
    if (xi.size() != variables())
        throw Error("bad_symbol", "cotangent vector has wrong dimension");
    Matrix out = Matrix::Zero(coeffs.front().rows(), coeffs.front().cols());
    for (int j = 0; j < variables(); ++j) out += xi(j) * coeffs[j];
    return out;
}

WFactorization factor_w_symbol(const SymbolSample& d, unsigned seed,
                               const Tolerances& tol) {
    WFactorization out;
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (const auto& pt : d.points) {
        const int nv = pt.variables();
        if (nv < 2)
            throw Error("bad_symbol", "W-factorization needs at least two variables");

        // Orthogonal test pairs: coordinate pairs plus seeded random rotations.
        std::vector<std::pair<RealVector, RealVector>> pairs;
        for (int i = 0; i < nv; ++i)
            for (int j = i + 1; j < nv; ++j) {
                RealVector xi = RealVector::Zero(nv), eta = RealVector::Zero(nv);
                xi(i) = 1.0;
                eta(j) = 1.0;
                pairs.push_back({xi, eta});
            }
        for (int t = 0; t < 50; ++t) {
            RealVector xi(nv), raw(nv);
            for (int i = 0; i < nv; ++i) {
                xi(i) = gauss(rng);
                raw(i) = gauss(rng);
            }
            xi.normalize();
            RealVector eta = raw - raw.dot(xi) * xi;
            if (eta.norm() < 1e-8) continue;
            eta.normalize();
            pairs.push_back({xi, eta});
        }

        for (size_t i = 0; i < pairs.size(); ++i) {
            const Matrix dx = pt.evaluate(pairs[i].first);
            const Matrix de = pt.evaluate(pairs[i].second);
            const double res = op_norm(Matrix(dx * de.adjoint() + de * dx.adjoint()));
            if (res > out.worst_w_residual) {
                out.worst_w_residual = res;
                std::ostringstream os;
                os << pt.tag << " pair " << i;
                out.worst_pair = os.str();
            }
        }
        if (out.worst_w_residual > 1e-8)
            throw Error("w_condition_violated",
                        "anticommutation fails at " + out.worst_pair + " with residual " +
                            std::to_string(out.worst_w_residual));

        // S(eta) = 2 d(eta) d(eta)* / ||eta||^2, constant across unit vectors.
        std::vector<RealVector> units;
        for (int i = 0; i < nv; ++i) {
            RealVector e = RealVector::Zero(nv);
            e(i) = 1.0;
            units.push_back(e);
        }
        for (int t = 0; t < 10; ++t) {
            RealVector e(nv);
            for (int i = 0; i < nv; ++i) e(i) = gauss(rng);
            e.normalize();
            units.push_back(e);
        }
        Matrix s0;
        for (size_t i = 0; i < units.size(); ++i) {
            const Matrix de = pt.evaluate(units[i]);
            const Matrix s = 2.0 * de * de.adjoint();
            if (i == 0) {
                s0 = s;
            } else {
                out.max_s_deviation = std::max(out.max_s_deviation, op_norm(Matrix(s - s0)));
            }
        }
        if (out.max_s_deviation > 1e-8)
            throw Error("w_condition_violated",
                        "S(eta) varies across unit vectors by " +
                            std::to_string(out.max_s_deviation));

        SpectralDecomposition ds = eig_hermitian(s0 / 2.0, tol);
        if (ds.eigenvalues.minCoeff() <= 1e-12)
            throw Error("not_positive", "S/2 is not positive-definite");
        const Matrix i_factor = apply_spectral(ds, [](double x) { return std::sqrt(x); });
        const Matrix i_inv = apply_spectral(ds, [](double x) { return 1.0 / std::sqrt(x); });

        for (const auto& e : units) {
            const Matrix dprime = i_inv * pt.evaluate(e);
            const Matrix check = dprime * dprime.adjoint();
            out.worst_dirac_defect = std::max(
                out.worst_dirac_defect,
                op_norm(Matrix(check - Matrix::Identity(check.rows(), check.cols()))));
        }
        out.factors.push_back(i_factor);
    }
    return out;
}

}  // namespace specsect
