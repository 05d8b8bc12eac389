#ifndef SPECSECT_GRADED_HPP
#define SPECSECT_GRADED_HPP

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "specsect/sections.hpp"
#include "specsect/types.hpp"

namespace specsect {

/// Hermitian symmetry sigma with sigma^2 = 1 splitting the space into
/// +1 / -1 eigenspaces of dimensions plus_dim / minus_dim.
struct Grading {
    Matrix sigma;
    int plus_dim = 0;
    int minus_dim = 0;

    static Grading from_matrix(const Matrix& sigma, const Tolerances& tol = {});

    /// Orthonormal bases of the +1 / -1 eigenspaces (deterministic).
    Matrix plus_basis(const Tolerances& tol = {}) const;
    Matrix minus_basis(const Tolerances& tol = {}) const;
};

/// A Hermitian operator anticommuting with the grading symmetry.
struct OddOperator {
    TruncatedOperator base;
    Grading grading;

    void validate(const Tolerances& tol = {}) const;
};

/// hat(A) = [[0, A*],[A, 0]] for a kp x k matrix A, graded by
/// sigma = diag(1_k, -1_kp); Hermitian and odd by construction.
OddOperator hat(const Matrix& a,
                const TailDescriptor& tail = {TailKind::MixedSigned, 1.0});

/// Reads the unitary v between the graded halves out of 2P - 1 for a
/// projection with sigma P sigma = 1 - P. Rejects incompatible P.
Matrix nu(const ProjectionMatrix& p, const Grading& g, const Tolerances& tol = {});

/// Rebuilds the projection from the unitary: P = (1 + T)/2 with T the
/// off-diagonal symmetry carrying v.
ProjectionMatrix nu_inverse(const Matrix& v, const Grading& g, TailType tail_type = TailType::Zero,
                            const Tolerances& tol = {});

/// Default even profile: psi(t) = r * max(0, 1 - (t/r)^2).
std::function<double(double)> even_bump_profile(double r);

struct OddTrivializerResult {
    Matrix correction;          // C = sigma * psi(A)
    ProjectionMatrix section;   // chi+(A + C), an r-spectral section for A
    double identity_defect;     // ||(A+C)^2 - A^2 - psi(A)^2||
    double min_abs_eig;         // of A + C
};

/// C = sigma psi(A) for an even profile supported in [-r, r] with
/// psi(0) != 0; then (A+C)^2 = A^2 + psi(A)^2 and A + C is invertible.
OddTrivializerResult odd_trivializer(const OddOperator& a, double r,
                                     const std::function<double(double)>& psi_even = nullptr,
                                     const Tolerances& tol = {});

/// Signature of the quadratic form xi -> <xi, sigma xi> on ker(A),
/// kernel threshold 1e-9 * (1 + ||A||). Eigenvalues straddling the
/// threshold band raise an ambiguity error.
int kernel_signature(const OddOperator& a, const Tolerances& tol = {});

/// Signature of sigma compressed to the span of eigenvectors with
/// |lambda| < r; equals the kernel signature for admissible r.
int window_signature(const OddOperator& a, double r, const Tolerances& tol = {});

/// kernel_signature, additionally asserting agreement with the window
/// signature at the supplied radius.
int kernel_signature_checked(const OddOperator& a, double r, const Tolerances& tol = {});

/// r-spectral section + sigma P sigma = 1 - P, both to tolerance.
bool is_cl1_section(const OddOperator& a, const ProjectionMatrix& p, double r,
                    double* anticommute_defect = nullptr, const Tolerances& tol = {});

struct OddGammaResult {
    GammaResult base;
    double oddness_defect = 0.0;  // ||sigma C + C sigma||
};

/// gamma on odd data with a Cl(1) section; the correction is
/// automatically odd (both summands anticommute with sigma).
OddGammaResult odd_gamma(const OddOperator& a, const ProjectionMatrix& p, double r,
                         const CutoffProfile& psi = smoothstep_profile(),
                         const Tolerances& tol = {});

/// Canonical Cl(1) section of hat(A): positive spectral part plus the
/// pairing projection built from a unitary ker(A) -> ker(A*). Requires
/// kernel_signature 0 ("index_obstruction" otherwise).
ProjectionMatrix cl1_section_of_hat(const Matrix& a, const Tolerances& tol = {});

struct NonsaResult {
    Matrix correction;        // kp x k block
    double min_singular;      // of A + C
    double range_defect;      // ||(1 - 1_{[0,r^2)}(AA*)) C||
    double kernel_defect;     // ||C (1 - 1_{[0,r^2)}(A*A))||
};

/// Off-diagonal block of odd_gamma on hat(A) at the canonical Cl(1)
/// section: A + C invertible, range and co-range of C confined to the
/// spectral windows of AA* and A*A below r^2.
NonsaResult nonsa_correction(const Matrix& a, double r, const Tolerances& tol = {});

/// sigma = J (J^2)^{-1/2} from an invertible Hermitian J, and the odd
/// part A_bar = (A_tilde - sigma A_tilde sigma)/2.
std::pair<Grading, Matrix> supersymmetrize(const Matrix& j, const Matrix& a_tilde,
                                           const Tolerances& tol = {});

/// A' = (A - sigma A sigma)/2 + sigma; (A')^2 = A_bar^2 + 1 >= 1.
Matrix sigma_trick(const Matrix& a, const Grading& g, const Tolerances& tol = {});

/// b = (a - sigma a sigma)/2, u = b + sigma sqrt(1 - b^2), P = (u+1)/2.
/// u is a symmetry: u^2 = 1 because sqrt(1 - b^2) commutes with both
/// sigma and b.
ProjectionMatrix ess_odd_projection(const Matrix& a, const Grading& g,
                                    double* deformation_size = nullptr,
                                    const Tolerances& tol = {});

/// Principal symbol at one base point: d(xi) = sum_j xi_j * coeffs[j],
/// each coefficient a k x kp complex matrix.
struct SymbolPoint {
    std::string tag;
    std::vector<Matrix> coeffs;

    int variables() const { return static_cast<int>(coeffs.size()); }
    Matrix evaluate(const RealVector& xi) const;
};

struct SymbolSample {
    std::vector<SymbolPoint> points;
};

struct WFactorization {
    std::vector<Matrix> factors;      // positive I per point, D = I * D'
    double worst_w_residual = 0.0;    // max ||d(xi)d(eta)* + d(eta)d(xi)*|| over tested pairs
    double max_s_deviation = 0.0;     // max ||S(eta) - S(eta')|| across unit vectors
    double worst_dirac_defect = 0.0;  // max ||(I^-1 d(xi))(I^-1 d(xi))* - ||xi||^2|| on unit xi
    std::string worst_pair;
};

/// Checks d(xi)d(eta)* + d(eta)d(xi)* = 0 on coordinate pairs plus
/// seeded random rotations, extracts the constant S(eta) =
/// 2 d(eta)d(eta)*/||eta||^2, and returns I = sqrt(S/2) per point.
WFactorization factor_w_symbol(const SymbolSample& d, unsigned seed = 20260826,
                               const Tolerances& tol = {});

}  // namespace specsect

#endif
