#ifndef SPECSECT_SECTIONS_HPP
#define SPECSECT_SECTIONS_HPP

#include <functional>
#include <string>
#include <vector>

#include "specsect/family.hpp"
#include "specsect/opcore.hpp"
#include "specsect/types.hpp"

namespace specsect {

/// Continuous cutoff profile: 1 on (-inf, 0], 0 on [1, +inf), values in [0,1].
struct CutoffProfile {
    std::string name;
    std::function<double(double)> value;
};

CutoffProfile smoothstep_profile();  // 2t^3 - 3t^2 + 1 on [0,1], clamped
CutoffProfile piecewise_linear_profile();

struct SectionCheck {
    bool ok = false;
    double lower_defect = 0.0;  // ||(1-P) S+||, upper inclusion of 1_{[r,inf)}
    double upper_defect = 0.0;  // ||P S-||, inclusion into 1_{(-r,inf)}
    std::string reason;

    double violation() const { return std::max(lower_defect, upper_defect); }
};

/// Checks 1_{[r,inf)}(A) <= P <= 1_{(-r,inf)}(A) as range inclusions,
/// plus tail compatibility of P with the tail kind of A.
SectionCheck is_spectral_section(const TruncatedOperator& a, const ProjectionMatrix& p,
                                 double r, const Tolerances& tol = {});
SectionCheck is_spectral_section(const SpectralDecomposition& d, const TailDescriptor& tail,
                                 const ProjectionMatrix& p, double r,
                                 const Tolerances& tol = {});

/// Generalized-section condition at finite scale: tail type of P matches chi^+(A)
/// and singular values of P - chi^+(A) past rank_budget stay below eps.
/// rank_budget < 0 means the default N/2.
bool is_generalized_section(const TruncatedOperator& a, const ProjectionMatrix& p,
                            int rank_budget = -1, double eps = 1e-6,
                            const Tolerances& tol = {});

/// T_r(A, P) = S_r^+(A) + S_r^o(A) P S_r^o(A).
Matrix t_average(const TruncatedOperator& a, const ProjectionMatrix& p, double r,
                 const Tolerances& tol = {});
Matrix t_average(const SpectralDecomposition& d, const Matrix& p, double r,
                 const Tolerances& tol = {});

struct SectionCertificate {
    std::vector<ProjectionMatrix> projections;
    std::vector<double> cutoffs;
    bool verified = false;
    double max_violation = 0.0;
    double lipschitz = 0.0;           // reported |r_i - r_j| / |x_i - x_j| bound
    double max_adjacent_step = 0.0;   // max ||Q_i - Q_{i+1}||
    double max_distance_to_gss = 0.0; // max ||Q_x - P_x||
};

/// Spectral section from a generalized one: per-sample averaging T_r at
/// the smallest workable cutoff, hat-function stitching over the grid,
/// spectral rounding at 1/2, and the hat-weighted cutoff maximum.
SectionCertificate construct_section(const SampledFamily& family,
                                     const std::vector<ProjectionMatrix>& gss,
                                     double delta, const Tolerances& tol = {});

/// 1_{[1/2,inf)}((1-t) P0 + t P1); requires ||P0 - P1|| < 1.
ProjectionMatrix homotopy_projections(const ProjectionMatrix& p0, const ProjectionMatrix& p1,
                                      double t, const Tolerances& tol = {});

struct GammaResult {
    Matrix correction;            // C = C' + C''
    double norm = 0.0;            // ||C||, guaranteed < 2r
    double min_abs_eig = 0.0;     // of A + C
    double projection_defect = 0.0;  // ||chi+(A+C) - P||
    double window_defect = 0.0;      // ||(1 - S_r^o(A)) C||
};

/// Explicit trivializing operator C' + C'' with C' = -PAQ - QAP and
/// C'' = r (P psi(A+/r) P - Q psi(-A-/r) Q). Requires P to be an
/// r-spectral section for A.
GammaResult gamma(const TruncatedOperator& a, const ProjectionMatrix& p, double r,
                  const CutoffProfile& psi = smoothstep_profile(),
                  const Tolerances& tol = {});

/// tau(A, C, r) = (chi+(A + C), r); requires C to be an r-trivializing
/// operator (window range condition, A + C invertible).
std::pair<ProjectionMatrix, double> tau(const TruncatedOperator& a, const Matrix& c,
                                        double r, const Tolerances& tol = {});

struct TrivializerRecord {
    std::vector<Matrix> corrections;
    std::vector<double> cutoffs;
    double norm_margin = 0.0;  // min over samples of 2 r_x - ||C_x||
};

/// gamma applied samplewise along a certificate.
TrivializerRecord trivialize(const SampledFamily& family, const SectionCertificate& cert,
                             const CutoffProfile& psi = smoothstep_profile(),
                             const Tolerances& tol = {});

struct DeformationTable {
    std::vector<double> times;  // ascending, times.front() == 0, back() == 1
    // slices[t][sample]
    std::vector<std::vector<TruncatedOperator>> slices;
    double endpoint_min_gap = 0.0;  // min over samples of min |eig(f(h_1))|
    double max_radius = 0.0;        // max spectral radius of intermediate f-images
};

/// Homotopy h_t = f^{-1}((1-t) f(A) + t (1-K) T (1-K)) with T = 2P - 1
/// and K = diag(1/2, 1/3, ...) truncated to dim N; endpoint invertible.
DeformationTable deform_to_invertible(const SampledFamily& family,
                                      const std::vector<ProjectionMatrix>& gss,
                                      int time_steps = 11, const Tolerances& tol = {});

/// u = b + i sqrt(1 - b^2) with b = (a + a*)/2; unitary deformation of
/// an essentially self-adjoint contraction.
Matrix ess_sa_unitary(const Matrix& a, const Tolerances& tol = {});

}  // namespace specsect

#endif
