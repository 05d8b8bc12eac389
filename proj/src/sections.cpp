#include "specsect/sections.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace specsect {

CutoffProfile smoothstep_profile() {
    return {"smoothstep", [](double t) {
                if (t <= 0.0) return 1.0;
                if (t >= 1.0) return 0.0;
                return 2.0 * t * t * t - 3.0 * t * t + 1.0;
            }};
}

CutoffProfile piecewise_linear_profile() {
    return {"piecewise_linear", [](double t) { return std::clamp(1.0 - t, 0.0, 1.0); }};
}

namespace {

TailType chi_plus_tail(const TailDescriptor& tail) {
    return tail.kind == TailKind::PositiveGrowth ? TailType::Identity : TailType::Zero;
}

// Tail type a section of an operator with this tail must carry. A
// mixed-signed tail fits neither single tail type; by convention it
// pairs with Zero, matching the chi_plus convention, so the graded
// constructions on symmetric-spectrum operators stay expressible.
TailType required_section_tail(const TailDescriptor& tail) {
    return tail.kind == TailKind::PositiveGrowth ? TailType::Identity : TailType::Zero;
}

// Eigenvalue classification against the symmetric window. The outer
// regions are closed ([r, inf) and (-inf, -r]) so that a cutoff sitting
// exactly on an eigenvalue still resolves deterministically; the gap
// tolerance absorbs numerical noise at the boundary.
enum class WindowZone { Below, Inside, Above };

WindowZone window_zone(double lambda, double r, double gap_tol) {
    if (lambda >= r - gap_tol) return WindowZone::Above;
    if (lambda <= -r + gap_tol) return WindowZone::Below;
    return WindowZone::Inside;
}

Matrix window_projection(const SpectralDecomposition& d, double r, double gap_tol) {
    const int n = static_cast<int>(d.eigenvalues.size());
    Matrix s = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        if (window_zone(d.eigenvalues(i), r, gap_tol) == WindowZone::Inside)
            s += d.eigenvectors.col(i) * d.eigenvectors.col(i).adjoint();
    return s;
}

}  // namespace

SectionCheck is_spectral_section(const SpectralDecomposition& d, const TailDescriptor& tail,
                                 const ProjectionMatrix& p, double r,
                                 const Tolerances& tol) {
    if (r <= 0.0) throw Error("bad_cutoff", "cutoff r must be positive");

    SectionCheck out;
    if (p.tail_type != required_section_tail(tail)) {
        out.ok = false;
        out.reason = "projection tail type incompatible with the operator tail";
        return out;
    }

    const int n = static_cast<int>(d.eigenvalues.size());
    Matrix s_plus = Matrix::Zero(n, n);
    Matrix s_minus = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const auto v = d.eigenvectors.col(i);
        const WindowZone zone = window_zone(d.eigenvalues(i), r, tol.gap);
        if (zone == WindowZone::Above) s_plus += v * v.adjoint();
        if (zone == WindowZone::Below) s_minus += v * v.adjoint();
    }
    const Matrix identity = Matrix::Identity(n, n);
    out.lower_defect = op_norm(Matrix((identity - p.entries) * s_plus));
    out.upper_defect = op_norm(Matrix(p.entries * s_minus));
    out.ok = out.lower_defect <= tol.inclusion && out.upper_defect <= tol.inclusion;
    if (!out.ok) {
        std::ostringstream os;
        if (out.lower_defect > tol.inclusion)
            os << "range(1_{[r,inf)}) escapes range(P) by " << out.lower_defect << "; ";
        if (out.upper_defect > tol.inclusion)
            os << "P overlaps range(1_{(-inf,-r]}) by " << out.upper_defect;
        out.reason = os.str();
    }
    return out;
}

SectionCheck is_spectral_section(const TruncatedOperator& a, const ProjectionMatrix& p,
                                 double r, const Tolerances& tol) {
    return is_spectral_section(eig(a, tol), a.tail, p, r, tol);
}

bool is_generalized_section(const TruncatedOperator& a, const ProjectionMatrix& p,
                            int rank_budget, double eps, const Tolerances& tol) {
    if (p.tail_type != chi_plus_tail(a.tail)) return false;
    if (rank_budget < 0) rank_budget = a.dim / 2;
    const ProjectionMatrix cp = chi_plus(a, tol);
    Eigen::BDCSVD<Matrix> svd(Matrix(p.entries - cp.entries));
    const auto& sv = svd.singularValues();
    for (int i = rank_budget; i < sv.size(); ++i)
        if (sv(i) > eps) return false;
    return true;
}

Matrix t_average(const SpectralDecomposition& d, const Matrix& p, double r,
                 const Tolerances& tol) {
    const int n = static_cast<int>(d.eigenvalues.size());
    Matrix s_plus = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        if (window_zone(d.eigenvalues(i), r, tol.gap) == WindowZone::Above)
            s_plus += d.eigenvectors.col(i) * d.eigenvectors.col(i).adjoint();
    const Matrix s_o = window_projection(d, r, tol.gap);
    return s_plus + s_o * p * s_o;
}

Matrix t_average(const TruncatedOperator& a, const ProjectionMatrix& p, double r,
                 const Tolerances& tol) {
    return t_average(eig(a, tol), p.entries, r, tol);
}

// ---------------------------------------------------------------------------
// construct_section

namespace {

// Candidate cutoffs clear of the given spectra: midpoints of consecutive
// distinct |lambda| values, a value inside the innermost gap, and one
// past the largest eigenvalue; all below the first tail magnitude.
std::vector<double> cutoff_candidates(const std::vector<const SpectralDecomposition*>& ds,
                                      double r_max, double gap_tol) {
    std::set<double> mags;
    for (const auto* d : ds)
        for (int i = 0; i < d->eigenvalues.size(); ++i)
            mags.insert(std::abs(d->eigenvalues(i)));
    std::vector<double> sorted(mags.begin(), mags.end());
    std::vector<double> cands;
    if (!sorted.empty() && sorted.front() > 16.0 * gap_tol)
        cands.push_back(sorted.front() / 2.0);
    for (size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] - sorted[i - 1] > 16.0 * gap_tol)
            cands.push_back((sorted[i] + sorted[i - 1]) / 2.0);
    if (!sorted.empty() && sorted.back() < r_max)
        cands.push_back((sorted.back() + r_max) / 2.0);
    std::vector<double> out;
    for (double c : cands)
        if (c > 0.0 && c < r_max) out.push_back(c);
    return out;
}

struct Run {
    int begin = 0;  // inclusive sample indices
    int end = 0;    // inclusive
    double cutoff = 0.0;
};

bool run_admissible(const std::vector<SpectralDecomposition>& decs,
                    const std::vector<ProjectionMatrix>& gss, int begin, int end,
                    double r, double delta, const Tolerances& tol) {
    for (int k = begin; k <= end; ++k) {
        for (int i = 0; i < decs[k].eigenvalues.size(); ++i)
            if (std::abs(std::abs(decs[k].eigenvalues(i)) - r) <= tol.gap) return false;
        const Matrix t = t_average(decs[k], gss[k].entries, r, tol);
        if (op_norm(Matrix(t - gss[k].entries)) >= delta) return false;
    }
    return true;
}

// Smallest admissible common cutoff >= r_from for samples [begin, end],
// or a negative value when none exists below r_max. max_candidates caps
// the scan so that declining a long run extension stays cheap; pass a
// nonpositive cap for an exhaustive scan.
double find_common_cutoff(const std::vector<SpectralDecomposition>& decs,
                          const std::vector<ProjectionMatrix>& gss, int begin, int end,
                          double r_from, double r_max, double delta,
                          const Tolerances& tol, int max_candidates = 0) {
    std::vector<const SpectralDecomposition*> ptrs;
    for (int k = begin; k <= end; ++k) ptrs.push_back(&decs[k]);
    int tried = 0;
    for (double r : cutoff_candidates(ptrs, r_max, tol.gap)) {
        if (r < r_from) continue;
        if (max_candidates > 0 && ++tried > max_candidates) break;
        if (run_admissible(decs, gss, begin, end, r, delta, tol)) return r;
    }
    return -1.0;
}

// Smallest candidate >= r_from clear of this sample's spectrum.
double nudge_off_spectrum(const SpectralDecomposition& d, double r_from, double r_max,
                          double gap_tol) {
    bool clear = true;
    for (int i = 0; i < d.eigenvalues.size(); ++i)
        if (std::abs(std::abs(d.eigenvalues(i)) - r_from) <= gap_tol) clear = false;
    if (clear) return r_from;
    for (double r : cutoff_candidates({&d}, r_max, gap_tol))
        if (r >= r_from) return r;
    return -1.0;
}

}  // namespace

SectionCertificate construct_section(const SampledFamily& family,
                                     const std::vector<ProjectionMatrix>& gss,
                                     double delta, const Tolerances& tol) {
    family.validate();
    if (!(delta > 0.0 && delta < 0.5))
        throw Error("bad_delta", "delta must lie in (0, 1/2): the rounding gap closes otherwise");
    const int n = family.size();
    if (static_cast<int>(gss.size()) != n)
        throw Error("bad_family", "one generalized section required per sample");

    std::vector<SpectralDecomposition> decs(n);
    for (int k = 0; k < n; ++k) {
        decs[k] = eig(family.operators[k], tol);
        if (!is_generalized_section(family.operators[k], gss[k], -1, tol.gss_eps, tol))
            throw Error("not_generalized_section",
                        "input projection fails the generalized-section check at sample " +
                            std::to_string(k));
    }
    const double r_max = family.operators.front().tail.magnitude(family.dim(), 1);

    // Phase 1: greedy runs sharing a common admissible cutoff, overlapping
    // by one sample so the hat functions overlap.
    std::vector<Run> runs;
    int start = 0;
    while (start < n) {
        double r = find_common_cutoff(decs, gss, start, start, 0.0, r_max, delta, tol);
        if (r < 0.0)
            throw Error("gss_too_far",
                        "no admissible cutoff below the tail window at sample " +
                            std::to_string(start));
        int end = start;
        while (end + 1 < n) {
            // Fast path: the run's current cutoff already works for the
            // next sample; earlier samples were proven at r already.
            if (run_admissible(decs, gss, end + 1, end + 1, r, delta, tol)) {
                ++end;
                continue;
            }
            const double r2 = find_common_cutoff(decs, gss, start, end + 1, r, r_max,
                                                 delta, tol, 16);
            if (r2 < 0.0) break;
            r = r2;
            ++end;
        }
        runs.push_back({start, end, r});
        if (end == n - 1) break;
        start = end;  // overlap one sample with the next run
        if (runs.size() > 1 && runs.back().begin == runs.back().end && start == runs.back().begin)
            ++start;  // single-sample run cannot extend; avoid stalling
    }

    // Hat weights per sample: interior of a run gets 1; a sample shared by
    // two runs splits evenly.
    std::vector<std::vector<std::pair<int, double>>> weights(n);
    for (int m = 0; m < static_cast<int>(runs.size()); ++m)
        for (int k = runs[m].begin; k <= runs[m].end; ++k)
            weights[k].push_back({m, 1.0});
    for (int k = 0; k < n; ++k)
        for (auto& [m, w] : weights[k]) w = 1.0 / static_cast<double>(weights[k].size());

    SectionCertificate cert;
    cert.projections.resize(n);
    cert.cutoffs.resize(n);
    cert.verified = true;

    for (int k = 0; k < n; ++k) {
        Matrix t = Matrix::Zero(family.dim(), family.dim());
        double r_active = 0.0;
        for (const auto& [m, w] : weights[k]) {
            t += w * t_average(decs[k], gss[k].entries, runs[m].cutoff, tol);
            r_active = std::max(r_active, runs[m].cutoff);
        }
        SpectralDecomposition td = eig_hermitian(t, tol);
        Matrix q = Matrix::Zero(family.dim(), family.dim());
        for (int i = 0; i < td.eigenvalues.size(); ++i)
            if (td.eigenvalues(i) >= 0.5)
                q += td.eigenvectors.col(i) * td.eigenvectors.col(i).adjoint();

        ProjectionMatrix qp;
        qp.entries = std::move(q);
        qp.tail_type = gss[k].tail_type;
        qp.tolerance = tol.idempotency;

        double r_k = nudge_off_spectrum(decs[k], r_active, r_max, tol.gap);
        if (r_k < 0.0)
            throw Error("gss_too_far", "cutoff escaped the tail window at sample " +
                                           std::to_string(k));
        const SectionCheck check =
            is_spectral_section(decs[k], family.operators[k].tail, qp, r_k, tol);
        cert.max_violation = std::max(cert.max_violation, check.violation());
        if (!check.ok) cert.verified = false;
        cert.max_distance_to_gss = std::max(
            cert.max_distance_to_gss, op_norm(Matrix(qp.entries - gss[k].entries)));
        cert.projections[k] = std::move(qp);
        cert.cutoffs[k] = r_k;
    }

    for (int k = 0; k + 1 < n; ++k) {
        cert.max_adjacent_step = std::max(
            cert.max_adjacent_step,
            op_norm(Matrix(cert.projections[k + 1].entries - cert.projections[k].entries)));
        double dx = 1.0;  // node step for the infinity marker
        if (k + 1 < static_cast<int>(family.grid.size()))
            dx = family.grid[k + 1] - family.grid[k];
        cert.lipschitz =
            std::max(cert.lipschitz, std::abs(cert.cutoffs[k + 1] - cert.cutoffs[k]) / dx);
    }
    return cert;
}

ProjectionMatrix homotopy_projections(const ProjectionMatrix& p0, const ProjectionMatrix& p1,
                                      double t, const Tolerances& tol) {
    if (t < 0.0 || t > 1.0) throw Error("bad_parameter", "t must lie in [0, 1]");
    if (p0.tail_type != p1.tail_type)
        throw Error("tail_mismatch", "projections have different tail types");
    const double dist = op_norm(Matrix(p0.entries - p1.entries));
    if (dist >= 1.0 - 1e-9)
        throw Error("too_far_apart",
                    "||P0 - P1|| must be < 1 for the midlevel rounding to stay continuous");
    const Matrix mix = (1.0 - t) * p0.entries + t * p1.entries;
    SpectralDecomposition d = eig_hermitian(mix, tol);
    Matrix q = Matrix::Zero(mix.rows(), mix.cols());
    for (int i = 0; i < d.eigenvalues.size(); ++i)
        if (d.eigenvalues(i) >= 0.5)
            q += d.eigenvectors.col(i) * d.eigenvectors.col(i).adjoint();
    return {std::move(q), p0.tail_type, tol.idempotency};
}

GammaResult gamma(const TruncatedOperator& a, const ProjectionMatrix& p, double r,
                  const CutoffProfile& psi, const Tolerances& tol) {
    SpectralDecomposition d = eig(a, tol);
    const SectionCheck check = is_spectral_section(d, a.tail, p, r, tol);
    if (!check.ok)
        throw Error("not_spectral_section",
                    "gamma requires an r-spectral section: " + check.reason);

    const int n = a.dim;
    const Matrix identity = Matrix::Identity(n, n);
    const Matrix& pp = p.entries;
    const Matrix qq = identity - pp;
    const Matrix a_plus = pp * a.entries * pp;
    const Matrix a_minus = qq * a.entries * qq;

    const Matrix c_prime = -pp * a.entries * qq - qq * a.entries * pp;

    const auto psi_spec = [&](const Matrix& arg) {
        SpectralDecomposition sd = eig_hermitian(arg, tol);
        return apply_spectral(sd, psi.value);
    };
    const Matrix c_up = pp * psi_spec(a_plus / r) * pp;
    const Matrix c_down = qq * psi_spec(-a_minus / r) * qq;
    const Matrix c_second = r * (c_up - c_down);

    GammaResult out;
    out.correction = c_prime + c_second;
    out.norm = op_norm(out.correction);

    SpectralDecomposition shifted = eig_hermitian(Matrix(a.entries + out.correction), tol);
    out.min_abs_eig = shifted.eigenvalues.cwiseAbs().minCoeff();
    const ProjectionMatrix chi = chi_plus(shifted, a.tail, tol);
    out.projection_defect = op_norm(Matrix(chi.entries - pp));
    const Matrix s_o = window_projection(d, r, tol.gap);
    out.window_defect = op_norm(Matrix((identity - s_o) * out.correction));
    return out;
}

std::pair<ProjectionMatrix, double> tau(const TruncatedOperator& a, const Matrix& c,
                                        double r, const Tolerances& tol) {
    SpectralDecomposition d = eig(a, tol);
    const Matrix s_o = window_projection(d, r, tol.gap);
    const Matrix identity = Matrix::Identity(a.dim, a.dim);
    const double window_defect = op_norm(Matrix((identity - s_o) * c));
    const double scale = 1.0 + op_norm(c);
    if (window_defect > tol.inclusion * scale)
        throw Error("not_trivializing",
                    "correction leaks outside the spectral window by " +
                        std::to_string(window_defect));
    SpectralDecomposition shifted = eig_hermitian(Matrix(a.entries + c), tol);
    if (shifted.eigenvalues.cwiseAbs().minCoeff() <= 1e-10)
        throw Error("singular", "A + C is singular within 1e-10");
    return {chi_plus(shifted, a.tail, tol), r};
}

TrivializerRecord trivialize(const SampledFamily& family, const SectionCertificate& cert,
                             const CutoffProfile& psi, const Tolerances& tol) {
    family.validate();
    if (static_cast<int>(cert.projections.size()) != family.size())
        throw Error("bad_certificate", "certificate does not match family size");
    TrivializerRecord rec;
    rec.norm_margin = kInf;
    for (int k = 0; k < family.size(); ++k) {
        GammaResult g =
            gamma(family.operators[k], cert.projections[k], cert.cutoffs[k], psi, tol);
        rec.norm_margin = std::min(rec.norm_margin, 2.0 * cert.cutoffs[k] - g.norm);
        rec.corrections.push_back(std::move(g.correction));
        rec.cutoffs.push_back(cert.cutoffs[k]);
    }
    return rec;
}

DeformationTable deform_to_invertible(const SampledFamily& family,
                                      const std::vector<ProjectionMatrix>& gss,
                                      int time_steps, const Tolerances& tol) {
    family.validate();
    if (time_steps < 2) throw Error("bad_parameter", "need at least two time steps");
    const int n = family.size();
    if (static_cast<int>(gss.size()) != n)
        throw Error("bad_family", "one generalized section required per sample");
    for (int k = 0; k < n; ++k)
        if (!is_generalized_section(family.operators[k], gss[k], -1, tol.gss_eps, tol))
            throw Error("not_generalized_section",
                        "input projection fails the generalized-section check at sample " +
                            std::to_string(k));

    const int dim = family.dim();
    RealVector k_diag(dim);
    for (int i = 0; i < dim; ++i) k_diag(i) = 1.0 / static_cast<double>(i + 2);
    const Matrix identity = Matrix::Identity(dim, dim);
    const Matrix one_minus_k = identity - Matrix(k_diag.asDiagonal().toDenseMatrix().cast<Complex>());

    DeformationTable table;
    table.endpoint_min_gap = kInf;
    table.slices.resize(time_steps);
    for (int s = 0; s < time_steps; ++s)
        table.times.push_back(static_cast<double>(s) / (time_steps - 1));

    for (int k = 0; k < n; ++k) {
        const Matrix a0 = bounded_transform(family.operators[k], tol);
        const Matrix t_sym = 2.0 * gss[k].entries - identity;
        const Matrix t_prime = one_minus_k * t_sym * one_minus_k;
        for (int s = 0; s < time_steps; ++s) {
            const double t = table.times[s];
            if (s == 0) {
                table.slices[s].push_back(family.operators[k]);
                continue;
            }
            const Matrix a_t = (1.0 - t) * a0 + t * t_prime;
            SpectralDecomposition da = eig_hermitian(a_t, tol);
            const double radius = da.eigenvalues.cwiseAbs().maxCoeff();
            if (radius >= 1.0 - 1e-12)
                throw Error("invariant_violation",
                            "intermediate f-image left the open unit ball; the deformation "
                            "contract guarantees strict contraction for t > 0");
            table.max_radius = std::max(table.max_radius, radius);
            table.slices[s].push_back(TruncatedOperator(
                apply_spectral(da, f_inverse_scalar), family.operators[k].tail));
            if (s == time_steps - 1)
                table.endpoint_min_gap =
                    std::min(table.endpoint_min_gap, da.eigenvalues.cwiseAbs().minCoeff());
        }
    }
    return table;
}

Matrix ess_sa_unitary(const Matrix& a, const Tolerances& tol) {
    if (op_norm(a) > 1.0 + 1e-12)
        throw Error("out_of_range", "ess_sa_unitary requires ||a|| <= 1");
    const Matrix b = (a + a.adjoint()) / 2.0;
    SpectralDecomposition d = eig_hermitian(b, tol);
    return apply_spectral_complex(d, [](double x) {
        return Complex(x, std::sqrt(std::max(0.0, 1.0 - x * x)));
    });
}

}  // namespace specsect
