#ifndef SPECSECT_FAMILIES_HPP
#define SPECSECT_FAMILIES_HPP

#include <string>
#include <vector>

#include "specsect/family.hpp"
#include "specsect/opcore.hpp"
#include "specsect/sections.hpp"
#include "specsect/types.hpp"

namespace specsect {

/// A + x for each grid value; the tail shifts trivially.
SampledFamily shift_family(const TruncatedOperator& a, const std::vector<double>& grid);

/// Diagonal family on dim N: sample x flips the sign of the x-th
/// diagonal entry of diag(1..N); the distinguished last node is the
/// unflipped operator. Positive-growth tail.
SampledFamily fuglede_family(int n);

/// Diagonal family on dim N: sample x sends e_n to -n for n < x and to
/// n for n >= x; the distinguished last node is diag(-1..-N). The
/// interior samples carry a positive-growth tail, the last node a
/// negative-growth one — the family carries no generalized section.
SampledFamily semibounded_no_gss_family(int n);

/// Linear path in the bounded transform between diag(-1..-N) and
/// diag(1..N); endpoint tails clash, so no continuous generalized
/// section exists along the path. `steps` must be even so the midpoint
/// (zero operator, ambiguous tail) is never sampled.
SampledFamily negative_to_positive_path(int n, int steps = 10);

/// Closed forms for the sign-flip diagonal family distances to the
/// distinguished node: riesz = 2 f(x), graph = 4x / (x^2 + 1).
inline double fuglede_riesz_closed_form(double x) { return 2.0 * f_scalar(x); }
inline double fuglede_graph_closed_form(double x) { return 4.0 * x / (x * x + 1.0); }

// ---------------------------------------------------------------------------
// Rellich boundary-value discretization: -d^2/dt^2 on [0,1] with
// psi(0) = 0 and psi(1) = x psi'(1).

/// Second-order finite differences on `mesh` interior points, Robin row
/// eliminated through a one-sided second-order stencil, then
/// symmetrized by a diagonal similarity. Hermitian, dim = mesh.
TruncatedOperator rellich_operator(double x, int mesh);

/// mu solving e^{2mu} - 1 = x mu (e^{2mu} + 1) on [1e-6, 50] by
/// bisection; the continuum negative eigenvalue is -mu^2. Requires
/// x in (0, 1).
double rellich_mu(double x, double tol = 1e-12);

/// Smallest eigenvalue of the symmetrized discretization, computed by
/// Sturm-sequence bisection (no dense solve; usable at mesh 2000+).
double rellich_smallest_eigenvalue(double x, int mesh, double tol = 1e-10);

struct RellichFamily {
    SampledFamily family;
    /// Continuum reference per sample: -mu^2 for x in (0,1), pi^2 at
    /// x = 0, NaN outside the negative-eigenvalue regime (flagged).
    std::vector<double> reference;
    std::vector<bool> out_of_regime;
};

RellichFamily rellich_family(const std::vector<double>& grid, int mesh);

// ---------------------------------------------------------------------------
// Diagnostics

struct PairDiagnostics {
    double x0 = 0.0;
    double x1 = 0.0;
    bool to_marker = false;      // second node is the distinguished one
    double riesz = 0.0;          // finite-window riesz distance
    double graph = 0.0;          // finite-window graph distance
    bool tail_mismatch = false;  // per-sample tails differ across the pair
    bool riesz_jump = false;     // riesz >= jump while graph <= continuity
    bool graph_jump = false;     // graph >= jump while riesz <= continuity
};

struct ContinuityReport {
    std::vector<PairDiagnostics> pairs;
    double jump_threshold = 0.5;
    double continuity_threshold = 0.05;
    double max_riesz_per_step = 0.0;  // max riesz / |dx| over real-grid pairs
    double max_graph_per_step = 0.0;

    bool any_riesz_jump() const {
        for (const auto& p : pairs)
            if (p.riesz_jump) return true;
        return false;
    }
};

/// Adjacent-pair riesz/graph distances with one-sided jump flags.
/// Distances are finite-window; a tail clash is reported as a flag, not
/// an error, since the clash is often the finding.
ContinuityReport continuity_report(const SampledFamily& family,
                                   double jump_threshold = 0.5,
                                   double continuity_threshold = 0.05,
                                   const Tolerances& tol = {});

struct LowerBoundCurve {
    std::vector<double> c;       // min eigenvalue per sample
    bool continuous = false;     // max adjacent |dc| below threshold
    double max_step = 0.0;
    double jump_threshold = 1.0;
    bool unbounded_below = false;  // some sample has a negative-growth tail
    /// Pairs where a riesz jump coincides with a lower-bound jump.
    std::vector<int> blow_down_pairs;
};

LowerBoundCurve lower_bound_report(const SampledFamily& family,
                                   double jump_threshold = 1.0,
                                   const Tolerances& tol = {});

struct RieszEvidence {
    ContinuityReport continuity;
    /// Adjacent steps of the three spectral blocks at the certificate
    /// cutoffs: window projection and the two outer projections.
    std::vector<double> window_steps;
    std::vector<double> plus_steps;
    std::vector<double> minus_steps;
    bool consistent = false;
    std::string offending;
};

/// A verified section certificate must rule out riesz jumps along the
/// family; emits the per-block continuity evidence behind that claim.
RieszEvidence section_implies_riesz_check(const SampledFamily& family,
                                          const SectionCertificate& cert,
                                          const Tolerances& tol = {});

struct ObstructionReport {
    bool obstructed = false;
    int first_clash = -1;  // pair index (k, k+1) of the first tail clash
    std::string detail;
};

/// Tail-type clash between the section tails the samples demand; a
/// clash means no continuous generalized section can cover the family.
ObstructionReport gss_obstruction(const SampledFamily& family);

}  // namespace specsect

#endif
