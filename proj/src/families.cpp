#include "specsect/families.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace specsect {

SampledFamily shift_family(const TruncatedOperator& a, const std::vector<double>& grid) {
    SampledFamily fam;
    fam.grid = grid;
    fam.tail_rule = a.tail;
    fam.label = "shift";
    const Matrix identity = Matrix::Identity(a.dim, a.dim);
    for (double x : grid)
        fam.operators.emplace_back(Matrix(a.entries + x * identity), a.tail);
    fam.validate();
    return fam;
}

SampledFamily fuglede_family(int n) {
    if (n < 3) throw Error("bad_parameter", "dimension must be at least 3");
    SampledFamily fam;
    fam.infinity_marker = true;
    fam.tail_rule = {TailKind::PositiveGrowth, 1.0};
    fam.label = "fuglede";
    for (int x = 1; x <= n - 1; ++x) {
        fam.grid.push_back(static_cast<double>(x));
        Matrix m = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i)
            m(i, i) = (i + 1 == x) ? -static_cast<double>(i + 1)
                                   : static_cast<double>(i + 1);
        fam.operators.emplace_back(std::move(m), fam.tail_rule);
    }
    Matrix plain = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) plain(i, i) = static_cast<double>(i + 1);
    fam.operators.emplace_back(std::move(plain), fam.tail_rule);
    fam.validate();
    return fam;
}

SampledFamily semibounded_no_gss_family(int n) {
    if (n < 2) throw Error("bad_parameter", "dimension must be at least 2");
    SampledFamily fam;
    fam.infinity_marker = true;
    fam.tail_rule = {TailKind::PositiveGrowth, 1.0};
    fam.label = "semibounded-no-gss";
    for (int x = 1; x <= n; ++x) {
        fam.grid.push_back(static_cast<double>(x));
        Matrix m = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            const double v = static_cast<double>(i + 1);
            m(i, i) = (i + 1 < x) ? -v : v;
        }
        fam.operators.emplace_back(std::move(m), fam.tail_rule);
    }
    Matrix neg = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) neg(i, i) = -static_cast<double>(i + 1);
    fam.operators.emplace_back(std::move(neg),
                               TailDescriptor{TailKind::NegativeGrowth, 1.0});
    fam.validate();
    return fam;
}

SampledFamily negative_to_positive_path(int n, int steps) {
    if (n < 1) throw Error("bad_parameter", "dimension must be positive");
    if (steps < 2 || steps % 2 != 0)
        throw Error("bad_parameter",
                    "steps must be even so the ambiguous midpoint is not sampled");
    SampledFamily fam;
    fam.label = "negative-to-positive";
    fam.tail_rule = {TailKind::PositiveGrowth, 1.0};
    for (int s = 0; s < steps; ++s) {
        const double t = static_cast<double>(s) / (steps - 1);
        fam.grid.push_back(t);
        Matrix m = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            const double fn = f_scalar(static_cast<double>(i + 1));
            m(i, i) = f_inverse_scalar((2.0 * t - 1.0) * fn);
        }
        const TailKind kind =
            t < 0.5 ? TailKind::NegativeGrowth : TailKind::PositiveGrowth;
        fam.operators.emplace_back(std::move(m), TailDescriptor{kind, 1.0});
    }
    fam.validate();
    return fam;
}

// ---------------------------------------------------------------------------
// Rellich discretization

namespace {

struct Tridiagonal {
    RealVector diag;
    RealVector off;  // off(i) couples i and i+1
};

// Symmetrized finite-difference matrix for -d^2/dt^2 on mesh interior
// points, psi(0) = 0, psi(1) = x psi'(1) via the one-sided stencil
// psi'(1) ~ (3 psi_{M+1} - 4 psi_M + psi_{M-1}) / (2h). Eliminating the
// boundary value makes the last row asymmetric by the factor 1 + beta,
// beta = x / (2h - 3x); a diagonal similarity restores symmetry since
// 1 + beta = (2h - 2x)/(2h - 3x) > 0 away from x = 1 and x = 2h/3.
Tridiagonal rellich_tridiagonal(double x, int mesh) {
    if (mesh < 100) throw Error("bad_parameter", "mesh must be at least 100");
    const double h = 1.0 / (mesh + 1);
    if (std::abs(2.0 * h - 3.0 * x) < 1e-12)
        throw Error("bad_parameter", "x coincides with the stencil singularity 2h/3");
    Tridiagonal t;
    t.diag = RealVector::Constant(mesh, 2.0 / (h * h));
    t.off = RealVector::Constant(mesh - 1, -1.0 / (h * h));
    if (x != 0.0) {
        const double beta = x / (2.0 * h - 3.0 * x);
        if (1.0 + beta <= 0.0)
            throw Error("bad_parameter", "boundary elimination loses symmetrizability");
        t.diag(mesh - 1) = (2.0 + 4.0 * beta) / (h * h);
        t.off(mesh - 2) = -std::sqrt(1.0 + beta) / (h * h);
    }
    return t;
}

// Number of eigenvalues below `t`, by the sign count of the LDL^T
// pivots of T - t.
int sturm_count(const Tridiagonal& m, double t) {
    int count = 0;
    double d = m.diag(0) - t;
    if (d < 0.0) ++count;
    for (int i = 1; i < m.diag.size(); ++i) {
        const double b = m.off(i - 1);
        if (d == 0.0) d = 1e-300;  // standard Sturm safeguard
        d = (m.diag(i) - t) - b * b / d;
        if (d < 0.0) ++count;
    }
    return count;
}

}  // namespace

TruncatedOperator rellich_operator(double x, int mesh) {
    const Tridiagonal t = rellich_tridiagonal(x, mesh);
    Matrix m = Matrix::Zero(mesh, mesh);
    for (int i = 0; i < mesh; ++i) {
        m(i, i) = t.diag(i);
        if (i + 1 < mesh) {
            m(i, i + 1) = t.off(i);
            m(i + 1, i) = t.off(i);
        }
    }
    return TruncatedOperator(std::move(m), TailDescriptor{TailKind::PositiveGrowth, 2.0});
}

double rellich_mu(double x, double tol) {
    if (!(x > 0.0 && x < 1.0))
        throw Error("out_of_range", "negative eigenvalue exists only for x in (0,1)");
    const auto g = [x](double mu) {
        const double e = std::exp(2.0 * mu);
        return (e - 1.0) - x * mu * (e + 1.0);
    };
    double lo = 1e-6, hi = 50.0;
    double glo = g(lo), ghi = g(hi);
    if (!(glo > 0.0 && ghi < 0.0))
        throw Error("bisection_failed", "bracket does not straddle the root");
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = (lo + hi) / 2.0;
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    if (hi - lo > tol) throw Error("bisection_failed", "bisection did not converge");
    return (lo + hi) / 2.0;
}

double rellich_smallest_eigenvalue(double x, int mesh, double tol) {
    const Tridiagonal t = rellich_tridiagonal(x, mesh);
    // Gershgorin bounds bracket the whole spectrum.
    double lo = t.diag(0), hi = t.diag(0);
    for (int i = 0; i < mesh; ++i) {
        double radius = 0.0;
        if (i > 0) radius += std::abs(t.off(i - 1));
        if (i + 1 < mesh) radius += std::abs(t.off(i));
        lo = std::min(lo, t.diag(i) - radius);
        hi = std::max(hi, t.diag(i) + radius);
    }
    // Tolerance is relative to the bracket location, not to the Gershgorin
    // range (which grows like 1/h^2 and would swamp an O(1) eigenvalue).
    while (hi - lo > tol * (1.0 + std::min(std::abs(lo), std::abs(hi)))) {
        const double mid = (lo + hi) / 2.0;
        if (mid == lo || mid == hi) break;  // bracket exhausted in double precision
        (sturm_count(t, mid) >= 1 ? hi : lo) = mid;
    }
    return (lo + hi) / 2.0;
}

RellichFamily rellich_family(const std::vector<double>& grid, int mesh) {
    RellichFamily out;
    out.family.grid = grid;
    out.family.label = "rellich";
    out.family.tail_rule = {TailKind::PositiveGrowth, 2.0};
    for (double x : grid) {
        out.family.operators.push_back(rellich_operator(x, mesh));
        if (x > 0.0 && x < 1.0) {
            const double mu = rellich_mu(x);
            out.reference.push_back(-mu * mu);
            out.out_of_regime.push_back(false);
        } else if (x == 0.0) {
            out.reference.push_back(std::numbers::pi * std::numbers::pi);
            out.out_of_regime.push_back(false);
        } else {
            out.reference.push_back(std::numeric_limits<double>::quiet_NaN());
            out.out_of_regime.push_back(true);
        }
    }
    out.family.validate();
    return out;
}

// ---------------------------------------------------------------------------
// Diagnostics

ContinuityReport continuity_report(const SampledFamily& family, double jump_threshold,
                                   double continuity_threshold, const Tolerances&) {
    family.validate();
    if (family.size() < 2)
        throw Error("bad_family", "continuity needs at least two samples");
    ContinuityReport rep;
    rep.jump_threshold = jump_threshold;
    rep.continuity_threshold = continuity_threshold;
    for (int k = 0; k + 1 < family.size(); ++k) {
        PairDiagnostics p;
        p.x0 = family.grid[k];
        p.to_marker =
            family.infinity_marker && k + 1 == family.size() - 1;
        p.x1 = p.to_marker ? family.grid.back() : family.grid[k + 1];
        const auto& a = family.operators[k];
        const auto& b = family.operators[k + 1];
        p.riesz = riesz_distance_window(a, b);
        p.graph = graph_distance_window(a, b);
        p.tail_mismatch = !(a.tail == b.tail);
        p.riesz_jump = p.riesz >= jump_threshold && p.graph <= continuity_threshold;
        p.graph_jump = p.graph >= jump_threshold && p.riesz <= continuity_threshold;
        if (!p.to_marker) {
            const double dx = std::max(p.x1 - p.x0, 1e-12);
            rep.max_riesz_per_step = std::max(rep.max_riesz_per_step, p.riesz / dx);
            rep.max_graph_per_step = std::max(rep.max_graph_per_step, p.graph / dx);
        }
        rep.pairs.push_back(p);
    }
    return rep;
}

LowerBoundCurve lower_bound_report(const SampledFamily& family, double jump_threshold,
                                   const Tolerances& tol) {
    family.validate();
    LowerBoundCurve curve;
    curve.jump_threshold = jump_threshold;
    for (const auto& op : family.operators) {
        curve.c.push_back(eig(op, tol).eigenvalues.minCoeff());
        if (op.tail.kind == TailKind::NegativeGrowth) curve.unbounded_below = true;
    }
    for (size_t k = 0; k + 1 < curve.c.size(); ++k)
        curve.max_step = std::max(curve.max_step, std::abs(curve.c[k + 1] - curve.c[k]));
    curve.continuous = curve.max_step < jump_threshold;
    const ContinuityReport cont = continuity_report(family);
    for (size_t k = 0; k + 1 < curve.c.size(); ++k)
        if (cont.pairs[k].riesz_jump &&
            std::abs(curve.c[k + 1] - curve.c[k]) >= jump_threshold)
            curve.blow_down_pairs.push_back(static_cast<int>(k));
    return curve;
}

RieszEvidence section_implies_riesz_check(const SampledFamily& family,
                                          const SectionCertificate& cert,
                                          const Tolerances& tol) {
    family.validate();
    if (!cert.verified)
        throw Error("bad_certificate", "certificate is not verified");
    if (static_cast<int>(cert.projections.size()) != family.size())
        throw Error("bad_certificate", "certificate does not match family size");

    RieszEvidence ev;
    ev.continuity = continuity_report(family, 0.5, 0.05, tol);
    ev.consistent = true;

    std::vector<Matrix> window(family.size()), plus(family.size()), minus(family.size());
    for (int k = 0; k < family.size(); ++k) {
        SpectralDecomposition d = eig(family.operators[k], tol);
        const int n = family.dim();
        window[k] = Matrix::Zero(n, n);
        plus[k] = Matrix::Zero(n, n);
        minus[k] = Matrix::Zero(n, n);
        for (int i = 0; i < d.eigenvalues.size(); ++i) {
            const auto v = d.eigenvectors.col(i);
            const double lam = d.eigenvalues(i);
            if (std::abs(lam) < cert.cutoffs[k])
                window[k] += v * v.adjoint();
            else if (lam > 0.0)
                plus[k] += v * v.adjoint();
            else
                minus[k] += v * v.adjoint();
        }
    }
    for (int k = 0; k + 1 < family.size(); ++k) {
        ev.window_steps.push_back(op_norm(Matrix(window[k + 1] - window[k])));
        ev.plus_steps.push_back(op_norm(Matrix(plus[k + 1] - plus[k])));
        ev.minus_steps.push_back(op_norm(Matrix(minus[k + 1] - minus[k])));
    }
    for (const auto& p : ev.continuity.pairs) {
        if (p.riesz_jump) {
            ev.consistent = false;
            std::ostringstream os;
            os << "riesz jump between x = " << p.x0 << " and "
               << (p.to_marker ? std::string("the marker node")
                               : std::to_string(p.x1))
               << " despite a verified section certificate";
            ev.offending = os.str();
        }
    }
    return ev;
}

ObstructionReport gss_obstruction(const SampledFamily& family) {
    family.validate();
    ObstructionReport rep;
    const auto required = [](const TailDescriptor& t) {
        return t.kind == TailKind::PositiveGrowth ? TailType::Identity : TailType::Zero;
    };
    for (int k = 0; k + 1 < family.size(); ++k) {
        if (required(family.operators[k].tail) !=
            required(family.operators[k + 1].tail)) {
            rep.obstructed = true;
            rep.first_clash = k;
            std::ostringstream os;
            os << "no continuous generalized spectral section: samples " << k << " and "
               << k + 1 << " demand different section tail types";
            rep.detail = os.str();
            return rep;
        }
    }
    rep.detail = "section tail types agree across the family";
    return rep;
}

}  // namespace specsect
