#include "specsect/io.hpp"

#include <iomanip>
#include <sstream>

namespace specsect {

namespace {

std::string kind_name(TailKind k) {
    switch (k) {
        case TailKind::PositiveGrowth: return "PositiveGrowth";
        case TailKind::NegativeGrowth: return "NegativeGrowth";
        case TailKind::MixedSigned: return "MixedSigned";
    }
    return "PositiveGrowth";
}

TailKind kind_from_name(const std::string& s) {
    if (s == "PositiveGrowth") return TailKind::PositiveGrowth;
    if (s == "NegativeGrowth") return TailKind::NegativeGrowth;
    if (s == "MixedSigned") return TailKind::MixedSigned;
    throw Error("bad_input", "unknown tail kind: " + s);
}

Json real_part_rows(const Matrix& m, bool imag) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j)
            row.push_back(imag ? m(i, j).imag() : m(i, j).real());
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_parts(const Json& re, const Json& im) {
    if (!re.is_array() || re.empty() || !re[0].is_array())
        throw Error("bad_input", "matrix field 're' must be a nonempty array of rows");
    const int rows = static_cast<int>(re.size());
    const int cols = static_cast<int>(re[0].size());
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(re[i].size()) != cols ||
            (!im.is_null() && static_cast<int>(im[i].size()) != cols))
            throw Error("bad_input", "ragged matrix rows");
        for (int j = 0; j < cols; ++j) {
            const double x = re[i][j].get<double>();
            const double y = im.is_null() ? 0.0 : im[i][j].get<double>();
            m(i, j) = Complex(x, y);
        }
    }
    return m;
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
    return Json{{"re", real_part_rows(m, false)}, {"im", real_part_rows(m, true)}};
}

Matrix matrix_from_json(const Json& j) {
    return matrix_from_parts(j.at("re"), j.contains("im") ? j.at("im") : Json());
}

Json tail_to_json(const TailDescriptor& t) {
    return Json{{"kind", kind_name(t.kind)},
                {"rate", "polynomial"},
                {"exponent", t.exponent}};
}

TailDescriptor tail_from_json(const Json& j) {
    if (j.contains("rate") && j.at("rate").get<std::string>() != "polynomial")
        throw Error("bad_input", "only polynomial tail rates are supported");
    TailDescriptor t;
    t.kind = kind_from_name(j.at("kind").get<std::string>());
    t.exponent = j.value("exponent", 1.0);
    return t;
}

Json operator_to_json(const TruncatedOperator& a) {
    Json j = matrix_to_json(a.entries);
    j["dim"] = a.dim;
    j["tail"] = tail_to_json(a.tail);
    return j;
}

TruncatedOperator operator_from_json(const Json& j) {
    Matrix m = matrix_from_json(j);
    const int dim = j.at("dim").get<int>();
    if (m.rows() != dim || m.cols() != dim)
        throw Error("bad_input", "matrix shape does not match 'dim'");
    return TruncatedOperator(std::move(m), tail_from_json(j.at("tail")));
}

Json projection_to_json(const ProjectionMatrix& p) {
    Json j = matrix_to_json(p.entries);
    j["tail_type"] = p.tail_type == TailType::Identity ? "Identity" : "Zero";
    j["tolerance"] = p.tolerance;
    return j;
}

ProjectionMatrix projection_from_json(const Json& j) {
    ProjectionMatrix p;
    p.entries = matrix_from_json(j);
    const std::string t = j.value("tail_type", "Zero");
    if (t == "Identity")
        p.tail_type = TailType::Identity;
    else if (t == "Zero")
        p.tail_type = TailType::Zero;
    else
        throw Error("bad_input", "unknown tail_type: " + t);
    p.tolerance = j.value("tolerance", 1e-8);
    return p;
}

Json family_to_json(const SampledFamily& f) {
    Json ops = Json::array();
    for (const auto& op : f.operators) ops.push_back(operator_to_json(op));
    return Json{{"grid", f.grid},
                {"infinity_marker", f.infinity_marker},
                {"operators", std::move(ops)},
                {"tail_rule", tail_to_json(f.tail_rule)},
                {"label", f.label}};
}

SampledFamily family_from_json(const Json& j) {
    SampledFamily f;
    f.grid = j.at("grid").get<std::vector<double>>();
    f.infinity_marker = j.value("infinity_marker", false);
    for (const auto& op : j.at("operators")) f.operators.push_back(operator_from_json(op));
    f.tail_rule = tail_from_json(j.at("tail_rule"));
    f.label = j.value("label", "");
    f.validate();
    return f;
}

Json certificate_to_json(const SectionCertificate& c) {
    Json projs = Json::array();
    for (const auto& p : c.projections) projs.push_back(projection_to_json(p));
    return Json{{"projections", std::move(projs)},
                {"cutoffs", c.cutoffs},
                {"verified", c.verified},
                {"max_violation", c.max_violation},
                {"lipschitz", c.lipschitz},
                {"max_adjacent_step", c.max_adjacent_step},
                {"max_distance_to_gss", c.max_distance_to_gss}};
}

SectionCertificate certificate_from_json(const Json& j) {
    SectionCertificate c;
    for (const auto& p : j.at("projections")) c.projections.push_back(projection_from_json(p));
    c.cutoffs = j.at("cutoffs").get<std::vector<double>>();
    c.verified = j.value("verified", false);
    c.max_violation = j.value("max_violation", 0.0);
    c.lipschitz = j.value("lipschitz", 0.0);
    c.max_adjacent_step = j.value("max_adjacent_step", 0.0);
    c.max_distance_to_gss = j.value("max_distance_to_gss", 0.0);
    return c;
}

Json trivializer_to_json(const TrivializerRecord& r) {
    Json cs = Json::array();
    for (const auto& c : r.corrections) cs.push_back(matrix_to_json(c));
    return Json{{"corrections", std::move(cs)},
                {"cutoffs", r.cutoffs},
                {"norm_margin", r.norm_margin}};
}

TrivializerRecord trivializer_from_json(const Json& j) {
    TrivializerRecord r;
    for (const auto& c : j.at("corrections")) r.corrections.push_back(matrix_from_json(c));
    r.cutoffs = j.at("cutoffs").get<std::vector<double>>();
    r.norm_margin = j.value("norm_margin", 0.0);
    return r;
}

Json grading_to_json(const Grading& g) {
    Json j = matrix_to_json(g.sigma);
    j["plus_dim"] = g.plus_dim;
    j["minus_dim"] = g.minus_dim;
    return j;
}

Grading grading_from_json(const Json& j) {
    return Grading::from_matrix(matrix_from_json(j));
}

Json symbol_to_json(const SymbolSample& s) {
    Json pts = Json::array();
    for (const auto& pt : s.points) {
        Json coeffs = Json::array();
        for (const auto& c : pt.coeffs) coeffs.push_back(matrix_to_json(c));
        pts.push_back(Json{{"tag", pt.tag}, {"coeffs", std::move(coeffs)}});
    }
    return Json{{"points", std::move(pts)}};
}

SymbolSample symbol_from_json(const Json& j) {
    SymbolSample s;
    for (const auto& pt : j.at("points")) {
        SymbolPoint p;
        p.tag = pt.value("tag", "");
        for (const auto& c : pt.at("coeffs")) p.coeffs.push_back(matrix_from_json(c));
        s.points.push_back(std::move(p));
    }
    return s;
}

Json continuity_to_json(const ContinuityReport& r) {
    Json pairs = Json::array();
    for (const auto& p : r.pairs)
        pairs.push_back(Json{{"x0", p.x0},
                             {"x1", p.x1},
                             {"to_marker", p.to_marker},
                             {"riesz", p.riesz},
                             {"graph", p.graph},
                             {"tail_mismatch", p.tail_mismatch},
                             {"riesz_jump", p.riesz_jump},
                             {"graph_jump", p.graph_jump}});
    return Json{{"pairs", std::move(pairs)},
                {"jump_threshold", r.jump_threshold},
                {"continuity_threshold", r.continuity_threshold},
                {"max_riesz_per_step", r.max_riesz_per_step},
                {"max_graph_per_step", r.max_graph_per_step}};
}

Json lower_bound_to_json(const LowerBoundCurve& c) {
    return Json{{"c", c.c},
                {"continuous", c.continuous},
                {"max_step", c.max_step},
                {"jump_threshold", c.jump_threshold},
                {"unbounded_below", c.unbounded_below},
                {"blow_down_pairs", c.blow_down_pairs}};
}

std::string family_curves_csv(const SampledFamily& f, const ContinuityReport& cont,
                              const LowerBoundCurve& lower) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "x,c_x,riesz_step,graph_step,flags\n";
    const int n = f.size();
    for (int k = 0; k < n; ++k) {
        const bool marker = f.infinity_marker && k == n - 1;
        if (marker)
            os << "inf";
        else
            os << f.grid[k];
        os << "," << lower.c[k] << ",";
        if (k < n - 1) {
            const auto& p = cont.pairs[k];
            os << p.riesz << "," << p.graph << ",";
            std::vector<std::string> flags;
            if (p.tail_mismatch) flags.push_back("tail_mismatch");
            if (p.riesz_jump) flags.push_back("riesz_jump");
            if (p.graph_jump) flags.push_back("graph_jump");
            for (size_t i = 0; i < flags.size(); ++i)
                os << (i ? ";" : "") << flags[i];
        } else {
            os << ",,";
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace specsect
