#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "specsect/io.hpp"
#include "test_helpers.hpp"

using namespace specsect;
using testutil::diag_op;
using testutil::diag_real;

namespace {

Matrix random_matrix(int n, std::mt19937& rng) {
    std::normal_distribution<double> g;
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
    return m;
}

}  // namespace

TEST_CASE("matrix json round trip and schema") {
    std::mt19937 rng(131);
    const Matrix m = random_matrix(4, rng);
    const Json j = matrix_to_json(m);
    REQUIRE(j.contains("re"));
    REQUIRE(j.contains("im"));
    CHECK(j["re"].size() == 4);
    CHECK(j["re"][0].size() == 4);
    CHECK(j["re"][1][2] == doctest::Approx(m(1, 2).real()));
    CHECK(op_norm(Matrix(matrix_from_json(j) - m)) < 1e-15);

    // Real matrices may omit the imaginary block.
    Json real = Json{{"re", {{1.0, 0.0}, {0.0, 2.0}}}};
    CHECK(op_norm(Matrix(matrix_from_json(real) - diag_real({1.0, 2.0}))) < 1e-15);
}

TEST_CASE("matrix json rejects ragged rows") {
    Json bad = Json{{"re", {{1.0, 0.0}, {0.0}}}};
    CHECK_THROWS_AS((void)matrix_from_json(bad), Error);
    Json mismatched = Json{{"re", {{1.0}}}, {"im", {{0.0, 0.0}}}};
    CHECK_THROWS_AS((void)matrix_from_json(mismatched), Error);
}

TEST_CASE("operator json carries the tail block") {
    const auto a = diag_op({-1.0, 2.0});
    const Json j = operator_to_json(a);
    CHECK(j["dim"] == 2);
    CHECK(j["tail"]["kind"] == "PositiveGrowth");
    CHECK(j["tail"]["rate"] == "polynomial");
    CHECK(j["tail"]["exponent"] == doctest::Approx(1.0));

    const auto back = operator_from_json(j);
    CHECK(back.dim == 2);
    CHECK(back.tail == a.tail);
    CHECK(op_norm(Matrix(back.entries - a.entries)) < 1e-15);

    Json bad = j;
    bad["tail"]["kind"] = "Sideways";
    CHECK_THROWS_AS((void)operator_from_json(bad), Error);

    Json short_rows = j;
    short_rows["dim"] = 3;
    CHECK_THROWS_AS((void)operator_from_json(short_rows), Error);
}

TEST_CASE("tail kinds round trip by name") {
    for (TailKind k :
         {TailKind::PositiveGrowth, TailKind::NegativeGrowth, TailKind::MixedSigned}) {
        const TailDescriptor t{k, 1.5};
        const auto back = tail_from_json(tail_to_json(t));
        CHECK(back == t);
    }
}

TEST_CASE("projection json round trip") {
    const ProjectionMatrix p{diag_real({1.0, 0.0, 1.0}), TailType::Identity, 1e-8};
    const auto back = projection_from_json(projection_to_json(p));
    CHECK(back.tail_type == TailType::Identity);
    CHECK(back.tolerance == doctest::Approx(1e-8));
    CHECK(op_norm(Matrix(back.entries - p.entries)) < 1e-15);
}

TEST_CASE("family json round trip preserves the marker and tails") {
    const auto fam = semibounded_no_gss_family(5);
    const auto back = family_from_json(family_to_json(fam));
    CHECK(back.infinity_marker);
    CHECK(back.grid == fam.grid);
    CHECK(back.label == fam.label);
    REQUIRE(back.operators.size() == fam.operators.size());
    for (std::size_t i = 0; i < fam.operators.size(); ++i) {
        CHECK(back.operators[i].tail == fam.operators[i].tail);
        CHECK(op_norm(Matrix(back.operators[i].entries - fam.operators[i].entries)) <
              1e-15);
    }
    back.validate();
}

TEST_CASE("certificate json round trip") {
    const auto base = diag_op({-2.0, -1.0, 1.0, 2.0});
    const auto fam = shift_family(base, {-0.1, 0.0, 0.1});
    const std::vector<ProjectionMatrix> gss(3, chi_plus(base));
    const auto cert = construct_section(fam, gss, 0.2);

    const auto back = certificate_from_json(certificate_to_json(cert));
    CHECK(back.verified == cert.verified);
    CHECK(back.cutoffs == cert.cutoffs);
    CHECK(back.max_violation == doctest::Approx(cert.max_violation));
    CHECK(back.lipschitz == doctest::Approx(cert.lipschitz));
    REQUIRE(back.projections.size() == cert.projections.size());
    for (std::size_t i = 0; i < cert.projections.size(); ++i)
        CHECK(op_norm(Matrix(back.projections[i].entries -
                             cert.projections[i].entries)) < 1e-15);
}

TEST_CASE("trivializer json round trip") {
    const auto base = diag_op({-2.0, -1.0, 1.0, 2.0});
    const auto fam = shift_family(base, {-0.1, 0.0, 0.1});
    const std::vector<ProjectionMatrix> gss(3, chi_plus(base));
    const auto cert = construct_section(fam, gss, 0.2);
    const auto triv = trivialize(fam, cert);

    const auto back = trivializer_from_json(trivializer_to_json(triv));
    CHECK(back.cutoffs == triv.cutoffs);
    CHECK(back.norm_margin == doctest::Approx(triv.norm_margin));
    REQUIRE(back.corrections.size() == triv.corrections.size());
    for (std::size_t i = 0; i < triv.corrections.size(); ++i)
        CHECK(op_norm(Matrix(back.corrections[i] - triv.corrections[i])) < 1e-15);
}

TEST_CASE("grading and symbol json round trips") {
    Matrix sigma = diag_real({1.0, 1.0, -1.0});
    const Grading g = Grading::from_matrix(sigma);
    const auto gb = grading_from_json(grading_to_json(g));
    CHECK(gb.plus_dim == 2);
    CHECK(gb.minus_dim == 1);
    CHECK(op_norm(Matrix(gb.sigma - sigma)) < 1e-15);

    SymbolPoint pt;
    pt.tag = "p0";
    Matrix sx(2, 2), sy(2, 2);
    sx << Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0);
    sy << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    pt.coeffs = {sx, sy};
    const SymbolSample s{{pt}};
    const auto sb = symbol_from_json(symbol_to_json(s));
    REQUIRE(sb.points.size() == 1);
    CHECK(sb.points[0].tag == "p0");
    REQUIRE(sb.points[0].coeffs.size() == 2);
    CHECK(op_norm(Matrix(sb.points[0].coeffs[1] - sy)) < 1e-15);
}

TEST_CASE("family curve csv layout") {
    const auto fam = fuglede_family(5);
    const auto cont = continuity_report(fam);
    const auto lower = lower_bound_report(fam);
    const std::string csv = family_curves_csv(fam, cont, lower);

    std::istringstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "x,c_x,riesz_step,graph_step,flags");
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    REQUIRE(rows.size() == fam.size());
    // Marker row is labelled inf and carries empty step fields.
    CHECK(rows.back().substr(0, 4) == "inf,");
    const auto last = rows.back();
    const auto tail = last.substr(last.find(',', 4) + 1);
    CHECK(tail.substr(0, 2) == ",,");
    // Interior rows start with the grid value.
    CHECK(rows[0].substr(0, 2) == "1,");
}

TEST_CASE("continuity and lower-bound reports serialize") {
    const auto fam = semibounded_no_gss_family(5);
    const Json jc = continuity_to_json(continuity_report(fam));
    REQUIRE(jc.contains("pairs"));
    CHECK(jc["pairs"].size() == fam.size() - 1);
    CHECK(jc["pairs"].back().contains("tail_mismatch"));
    CHECK(jc["pairs"].back()["tail_mismatch"] == true);

    const Json jl = lower_bound_to_json(lower_bound_report(fam));
    CHECK(jl["unbounded_below"] == true);
    CHECK(jl["c"].size() == fam.size());
}
