// spectra-sect: spectral-section toolkit front end.
//
// Subcommands: verify-section, construct-section, trivialize, deform,
// cl1-verify, factor-symbol, sigma-trick, family gen <name>,
// family report, demo <rellich|fuglede|shift|no-gss>.
//
// Exit codes: 0 = all checks pass, 1 = a mathematical check failed
// (a report is still emitted), 2 = input or usage error.

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "specsect/families.hpp"
#include "specsect/graded.hpp"
#include "specsect/io.hpp"
#include "specsect/opcore.hpp"
#include "specsect/sections.hpp"

namespace {

using specsect::Json;

// Error codes signalling bad input rather than a failed mathematical check.
bool is_usage_code(const std::string& code) {
    static const std::set<std::string> codes = {
        "bad_input", "bad_parameter", "bad_family", "bad_delta",
        "bad_cutoff", "bad_grading", "bad_certificate", "bad_symbol", "usage"};
    return codes.count(code) > 0;
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw specsect::Error("bad_input", "cannot open " + path);
    return Json::parse(in);  // parse_error carries the byte offset
}

void emit(const Json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw specsect::Error("bad_input", "cannot open " + out_path);
        out << j.dump(2) << "\n";
    }
}

void emit_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) throw specsect::Error("bad_input", "cannot open " + out_path);
        out << text;
    }
}

struct Options {
    std::string config_path;
    std::string out_path;
    std::string format = "json";
    int jobs = 0;  // 0 = take SPECTRA_SECT_JOBS, else 1
    long long seed = 20260826;
    specsect::Tolerances tol;
    int rank_budget = -1;
    double jump_threshold = 0.5;
    double continuity_threshold = 0.05;

    void resolve_jobs() {
        if (jobs > 0) return;
        if (const char* env = std::getenv("SPECTRA_SECT_JOBS"))
            jobs = std::max(1, std::atoi(env));
        else
            jobs = 1;
    }

    // --config file supplies defaults; explicit flags win (the caller
    // applies this before CLI11 overwrites the fields it saw).
    void apply_config(const Json& j) {
        if (j.contains("tolerances")) {
            const Json& t = j["tolerances"];
            tol.hermiticity = t.value("hermiticity", tol.hermiticity);
            tol.idempotency = t.value("idempotency", tol.idempotency);
            tol.gap = t.value("gap", tol.gap);
            tol.invertibility = t.value("invertibility", tol.invertibility);
        }
        rank_budget = j.value("rank_budget", rank_budget);
        jump_threshold = j.value("jump_threshold", jump_threshold);
        continuity_threshold = j.value("continuity_threshold", continuity_threshold);
        seed = j.value("seed", seed);
        format = j.value("format", format);
    }
};

// Ordered parallel map used for independent per-sample work.
template <typename F>
void parallel_for(int n, int jobs, F&& fn) {
    if (jobs <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::future<void>> futures;
    for (int w = 0; w < jobs; ++w)
        futures.push_back(std::async(std::launch::async, [&, w] {
            for (int i = w; i < n; i += jobs) fn(i);
        }));
    for (auto& f : futures) f.get();
}

std::vector<specsect::ProjectionMatrix> projections_from_json(const Json& j) {
    std::vector<specsect::ProjectionMatrix> out;
    const Json& arr = j.contains("projections") ? j.at("projections") : j;
    for (const auto& p : arr) out.push_back(specsect::projection_from_json(p));
    return out;
}

Json family_report_json(const specsect::SampledFamily& fam, const Options& opt) {
    const auto cont = specsect::continuity_report(fam, opt.jump_threshold,
                                                  opt.continuity_threshold, opt.tol);
    const auto lower = specsect::lower_bound_report(fam, 1.0, opt.tol);
    const auto obstruction = specsect::gss_obstruction(fam);
    return Json{{"label", fam.label},
                {"continuity", specsect::continuity_to_json(cont)},
                {"lower_bound", specsect::lower_bound_to_json(lower)},
                {"gss_obstruction",
                 Json{{"obstructed", obstruction.obstructed},
                      {"first_clash", obstruction.first_clash},
                      {"detail", obstruction.detail}}}};
}

std::string family_report_csv(const specsect::SampledFamily& fam, const Options& opt) {
    const auto cont = specsect::continuity_report(fam, opt.jump_threshold,
                                                  opt.continuity_threshold, opt.tol);
    const auto lower = specsect::lower_bound_report(fam, 1.0, opt.tol);
    return specsect::family_curves_csv(fam, cont, lower);
}

int cmd_verify_section(const std::string& family_path, const std::string& cert_path,
                       const Options& opt) {
    const auto fam = specsect::family_from_json(load_json(family_path));
    const auto cert = specsect::certificate_from_json(load_json(cert_path));
    if (static_cast<int>(cert.projections.size()) != fam.size())
        throw specsect::Error("bad_certificate", "certificate does not match family size");
    Json samples = Json::array();
    bool all_ok = true;
    std::vector<specsect::SectionCheck> checks(fam.size());
    parallel_for(fam.size(), opt.jobs, [&](int k) {
        checks[k] = specsect::is_spectral_section(fam.operators[k], cert.projections[k],
                                                  cert.cutoffs[k], opt.tol);
    });
    for (int k = 0; k < fam.size(); ++k) {
        all_ok = all_ok && checks[k].ok;
        samples.push_back(Json{{"sample", k},
                               {"ok", checks[k].ok},
                               {"lower_defect", checks[k].lower_defect},
                               {"upper_defect", checks[k].upper_defect},
                               {"reason", checks[k].reason}});
    }
    emit(Json{{"ok", all_ok}, {"samples", samples}}, opt.out_path);
    return all_ok ? 0 : 1;
}

int cmd_construct_section(const std::string& family_path, const std::string& gss_path,
                          double delta, const Options& opt) {
    const auto fam = specsect::family_from_json(load_json(family_path));
    const auto gss = projections_from_json(load_json(gss_path));
    const auto cert = specsect::construct_section(fam, gss, delta, opt.tol);
    emit(specsect::certificate_to_json(cert), opt.out_path);
    return cert.verified ? 0 : 1;
}

int cmd_trivialize(const std::string& family_path, const std::string& cert_path,
                   const Options& opt) {
    const auto fam = specsect::family_from_json(load_json(family_path));
    const auto cert = specsect::certificate_from_json(load_json(cert_path));
    const auto rec = specsect::trivialize(fam, cert, specsect::smoothstep_profile(), opt.tol);
    emit(specsect::trivializer_to_json(rec), opt.out_path);
    return rec.norm_margin > 0.0 ? 0 : 1;
}

int cmd_deform(const std::string& family_path, const std::string& gss_path, int steps,
               const Options& opt) {
    const auto fam = specsect::family_from_json(load_json(family_path));
    const auto gss = projections_from_json(load_json(gss_path));
    const auto table = specsect::deform_to_invertible(fam, gss, steps, opt.tol);
    emit(Json{{"times", table.times},
              {"endpoint_min_gap", table.endpoint_min_gap},
              {"max_radius", table.max_radius},
              {"slices", table.slices.size()},
              {"samples_per_slice", table.slices.front().size()}},
         opt.out_path);
    return table.endpoint_min_gap > 0.0 ? 0 : 1;
}

int cmd_cl1_verify(const std::string& op_path, const std::string& grading_path,
                   const std::string& proj_path, double r, const Options& opt) {
    specsect::OddOperator odd{specsect::operator_from_json(load_json(op_path)),
                              specsect::grading_from_json(load_json(grading_path))};
    odd.validate(opt.tol);
    const auto p = specsect::projection_from_json(load_json(proj_path));
    double defect = 0.0;
    const bool ok = specsect::is_cl1_section(odd, p, r, &defect, opt.tol);
    emit(Json{{"ok", ok},
              {"anticommute_defect", defect},
              {"kernel_signature", specsect::kernel_signature(odd, opt.tol)}},
         opt.out_path);
    return ok ? 0 : 1;
}

int cmd_factor_symbol(const std::string& symbol_path, const Options& opt) {
    const auto sym = specsect::symbol_from_json(load_json(symbol_path));
    const auto fac =
        specsect::factor_w_symbol(sym, static_cast<unsigned>(opt.seed), opt.tol);
    Json factors = Json::array();
    for (const auto& m : fac.factors) factors.push_back(specsect::matrix_to_json(m));
    const bool ok = fac.worst_dirac_defect <= 1e-8;
    emit(Json{{"ok", ok},
              {"factors", std::move(factors)},
              {"worst_w_residual", fac.worst_w_residual},
              {"max_s_deviation", fac.max_s_deviation},
              {"worst_dirac_defect", fac.worst_dirac_defect}},
         opt.out_path);
    return ok ? 0 : 1;
}

int cmd_sigma_trick(const std::string& op_path, const std::string& grading_path,
                    const Options& opt) {
    const Json oj = load_json(op_path);
    const specsect::Matrix a = specsect::matrix_from_json(oj);
    const auto g = specsect::grading_from_json(load_json(grading_path));
    const specsect::Matrix a_prime = specsect::sigma_trick(a, g, opt.tol);
    const auto d = specsect::eig_hermitian(a_prime * a_prime, opt.tol);
    const double min_square = d.eigenvalues.minCoeff();
    Json j = specsect::matrix_to_json(a_prime);
    j["min_eig_of_square"] = min_square;
    j["ok"] = min_square >= 1.0 - 1e-8;
    emit(j, opt.out_path);
    return min_square >= 1.0 - 1e-8 ? 0 : 1;
}

specsect::SampledFamily generate_family(const std::string& name, int dim, int mesh,
                                        double x_max, int samples) {
    if (name == "fuglede") return specsect::fuglede_family(dim);
    if (name == "no-gss") return specsect::semibounded_no_gss_family(dim);
    if (name == "neg-to-pos") return specsect::negative_to_positive_path(dim);
    if (name == "shift") {
        specsect::Matrix m = specsect::Matrix::Zero(dim, dim);
        for (int i = 0; i < dim; ++i) m(i, i) = i - dim / 2 + 0.5;
        std::vector<double> grid;
        for (int k = 0; k < samples; ++k)
            grid.push_back(-1.0 + 2.0 * k / std::max(1, samples - 1));
        return specsect::shift_family(
            specsect::TruncatedOperator(std::move(m),
                                        {specsect::TailKind::PositiveGrowth, 1.0}),
            grid);
    }
    if (name == "rellich") {
        std::vector<double> grid;
        for (int k = 0; k < samples; ++k)
            grid.push_back(x_max * (k + 1) / samples);
        return specsect::rellich_family(grid, mesh).family;
    }
    throw specsect::Error("usage", "unknown family: " + name);
}

int cmd_demo(const std::string& which, int dim, int mesh, double x, const Options& opt) {
    if (which == "rellich") {
        const double fd = specsect::rellich_smallest_eigenvalue(x, mesh);
        const double mu = specsect::rellich_mu(x);
        const double ref = -mu * mu;
        const double rel_err = std::abs(fd - ref) / std::abs(ref);
        emit(Json{{"x", x},
                  {"mesh", mesh},
                  {"fd_smallest_eigenvalue", fd},
                  {"reference_eigenvalue", ref},
                  {"mu", mu},
                  {"relative_error", rel_err},
                  {"ok", rel_err < 0.01}},
             opt.out_path);
        return rel_err < 0.01 ? 0 : 1;
    }
    if (which == "fuglede") {
        const auto fam = specsect::fuglede_family(dim);
        const auto cont = specsect::continuity_report(fam, opt.jump_threshold,
                                                      opt.continuity_threshold, opt.tol);
        const auto& last = cont.pairs.back();
        const double expected = specsect::fuglede_riesz_closed_form(dim - 1.0);
        emit(Json{{"dim", dim},
                  {"riesz_step_to_marker", last.riesz},
                  {"expected_riesz_step", expected},
                  {"graph_step_to_marker", last.graph},
                  {"riesz_jump_flagged", last.riesz_jump},
                  {"ok", std::abs(last.riesz - expected) < 1e-10}},
             opt.out_path);
        return std::abs(last.riesz - expected) < 1e-10 ? 0 : 1;
    }
    if (which == "shift") {
        const auto fam = generate_family("shift", dim, 0, 0.0, 9);
        const auto p = specsect::chi_plus(fam.operators[(fam.size() - 1) / 2], opt.tol);
        bool all_ok = true;
        double r_used = 0.0;
        for (int k = 0; k < fam.size(); ++k) {
            const double r = std::abs(fam.grid[k]) + 0.25;
            r_used = std::max(r_used, r);
            all_ok = all_ok &&
                     specsect::is_spectral_section(fam.operators[k], p, r, opt.tol).ok;
        }
        emit(Json{{"dim", dim},
                  {"constant_section_verified", all_ok},
                  {"max_cutoff", r_used},
                  {"ok", all_ok}},
             opt.out_path);
        return all_ok ? 0 : 1;
    }
    if (which == "no-gss") {
        const auto fam = specsect::semibounded_no_gss_family(dim);
        const auto rep = specsect::gss_obstruction(fam);
        emit(Json{{"dim", dim},
                  {"obstructed", rep.obstructed},
                  {"first_clash", rep.first_clash},
                  {"detail", rep.detail},
                  {"ok", rep.obstructed}},
             opt.out_path);
        return rep.obstructed ? 0 : 1;
    }
    throw specsect::Error("usage", "unknown demo: " + which);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral-section toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags (--out, --format, ...) may follow the verb

    Options opt;
    std::string family_path, cert_path, gss_path, op_path, grading_path, proj_path,
        symbol_path;
    double delta = 0.1, r = 1.0, x = 0.5, x_max = 0.9;
    int steps = 11, dim = 32, mesh = 200, samples = 9;
    std::string gen_name, demo_name;

    app.add_option("--config", opt.config_path, "JSON config file (flags win)");
    app.add_option("--out", opt.out_path, "output path (default stdout)");
    app.add_option("--jobs", opt.jobs, "worker threads (default SPECTRA_SECT_JOBS or 1)");
    app.add_option("--seed", opt.seed, "seed for randomized checks");
    app.add_option("--format", opt.format, "json or csv (family report)");

    auto* verify = app.add_subcommand("verify-section", "check a section certificate");
    verify->add_option("--family", family_path)->required();
    verify->add_option("--certificate", cert_path)->required();

    auto* construct =
        app.add_subcommand("construct-section", "section from a generalized section");
    construct->add_option("--family", family_path)->required();
    construct->add_option("--gss", gss_path)->required();
    construct->add_option("--delta", delta);

    auto* triv = app.add_subcommand("trivialize", "samplewise trivializing corrections");
    triv->add_option("--family", family_path)->required();
    triv->add_option("--certificate", cert_path)->required();

    auto* deform = app.add_subcommand("deform", "homotopy to an invertible family");
    deform->add_option("--family", family_path)->required();
    deform->add_option("--gss", gss_path)->required();
    deform->add_option("--steps", steps);

    auto* cl1 = app.add_subcommand("cl1-verify", "Cl(1) section check");
    cl1->add_option("--operator", op_path)->required();
    cl1->add_option("--grading", grading_path)->required();
    cl1->add_option("--projection", proj_path)->required();
    cl1->add_option("--r", r);

    auto* factor = app.add_subcommand("factor-symbol", "W-condition factorization");
    factor->add_option("--symbol", symbol_path)->required();

    auto* sigma = app.add_subcommand("sigma-trick", "odd part plus symmetry");
    sigma->add_option("--operator", op_path)->required();
    sigma->add_option("--grading", grading_path)->required();

    auto* family = app.add_subcommand("family", "family generation and reports");
    family->require_subcommand(1);
    auto* gen = family->add_subcommand("gen", "generate a built-in family");
    gen->add_option("name", gen_name, "fuglede|no-gss|neg-to-pos|shift|rellich")
        ->required();
    gen->add_option("--dim", dim);
    gen->add_option("--mesh", mesh);
    gen->add_option("--x-max", x_max);
    gen->add_option("--samples", samples);
    auto* report = family->add_subcommand("report", "continuity and lower-bound curves");
    report->add_option("--family", family_path)->required();

    auto* demo = app.add_subcommand("demo", "built-in demonstrations");
    demo->add_option("name", demo_name, "rellich|fuglede|shift|no-gss")->required();
    demo->add_option("--dim", dim);
    demo->add_option("--mesh", mesh);
    demo->add_option("--x", x);

    try {
        // Config defaults must not override explicit flags: parse flags
        // first, load the config, then re-parse so flags win again.
        app.parse(argc, argv);
        if (!opt.config_path.empty()) {
            opt.apply_config(load_json(opt.config_path));
            app.clear();
            app.parse(argc, argv);
        }
        opt.resolve_jobs();

        if (*verify) return cmd_verify_section(family_path, cert_path, opt);
        if (*construct) return cmd_construct_section(family_path, gss_path, delta, opt);
        if (*triv) return cmd_trivialize(family_path, cert_path, opt);
        if (*deform) return cmd_deform(family_path, gss_path, steps, opt);
        if (*cl1) return cmd_cl1_verify(op_path, grading_path, proj_path, r, opt);
        if (*factor) return cmd_factor_symbol(symbol_path, opt);
        if (*sigma) return cmd_sigma_trick(op_path, grading_path, opt);
        if (*family) {
            if (*gen) {
                const auto fam = generate_family(gen_name, dim, mesh, x_max, samples);
                emit(specsect::family_to_json(fam), opt.out_path);
                return 0;
            }
            const auto fam = specsect::family_from_json(load_json(family_path));
            if (opt.format == "csv")
                emit_text(family_report_csv(fam, opt), opt.out_path);
            else
                emit(family_report_json(fam, opt), opt.out_path);
            return 0;
        }
        if (*demo) return cmd_demo(demo_name, dim, mesh, x, opt);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const Json::parse_error& e) {
        std::cerr << Json{{"ok", false},
                          {"reason", "malformed_json"},
                          {"message", e.what()},
                          {"byte", e.byte}}
                         .dump(2)
                  << "\n";
        return 2;
    } catch (const specsect::Error& e) {
        std::cerr << Json{{"ok", false}, {"reason", e.code()}, {"message", e.what()}}
                         .dump(2)
                  << "\n";
        return is_usage_code(e.code()) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << Json{{"ok", false}, {"reason", "internal"}, {"message", e.what()}}
                         .dump(2)
                  << "\n";
        return 1;
    }
}
