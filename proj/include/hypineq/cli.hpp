#pragma once

/**
 * @file cli.hpp
 * @brief The `hypineq` command line: parsing, verb dispatch and report emission.
 *
 * Kept in the header tree so tests can drive `run` in-process with string
 * streams. Exit codes: 0 ok, 1 usage or input error, 2 inequality violated,
 * 3 inadmissible parameters, 4 numeric failure.
 */

#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hypineq/catalog.hpp"
#include "hypineq/discrete.hpp"
#include "hypineq/sharpness.hpp"

namespace hypineq::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kViolation = 2, kInadmissible = 3, kNumeric = 4 };

using ordered_json = nlohmann::ordered_json;

/// Shortest decimal text that parses back to the same double.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

/// A verb's output: scalar summary fields plus a table with fixed columns.
struct Report {
    ordered_json summary = ordered_json::object();
    std::vector<std::string> columns;
    std::vector<ordered_json> rows;
};

inline std::string cell_text(const ordered_json& v) {
    if (v.is_null()) return "nan";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return format_number(v.get<double>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
}

inline std::string csv_field(std::string s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

inline void emit(const Report& report, const std::string& format, std::ostream& out) {
    if (format == "json") {
        ordered_json doc = report.summary;
        doc["rows"] = ordered_json::array();
        for (const auto& r : report.rows) doc["rows"].push_back(r);
        out << doc.dump(2) << "\n";
        return;
    }
    if (format == "csv") {
        // Summary as '#' comment lines so the table stays machine readable.
        for (const auto& [key, value] : report.summary.items())
            if (!value.is_object() && !value.is_array()) out << "# " << key << "," << csv_field(cell_text(value)) << "\n";
        for (std::size_t i = 0; i < report.columns.size(); ++i) out << (i ? "," : "") << report.columns[i];
        out << "\n";
        for (const auto& r : report.rows) {
            for (std::size_t i = 0; i < report.columns.size(); ++i)
                out << (i ? "," : "") << csv_field(cell_text(r.at(report.columns[i])));
            out << "\n";
        }
        return;
    }
    std::size_t key_width = 0;
    for (const auto& [key, value] : report.summary.items()) key_width = std::max(key_width, key.size());
    for (const auto& [key, value] : report.summary.items()) {
        out << std::left << std::setw(static_cast<int>(key_width)) << key << "  ";
        if (value.is_array()) {
            for (std::size_t i = 0; i < value.size(); ++i) out << (i ? "; " : "") << cell_text(value[i]);
        } else if (value.is_object()) {
            bool first = true;
            for (const auto& [k, v] : value.items()) {
                out << (first ? "" : " ") << k << "=" << cell_text(v);
                first = false;
            }
        } else {
            out << cell_text(value);
        }
        out << "\n";
    }
    if (report.columns.empty() || report.rows.empty()) return;
    std::vector<std::size_t> width(report.columns.size());
    std::vector<std::vector<std::string>> cells;
    for (std::size_t i = 0; i < report.columns.size(); ++i) width[i] = report.columns[i].size();
    for (const auto& r : report.rows) {
        auto& line = cells.emplace_back();
        for (std::size_t i = 0; i < report.columns.size(); ++i) {
            const auto& v = r.at(report.columns[i]);
            std::string text;
            if (v.is_number_float()) {
                std::ostringstream s;
                s << std::setprecision(10) << v.get<double>();
                text = s.str();
            } else {
                text = cell_text(v);
            }
            width[i] = std::max(width[i], text.size());
            line.push_back(std::move(text));
        }
    }
    out << "\n";
    auto print_line = [&](const std::vector<std::string>& line) {
        for (std::size_t i = 0; i < line.size(); ++i)
            out << (i ? "  " : "") << std::left << std::setw(static_cast<int>(width[i])) << line[i];
        out << "\n";
    };
    print_line(report.columns);
    for (const auto& line : cells) print_line(line);
}

/// Flags shared by the verbs.
struct Options {
    std::string ineq;
    int n = 3;
    std::optional<double> alpha, p, C, q, s, R, c;
    std::string model = "hyperbolic";
    std::string profile = "bump:seed=1";
    std::string eps = "0.2,0.1,0.05,0.025";
    std::string a_grid = "0.25:256:25:log";
    std::string family = "concentration";
    double delta = 1e-3;
    double D = 10.0;
    std::size_t points = 2000;
    std::optional<double> tol;
    double quad_tol = quadrature::kDefaultTol;
    double amplitude = 1.0;
    bool fixed_point = false;
    std::string convention = "plain";
    std::string format = "table";
    std::string spec_path;

    Params params() const {
        Params out;
        out.n = n;
        out.alpha = alpha;
        out.p = p;
        out.C = C;
        out.q = q;
        out.s = s;
        out.R = R;
        out.c = c;
        return out;
    }
    SpaceModel space() const {
        if (model == "hyperbolic") return SpaceModel::hyperbolic(n);
        if (model == "euclidean") return SpaceModel::euclidean(n);
        throw SpecError("unknown model '" + model + "' (expected hyperbolic or euclidean)");
    }
};

inline ordered_json params_json(const Params& p) {
    ordered_json o;
    o["n"] = p.n;
    auto put = [&o](const char* name, const std::optional<double>& v) {
        if (v) o[name] = number(*v);
    };
    put("alpha", p.alpha);
    put("p", p.p);
    put("C", p.C);
    put("q", p.q);
    put("s", p.s);
    put("R", p.R);
    put("c", p.c);
    return o;
}

/// Q below bound by more than the tolerance and the quadrature error.
inline bool below(double value, double bound, double rel_tol, double error) {
    return value < bound - rel_tol * std::max(1.0, std::abs(bound)) - error;
}

namespace verbs {

inline Registry registry_for(const Options& o) {
    Registry reg = Registry::builtin();
    if (!o.spec_path.empty()) {
        std::ifstream in(o.spec_path);
        if (!in) throw SpecError("cannot open spec file '" + o.spec_path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        reg.add(load_custom(buf.str()));
    }
    return reg;
}

inline int list(const Options& o, Report& r) {
    const auto reg = registry_for(o);
    r.columns = {"id", "shape", "model", "tag", "sharp_constant", "family"};
    for (const auto& e : reg.entries()) {
        ordered_json row;
        row["id"] = e.spec.id;
        row["shape"] = to_string(e.spec.shape);
        row["model"] = to_string(e.spec.model);
        row["tag"] = e.tag;
        row["sharp_constant"] = e.spec.sharp_constant ? e.spec.sharp_constant->text() : "";
        row["family"] = e.spec.sharpness_family ? to_string(*e.spec.sharpness_family) : "";
        r.rows.push_back(std::move(row));
    }
    r.summary["entries"] = r.rows.size();
    return kOk;
}

inline int check_params(const Options& o, Report& r) {
    const auto reg = registry_for(o);
    const auto& spec = reg.get(o.ineq);
    const auto report = admissible(spec, o.params());
    r.summary["id"] = spec.id;
    r.summary["params"] = params_json(o.params());
    r.summary["admissible"] = report.ok;
    r.summary["violated"] = report.violated;
    r.columns = {"violated"};
    for (const auto& v : report.violated) r.rows.push_back({{"violated", v}});
    if (!report.ok) throw AdmissibilityError(report.violated);
    return kOk;
}

inline int verify(const Options& o, Report& r) {
    const auto reg = registry_for(o);
    const auto& spec = reg.get(o.ineq);
    const auto params = o.params();
    const auto inst = build_terms(spec, params);
    const auto ps = ProfileSpec::parse(o.profile);
    const auto phi = make_family(ps.kind, ps.shape, params, ps.options);
    const auto rep = residual(inst, phi, o.space(), unquantified_terms(spec), o.quad_tol);
    const double tol = o.tol.value_or(1e-8);

    bool ok;
    std::string status;
    if (rep.has_unquantified_term()) {
        // The remainder constant is not known in closed form: check the main
        // inequality and that the remainder is nonnegative.
        bool remainder_ok = true;
        for (const auto& t : rep.terms)
            if (t.unquantified && t.contribution < 0.0) remainder_ok = false;
        ok = rep.main_holds(tol) && remainder_ok;
        status = ok ? "main-term-holds" : "violated";
    } else {
        ok = rep.holds(tol);
        status = ok ? "holds" : "violated";
    }
    r.summary["id"] = spec.id;
    r.summary["model"] = o.model;
    r.summary["params"] = params_json(params);
    r.summary["profile"] = phi.description;
    r.summary["lhs"] = number(rep.lhs);
    r.summary["rhs"] = number(rep.rhs);
    r.summary["residual"] = number(rep.residual);
    r.summary["main_residual"] = number(rep.main_residual);
    r.summary["scale"] = number(rep.scale);
    r.summary["error"] = number(rep.error);
    r.summary["tol"] = number(tol);
    r.summary["status"] = status;
    r.columns = {"label", "side", "coefficient", "integral", "error", "contribution", "unquantified"};
    for (const auto& t : rep.terms) {
        ordered_json row;
        row["label"] = t.label;
        row["side"] = to_string(t.side);
        row["coefficient"] = number(t.coefficient);
        row["integral"] = number(t.integral);
        row["error"] = number(t.error);
        row["contribution"] = number(t.contribution);
        row["unquantified"] = t.unquantified;
        r.rows.push_back(std::move(row));
    }
    return ok ? kOk : kViolation;
}

inline void add_rows(Report& r, const SweepReport& rep, const char* shape_name) {
    r.columns = {shape_name, "q", "numerator", "denominator", "error"};
    for (const auto& row : rep.rows) {
        ordered_json j;
        j[shape_name] = number(row.shape);
        j["q"] = number(row.q);
        j["numerator"] = number(row.numerator);
        j["denominator"] = number(row.denominator);
        j["error"] = number(row.error);
        r.rows.push_back(std::move(j));
    }
}

inline bool rows_bounded(const SweepReport& rep, double tol) {
    for (const auto& row : rep.rows)
        if (below(row.q, rep.sharp_constant, tol, row.error)) return false;
    return true;
}

inline int sharpness(const Options& o, Report& r) {
    const auto reg = registry_for(o);
    const auto& spec = reg.get(o.ineq);
    const auto params = o.params();
    const auto inst = build_terms(spec, params);
    const auto rep = sweep(inst, params, parse_grid(o.eps), sweep_family_from_string(o.family), o.space(), o.quad_tol,
                           o.D);
    const double tol = o.tol.value_or(1e-8);
    const bool ok = rows_bounded(rep, tol);
    r.summary["id"] = rep.id;
    r.summary["model"] = rep.model;
    r.summary["params"] = params_json(params);
    r.summary["family"] = rep.family;
    r.summary["extrapolated_limit"] = number(rep.extrapolated_limit);
    r.summary["sharp_constant"] = number(rep.sharp_constant);
    r.summary["relative_gap"] = number(rep.relative_gap);
    r.summary["tol"] = number(tol);
    r.summary["bounded_below"] = ok;
    add_rows(r, rep, "eps");
    return ok ? kOk : kViolation;
}

inline int hpw(const Options& o, Report& r) {
    const auto reg = registry_for(o);
    const auto& spec = reg.get(o.ineq.empty() ? "hpw" : o.ineq);
    if (spec.shape != Shape::Product) throw SpecError("hpw scans need a product-shape inequality");
    const auto params = o.params();
    const auto inst = build_terms(spec, params);
    const auto rep = hpw_scan(inst, params, parse_grid(o.a_grid), o.space(), o.quad_tol, o.amplitude);
    const double tol = o.tol.value_or(1e-8);
    bool ok = rows_bounded(rep, tol) && !below(rep.refined_q, rep.sharp_constant, tol, 0.0);
    r.summary["id"] = rep.id;
    r.summary["model"] = rep.model;
    r.summary["params"] = params_json(params);
    r.summary["min_a"] = number(rep.rows[rep.min_index].shape);
    r.summary["min_q"] = number(rep.rows[rep.min_index].q);
    r.summary["refined_a"] = number(rep.refined_a);
    r.summary["refined_q"] = number(rep.refined_q);
    r.summary["sharp_constant"] = number(rep.sharp_constant);
    r.summary["relative_gap"] = number(rep.relative_gap);
    r.summary["large_a_ratio"] = number(rep.large_a_ratio);
    r.summary["tol"] = number(tol);
    if (o.fixed_point) {
        MassConvention conv;
        if (o.convention == "plain") conv = MassConvention::Plain;
        else if (o.convention == "sphere") conv = MassConvention::SphereWeighted;
        else throw SpecError("unknown mass convention '" + o.convention + "' (expected plain or sphere)");
        const auto fp = solve_paper_alpha(params.n, conv);
        ordered_json f;
        f["convention"] = o.convention;
        f["converged"] = fp.converged;
        f["iterations"] = fp.iterations;
        f["width"] = number(fp.width);
        f["quotient"] = number(fp.quotient);
        f["gap"] = number(fp.gap);
        f["min_map_excess"] = number(fp.min_map_excess);
        f["note"] = fp.note;
        r.summary["fixed_point"] = f;
        if (below(fp.quotient, fp.bound, tol, 0.0)) ok = false;
    }
    r.summary["bounded_below"] = ok;
    add_rows(r, rep, "a");
    return ok ? kOk : kViolation;
}

inline int minimize(const Options& o, Report& r) {
    const auto reg = registry_for(o);
    const auto& spec = reg.get(o.ineq);
    const auto params = o.params();
    const auto inst = build_terms(spec, params);
    const auto res = minimize_discrete(inst, {o.delta, o.D, o.points}, o.space(), true);
    const double tol = o.tol.value_or(0.05);
    const bool ok = !below(res.lambda_min, res.sharp_constant, tol, 0.0);
    r.summary["id"] = res.id;
    r.summary["model"] = o.model;
    r.summary["params"] = params_json(params);
    r.summary["delta"] = number(o.delta);
    r.summary["D"] = number(o.D);
    r.summary["points"] = o.points;
    r.summary["lambda_min"] = number(res.lambda_min);
    r.summary["lambda_delta_tenth"] = number(res.lambda_delta_tenth);
    r.summary["delta_sensitivity"] = number(std::abs(res.lambda_min - res.lambda_delta_tenth));
    r.summary["sharp_constant"] = number(res.sharp_constant);
    r.summary["certified"] = res.certified;
    r.summary["iterations"] = res.iterations;
    r.summary["tol"] = number(tol);
    r.columns = {"d", "phi"};
    for (std::size_t i = 0; i < res.nodes.size(); ++i)
        r.rows.push_back({{"d", number(res.nodes[i])}, {"phi", number(res.eigenfunction[i])}});
    return ok ? kOk : kViolation;
}

}  // namespace verbs

inline constexpr const char* kFooter = R"(CSV columns by verb:
  list          id,shape,model,tag,sharp_constant,family
  check-params  violated
  verify        label,side,coefficient,integral,error,contribution,unquantified
  sharpness     eps,q,numerator,denominator,error
  hpw           a,q,numerator,denominator,error
  minimize      d,phi
Summary fields precede the header as '# key,value' lines.
Exit codes: 0 ok, 1 usage, 2 inequality violated, 3 inadmissible parameters, 4 numeric failure.
HYPINEQ_THREADS caps worker threads (0 or unset: machine default).)";

/// Parses argv, runs the verb, writes the report to `out` and diagnostics to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical verification of Hardy, Rellich and uncertainty inequalities on hyperbolic space",
                 "hypineq"};
    app.footer(kFooter);
    app.require_subcommand(1, 1);
    Options o;

    auto common = [&o](CLI::App* sub, bool needs_ineq) {
        auto* ineq = sub->add_option("--ineq", o.ineq, "Inequality id (see `list`)");
        if (needs_ineq) ineq->required();
        sub->add_option("--n", o.n, "Dimension")->check(CLI::PositiveNumber);
        sub->add_option("--alpha", o.alpha, "Weight exponent alpha");
        sub->add_option("--p", o.p, "Integrability exponent p");
        sub->add_option("--C", o.C, "Curvature constant (default n - 1)");
        sub->add_option("--q", o.q, "Sobolev exponent q");
        sub->add_option("--s", o.s, "Hardy-Sobolev exponent s");
        sub->add_option("--R", o.R, "Ball radius for remainder terms");
        sub->add_option("--c", o.c, "User-supplied Sobolev constant");
        sub->add_option("--model", o.model, "hyperbolic or euclidean")->check(CLI::IsMember({"hyperbolic", "euclidean"}));
        sub->add_option("--quad-tol", o.quad_tol, "Relative quadrature tolerance");
        sub->add_option("--format", o.format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
        sub->add_option("--spec", o.spec_path, "Custom inequality file (JSON catalog schema)");
    };

    auto* list = app.add_subcommand("list", "List registry entries with their formula tags");
    list->add_option("--format", o.format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
    list->add_option("--spec", o.spec_path, "Custom inequality file (JSON catalog schema)");

    auto* check = app.add_subcommand("check-params", "Check parameter admissibility");
    common(check, true);

    auto* verify = app.add_subcommand("verify", "Evaluate every term and the residual on one profile");
    common(verify, true);
    verify->add_option("--profile", o.profile, "Profile spec, e.g. bump:seed=7 or gaussian:a=1.5");
    verify->add_option("--tol", o.tol, "Residual tolerance relative to the largest term (default 1e-8)");

    auto* sharp = app.add_subcommand("sharpness", "Quotient sweep toward the sharp constant");
    common(sharp, true);
    sharp->add_option("--family", o.family, "concentration, paper or gaussian")
        ->check(CLI::IsMember({"concentration", "paper", "gaussian"}));
    sharp->add_option("--eps", o.eps, "Decreasing shape list: comma list or start:stop:count:log");
    sharp->add_option("--D", o.D, "Truncation radius of the families");
    sharp->add_option("--tol", o.tol, "Allowed relative shortfall below the sharp constant (default 1e-8)");

    auto* hpw = app.add_subcommand("hpw", "Gaussian scan of a product-shape uncertainty inequality");
    common(hpw, false);
    hpw->add_option("--a-grid", o.a_grid, "Gaussian widths: comma list or start:stop:count:log");
    hpw->add_option("--amplitude", o.amplitude, "Gaussian amplitude");
    hpw->add_flag("--fixed-point", o.fixed_point, "Also iterate the Gaussian-width fixed-point map");
    hpw->add_option("--convention", o.convention, "Gaussian mass convention: plain or sphere")
        ->check(CLI::IsMember({"plain", "sphere"}));
    hpw->add_option("--tol", o.tol, "Allowed relative shortfall below the bound (default 1e-8)");

    auto* minimize = app.add_subcommand("minimize", "Smallest discrete quotient on a log grid");
    common(minimize, true);
    minimize->add_option("--delta", o.delta, "Inner radius of the grid")->check(CLI::PositiveNumber);
    minimize->add_option("--D", o.D, "Outer radius of the grid")->check(CLI::PositiveNumber);
    minimize->add_option("--points", o.points, "Grid points (>= 50)");
    minimize->add_option("--tol", o.tol, "Allowed relative shortfall below the sharp constant (default 0.05)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    Report report;
    int code = kOk;
    try {
        if (list->parsed()) code = verbs::list(o, report);
        else if (check->parsed()) code = verbs::check_params(o, report);
        else if (verify->parsed()) code = verbs::verify(o, report);
        else if (sharp->parsed()) code = verbs::sharpness(o, report);
        else if (hpw->parsed()) code = verbs::hpw(o, report);
        else if (minimize->parsed()) code = verbs::minimize(o, report);
    } catch (const AdmissibilityError& e) {
        if (!report.summary.empty()) emit(report, o.format, out);
        err << "hypineq: inadmissible parameters\n";
        for (const auto& v : e.violated()) err << "  violated: " << v << "\n";
        return kInadmissible;
    } catch (const NonConvergence& e) {
        err << "hypineq: " << e.what() << " (best estimate " << format_number(e.best_estimate()) << ", error "
            << format_number(e.error_estimate()) << ")\n";
        return kNumeric;
    } catch (const NumericError& e) {
        err << "hypineq: " << e.what() << "\n";
        return kNumeric;
    } catch (const Error& e) {
        err << "hypineq: " << e.what() << "\n";
        return kUsage;
    }
    emit(report, o.format, out);
    if (code == kViolation) err << "hypineq: inequality violated beyond tolerance\n";
    return code;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace hypineq::cli
