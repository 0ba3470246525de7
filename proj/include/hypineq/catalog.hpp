#pragma once

/**
 * @file catalog.hpp
 * @brief Registry of the built-in inequalities, admissibility checks,
 *        numeric instantiation and the JSON document format for custom entries.
 */

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hypineq/errors.hpp"
#include "hypineq/expr.hpp"
#include "hypineq/params.hpp"
#include "hypineq/term.hpp"
#include "hypineq/term_integral.hpp"

namespace hypineq {

struct RegistryEntry {
    InequalitySpec spec;
    /// Compact formula shown by `list`.
    std::string tag;
    /// Parameters known to be admissible.
    Params witness;
};

struct AdmissibilityReport {
    bool ok = true;
    std::vector<std::string> violated;
};

namespace catalog_detail {

inline expr::Expression ex(std::string_view text) { return expr::Expression::parse(text); }

inline FunctionalTerm term(Side side, std::string_view coefficient, std::string_view weight,
                           std::string_view integrand, ExtraWeight extra = ExtraWeight::None,
                           Measure measure = Measure::Riemannian, std::string_view outer = "1") {
    FunctionalTerm t;
    t.side = side;
    t.coefficient = ex(coefficient);
    t.weight_power = ex(weight);
    t.extra_weight = extra;
    t.integrand = IntegrandSpec::parse(integrand);
    t.measure = measure;
    t.outer_power = ex(outer);
    return t;
}

inline InequalitySpec spec(std::string id, Shape shape, ModelConstraint model, std::vector<FunctionalTerm> terms,
                           std::vector<std::string_view> constraints, std::optional<std::string_view> sharp,
                           std::optional<FamilyKind> family) {
    InequalitySpec s;
    s.id = std::move(id);
    s.shape = shape;
    s.model = model;
    s.terms = std::move(terms);
    for (auto c : constraints) s.constraints.push_back(ex(c));
    if (sharp) s.sharp_constant = ex(*sharp);
    s.sharpness_family = family;
    return s;
}

inline Params witness(int n, std::initializer_list<std::pair<const char*, double>> values) {
    Params p;
    p.n = n;
    for (const auto& [k, v] : values) p.set(k, v);
    return p;
}

inline std::vector<RegistryEntry> builtin_entries() {
    using enum Side;
    constexpr auto Any = ModelConstraint::Any;
    constexpr auto Hyp = ModelConstraint::HyperbolicOnly;
    constexpr auto Linear = Shape::Linear;
    constexpr auto Product = Shape::Product;
    constexpr auto LogSq = ExtraWeight::InvLogSq;
    constexpr auto DistSq = ExtraWeight::InvDistToRSq;
    constexpr auto None = ExtraWeight::None;
    constexpr auto Leb = Measure::Lebesgue;
    constexpr auto Riem = Measure::Riemannian;
    using FK = FamilyKind;

    std::vector<RegistryEntry> out;
    out.push_back({spec("hardy-lp", Linear, Any,
                        {term(LHS, "1", "alpha", "grad^p"),
                         term(RHS, "((C+1+alpha-p)/p)^p", "alpha-p", "abs_phi^p")},
                        {"p > 1", "C + 1 + alpha - p > 0"}, "((C+1+alpha-p)/p)^p", FK::HardyConcentration),
                   "int rho^a |grad phi|^p >= ((C+1+a-p)/p)^p int rho^(a-p) |phi|^p",
                   witness(3, {{"alpha", 0.0}, {"p", 2.0}})});
    out.push_back({spec("rellich-phi", Linear, Any,
                        {term(LHS, "1", "alpha", "laplacian_sq"),
                         term(RHS, "(C+alpha-3)^2*(C-alpha+1)^2/16", "alpha-4", "phi_sq")},
                        {"alpha < 2", "C + alpha - 3 > 0"}, "(C+alpha-3)^2*(C-alpha+1)^2/16",
                        FK::RellichConcentration),
                   "int rho^a |Lap phi|^2 >= (C+a-3)^2 (C-a+1)^2/16 int rho^(a-4) phi^2",
                   witness(5, {{"alpha", 0.0}})});
    out.push_back({spec("hardy-poincare", Linear, Hyp,
                        {term(LHS, "1", "alpha+p", "grad^p"), term(RHS, "((n+alpha)/p)^p", "alpha", "abs_phi^p")},
                        {"p > 1", "alpha > -n"}, "((n+alpha)/p)^p", FK::HardyConcentration),
                   "int d^(a+p) |d'.grad phi|^p >= ((n+a)/p)^p int d^a |phi|^p",
                   witness(3, {{"alpha", 0.0}, {"p", 2.0}})});
    out.push_back({spec("hardy-improved-log", Linear, Hyp,
                        {term(LHS, "1", "alpha", "grad_sq"), term(RHS, "((n+alpha-2)/2)^2", "alpha-2", "phi_sq"),
                         term(RHS, "1/4", "alpha-2", "phi_sq", LogSq)},
                        {"n + alpha - 2 > 0", "R > 0"}, "((n+alpha-2)/2)^2", FK::HardyConcentration),
                   "int d^a |grad phi|^2 >= ((n+a-2)/2)^2 int d^(a-2) phi^2 + 1/4 int d^(a-2) phi^2/log(R/d)^2",
                   witness(3, {{"alpha", 0.0}, {"R", 2.0}})});
    out.push_back({spec("hardy-improved-ball", Linear, Hyp,
                        {term(LHS, "1", "alpha", "grad_sq"), term(RHS, "((n+alpha-2)/2)^2", "alpha-2", "phi_sq"),
                         term(RHS, "1/4", "alpha", "phi_sq", DistSq)},
                        {"n + alpha - 2 > 0", "R > 0"}, "((n+alpha-2)/2)^2", FK::HardyConcentration),
                   "int d^a |grad phi|^2 >= ((n+a-2)/2)^2 int d^(a-2) phi^2 + 1/4 int d^a phi^2/(R-d)^2",
                   witness(3, {{"alpha", 0.0}, {"R", 2.0}})});
    out.push_back(
        {spec("hardy-sobolev", Linear, Hyp,
              {term(LHS, "1", "0", "grad_sq"),
               term(RHS, "((n-2)/2)^(2*s/(2*(n-s)/(n-2))) * (n*(n-2)/4*Sn^(2/n))^(n*(2-s)/(2*(n-s)))", "-s",
                    "abs_phi^(2*(n-s)/(n-2))", None, Riem, "(n-2)/(n-s)")},
              {"n >= 3", "0 <= s <= 2"}, std::nullopt, std::nullopt),
         "int |grad phi|^2 >= ((n-2)/2)^(2s/p*) A_n^(n(2-s)/(2(n-s))) (int |phi|^p* / d^s)^(2/p*)",
         witness(4, {{"s", 1.0}})});
    out.push_back({spec("hardy-sobolev-improved", Linear, Hyp,
                        {term(LHS, "1", "alpha", "grad_sq"), term(RHS, "((n+alpha-2)/2)^2", "alpha-2", "phi_sq"),
                         term(RHS, "2^(n-2)/c^2*(Sn/2)^((q-2)/q)", "((n-2)*(q-2)+alpha*q)/2", "abs_phi^q", None,
                              Leb, "2/q")},
                        {"n > 2", "n + alpha - 2 > 0", "2 <= q <= 2*n/(n-1)", "c > 0"}, "((n+alpha-2)/2)^2",
                        FK::HardyConcentration),
                   "int d^a |grad phi|^2 >= ((n+a-2)/2)^2 int d^(a-2) phi^2 + c~ (int d^e |phi|^q dx)^(2/q)",
                   witness(3, {{"alpha", 0.0}, {"q", 2.5}, {"c", 1.0}})});
    out.push_back({spec("rellich-grad", Linear, Hyp,
                        {term(LHS, "1", "alpha", "laplacian_sq"), term(RHS, "(n-alpha)^2/4", "alpha-2", "grad_sq")},
                        {"n > 2", "(8-n)/3 < alpha < 2"}, "(n-alpha)^2/4", FK::RellichConcentration),
                   "int d^a |Lap phi|^2 >= (n-a)^2/4 int d^(a-2) |grad phi|^2", witness(5, {{"alpha", 1.5}})});
    out.push_back({spec("rellich-grad-improved-log", Linear, Hyp,
                        {term(LHS, "1", "alpha", "laplacian_sq"), term(RHS, "(n-alpha)^2/4", "alpha-2", "grad_sq"),
                         term(RHS, "(C+1-alpha)*(C+3*alpha-7)/16", "alpha-4", "phi_sq", LogSq)},
                        {"n > 2", "(8-n)/3 < alpha < 2", "R > 0"}, "(n-alpha)^2/4", FK::RellichConcentration),
                   "int d^a |Lap phi|^2 >= (n-a)^2/4 int d^(a-2) |grad phi|^2 + K int d^(a-4) phi^2/log(R/d)^2",
                   witness(5, {{"alpha", 1.5}, {"R", 2.0}})});
    out.push_back({spec("rellich-grad-improved-ball", Linear, Hyp,
                        {term(LHS, "1", "alpha", "laplacian_sq"), term(RHS, "(n-alpha)^2/4", "alpha-2", "grad_sq"),
                         term(RHS, "(C+1-alpha)*(C+3*alpha-7)/16", "alpha-2", "phi_sq", DistSq)},
                        {"n > 2", "(8-n)/3 < alpha < 2", "R > 0"}, "(n-alpha)^2/4", FK::RellichConcentration),
                   "int d^a |Lap phi|^2 >= (n-a)^2/4 int d^(a-2) |grad phi|^2 + K int d^(a-2) phi^2/(R-d)^2",
                   witness(5, {{"alpha", 1.5}, {"R", 2.0}})});
    out.push_back({spec("rellich-sobolev", Linear, Hyp,
                        {term(LHS, "1", "alpha", "laplacian_sq"), term(RHS, "(n-alpha)^2/4", "alpha-2", "grad_sq"),
                         term(RHS, "(n-alpha)*(n+3*alpha-8)*2^(n-2)/(4*c^2)*(Sn/2)^((q-2)/q)",
                              "((n-2)*(q-2)+(alpha-2)*q)/2", "abs_phi^q", None, Leb, "2/q")},
                        {"n > 2", "(8-n)/3 < alpha < 2", "2 <= q <= 2*n/(n-1)", "c > 0"}, "(n-alpha)^2/4",
                        FK::RellichConcentration),
                   "int d^a |Lap phi|^2 >= (n-a)^2/4 int d^(a-2) |grad phi|^2 + K (int d^e |phi|^q dx)^(2/q)",
                   witness(5, {{"alpha", 1.5}, {"q", 2.2}, {"c", 1.0}})});
    out.push_back({spec("hpw", Product, Any,
                        {term(LHS, "1", "0", "dist_sq_phi_sq"), term(LHS, "1", "0", "grad_sq"),
                         term(RHS, "(C+1)^2/4", "0", "phi_sq")},
                        {"C > 0"}, "(C+1)^2/4", FK::Gaussian),
                   "(int d^2 phi^2)(int |grad phi|^2) >= (C+1)^2/4 (int phi^2)^2", witness(3, {})});
    out.push_back({spec("hpw-second-order", Product, Any,
                        {term(LHS, "1", "0", "dist4_phi_sq"), term(LHS, "1", "0", "laplacian_sq"),
                         term(RHS, "(C+1)^4/16", "0", "phi_sq")},
                        {"C > 1", "(8-n)/3 < alpha < 2"}, std::nullopt, FK::Gaussian),
                   "(int d^4 phi^2)(int |Lap phi|^2) >= (C+1)^4/16 (int phi^2)^2", witness(9, {{"alpha", 0.0}})});
    return out;
}

}  // namespace catalog_detail

/// Checks every constraint and that every referenced parameter is present.
inline AdmissibilityReport admissible(const InequalitySpec& spec, const Params& params) {
    AdmissibilityReport report;
    auto flag = [&report](std::string msg) {
        if (std::find(report.violated.begin(), report.violated.end(), msg) == report.violated.end())
            report.violated.push_back(std::move(msg));
        report.ok = false;
    };
    if (params.n < 2) flag("n >= 2");
    const auto env = params.env();
    auto require_symbols = [&](const expr::Expression& e) {
        for (const auto& sym : e.symbols())
            if (!env.count(sym)) flag("parameter '" + sym + "' is required but was not supplied");
    };
    for (const auto& c : spec.constraints) {
        require_symbols(c);
        try {
            if (c.evaluate(env) == 0.0) flag(c.text());
        } catch (const expr::MissingSymbol&) {
        }
    }
    for (const auto& t : spec.terms) {
        require_symbols(t.coefficient);
        require_symbols(t.weight_power);
        require_symbols(t.integrand.exponent);
        require_symbols(t.outer_power);
        if (t.extra_weight != ExtraWeight::None && !params.R)
            flag("parameter 'R' is required but was not supplied");
    }
    if (spec.sharp_constant) require_symbols(*spec.sharp_constant);
    return report;
}

/// Numeric instance of `spec` at `params`; throws AdmissibilityError.
inline NumericInequality build_terms(const InequalitySpec& spec, const Params& params) {
    const auto report = admissible(spec, params);
    if (!report.ok) throw AdmissibilityError(report.violated);
    NumericInequality out;
    out.id = spec.id;
    out.shape = spec.shape;
    out.model = spec.model;
    out.sharpness_family = spec.sharpness_family;
    for (const auto& t : spec.terms) {
        auto nt = numeric_term(t, params);
        if (!std::isfinite(nt.coefficient) || nt.coefficient < 0.0)
            throw AdmissibilityError({"coefficient " + t.coefficient.text() + " must be finite and >= 0 (got " +
                                      std::to_string(nt.coefficient) + ")"});
        out.terms.push_back(std::move(nt));
    }
    if (spec.sharp_constant) out.sharp_constant = spec.sharp_constant->evaluate(params.env());
    return out;
}

inline double sharp_constant(const InequalitySpec& spec, const Params& params) {
    const auto report = admissible(spec, params);
    if (!report.ok) throw AdmissibilityError(report.violated);
    if (!spec.sharp_constant) throw SpecError("inequality '" + spec.id + "' states no sharp constant");
    return spec.sharp_constant->evaluate(params.env());
}

/// Structural checks shared by built-in and custom entries.
inline void check_structure(const InequalitySpec& spec) {
    if (spec.id.empty()) throw SpecError("inequality id must not be empty");
    std::size_t lhs = 0, rhs = 0;
    for (const auto& t : spec.terms) (t.side == Side::LHS ? lhs : rhs)++;
    if (lhs == 0 || rhs == 0) throw SpecError("inequality '" + spec.id + "' needs terms on both sides");
    if (spec.shape == Shape::Product && (lhs != 2 || rhs != 1))
        throw SpecError("product inequality '" + spec.id + "' needs exactly two LHS terms and one RHS term");
    for (const auto& c : spec.constraints)
        if (!c.is_predicate()) throw SpecError("constraint '" + c.text() + "' is not a comparison");
}

class Registry {
public:
    /// Built-in entries only; validated on first use.
    static const Registry& builtin() {
        static const Registry instance = [] {
            Registry r;
            r.entries_ = catalog_detail::builtin_entries();
            r.validate();
            return r;
        }();
        return instance;
    }

    const std::vector<RegistryEntry>& entries() const noexcept { return entries_; }

    std::vector<std::string> ids() const {
        std::vector<std::string> out;
        for (const auto& e : entries_) out.push_back(e.spec.id);
        return out;
    }

    const RegistryEntry* find(std::string_view id) const {
        for (const auto& e : entries_)
            if (e.spec.id == id) return &e;
        return nullptr;
    }

    const InequalitySpec& get(std::string_view id) const {
        if (const auto* e = find(id)) return e->spec;
        throw SpecError("unknown inequality '" + std::string(id) + "'");
    }

    /// Adds or replaces an entry (custom specs loaded before queries start).
    void add(InequalitySpec spec, std::string tag = {}, Params witness = {}) {
        check_structure(spec);
        if (tag.empty()) tag = "custom";
        for (auto& e : entries_)
            if (e.spec.id == spec.id) {
                e = {std::move(spec), std::move(tag), witness};
                return;
            }
        entries_.push_back({std::move(spec), std::move(tag), witness});
    }

    /// Startup assertions; throws SpecError listing every failed check.
    void validate() const {
        const auto issues = validation_issues();
        if (!issues.empty()) {
            std::string msg = "registry validation failed:";
            for (const auto& i : issues) msg += "\n  " + i;
            throw SpecError(msg);
        }
    }

    /// Witness admissibility, sharp constant equal to the main coefficient,
    /// and equivalence of the two printed remainder exponents.
    std::vector<std::string> validation_issues() const {
        std::vector<std::string> issues;
        for (const auto& e : entries_) {
            try {
                check_structure(e.spec);
                const auto report = admissible(e.spec, e.witness);
                if (!report.ok) {
                    issues.push_back(e.spec.id + ": witness parameters are not admissible");
                    continue;
                }
                const auto inst = build_terms(e.spec, e.witness);
                if (inst.sharp_constant) {
                    const double main = inst.terms[inst.main_rhs()].effective_coefficient();
                    if (std::abs(main - *inst.sharp_constant) > 1e-12 * std::max(1.0, std::abs(main)))
                        issues.push_back(e.spec.id + ": sharp constant differs from the main coefficient");
                }
            } catch (const Error& err) {
                issues.push_back(e.spec.id + ": " + err.what());
            }
        }
        if (const auto* e = find("hardy-sobolev-improved")) {
            const auto stated = expr::Expression::parse("((2-n)*(2-q)+alpha*q)/2");
            const auto* remainder = &e->spec.terms.back();
            if (!expr::polynomially_equivalent(stated, remainder->weight_power))
                issues.push_back("hardy-sobolev-improved: remainder exponent forms differ");
        }
        return issues;
    }

private:
    std::vector<RegistryEntry> entries_;
};

inline AdmissibilityReport admissible(std::string_view id, const Params& params) {
    return admissible(Registry::builtin().get(id), params);
}
inline NumericInequality build_terms(std::string_view id, const Params& params) {
    return build_terms(Registry::builtin().get(id), params);
}
inline double sharp_constant(std::string_view id, const Params& params) {
    return sharp_constant(Registry::builtin().get(id), params);
}

// ---------------------------------------------------------------------------
// Document format

using ordered_json = nlohmann::ordered_json;

inline ordered_json to_json(const InequalitySpec& spec) {
    ordered_json doc;
    doc["id"] = spec.id;
    doc["shape"] = to_string(spec.shape);
    doc["model"] = to_string(spec.model);
    doc["terms"] = ordered_json::array();
    for (const auto& t : spec.terms) {
        ordered_json jt;
        jt["side"] = to_string(t.side);
        jt["coefficient"] = t.coefficient.text();
        jt["weight_power"] = t.weight_power.text();
        jt["extra_weight"] = to_string(t.extra_weight);
        jt["integrand"] = t.integrand.text();
        jt["measure"] = to_string(t.measure);
        jt["outer_power"] = t.outer_power.text();
        doc["terms"].push_back(std::move(jt));
    }
    doc["constraints"] = ordered_json::array();
    for (const auto& c : spec.constraints) doc["constraints"].push_back(c.text());
    doc["sharp_constant"] = spec.sharp_constant ? ordered_json(spec.sharp_constant->text()) : ordered_json(nullptr);
    doc["sharpness_family"] =
        spec.sharpness_family ? ordered_json(to_string(*spec.sharpness_family)) : ordered_json(nullptr);
    return doc;
}

inline std::string serialize(const InequalitySpec& spec) { return to_json(spec).dump(2) + "\n"; }

namespace catalog_detail {

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

inline const ordered_json& field(const ordered_json& obj, const char* key, std::string_view where) {
    if (!obj.is_object()) throw SpecError(std::string(where) + " must be an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw SpecError(std::string(where) + " is missing field '" + key + "'");
    return *it;
}

inline std::string string_field(const ordered_json& obj, const char* key, std::string_view where) {
    const auto& v = field(obj, key, where);
    if (!v.is_string()) throw SpecError(std::string(where) + " field '" + key + "' must be a string");
    return v.get<std::string>();
}

inline expr::Expression expression_field(const ordered_json& obj, const char* key, std::string_view where) {
    const std::string text = string_field(obj, key, where);
    try {
        return expr::Expression::parse(text);
    } catch (const ParseError& e) {
        throw ParseError(std::string(where) + " field '" + key + "': " + e.message(), e.line(), e.column());
    }
}

}  // namespace catalog_detail

/// Parses a custom inequality document (JSON, fixed field names).
inline InequalitySpec load_custom(std::string_view document) {
    using namespace catalog_detail;
    ordered_json doc;
    try {
        doc = ordered_json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, column] = line_column(document, e.byte == 0 ? 0 : e.byte - 1);
        throw ParseError("malformed inequality document", line, column);
    }
    static const std::set<std::string> top_keys{"id",          "shape",          "model",
                                                 "terms",       "constraints",    "sharp_constant",
                                                 "sharpness_family"};
    if (!doc.is_object()) throw SpecError("inequality document must be an object");
    for (const auto& [key, _] : doc.items())
        if (!top_keys.count(key)) throw SpecError("unknown field '" + key + "' in inequality document");

    InequalitySpec spec;
    spec.id = string_field(doc, "id", "document");
    spec.shape = names::from_text(names::kShapes, string_field(doc, "shape", "document"), "shape");
    spec.model = names::from_text(names::kModels, string_field(doc, "model", "document"), "model");
    const auto& terms = field(doc, "terms", "document");
    if (!terms.is_array()) throw SpecError("field 'terms' must be an array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string where = "term " + std::to_string(i + 1);
        const auto& jt = terms[i];
        FunctionalTerm t;
        t.side = names::from_text(names::kSides, string_field(jt, "side", where), "side");
        t.coefficient = expression_field(jt, "coefficient", where);
        t.weight_power = expression_field(jt, "weight_power", where);
        t.extra_weight =
            names::from_text(names::kExtraWeights, string_field(jt, "extra_weight", where), "extra weight");
        try {
            t.integrand = IntegrandSpec::parse(string_field(jt, "integrand", where));
        } catch (const ParseError& e) {
            throw ParseError(where + " field 'integrand': " + e.message(), e.line(), e.column());
        }
        t.measure = names::from_text(names::kMeasures, string_field(jt, "measure", where), "measure");
        t.outer_power = expression_field(jt, "outer_power", where);
        spec.terms.push_back(std::move(t));
    }
    const auto& constraints = field(doc, "constraints", "document");
    if (!constraints.is_array()) throw SpecError("field 'constraints' must be an array");
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        if (!constraints[i].is_string()) throw SpecError("constraints must be strings");
        try {
            spec.constraints.push_back(expr::Expression::parse(constraints[i].get<std::string>()));
        } catch (const ParseError& e) {
            throw ParseError("constraint " + std::to_string(i + 1) + ": " + e.message(), e.line(), e.column());
        }
    }
    const auto& sharp = field(doc, "sharp_constant", "document");
    if (!sharp.is_null()) spec.sharp_constant = expression_field(doc, "sharp_constant", "document");
    const auto& family = field(doc, "sharpness_family", "document");
    if (!family.is_null()) {
        if (!family.is_string()) throw SpecError("field 'sharpness_family' must be a string or null");
        spec.sharpness_family = family_from_string(family.get<std::string>());
    }
    check_structure(spec);
    return spec;
}

}  // namespace hypineq
