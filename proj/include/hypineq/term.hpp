#pragma once

/**
 * @file term.hpp
 * @brief Structured description of an inequality: weighted integral terms,
 *        symbolic coefficients, admissibility constraints.
 *
 * A term stands for
 *     coefficient * ( integral of d^weight_power * extra(d) * integrand(phi) dmu )^outer_power
 * where dmu is either the Riemannian volume J(d) dd or the Lebesgue measure
 * of the ball, both with normalized sphere measure.
 */

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hypineq/errors.hpp"
#include "hypineq/expr.hpp"

namespace hypineq {

enum class Side { LHS, RHS };
enum class ExtraWeight { None, InvLogSq, InvDistToRSq };
enum class IntegrandKind { AbsPhiPow, GradPow, GradSq, LaplacianSq, PhiSq, DistSqPhiSq, Dist4PhiSq };
enum class Measure { Riemannian, Lebesgue };
enum class Shape { Linear, Product };
enum class ModelConstraint { Any, HyperbolicOnly };
enum class FamilyKind { HardyPaper, HardyConcentration, RellichPaper, RellichConcentration, Gaussian, Bump, Grid };

namespace names {

template <class E>
struct Entry {
    E value;
    std::string_view text;
};

inline constexpr Entry<Side> kSides[] = {{Side::LHS, "lhs"}, {Side::RHS, "rhs"}};
inline constexpr Entry<ExtraWeight> kExtraWeights[] = {
    {ExtraWeight::None, "none"}, {ExtraWeight::InvLogSq, "inv_log_sq"}, {ExtraWeight::InvDistToRSq, "inv_dist_to_r_sq"}};
inline constexpr Entry<Measure> kMeasures[] = {{Measure::Riemannian, "riemannian"}, {Measure::Lebesgue, "lebesgue"}};
inline constexpr Entry<Shape> kShapes[] = {{Shape::Linear, "linear"}, {Shape::Product, "product"}};
inline constexpr Entry<ModelConstraint> kModels[] = {{ModelConstraint::Any, "any"},
                                                     {ModelConstraint::HyperbolicOnly, "hyperbolic"}};
inline constexpr Entry<FamilyKind> kFamilies[] = {
    {FamilyKind::HardyPaper, "hardy-paper"},
    {FamilyKind::HardyConcentration, "hardy-concentration"},
    {FamilyKind::RellichPaper, "rellich-paper"},
    {FamilyKind::RellichConcentration, "rellich-concentration"},
    {FamilyKind::Gaussian, "gaussian"},
    {FamilyKind::Bump, "bump"},
    {FamilyKind::Grid, "grid"},
};

template <class E, std::size_t N>
std::string_view to_text(const Entry<E> (&table)[N], E value) {
    for (const auto& e : table)
        if (e.value == value) return e.text;
    return "?";
}

template <class E, std::size_t N>
E from_text(const Entry<E> (&table)[N], std::string_view text, std::string_view what) {
    for (const auto& e : table)
        if (e.text == text) return e.value;
    throw SpecError("unknown " + std::string(what) + " '" + std::string(text) + "'");
}

}  // namespace names

inline std::string to_string(Side v) { return std::string(names::to_text(names::kSides, v)); }
inline std::string to_string(ExtraWeight v) { return std::string(names::to_text(names::kExtraWeights, v)); }
inline std::string to_string(Measure v) { return std::string(names::to_text(names::kMeasures, v)); }
inline std::string to_string(Shape v) { return std::string(names::to_text(names::kShapes, v)); }
inline std::string to_string(ModelConstraint v) { return std::string(names::to_text(names::kModels, v)); }
inline std::string to_string(FamilyKind v) { return std::string(names::to_text(names::kFamilies, v)); }

inline FamilyKind family_from_string(std::string_view s) { return names::from_text(names::kFamilies, s, "family"); }

/// Integrand kind plus, for the power kinds, the exponent expression.
struct IntegrandSpec {
    IntegrandKind kind = IntegrandKind::PhiSq;
    expr::Expression exponent;  ///< meaningful for AbsPhiPow and GradPow

    /// Accepts "abs_phi^EXPR", "grad^EXPR", "grad_sq", "laplacian_sq",
    /// "phi_sq", "dist_sq_phi_sq", "dist4_phi_sq".
    static IntegrandSpec parse(std::string_view text) {
        auto power = [&](std::string_view prefix, IntegrandKind kind) -> std::optional<IntegrandSpec> {
            if (text.substr(0, prefix.size()) != prefix) return std::nullopt;
            return IntegrandSpec{kind, expr::Expression::parse(text.substr(prefix.size()))};
        };
        if (auto r = power("abs_phi^", IntegrandKind::AbsPhiPow)) return *r;
        if (auto r = power("grad^", IntegrandKind::GradPow)) return *r;
        if (text == "grad_sq") return {IntegrandKind::GradSq, expr::Expression::parse("2")};
        if (text == "laplacian_sq") return {IntegrandKind::LaplacianSq, expr::Expression::parse("2")};
        if (text == "phi_sq") return {IntegrandKind::PhiSq, expr::Expression::parse("2")};
        if (text == "dist_sq_phi_sq") return {IntegrandKind::DistSqPhiSq, expr::Expression::parse("2")};
        if (text == "dist4_phi_sq") return {IntegrandKind::Dist4PhiSq, expr::Expression::parse("2")};
        throw SpecError("unknown integrand kind '" + std::string(text) + "'");
    }

    std::string text() const {
        switch (kind) {
        case IntegrandKind::AbsPhiPow: return "abs_phi^" + exponent.text();
        case IntegrandKind::GradPow: return "grad^" + exponent.text();
        case IntegrandKind::GradSq: return "grad_sq";
        case IntegrandKind::LaplacianSq: return "laplacian_sq";
        case IntegrandKind::PhiSq: return "phi_sq";
        case IntegrandKind::DistSqPhiSq: return "dist_sq_phi_sq";
        case IntegrandKind::Dist4PhiSq: return "dist4_phi_sq";
        }
        return "?";
    }

    /// Number of derivatives of phi involved: 0, 1 or 2.
    int order() const {
        switch (kind) {
        case IntegrandKind::GradPow:
        case IntegrandKind::GradSq: return 1;
        case IntegrandKind::LaplacianSq: return 2;
        default: return 0;
        }
    }

    /// Extra power of d built into the kind (d^2 phi^2, d^4 phi^2).
    double builtin_weight() const {
        if (kind == IntegrandKind::DistSqPhiSq) return 2.0;
        if (kind == IntegrandKind::Dist4PhiSq) return 4.0;
        return 0.0;
    }

    bool operator==(const IntegrandSpec& o) const { return text() == o.text(); }
};

/// One symbolic weighted integral term.
struct FunctionalTerm {
    Side side = Side::LHS;
    expr::Expression coefficient = expr::Expression::parse("1");
    expr::Expression weight_power = expr::Expression::parse("0");
    ExtraWeight extra_weight = ExtraWeight::None;
    IntegrandSpec integrand;
    Measure measure = Measure::Riemannian;
    expr::Expression outer_power = expr::Expression::parse("1");

    bool operator==(const FunctionalTerm&) const = default;
};

/// One inequality of the registry (or a user-loaded one).
struct InequalitySpec {
    std::string id;
    Shape shape = Shape::Linear;
    ModelConstraint model = ModelConstraint::Any;
    std::vector<FunctionalTerm> terms;
    std::vector<expr::Expression> constraints;
    std::optional<expr::Expression> sharp_constant;
    std::optional<FamilyKind> sharpness_family;

    bool operator==(const InequalitySpec&) const = default;
};

/// A term with every expression evaluated.
struct NumericTerm {
    Side side = Side::LHS;
    double coefficient = 1.0;
    double weight_power = 0.0;
    ExtraWeight extra_weight = ExtraWeight::None;
    double R = 0.0;  ///< radius used by the extra weight
    IntegrandKind integrand = IntegrandKind::PhiSq;
    double exponent = 2.0;
    Measure measure = Measure::Riemannian;
    double outer_power = 1.0;
    /// |S^{n-1}|^{outer_power - 1}: restores the true inequality when the
    /// integral is taken against the normalized sphere measure.
    double sphere_factor = 1.0;
    std::string label;

    double effective_coefficient() const { return coefficient * sphere_factor; }
    int order() const {
        switch (integrand) {
        case IntegrandKind::GradPow:
        case IntegrandKind::GradSq: return 1;
        case IntegrandKind::LaplacianSq: return 2;
        default: return 0;
        }
    }
};

/// An inequality instance at fixed parameters.
struct NumericInequality {
    std::string id;
    Shape shape = Shape::Linear;
    ModelConstraint model = ModelConstraint::Any;
    std::vector<NumericTerm> terms;
    std::optional<double> sharp_constant;
    std::optional<FamilyKind> sharpness_family;

    std::vector<std::size_t> indices(Side side) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < terms.size(); ++i)
            if (terms[i].side == side) out.push_back(i);
        return out;
    }
    /// First RHS term: the denominator of the quotient.
    std::size_t main_rhs() const {
        const auto r = indices(Side::RHS);
        if (r.empty()) throw SpecError("inequality '" + id + "' has no right-hand side term");
        return r.front();
    }
    /// Constant the quotient is compared with: the sharp constant if stated,
    /// otherwise the main RHS coefficient.
    double bound() const {
        return sharp_constant.value_or(terms[main_rhs()].effective_coefficient());
    }
};

}  // namespace hypineq
