#pragma once

/**
 * @file term_integral.hpp
 * @brief Evaluation of one weighted radial term on a profile.
 */

#include <cmath>
#include <limits>
#include <string>

#include "hypineq/errors.hpp"
#include "hypineq/geometry.hpp"
#include "hypineq/params.hpp"
#include "hypineq/profiles.hpp"
#include "hypineq/quadrature.hpp"
#include "hypineq/term.hpp"

namespace hypineq {

/// Evaluates every expression of a symbolic term at `params`. Missing
/// parameters surface as AdmissibilityError.
inline NumericTerm numeric_term(const FunctionalTerm& term, const Params& params) {
    const auto env = params.env();
    auto eval = [&env](const expr::Expression& e) {
        try {
            return e.evaluate(env);
        } catch (const expr::MissingSymbol& m) {
            throw AdmissibilityError({m.what()});
        }
    };
    NumericTerm out;
    out.side = term.side;
    out.coefficient = eval(term.coefficient);
    out.weight_power = eval(term.weight_power);
    out.extra_weight = term.extra_weight;
    if (term.extra_weight != ExtraWeight::None) {
        if (!params.R) throw AdmissibilityError({"parameter 'R' is required"});
        out.R = *params.R;
    }
    out.integrand = term.integrand.kind;
    out.exponent = eval(term.integrand.exponent);
    out.measure = term.measure;
    out.outer_power = eval(term.outer_power);
    if (out.outer_power != 1.0) out.sphere_factor = std::pow(unit_sphere_area(params.n - 1), out.outer_power - 1.0);
    out.label = to_string(term.side) + ":" + term.integrand.text();
    if (term.weight_power.text() != "0") out.label += "*d^(" + term.weight_power.text() + ")";
    if (term.extra_weight != ExtraWeight::None) out.label += "*" + to_string(term.extra_weight);
    if (term.measure == Measure::Lebesgue) out.label += "[dx]";
    if (term.outer_power.text() != "1") out.label += "^(" + term.outer_power.text() + ")";
    return out;
}

namespace term_detail {

/// The pointwise integrand value before weights: |phi|^e, |phi'|^e, (L phi)^2, ...
inline double pointwise(const NumericTerm& t, const RadialProfile& phi, double d, const SpaceModel& model) {
    switch (t.integrand) {
    case IntegrandKind::AbsPhiPow: return std::pow(std::abs(phi.value(d)), t.exponent);
    case IntegrandKind::GradPow: return std::pow(std::abs(phi.d1(d)), t.exponent);
    case IntegrandKind::GradSq: {
        const double g = phi.d1(d);
        return g * g;
    }
    case IntegrandKind::LaplacianSq: {
        const double l = geometry::radial_laplacian(phi.d1(d), phi.d2(d), d, model);
        return l * l;
    }
    case IntegrandKind::PhiSq: {
        const double v = phi.value(d);
        return v * v;
    }
    case IntegrandKind::DistSqPhiSq: {
        const double v = phi.value(d);
        return d * d * v * v;
    }
    case IntegrandKind::Dist4PhiSq: {
        const double v = d * d * phi.value(d);
        return v * v;
    }
    }
    return 0.0;
}

/// Leading power of the pointwise integrand given the profile's power
/// `value_like` for phi itself (at 0 or at infinity).
inline double integrand_power(const NumericTerm& t, double value_power, double d1_power, double laplacian_power) {
    switch (t.integrand) {
    case IntegrandKind::AbsPhiPow: return t.exponent * value_power;
    case IntegrandKind::GradPow: return t.exponent * d1_power;
    case IntegrandKind::GradSq: return 2.0 * d1_power;
    case IntegrandKind::LaplacianSq: return 2.0 * laplacian_power;
    case IntegrandKind::PhiSq: return 2.0 * value_power;
    case IntegrandKind::DistSqPhiSq: return 2.0 + 2.0 * value_power;
    case IntegrandKind::Dist4PhiSq: return 4.0 + 2.0 * value_power;
    }
    return 0.0;
}

inline double log_extra_weight(const NumericTerm& t, double d) {
    switch (t.extra_weight) {
    case ExtraWeight::None: return 0.0;
    case ExtraWeight::InvLogSq: return -2.0 * std::log(std::log(t.R / d));
    case ExtraWeight::InvDistToRSq: return -2.0 * std::log(t.R - d);
    }
    return 0.0;
}

}  // namespace term_detail

/// Integral of d^weight * extra * integrand(phi) against the term's measure,
/// raised to the outer power. The coefficient is not applied.
inline quadrature::QuadResult integrate_term(const NumericTerm& t, const RadialProfile& phi, const SpaceModel& model,
                                             double tol = quadrature::kDefaultTol) {
    using quadrature::TailClass;
    if (t.extra_weight != ExtraWeight::None && !(phi.support_hi < t.R))
        throw BoundaryWeightSingularity("profile support reaches d = R = " + std::to_string(t.R) + " where the " +
                                        to_string(t.extra_weight) + " weight is singular");
    const bool lebesgue = t.measure == Measure::Lebesgue && model.kind == ModelKind::Hyperbolic;

    quadrature::Integrand f;
    f.evaluator = [t, phi, model, lebesgue](double d) {
        const double base = term_detail::pointwise(t, phi, d, model);
        if (base == 0.0) return 0.0;
        const double log_measure =
            lebesgue ? std::log(geometry::lebesgue_radial_factor(d, model.n)) : geometry::log_volume_weight(d, model);
        const double log_weight = t.weight_power == 0.0 ? 0.0 : t.weight_power * std::log(d);
        return std::exp(std::log(base) + log_weight + log_measure + term_detail::log_extra_weight(t, d));
    };
    f.breakpoints = phi.breakpoints;
    f.length_scale = phi.length_scale;

    const double volume_power = model.n - 1.0;
    if (phi.touches_origin()) {
        f.singularity_power = t.weight_power + volume_power +
                              term_detail::integrand_power(t, phi.value_power, phi.d1_power, phi.laplacian_power);
        if (!(f.singularity_power > -1.0))
            throw NumericError("term " + t.label + " diverges at the origin for profile " + phi.description +
                               " (local power " + std::to_string(f.singularity_power) + ")");
        if (f.singularity_power > 0.0) f.singularity_power = 0.0;
    }

    double b = phi.support_hi;
    switch (phi.tail) {
    case ProfileTail::Compact: f.tail = TailClass::compact(phi.support_hi); break;
    case ProfileTail::Gaussian: f.tail = TailClass::gaussian(); break;
    case ProfileTail::PowerLaw:
        if (model.kind == ModelKind::Hyperbolic)
            f.tail = lebesgue ? TailClass::gaussian() : TailClass::exp_growth();
        else
            f.tail = TailClass::polynomial_decay(
                t.weight_power + volume_power +
                term_detail::integrand_power(t, phi.tail_power, phi.tail_power - 1.0, phi.tail_power - 2.0));
        break;
    }
    if (!std::isfinite(b)) b = std::numeric_limits<double>::infinity();

    auto r = quadrature::integrate(f, phi.support_lo, b, tol);
    if (t.outer_power != 1.0) {
        const double v = r.value;
        r.value = std::pow(v, t.outer_power);
        r.error_estimate =
            v == 0.0 ? 0.0 : std::abs(t.outer_power) * std::pow(std::abs(v), t.outer_power - 1.0) * r.error_estimate;
    }
    return r;
}

}  // namespace hypineq
