#pragma once

/**
 * @file sharpness.hpp
 * @brief Residuals, Rayleigh quotients, epsilon sweeps, Gaussian width
 *        scans and the Gaussian-width fixed point.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hypineq/catalog.hpp"
#include "hypineq/errors.hpp"
#include "hypineq/geometry.hpp"
#include "hypineq/parallel.hpp"
#include "hypineq/profiles.hpp"
#include "hypineq/quadrature.hpp"
#include "hypineq/term_integral.hpp"

namespace hypineq {

inline void require_model(const NumericInequality& inst, const SpaceModel& model) {
    if (inst.model == ModelConstraint::HyperbolicOnly && model.kind != ModelKind::Hyperbolic)
        throw AdmissibilityError({"inequality '" + inst.id + "' is stated on hyperbolic space only"});
}

struct TermValue {
    std::string label;
    Side side = Side::LHS;
    double coefficient = 1.0;  ///< effective coefficient (sphere factor included)
    double integral = 0.0;     ///< outer power applied, coefficient not applied
    double error = 0.0;
    double contribution = 0.0;  ///< coefficient * integral
    bool unquantified = false;  ///< coefficient depends on the user constant c
};

struct ResidualReport {
    std::string id;
    std::vector<TermValue> terms;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    /// LHS minus the main RHS term only.
    double main_residual = 0.0;
    double scale = 0.0;
    double error = 0.0;

    bool holds(double rel_tol) const { return residual >= -rel_tol * scale; }
    bool main_holds(double rel_tol) const { return main_residual >= -rel_tol * scale; }
    bool has_unquantified_term() const {
        return std::any_of(terms.begin(), terms.end(), [](const TermValue& t) { return t.unquantified; });
    }
};

namespace sharpness_detail {

inline std::vector<quadrature::QuadResult> integrate_all(const NumericInequality& inst, const RadialProfile& phi,
                                                         const SpaceModel& model, double tol) {
    std::vector<quadrature::QuadResult> out;
    out.reserve(inst.terms.size());
    for (const auto& t : inst.terms) out.push_back(integrate_term(t, phi, model, tol));
    return out;
}

/// Least-squares line through (x, y); returns the intercept.
inline double linear_intercept(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t m = x.size();
    if (m == 0) return std::numeric_limits<double>::quiet_NaN();
    if (m == 1) return y[0];
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = m * sxx - sx * sx;
    const double slope = (m * sxy - sx * sy) / denom;
    return (sy - slope * sx) / m;
}

}  // namespace sharpness_detail

/// Evaluates every term of `inst` on phi.
inline ResidualReport residual(const NumericInequality& inst, const RadialProfile& phi, const SpaceModel& model,
                               const std::vector<bool>& unquantified = {}, double tol = quadrature::kDefaultTol) {
    require_model(inst, model);
    const auto values = sharpness_detail::integrate_all(inst, phi, model, tol);
    ResidualReport r;
    r.id = inst.id;
    for (std::size_t i = 0; i < inst.terms.size(); ++i) {
        const auto& t = inst.terms[i];
        TermValue v;
        v.label = t.label;
        v.side = t.side;
        v.coefficient = t.effective_coefficient();
        v.integral = values[i].value;
        v.error = values[i].error_estimate;
        v.contribution = v.coefficient * v.integral;
        v.unquantified = i < unquantified.size() && unquantified[i];
        r.scale = std::max(r.scale, std::abs(v.contribution));
        r.terms.push_back(std::move(v));
    }
    const std::size_t main = inst.main_rhs();
    if (inst.shape == Shape::Linear) {
        for (const auto& v : r.terms) {
            (v.side == Side::LHS ? r.lhs : r.rhs) += v.contribution;
            r.error += v.coefficient * v.error;
        }
        r.main_residual = r.lhs - r.terms[main].contribution;
    } else {
        const auto lhs_idx = inst.indices(Side::LHS);
        const auto& a = r.terms[lhs_idx[0]];
        const auto& b = r.terms[lhs_idx[1]];
        const auto& c = r.terms[main];
        r.lhs = a.contribution * b.contribution;
        r.rhs = c.coefficient * c.integral * c.integral;
        r.error = a.coefficient * b.coefficient * (a.error * std::abs(b.integral) + b.error * std::abs(a.integral)) +
                  2.0 * c.coefficient * std::abs(c.integral) * c.error;
        r.scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
        r.main_residual = r.lhs - r.rhs;
    }
    r.residual = r.lhs - r.rhs;
    return r;
}

/// Flags the terms whose symbolic coefficient references the user constant c.
inline std::vector<bool> unquantified_terms(const InequalitySpec& spec) {
    std::vector<bool> out;
    for (const auto& t : spec.terms) out.push_back(t.coefficient.symbols().count("c") > 0);
    return out;
}

inline ResidualReport residual(const InequalitySpec& spec, const Params& params, const RadialProfile& phi,
                               const SpaceModel& model, double tol = quadrature::kDefaultTol) {
    return residual(build_terms(spec, params), phi, model, unquantified_terms(spec), tol);
}

struct QuotientValue {
    double q = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    double error = 0.0;
};

/// LHS functional over the main RHS integral; T1 T2 / T3^2 for products.
inline QuotientValue rayleigh_quotient(const NumericInequality& inst, const RadialProfile& phi,
                                       const SpaceModel& model, double tol = quadrature::kDefaultTol) {
    require_model(inst, model);
    const auto values = sharpness_detail::integrate_all(inst, phi, model, tol);
    const std::size_t main = inst.main_rhs();
    QuotientValue out;
    double rel = 0.0;
    if (inst.shape == Shape::Linear) {
        double num_err = 0.0;
        for (std::size_t i : inst.indices(Side::LHS)) {
            out.numerator += inst.terms[i].effective_coefficient() * values[i].value;
            num_err += inst.terms[i].effective_coefficient() * values[i].error_estimate;
        }
        out.denominator = values[main].value;
        if (out.numerator != 0.0) rel += num_err / std::abs(out.numerator);
        if (out.denominator != 0.0) rel += values[main].error_estimate / std::abs(out.denominator);
    } else {
        const auto lhs = inst.indices(Side::LHS);
        const auto& a = values[lhs[0]];
        const auto& b = values[lhs[1]];
        out.numerator = inst.terms[lhs[0]].effective_coefficient() * a.value * inst.terms[lhs[1]].effective_coefficient() *
                        b.value;
        out.denominator = values[main].value * values[main].value;
        if (a.value != 0.0) rel += a.error_estimate / std::abs(a.value);
        if (b.value != 0.0) rel += b.error_estimate / std::abs(b.value);
        if (values[main].value != 0.0) rel += 2.0 * values[main].error_estimate / std::abs(values[main].value);
    }
    if (!(out.denominator > 0.0)) throw NumericError("quotient denominator is zero for " + phi.description);
    out.q = out.numerator / out.denominator;
    out.error = std::abs(out.q) * rel;
    return out;
}

struct SweepRow {
    double shape = 0.0;
    double q = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    double error = 0.0;
};

struct SweepReport {
    std::string id;
    Params params;
    std::string family;
    std::string model;
    std::vector<SweepRow> rows;
    double extrapolated_limit = std::numeric_limits<double>::quiet_NaN();
    double sharp_constant = std::numeric_limits<double>::quiet_NaN();
    double relative_gap = std::numeric_limits<double>::quiet_NaN();

    /// Every row satisfies Q >= sharp - slack.
    bool bounded_below(double slack) const {
        return std::all_of(rows.begin(), rows.end(), [&](const SweepRow& r) { return r.q >= sharp_constant - slack; });
    }
};

enum class SweepFamily { Concentration, Paper, Gaussian };

inline SweepFamily sweep_family_from_string(const std::string& s) {
    if (s == "concentration") return SweepFamily::Concentration;
    if (s == "paper") return SweepFamily::Paper;
    if (s == "gaussian") return SweepFamily::Gaussian;
    throw SpecError("unknown sweep family '" + s + "' (expected concentration, paper or gaussian)");
}

/// Profile used at shape parameter `shape` of a sweep.
inline RadialProfile sweep_profile(const NumericInequality& inst, const Params& params, SweepFamily family,
                                   double shape, double truncation = 10.0) {
    const FamilyKind target = inst.sharpness_family.value_or(FamilyKind::HardyConcentration);
    const bool rellich = target == FamilyKind::RellichConcentration || target == FamilyKind::RellichPaper;
    FamilyOptions options;
    options.D = truncation;
    switch (family) {
    case SweepFamily::Concentration:
        options.base_exponent = critical_exponent(inst.terms[inst.main_rhs()], params.n);
        return make_family(rellich ? FamilyKind::RellichConcentration : FamilyKind::HardyConcentration, shape, params,
                           options);
    case SweepFamily::Paper:
        return make_family(rellich ? FamilyKind::RellichPaper : FamilyKind::HardyPaper, shape, params, options);
    case SweepFamily::Gaussian:
        return make_family(FamilyKind::Gaussian, shape, params, options);
    }
    throw DomainError("unknown sweep family");
}

/// Quotients along a strictly decreasing list of shape parameters, with the
/// limit extrapolated linearly from the last three rows.
inline SweepReport sweep(const NumericInequality& inst, const Params& params, const std::vector<double>& eps_list,
                         SweepFamily family, const SpaceModel& model, double tol = quadrature::kDefaultTol,
                         double truncation = 10.0) {
    require_model(inst, model);
    if (eps_list.empty()) throw DomainError("epsilon list is empty");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0)) throw DomainError("epsilon values must be positive");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw DomainError("epsilon list must be strictly decreasing");
    }
    SweepReport report;
    report.id = inst.id;
    report.params = params;
    report.family = family == SweepFamily::Concentration ? "concentration"
                    : family == SweepFamily::Paper       ? "paper"
                                                         : "gaussian";
    report.model = to_string(model.kind);
    report.rows.resize(eps_list.size());
    parallel_for(eps_list.size(), [&](std::size_t i) {
        const auto phi = sweep_profile(inst, params, family, eps_list[i], truncation);
        const auto q = rayleigh_quotient(inst, phi, model, tol);
        report.rows[i] = {eps_list[i], q.q, q.numerator, q.denominator, q.error};
    });
    const std::size_t first = eps_list.size() > 3 ? eps_list.size() - 3 : 0;
    std::vector<double> xs, ys;
    for (std::size_t i = first; i < report.rows.size(); ++i) {
        xs.push_back(report.rows[i].shape);
        ys.push_back(report.rows[i].q);
    }
    report.extrapolated_limit = sharpness_detail::linear_intercept(xs, ys);
    report.sharp_constant = inst.bound();
    report.relative_gap = std::abs(report.extrapolated_limit - report.sharp_constant) / std::abs(report.sharp_constant);
    return report;
}

// ---------------------------------------------------------------------------
// Gaussian scans

struct ScanReport : SweepReport {
    std::size_t min_index = 0;
    double refined_a = std::numeric_limits<double>::quiet_NaN();
    double refined_q = std::numeric_limits<double>::quiet_NaN();
    /// Q at the largest a divided by the bound.
    double large_a_ratio = std::numeric_limits<double>::quiet_NaN();
};

/// Parses "0.25:256:25:log" (or ":lin") or a comma list.
inline std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    auto number = [](const std::string& s) {
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw SpecError("not a number: '" + s + "'");
        }
        if (used != s.size()) throw SpecError("not a number: '" + s + "'");
        return v;
    };
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        for (;;) {
            const auto pos = text.find(':', start);
            parts.push_back(text.substr(start, pos - start));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        if (parts.size() != 4 || (parts[3] != "log" && parts[3] != "lin"))
            throw SpecError("range must be start:stop:count:log or start:stop:count:lin");
        const double a = number(parts[0]), b = number(parts[1]);
        const double count = number(parts[2]);
        if (count < 1 || count != std::floor(count)) throw SpecError("range count must be a positive integer");
        const auto m = static_cast<std::size_t>(count);
        const bool log = parts[3] == "log";
        if (log && !(a > 0.0 && b > 0.0)) throw SpecError("log range needs positive endpoints");
        for (std::size_t i = 0; i < m; ++i) {
            const double t = m == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(m - 1);
            out.push_back(log ? std::exp(std::log(a) + t * (std::log(b) - std::log(a))) : a + t * (b - a));
        }
        if (m > 1) out.back() = b;
        return out;
    }
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(',', start);
        out.push_back(number(text.substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

/// Q(a) for Gaussians A exp(-a d^2) over a positive grid, with a
/// golden-section refinement in log a around the grid minimum.
inline ScanReport hpw_scan(const NumericInequality& inst, const Params& params, const std::vector<double>& a_grid,
                           const SpaceModel& model, double tol = quadrature::kDefaultTol, double amplitude = 1.0) {
    require_model(inst, model);
    if (a_grid.empty()) throw DomainError("a-grid is empty");
    for (double a : a_grid)
        if (!(a > 0.0)) throw DomainError("a-grid values must be positive");
    ScanReport report;
    report.id = inst.id;
    report.params = params;
    report.family = "gaussian";
    report.model = to_string(model.kind);
    report.rows.resize(a_grid.size());
    FamilyOptions options;
    options.amplitude = amplitude;
    auto quotient = [&](double a) {
        return rayleigh_quotient(inst, make_family(FamilyKind::Gaussian, a, params, options), model, tol);
    };
    parallel_for(a_grid.size(), [&](std::size_t i) {
        const auto q = quotient(a_grid[i]);
        report.rows[i] = {a_grid[i], q.q, q.numerator, q.denominator, q.error};
    });
    report.sharp_constant = inst.bound();
    for (std::size_t i = 1; i < report.rows.size(); ++i)
        if (report.rows[i].q < report.rows[report.min_index].q) report.min_index = i;
    report.large_a_ratio = report.rows.back().q / report.sharp_constant;

    // Golden section on log a between the neighbours of the grid minimum.
    const std::size_t k = report.min_index;
    double lo = std::log(report.rows[k > 0 ? k - 1 : k].shape);
    double hi = std::log(report.rows[k + 1 < report.rows.size() ? k + 1 : k].shape);
    report.refined_a = report.rows[k].shape;
    report.refined_q = report.rows[k].q;
    if (hi > lo) {
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        double f1 = quotient(std::exp(x1)).q, f2 = quotient(std::exp(x2)).q;
        for (int it = 0; it < 40 && hi - lo > 1e-6; ++it) {
            if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = quotient(std::exp(x1)).q;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = quotient(std::exp(x2)).q;
            }
        }
        const double best = f1 < f2 ? f1 : f2;
        if (best < report.refined_q) {
            report.refined_q = best;
            report.refined_a = std::exp(f1 < f2 ? x1 : x2);
        }
    }
    report.extrapolated_limit = report.refined_q;
    report.relative_gap = std::abs(report.refined_q - report.sharp_constant) / std::abs(report.sharp_constant);
    return report;
}

// ---------------------------------------------------------------------------
// Gaussian-width fixed point

/// How the ratio C_{n-2}/C_n of Gaussian masses is read.
enum class MassConvention {
    /// I_m(a) = int_0^inf exp(-a d^2) sinh^{m-1}(d) dd, sphere factors dropped.
    Plain,
    /// |S^{m-1}| I_m(a): full volume integrals over H^m.
    SphereWeighted,
};

/// Gaussian mass I_m(a) in the plain convention (m >= 1; sinh^0 = 1).
inline double gaussian_mass(int m, double a, double tol = 1e-12) {
    if (m < 1) throw DomainError("Gaussian mass needs m >= 1");
    quadrature::Integrand f;
    f.evaluator = [m, a](double d) {
        if (m == 1) return std::exp(-a * d * d);
        return std::exp(-a * d * d + geometry::log_volume_weight(d, SpaceModel{ModelKind::Hyperbolic, m}));
    };
    f.tail = quadrature::TailClass::gaussian();
    f.length_scale = 1.0 / std::sqrt(a);
    return quadrature::integrate(f, 0.0, std::numeric_limits<double>::infinity(), tol).value;
}

struct FixedPointReport {
    int n = 3;
    MassConvention convention = MassConvention::Plain;
    bool converged = false;
    int iterations = 0;
    std::vector<double> iterates;
    /// Fixed point when converged, otherwise the last finite iterate.
    double width = std::numeric_limits<double>::quiet_NaN();
    double last_step = std::numeric_limits<double>::quiet_NaN();
    /// HPW quotient of the Gaussian at `width`, and its gap to n^2/4.
    double quotient = std::numeric_limits<double>::quiet_NaN();
    double bound = std::numeric_limits<double>::quiet_NaN();
    double gap = std::numeric_limits<double>::quiet_NaN();
    /// min over a log grid on [1e-2, 1e2] of F(a) - a; positive means no root there.
    double min_map_excess = std::numeric_limits<double>::quiet_NaN();
    double min_map_excess_at = std::numeric_limits<double>::quiet_NaN();
    std::string note;
};

/// The width map a -> ((n-1)/(n-2)) (n - 1 + 2 pi C_{n-2}(a) / C_n(a)).
inline double paper_width_map(int n, double a, MassConvention convention) {
    double ratio = gaussian_mass(n - 2, a) / gaussian_mass(n, a);
    if (convention == MassConvention::SphereWeighted) ratio *= unit_sphere_area(n - 3) / unit_sphere_area(n - 1);
    return (n - 1.0) / (n - 2.0) * (n - 1.0 + 2.0 * std::numbers::pi * ratio);
}

inline FixedPointReport solve_paper_alpha(int n, MassConvention convention = MassConvention::Plain,
                                          int max_iterations = 200, double start = 1.0, double step_tol = 1e-10,
                                          double divergence_cap = 1e6) {
    if (n <= 2) throw DomainError("the Gaussian-width fixed point needs n > 2");
    if (convention == MassConvention::SphereWeighted && n < 3) throw DomainError("sphere-weighted masses need n >= 3");
    FixedPointReport rep;
    rep.n = n;
    rep.convention = convention;
    double a = start;
    rep.iterates.push_back(a);
    for (int k = 0; k < max_iterations; ++k) {
        const double next = paper_width_map(n, a, convention);
        rep.iterations = k + 1;
        if (!std::isfinite(next) || next > divergence_cap) {
            rep.note = "iteration diverged: a grows past " + std::to_string(divergence_cap) + " after " +
                       std::to_string(k + 1) + " steps";
            break;
        }
        rep.last_step = std::abs(next - a);
        a = next;
        rep.iterates.push_back(a);
        if (rep.last_step < step_tol * std::max(1.0, a)) {
            rep.converged = true;
            break;
        }
    }
    if (!rep.converged && rep.note.empty()) rep.note = "no convergence after " + std::to_string(max_iterations) + " steps";
    rep.width = a;

    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 40; ++i) {
        const double x = std::pow(10.0, -2.0 + 4.0 * i / 40.0);
        const double excess = paper_width_map(n, x, convention) - x;
        if (excess < best) {
            best = excess;
            rep.min_map_excess_at = x;
        }
    }
    rep.min_map_excess = best;

    Params p;
    p.n = n;
    const auto inst = build_terms("hpw", p);
    const auto q = rayleigh_quotient(inst, make_family(FamilyKind::Gaussian, rep.width, p), SpaceModel::hyperbolic(n));
    rep.quotient = q.q;
    rep.bound = inst.bound();
    rep.gap = q.q - rep.bound;
    return rep;
}

}  // namespace hypineq
