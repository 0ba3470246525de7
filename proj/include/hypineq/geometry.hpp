#pragma once

/**
 * @file geometry.hpp
 * @brief Radial formulas of the Poincare ball model of hyperbolic space,
 *        plus a Euclidean radial model sharing the same interface.
 *
 * Every radial integral in this library is written in the geodesic distance
 * d from the origin. The measure used is dV = J(d) dd dsigma with dsigma the
 * *normalized* surface measure on the unit sphere, i.e. sphere-area factors
 * are omitted. Linear inequalities and quotients are invariant under this
 * choice; terms raised to an outer power != 1 are corrected where they are
 * assembled (see catalog.hpp).
 */

#include <cmath>
#include <concepts>
#include <span>
#include <string>

#include "hypineq/errors.hpp"

namespace hypineq {

enum class ModelKind { Hyperbolic, Euclidean };

inline std::string to_string(ModelKind k) {
    return k == ModelKind::Hyperbolic ? "hyperbolic" : "euclidean";
}

/// Radial model of the ambient space.
struct SpaceModel {
    ModelKind kind = ModelKind::Hyperbolic;
    int n = 3;

    static SpaceModel hyperbolic(int n) { return checked({ModelKind::Hyperbolic, n}); }
    static SpaceModel euclidean(int n) { return checked({ModelKind::Euclidean, n}); }

    /// Geometric constant C in Delta(rho) >= C/rho; n - 1 for both built-in models.
    double C() const noexcept { return static_cast<double>(n - 1); }

    bool operator==(const SpaceModel&) const = default;

private:
    static SpaceModel checked(SpaceModel m) {
        if (m.n < 2) throw DomainError("space dimension must be >= 2, got " + std::to_string(m.n));
        return m;
    }
};

/// A point on a ray from the origin: geodesic distance and, for the ball
/// model, the Euclidean radius r = tanh(d/2).
struct RadialPoint {
    double d = 0.0;
    double r = 0.0;
};

namespace geometry {

namespace detail {
inline void require_ball_radius(double r) {
    if (!(r >= 0.0 && r < 1.0))
        throw DomainError("ball radius must lie in [0, 1), got " + std::to_string(r));
}
inline void require_distance(double d) {
    if (!(d >= 0.0)) throw DomainError("distance must be >= 0, got " + std::to_string(d));
}
}  // namespace detail

/// lambda(r) = 2 / (1 - r^2).
inline double conformal_factor(double r) {
    detail::require_ball_radius(r);
    return 2.0 / ((1.0 - r) * (1.0 + r));
}

/// d(0, x) = 2 artanh|x| = log((1 + r)/(1 - r)).
inline double dist_from_origin(double r) {
    detail::require_ball_radius(r);
    return 2.0 * std::atanh(r);
}

inline double radius_from_dist(double d) {
    detail::require_distance(d);
    return std::tanh(0.5 * d);
}

inline RadialPoint radial_point(double d) { return {d, radius_from_dist(d)}; }

/// Geodesic distance between two points of the ball. Uses the equivalent
/// form 2 asinh(|x-y| / sqrt((1-|x|^2)(1-|y|^2))), which is accurate for
/// nearby points where the arccosh form loses half the digits.
inline double hyperbolic_distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("points have different dimensions");
    double xx = 0.0, yy = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xx += x[i] * x[i];
        yy += y[i] * y[i];
        diff += (x[i] - y[i]) * (x[i] - y[i]);
    }
    if (!(xx < 1.0) || !(yy < 1.0)) throw DomainError("point on or outside the unit sphere");
    const double denom = (1.0 - xx) * (1.0 - yy);
    return 2.0 * std::asinh(std::sqrt(diff / denom));
}

/// Radial volume density J(d): sinh^{n-1}(d) (hyperbolic) or d^{n-1} (Euclidean).
inline double volume_weight(double d, const SpaceModel& model) {
    detail::require_distance(d);
    const double base = model.kind == ModelKind::Hyperbolic ? std::sinh(d) : d;
    return std::pow(base, model.n - 1);
}

/// log J(d), finite for every d > 0 (no overflow for large d).
inline double log_volume_weight(double d, const SpaceModel& model) {
    detail::require_distance(d);
    if (model.kind == ModelKind::Euclidean) return (model.n - 1) * std::log(d);
    // log sinh d = d + log1p(-exp(-2d)) - log 2
    const double ls = d > 20.0 ? d + std::log1p(-std::exp(-2.0 * d)) - std::log(2.0) : std::log(std::sinh(d));
    return (model.n - 1) * ls;
}

/// Lebesgue density of the ball in the d variable: r^{n-1} dr/dd with
/// r = tanh(d/2), i.e. tanh^{n-1}(d/2) / lambda(tanh(d/2)). Hyperbolic only.
inline double lebesgue_radial_factor(double d, int n) {
    detail::require_distance(d);
    if (n < 2) throw DomainError("dimension must be >= 2");
    const double half = 0.5 * d;
    const double c = std::cosh(half);
    return std::pow(std::tanh(half), n - 1) / (2.0 * c * c);
}

/// k(d) in the radial Laplacian phi'' + (n-1) k(d) phi'; coth d or 1/d.
inline double mean_curvature_factor(double d, const SpaceModel& model) {
    if (!(d > 0.0)) throw DomainError("radial Laplacian is undefined at d = 0");
    return model.kind == ModelKind::Hyperbolic ? 1.0 / std::tanh(d) : 1.0 / d;
}

/// Laplace-Beltrami operator on a radial function, from its derivatives at d.
inline double radial_laplacian(double d1, double d2, double d, const SpaceModel& model) {
    return d2 + (model.n - 1) * mean_curvature_factor(d, model) * d1;
}

/// Overload for anything exposing value/d1/d2 evaluators (RadialProfile).
template <class Profile>
    requires requires(const Profile& p, double x) {
        { p.d1(x) } -> std::convertible_to<double>;
        { p.d2(x) } -> std::convertible_to<double>;
    }
double radial_laplacian(const Profile& phi, double d, const SpaceModel& model) {
    if (!(d > 0.0)) throw DomainError("radial Laplacian is undefined at d = 0");
    return radial_laplacian(phi.d1(d), phi.d2(d), d, model);
}

}  // namespace geometry
}  // namespace hypineq
