#include <array>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "hypineq/geometry.hpp"
#include "hypineq/quadrature.hpp"
#include "support.hpp"

using namespace hypineq;
using hypineq::testing::for_all;
using hypineq::testing::Gen;

TEST(Geometry, ConformalFactorAtOrigin) { EXPECT_DOUBLE_EQ(geometry::conformal_factor(0.0), 2.0); }

TEST(Geometry, DistanceRadiusRoundTrip) {
    for_all(200, 11, [](Gen& g) {
        const double r = g.uniform(0.0, 0.99);
        EXPECT_NEAR(geometry::radius_from_dist(geometry::dist_from_origin(r)), r, 1e-12);
        const double d = g.uniform(0.0, 5.0);
        EXPECT_NEAR(geometry::dist_from_origin(geometry::radius_from_dist(d)), d, 1e-12 * std::max(1.0, d));
    });
}

TEST(Geometry, RadialPointCarriesBothCoordinates) {
    const auto p = geometry::radial_point(1.0);
    EXPECT_DOUBLE_EQ(p.d, 1.0);
    EXPECT_DOUBLE_EQ(p.r, std::tanh(0.5));
}

TEST(Geometry, PointDistanceMatchesRadialDistance) {
    for_all(100, 12, [](Gen& g) {
        const double r = g.uniform(0.0, 0.95);
        const double t = g.uniform(0.0, 2.0 * std::numbers::pi);
        const std::array<double, 2> x{r * std::cos(t), r * std::sin(t)};
        const std::array<double, 2> origin{0.0, 0.0};
        EXPECT_NEAR(geometry::hyperbolic_distance(x, origin), geometry::dist_from_origin(r), 1e-12);
    });
}

TEST(Geometry, DistanceIsAMetric) {
    auto point = [](Gen& g) {
        std::array<double, 3> p{};
        do {
            for (auto& c : p) c = g.uniform(-0.9, 0.9);
        } while (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] >= 0.81);
        return p;
    };
    for_all(200, 13, [&](Gen& g) {
        const auto x = point(g), y = point(g), z = point(g);
        const double xy = geometry::hyperbolic_distance(x, y);
        EXPECT_DOUBLE_EQ(xy, geometry::hyperbolic_distance(y, x));
        EXPECT_EQ(geometry::hyperbolic_distance(x, x), 0.0);
        EXPECT_LE(xy, geometry::hyperbolic_distance(x, z) + geometry::hyperbolic_distance(z, y) + 1e-12);
    });
}

TEST(Geometry, NearbyPointsKeepRelativeAccuracy) {
    // For x close to y the distance is lambda(r) |x - y| to first order.
    const std::array<double, 1> x{0.5}, y{0.5 + 1e-9};
    EXPECT_NEAR(geometry::hyperbolic_distance(x, y) / (geometry::conformal_factor(0.5) * 1e-9), 1.0, 1e-6);
}

TEST(Geometry, VolumeWeightMatchesItsLogarithm) {
    for_all(100, 14, [](Gen& g) {
        const int n = g.integer(2, 9);
        const double d = g.uniform(1e-3, 30.0);
        for (const auto m : {SpaceModel::hyperbolic(n), SpaceModel::euclidean(n)}) {
            const double w = geometry::volume_weight(d, m);
            EXPECT_NEAR(std::exp(geometry::log_volume_weight(d, m)) / w, 1.0, 1e-12);
        }
    });
}

TEST(Geometry, LogVolumeWeightStaysFiniteFarOut) {
    const double lw = geometry::log_volume_weight(2000.0, SpaceModel::hyperbolic(5));
    EXPECT_TRUE(std::isfinite(lw));
    EXPECT_NEAR(lw, 4.0 * (2000.0 - std::log(2.0)), 1e-9);
}

TEST(Geometry, LebesgueFactorIntegratesToBallVolumeFraction) {
    // int_0^inf tanh^{n-1}(d/2) / (2 cosh^2(d/2)) dd = int_0^1 r^{n-1} dr = 1/n.
    for (int n : {2, 3, 5, 8}) {
        quadrature::Integrand f;
        f.evaluator = [n](double d) { return geometry::lebesgue_radial_factor(d, n); };
        f.tail = quadrature::TailClass::gaussian();  // decays like e^{-d}, log-concave far out
        const auto r = quadrature::integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-12);
        EXPECT_NEAR(r.value, 1.0 / n, 1e-10) << "n = " << n;
    }
}

TEST(Geometry, RadialLaplacianOfKnownFunctions) {
    // Euclidean: Lap(d^2) = 2n. Hyperbolic: Lap(cosh d) = n cosh d.
    for_all(50, 15, [](Gen& g) {
        const int n = g.integer(2, 9);
        const double d = g.uniform(0.05, 8.0);
        EXPECT_NEAR(geometry::radial_laplacian(2.0 * d, 2.0, d, SpaceModel::euclidean(n)), 2.0 * n, 1e-12);
        EXPECT_NEAR(geometry::radial_laplacian(std::sinh(d), std::cosh(d), d, SpaceModel::hyperbolic(n)) /
                        (n * std::cosh(d)),
                    1.0, 1e-12);
    });
}

TEST(Geometry, RejectsInvalidInput) {
    EXPECT_THROW(geometry::conformal_factor(1.0), DomainError);
    EXPECT_THROW(geometry::dist_from_origin(-0.1), DomainError);
    EXPECT_THROW(geometry::radius_from_dist(-1.0), DomainError);
    EXPECT_THROW(geometry::mean_curvature_factor(0.0, SpaceModel::hyperbolic(3)), DomainError);
    EXPECT_THROW(SpaceModel::hyperbolic(1), DomainError);
    const std::array<double, 2> a{0.0, 0.0};
    const std::array<double, 3> b{0.0, 0.0, 0.0};
    EXPECT_THROW(geometry::hyperbolic_distance(a, b), DomainError);
}
