#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hypineq/geometry.hpp"
#include "hypineq/profiles.hpp"
#include "hypineq/quadrature.hpp"
#include "support.hpp"

using namespace hypineq;
using hypineq::testing::for_all;
using hypineq::testing::Gen;
using quadrature::Integrand;
using quadrature::TailClass;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

struct ClosedForm {
    std::string name;
    Integrand f;
    double a, b, exact;
};

Integrand make(std::function<double(double)> fn, TailClass tail = {}, double beta = 0.0,
               std::vector<double> breaks = {}, double scale = 1.0) {
    Integrand f;
    f.evaluator = std::move(fn);
    f.tail = tail;
    f.singularity_power = beta;
    f.breakpoints = std::move(breaks);
    f.length_scale = scale;
    return f;
}

std::vector<ClosedForm> battery() {
    const double a3 = 3.0;
    return {
        {"inverse sqrt singularity", make([](double x) { return 1.0 / std::sqrt(x); }, {}, -0.5), 0.0, 1.0, 2.0},
        {"half gaussian", make([](double x) { return std::exp(-x * x); }, TailClass::gaussian()), 0.0, kInf,
         std::sqrt(kPi) / 2.0},
        {"sine arch", make([](double x) { return std::sin(x); }), 0.0, kPi, 2.0},
        {"gaussian against sinh^2",
         make([](double x) { return std::exp(-x * x) * std::sinh(x) * std::sinh(x); }, TailClass::gaussian()), 0.0,
         kInf, std::sqrt(kPi) / 4.0 * (std::exp(1.0) - 1.0)},
        {"cubic decay", make([](double x) { return std::pow(x, -3.0); }, TailClass::polynomial_decay(-3.0)), 1.0, kInf,
         0.5},
        {"fractional power", make([](double x) { return std::pow(x, 0.3); }, {}, 0.3), 0.0, 1.0, 1.0 / 1.3},
        {"quartic", make([](double x) { return x * x * x * x; }), 0.0, 2.0, 32.0 / 5.0},
        {"second gaussian moment", make([a3](double x) { return x * x * std::exp(-a3 * x * x); }, TailClass::gaussian(),
                                        0.0, {}, 1.0 / std::sqrt(a3)),
         0.0, kInf, std::sqrt(kPi) / (4.0 * std::pow(a3, 1.5))},
        {"arctan on unit interval", make([](double x) { return 1.0 / (1.0 + x * x); }), 0.0, 1.0, kPi / 4.0},
        {"arctan tail", make([](double x) { return 1.0 / (1.0 + x * x); }, TailClass::polynomial_decay(-2.0)), 1.0,
         kInf, kPi / 4.0},
        {"kink at a breakpoint", make([](double x) { return std::abs(x - 1.0); }, {}, 0.0, {1.0}), 0.0, 2.0, 1.0},
    };
}

}  // namespace

TEST(Quadrature, ClosedFormBattery) {
    for (const auto& c : battery()) {
        const auto r = quadrature::integrate(c.f, c.a, c.b, 1e-10);
        EXPECT_TRUE(r.converged) << c.name;
        EXPECT_LE(std::abs(r.value - c.exact), 1e-9 * std::abs(c.exact)) << c.name;
    }
}

TEST(Quadrature, ErrorEstimateIsHonestAndShrinks) {
    for (const auto& c : battery()) {
        const auto coarse = quadrature::integrate(c.f, c.a, c.b, 1e-6);
        const auto fine = quadrature::integrate(c.f, c.a, c.b, 5e-7);
        EXPECT_LE(std::abs(coarse.value - c.exact), 1e-6 * std::abs(c.exact) + coarse.error_estimate) << c.name;
        EXPECT_LE(std::abs(fine.value - c.exact), 5e-7 * std::abs(c.exact) + fine.error_estimate) << c.name;
        EXPECT_LE(std::abs(fine.value - coarse.value), 2e-6 * std::abs(c.exact)) << c.name;
    }
}

TEST(Quadrature, CompactSupportStopsAtTheEnd) {
    auto f = make([](double x) { return x < 2.0 ? 1.0 : 1e300; }, TailClass::compact(2.0));
    EXPECT_NEAR(quadrature::integrate(f, 0.0, kInf).value, 2.0, 1e-12);
    EXPECT_EQ(quadrature::integrate(f, 3.0, 4.0).value, 0.0);
}

TEST(Quadrature, ExponentialGrowthIsReportedAsDivergent) {
    auto f = make([](double x) { return std::exp(x); }, TailClass::exp_growth());
    EXPECT_THROW(quadrature::integrate(f, 0.0, kInf), DivergentTail);
    auto slow = make([](double x) { return 1.0 / x; }, TailClass::polynomial_decay(-1.0));
    EXPECT_THROW(quadrature::integrate(slow, 1.0, kInf), DivergentTail);
}

TEST(Quadrature, SubdivisionBudgetExhaustionCarriesBestEstimate) {
    auto f = make([](double x) { return std::sin(1.0 / x); });
    const auto r = quadrature::try_integrate(f, 1e-4, 1.0, 1e-12, 4);
    EXPECT_FALSE(r.converged);
    try {
        quadrature::integrate(f, 1e-4, 1.0, 1e-12, 4);
        FAIL() << "expected NonConvergence";
    } catch (const NonConvergence& e) {
        EXPECT_TRUE(std::isfinite(e.best_estimate()));
        EXPECT_GT(e.error_estimate(), 0.0);
    }
}

TEST(Quadrature, RejectsBadArguments) {
    auto f = make([](double) { return 1.0; });
    EXPECT_THROW(quadrature::integrate(f, 1.0, 0.0), DomainError);
    EXPECT_THROW(quadrature::integrate(f, 0.0, 1.0, 0.0), DomainError);
}

TEST(Quadrature, Linearity) {
    for_all(20, 21, [](Gen& g) {
        const double a = g.uniform(-5.0, 5.0), b = g.uniform(-5.0, 5.0);
        const double s = g.uniform(0.5, 3.0), k = g.uniform(0.1, 4.0);
        auto f = [s](double x) { return std::exp(-s * x * x) * std::sinh(x) * std::sinh(x); };
        auto h = [k](double x) { return std::exp(-x * x) * std::cos(k * x); };
        const auto tail = TailClass::gaussian();
        const auto If = quadrature::integrate(make(f, tail), 0.0, kInf, 1e-11);
        const auto Ih = quadrature::integrate(make(h, tail), 0.0, kInf, 1e-11);
        const auto Ic = quadrature::integrate(make([&](double x) { return a * f(x) + b * h(x); }, tail), 0.0, kInf, 1e-11);
        const double combined = std::abs(a) * If.error_estimate + std::abs(b) * Ih.error_estimate + Ic.error_estimate;
        EXPECT_LE(std::abs(Ic.value - (a * If.value + b * Ih.value)), combined + 1e-13);
    });
}

TEST(Quadrature, GreenIdentityOnRandomBumpPairs) {
    // For radial phi, psi with compact support in (0, inf):
    //   int phi' psi' J dd = - int phi Lap(psi) J dd.
    for_all(10, 31, [](Gen& g) {
        const int n = g.integer(2, 7);
        const auto model = g.integer(0, 1) ? SpaceModel::hyperbolic(n) : SpaceModel::euclidean(n);
        FamilyOptions o1, o2;
        o1.center = g.uniform(0.6, 3.0);
        o1.half_width = g.uniform(0.2, 0.5);
        o2.center = *o1.center + g.uniform(-0.3, 0.3);
        o2.half_width = g.uniform(0.2, 0.5);
        Params p;
        p.n = n;
        const auto phi = make_family(FamilyKind::Bump, 0.0, p, o1);
        const auto psi = make_family(FamilyKind::Bump, 0.0, p, o2);
        const double lo = std::max(phi.support_lo, psi.support_lo), hi = std::min(phi.support_hi, psi.support_hi);
        ASSERT_LT(lo, hi);
        auto lhs_f = make([&](double d) { return phi.d1(d) * psi.d1(d) * geometry::volume_weight(d, model); });
        auto rhs_f = make([&](double d) {
            return -phi.value(d) * psi.laplacian(d, model) * geometry::volume_weight(d, model);
        });
        lhs_f.breakpoints = rhs_f.breakpoints = {*o1.center, *o2.center};
        lhs_f.breakpoints.erase(std::remove_if(lhs_f.breakpoints.begin(), lhs_f.breakpoints.end(),
                                               [&](double x) { return !(x > lo && x < hi); }),
                                lhs_f.breakpoints.end());
        rhs_f.breakpoints = lhs_f.breakpoints;
        const auto L = quadrature::integrate(lhs_f, lo, hi, 1e-11);
        const auto R = quadrature::integrate(rhs_f, lo, hi, 1e-11);
        const double scale = std::max(std::abs(L.value), std::abs(R.value));
        EXPECT_LE(std::abs(L.value - R.value), L.error_estimate + R.error_estimate + 1e-12 * std::max(1.0, scale));
    });
}
