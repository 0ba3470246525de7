#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "hypineq/catalog.hpp"
#include "hypineq/profiles.hpp"
#include "hypineq/term_integral.hpp"
#include "support.hpp"

using namespace hypineq;
using hypineq::testing::for_all;
using hypineq::testing::Gen;

namespace {

Params hardy_params() {
    Params p;
    p.n = 3;
    p.alpha = 0.0;
    p.p = 2.0;
    return p;
}

/// Richardson-extrapolated central difference, O(h^4).
double richardson(const std::function<double(double)>& f, double d, double h) {
    const double coarse = (f(d + h) - f(d - h)) / (2 * h);
    const double fine = (f(d + h / 2) - f(d - h / 2)) / h;
    return (4 * fine - coarse) / 3;
}

/// Finite differences at h = 1e-4 against the analytic derivatives.
void expect_consistent_derivatives(const RadialProfile& phi, double lo, double hi, Gen& g) {
    const double h = 1e-4;
    for (int i = 0; i < 100; ++i) {
        const double d = g.uniform(lo + 2 * h, hi - 2 * h);
        // Branch points are only C^1; skip their immediate neighbourhood.
        if (std::any_of(phi.breakpoints.begin(), phi.breakpoints.end(),
                        [&](double b) { return std::abs(d - b) < 3 * h; }))
            continue;
        const double fd1 = richardson(phi.value, d, h);
        const double fd2 = richardson(phi.d1, d, h);
        EXPECT_LE(std::abs(fd1 - phi.d1(d)), 1e-6 * (1 + std::abs(phi.d1(d)))) << phi.description << " at " << d;
        EXPECT_LE(std::abs(fd2 - phi.d2(d)), 1e-6 * (1 + std::abs(phi.d2(d)))) << phi.description << " at " << d;
    }
}

}  // namespace

TEST(Profiles, DerivativeConsistencyAcrossFamilies) {
    for_all(10, 51, [](Gen& g) {
        const auto p = hardy_params();
        const double eps = g.uniform(0.02, 0.5);
        FamilyOptions opt;
        opt.seed = g.seed();
        const std::vector<RadialProfile> family{
            make_family(FamilyKind::HardyConcentration, eps, p),
            make_family(FamilyKind::RellichConcentration, eps, p),
            make_family(FamilyKind::HardyPaper, eps, p),
            make_family(FamilyKind::RellichPaper, eps, p),
            make_family(FamilyKind::Gaussian, g.log_uniform(0.1, 10.0), p),
            make_family(FamilyKind::Bump, 0.0, p, opt),
        };
        for (const auto& phi : family) {
            const double lo = phi.touches_origin() ? 0.2 : phi.support_lo;
            const double hi = std::isfinite(phi.support_hi) ? phi.support_hi : 6.0;
            expect_consistent_derivatives(phi, lo, hi, g);
        }
    });
}

TEST(Profiles, VanishesOutsideSupport) {
    const auto p = hardy_params();
    FamilyOptions opt;
    opt.seed = 3;
    for (const auto& phi : {make_family(FamilyKind::Bump, 0.0, p, opt),
                            make_family(FamilyKind::HardyConcentration, 0.1, p),
                            make_family(FamilyKind::HardyPaper, 0.1, p)}) {
        for (double d : {phi.support_hi, phi.support_hi + 0.1, phi.support_hi + 10.0}) {
            EXPECT_EQ(phi.value(d), 0.0) << phi.description;
            EXPECT_EQ(phi.d1(d), 0.0) << phi.description;
            EXPECT_EQ(phi.d2(d), 0.0) << phi.description;
        }
        if (!phi.touches_origin()) EXPECT_EQ(phi.value(0.5 * phi.support_lo), 0.0);
    }
}

TEST(Profiles, DeclaredPowerAtOriginMatchesLogLogSlope) {
    const auto p = hardy_params();
    for (const auto& phi : {make_family(FamilyKind::HardyConcentration, 0.1, p),
                            make_family(FamilyKind::RellichConcentration, 0.3, p),
                            make_family(FamilyKind::HardyPaper, 0.1, p),
                            make_family(FamilyKind::RellichPaper, 0.1, p),
                            make_family(FamilyKind::Gaussian, 2.0, p)}) {
        const double slope = (std::log(std::abs(phi.value(1e-4))) - std::log(std::abs(phi.value(1e-8)))) / std::log(1e4);
        EXPECT_NEAR(slope, phi.value_power, 1e-3) << phi.description;
    }
}

TEST(Profiles, PaperFamiliesMatchAtTheUnitSphere) {
    const auto p = hardy_params();
    const double right = std::nextafter(1.0, 2.0);
    const auto hardy = make_family(FamilyKind::HardyPaper, 0.1, p);
    EXPECT_DOUBLE_EQ(hardy.value(1.0), 1.0);
    EXPECT_NEAR(hardy.value(right), 1.0, 1e-15);

    for (double eps : {0.05, 0.1, 0.7}) {
        const auto rellich = make_family(FamilyKind::RellichPaper, eps, p);
        const double k = (3.0 - 4.0) / 2.0 + eps;
        EXPECT_DOUBLE_EQ(rellich.value(1.0), 1.0);
        EXPECT_NEAR(rellich.value(right), 1.0, 1e-15);
        EXPECT_DOUBLE_EQ(rellich.d1(1.0), -k);
        EXPECT_NEAR(rellich.d1(right), -k, 1e-14);
    }
}

TEST(Profiles, PaperFamiliesTruncateAtD) {
    const auto p = hardy_params();
    FamilyOptions opt;
    opt.D = 6.0;
    const auto phi = make_family(FamilyKind::HardyPaper, 0.1, p, opt);
    EXPECT_EQ(phi.support_hi, 6.0);
    EXPECT_EQ(phi.tail, ProfileTail::Compact);
    opt.D = std::numeric_limits<double>::infinity();
    const auto raw = make_family(FamilyKind::HardyPaper, 0.1, p, opt);
    EXPECT_EQ(raw.tail, ProfileTail::PowerLaw);
}

TEST(Profiles, GaussianTaylorDataAtOrigin) {
    const auto phi = make_family(FamilyKind::Gaussian, 1.0, hardy_params());
    EXPECT_EQ(phi.value(0.0), 1.0);
    EXPECT_EQ(phi.d1(0.0), 0.0);
    EXPECT_EQ(phi.d2(0.0), -2.0);
}

TEST(Profiles, BumpWithExplicitCenter) {
    FamilyOptions opt;
    opt.center = 1.0;
    opt.half_width = 0.5;
    const auto phi = make_family(FamilyKind::Bump, 0.0, hardy_params(), opt);
    EXPECT_DOUBLE_EQ(phi.value(1.0), std::exp(-1.0));
    EXPECT_EQ(phi.support_lo, 0.5);
    EXPECT_EQ(phi.support_hi, 1.5);
}

TEST(Profiles, SeededBumpsAreReproducibleAndStayInTheirWindow) {
    EXPECT_EQ(draw_bump(7, {0.05, 5.0}), draw_bump(7, {0.05, 5.0}));
    EXPECT_NE(draw_bump(7, {0.05, 5.0}), draw_bump(8, {0.05, 5.0}));
    for_all(200, 61, [](Gen& g) {
        const double lo = g.uniform(0.0, 2.0), hi = lo + g.uniform(0.1, 5.0);
        const auto [c, w] = draw_bump(g.seed(), {lo, hi});
        EXPECT_GT(w, 0.0);
        EXPECT_GE(c - w, lo - 1e-12);
        EXPECT_LE(c + w, hi + 1e-12);
    });
}

TEST(Profiles, BumpsRespectTheRemainderRadius) {
    Params p = hardy_params();
    p.R = 2.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        FamilyOptions opt;
        opt.seed = seed;
        EXPECT_LE(make_family(FamilyKind::Bump, 0.0, p, opt).support_hi, 0.95 * 2.0 + 1e-12);
    }
}

TEST(Profiles, ConcentrationDenominatorGrowsLikeInverseShape) {
    const auto p = hardy_params();
    const auto inst = build_terms("hardy-poincare", p);
    const auto& denominator = inst.terms[inst.main_rhs()];
    for (double eps : {0.2, 0.1, 0.05}) {
        const auto phi = make_family(FamilyKind::HardyConcentration, eps, p);
        const double mass = integrate_term(denominator, phi, SpaceModel::hyperbolic(3)).value;
        const double predicted = 1.0 / (2.0 * eps);
        EXPECT_GT(mass, 0.5 * predicted);
        EXPECT_LT(mass, 2.0 * predicted);
    }
}

TEST(Profiles, ShapeMustBePositive) {
    EXPECT_THROW(make_family(FamilyKind::Gaussian, 0.0, hardy_params()), DomainError);
    EXPECT_THROW(make_family(FamilyKind::HardyConcentration, -0.1, hardy_params()), DomainError);
    Params no_p;
    EXPECT_THROW(make_family(FamilyKind::HardyPaper, 0.1, no_p), AdmissibilityError);
    Params p1 = hardy_params();
    p1.p = 1.0;
    EXPECT_THROW(make_family(FamilyKind::HardyPaper, 0.1, p1), AdmissibilityError);
}

TEST(Profiles, CriticalExponents) {
    EXPECT_DOUBLE_EQ(critical_exponent(build_terms("hardy-poincare", hardy_params()).terms[1], 3), -1.5);
    Params r;
    r.n = 5;
    r.alpha = 1.5;
    EXPECT_DOUBLE_EQ(critical_exponent(build_terms("rellich-grad", r).terms[1], 5), -1.25);
    EXPECT_DOUBLE_EQ(critical_exponent(build_terms("hardy-lp", hardy_params()).terms[1], 3), -0.5);
    Params log_params = hardy_params();
    log_params.R = 2.0;
    const auto improved = build_terms("hardy-improved-log", log_params);
    EXPECT_THROW(critical_exponent(improved.terms.back(), 3), SpecError);
}

TEST(Profiles, GridProfileInterpolatesSamples) {
    std::vector<double> xs, ys;
    for (int i = 0; i <= 40; ++i) {
        xs.push_back(1.0 + i / 40.0);
        ys.push_back(std::sin(std::numbers::pi * (xs.back() - 1.0)));
    }
    const auto phi = make_family(FamilyKind::Grid, 0.0, hardy_params(), {.grid_d = xs, .grid_value = ys});
    for (double d : {1.1, 1.37, 1.5, 1.81}) {
        const double t = std::numbers::pi * (d - 1.0);
        EXPECT_NEAR(phi.value(d), std::sin(t), 1e-6);
        EXPECT_NEAR(phi.d1(d), std::numbers::pi * std::cos(t), 1e-4);
        EXPECT_NEAR(phi.d2(d), -std::numbers::pi * std::numbers::pi * std::sin(t), 1e-2);
    }
    EXPECT_EQ(phi.value(0.5), 0.0);
    EXPECT_EQ(phi.value(2.5), 0.0);
}

TEST(Profiles, GridProfileRejectsBadSamples) {
    const std::vector<double> six{1, 2, 3, 4, 5, 6};
    EXPECT_THROW(profiles::grid_profile(six, six), DomainError);
    std::vector<double> xs{1, 2, 3, 3, 5, 6, 7}, ys(7, 1.0);
    EXPECT_THROW(profiles::grid_profile(xs, ys), DomainError);
}

TEST(Profiles, GridFileThroughProfileSpec) {
    const auto path = std::filesystem::temp_directory_path() / "hypineq_grid_profile.txt";
    {
        std::ofstream out(path);
        out << "# d value\n";
        for (int i = 0; i <= 20; ++i) out << 0.5 + i * 0.05 << " " << std::sin(std::numbers::pi * i / 20.0) << "\n";
    }
    const auto spec = ProfileSpec::parse("grid:file=" + path.string());
    EXPECT_EQ(spec.kind, FamilyKind::Grid);
    EXPECT_EQ(spec.options.grid_d.size(), 21u);
    std::filesystem::remove(path);
}

TEST(Profiles, ProfileSpecStrings) {
    auto s = ProfileSpec::parse("bump:seed=7");
    EXPECT_EQ(s.kind, FamilyKind::Bump);
    EXPECT_EQ(s.options.seed, 7u);
    s = ProfileSpec::parse("gaussian:a=1.5");
    EXPECT_EQ(s.shape, 1.5);
    s = ProfileSpec::parse("hardy-conc:eps=0.1");
    EXPECT_EQ(s.kind, FamilyKind::HardyConcentration);
    EXPECT_EQ(s.shape, 0.1);
    s = ProfileSpec::parse("hardy-paper:eps=0.1,D=10");
    EXPECT_EQ(s.options.D, 10.0);
    EXPECT_EQ(ProfileSpec::parse("gaussian").shape, 1.0);
    EXPECT_THROW(ProfileSpec::parse("wiggle"), SpecError);
    EXPECT_THROW(ProfileSpec::parse("bump:size=2"), SpecError);
    EXPECT_THROW(ProfileSpec::parse("bump:seed"), SpecError);
    EXPECT_THROW(ProfileSpec::parse("gaussian:a=x"), SpecError);
    EXPECT_THROW(ProfileSpec::parse("grid"), SpecError);
}

TEST(Profiles, ScaledAndZero) {
    const auto phi = make_family(FamilyKind::Gaussian, 1.0, hardy_params());
    const auto big = phi.scaled(-3.0);
    EXPECT_DOUBLE_EQ(big.value(0.3), -3.0 * phi.value(0.3));
    EXPECT_DOUBLE_EQ(big.d2(0.3), -3.0 * phi.d2(0.3));
    const auto z = RadialProfile::zero();
    EXPECT_EQ(z.value(0.7), 0.0);
}
