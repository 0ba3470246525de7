#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "hypineq/sharpness.hpp"
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

RadialProfile bump(std::uint64_t seed, const Params& p) {
    FamilyOptions o;
    o.seed = seed;
    return make_family(FamilyKind::Bump, 0.0, p, o);
}

}  // namespace

TEST(Residual, HardyPoincareHoldsOnABump) {
    const auto p = hardy_params();
    const auto r = residual(build_terms("hardy-poincare", p), bump(1, p), SpaceModel::hyperbolic(3));
    EXPECT_GE(r.residual, 0.0);
    EXPECT_EQ(r.terms.size(), 2u);
    EXPECT_DOUBLE_EQ(r.scale, std::max(std::abs(r.terms[0].contribution), std::abs(r.terms[1].contribution)));
}

TEST(Residual, ZeroProfileGivesZeroEverywhere) {
    const auto r = residual(build_terms("hardy-poincare", hardy_params()), RadialProfile::zero(),
                            SpaceModel::hyperbolic(3));
    for (const auto& t : r.terms) EXPECT_EQ(t.integral, 0.0);
    EXPECT_EQ(r.residual, 0.0);
}

TEST(Residual, GaussianUncertaintyRegression) {
    // Frozen from tests/oracles/gaussian_uncertainty.py.
    Params p;
    p.n = 3;
    const auto r = residual(build_terms("hpw", p), make_family(FamilyKind::Gaussian, 1.0, p), SpaceModel::hyperbolic(3));
    EXPECT_NEAR(r.residual, 0.036587003935908895, 1e-10);
    EXPECT_GT(r.residual, 0.0);
}

TEST(Residual, HyperbolicOnlyEntriesRefuseTheEuclideanModel) {
    const auto p = hardy_params();
    EXPECT_THROW(residual(build_terms("hardy-poincare", p), bump(1, p), SpaceModel::euclidean(3)), AdmissibilityError);
}

TEST(Residual, RemainderWeightSingularityIsDetected) {
    Params p = hardy_params();
    p.R = 2.0;
    FamilyOptions o;
    o.center = 1.8;
    o.half_width = 0.3;
    EXPECT_THROW(residual(build_terms("hardy-improved-ball", p), make_family(FamilyKind::Bump, 0.0, p, o),
                          SpaceModel::hyperbolic(3)),
                 BoundaryWeightSingularity);
}

TEST(Residual, EveryEntryHoldsOnSeededBumps) {
    for (const auto& e : Registry::builtin().entries()) {
        Params p = e.witness;
        if (p.c) p.c = 1.0;
        const auto inst = build_terms(e.spec, p);
        const auto flags = unquantified_terms(e.spec);
        const auto model = SpaceModel::hyperbolic(p.n);
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto r = residual(inst, bump(seed, p), model, flags);
            if (r.has_unquantified_term())
                EXPECT_TRUE(r.main_holds(1e-8)) << e.spec.id << " seed " << seed;
            else
                EXPECT_TRUE(r.holds(1e-8)) << e.spec.id << " seed " << seed << " residual " << r.residual;
        }
    }
}

TEST(Quotient, ConcentrationValueMatchesOracle) {
    // Oracle: tests/oracles/concentration_quotient.py (mpmath, 40 digits).
    const auto p = hardy_params();
    const auto q = rayleigh_quotient(build_terms("hardy-poincare", p),
                                     make_family(FamilyKind::HardyConcentration, 0.1, p), SpaceModel::hyperbolic(3));
    EXPECT_NEAR(q.q, 2.8038901414163385, 1e-8);
    EXPECT_GT(q.q, 2.25);
    EXPECT_LT(q.q, 2.85);
}

TEST(Quotient, ClassicalHardyOnEuclideanBumps) {
    const auto p = hardy_params();
    const auto inst = build_terms("hardy-lp", p);
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
        EXPECT_GE(rayleigh_quotient(inst, bump(seed, p), SpaceModel::euclidean(3)).q, 0.25) << seed;
}

TEST(Quotient, HomogeneousOfDegreeZero) {
    const auto p = hardy_params();
    const auto inst = build_terms("hardy-poincare", p);
    const auto model = SpaceModel::hyperbolic(3);
    const auto phi = bump(2, p);
    const auto base = rayleigh_quotient(inst, phi, model);
    const auto scaled = rayleigh_quotient(inst, phi.scaled(7.3), model);
    EXPECT_LE(std::abs(scaled.q - base.q), base.error + scaled.error + 1e-14 * base.q);
    for_all(10, 81, [&](Gen& g) {
        const double c = g.uniform(0.1, 50.0) * (g.integer(0, 1) ? 1.0 : -1.0);
        const auto phi_g = bump(g.seed(), p);
        const auto a = rayleigh_quotient(inst, phi_g, model);
        const auto b = rayleigh_quotient(inst, phi_g.scaled(c), model);
        EXPECT_LE(std::abs(a.q - b.q), a.error + b.error + 1e-14 * a.q);
    });
}

TEST(Quotient, ZeroDenominatorIsAnError) {
    EXPECT_THROW(rayleigh_quotient(build_terms("hardy-poincare", hardy_params()), RadialProfile::zero(),
                                   SpaceModel::hyperbolic(3)),
                 NumericError);
}

TEST(Sweep, HardyPoincareConvergesMonotonically) {
    const auto p = hardy_params();
    const auto rep = sweep(build_terms("hardy-poincare", p), p, {0.2, 0.1, 0.05, 0.025}, SweepFamily::Concentration,
                           SpaceModel::hyperbolic(3));
    const std::vector<double> oracle{3.3294721189228102, 2.8038901414163385, 2.5309790580852791, 2.3915717008823704};
    ASSERT_EQ(rep.rows.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(rep.rows[i].q, oracle[i], 1e-8 * oracle[i]);
        if (i > 0) EXPECT_LE(std::abs(rep.rows[i].q - 2.25), std::abs(rep.rows[i - 1].q - 2.25));
    }
    EXPECT_TRUE(rep.bounded_below(1e-6));
    EXPECT_LT(rep.relative_gap, 0.01);
    EXPECT_DOUBLE_EQ(rep.relative_gap, std::abs(rep.extrapolated_limit - 2.25) / 2.25);
}

TEST(Sweep, RowsAreIndependentOfThreadCount) {
    const auto p = hardy_params();
    const auto inst = build_terms("hardy-poincare", p);
    ::setenv("HYPINEQ_THREADS", "1", 1);
    const auto serial = sweep(inst, p, {0.2, 0.1, 0.05}, SweepFamily::Concentration, SpaceModel::hyperbolic(3));
    ::setenv("HYPINEQ_THREADS", "4", 1);
    const auto parallel = sweep(inst, p, {0.2, 0.1, 0.05}, SweepFamily::Concentration, SpaceModel::hyperbolic(3));
    ::unsetenv("HYPINEQ_THREADS");
    for (std::size_t i = 0; i < serial.rows.size(); ++i) EXPECT_EQ(serial.rows[i].q, parallel.rows[i].q);
    EXPECT_EQ(serial.extrapolated_limit, parallel.extrapolated_limit);
}

TEST(Sweep, RejectsBadShapeLists) {
    const auto p = hardy_params();
    const auto inst = build_terms("hardy-poincare", p);
    const auto m = SpaceModel::hyperbolic(3);
    EXPECT_THROW(sweep(inst, p, {0.1, 0.2}, SweepFamily::Concentration, m), DomainError);
    EXPECT_THROW(sweep(inst, p, {0.1, -0.2}, SweepFamily::Concentration, m), DomainError);
    EXPECT_THROW(sweep(inst, p, {}, SweepFamily::Concentration, m), DomainError);
}

TEST(Sweep, UntruncatedPaperFamilyDivergesOnHyperbolicSpace) {
    const auto p = hardy_params();
    EXPECT_THROW(sweep(build_terms("hardy-poincare", p), p, {0.1}, SweepFamily::Paper, SpaceModel::hyperbolic(3),
                       quadrature::kDefaultTol, std::numeric_limits<double>::infinity()),
                 DivergentTail);
}

TEST(Sweep, GridParsing) {
    EXPECT_EQ(parse_grid("0.2,0.1,0.05"), (std::vector<double>{0.2, 0.1, 0.05}));
    const auto g = parse_grid("0.25:256:11:log");
    ASSERT_EQ(g.size(), 11u);
    EXPECT_DOUBLE_EQ(g.front(), 0.25);
    EXPECT_EQ(g.back(), 256.0);
    EXPECT_NEAR(g[5], 8.0, 1e-12);
    EXPECT_EQ(parse_grid("1:2:3:lin"), (std::vector<double>{1.0, 1.5, 2.0}));
    EXPECT_THROW(parse_grid("1:2:3"), SpecError);
    EXPECT_THROW(parse_grid("0:2:3:log"), SpecError);
    EXPECT_THROW(parse_grid("0.1,x"), SpecError);
}

TEST(Scan, UncertaintyLowerBoundForSeveralDimensions) {
    for (int n : {3, 4, 5}) {
        Params p;
        p.n = n;
        const auto rep = hpw_scan(build_terms("hpw", p), p, parse_grid("0.25:256:13:log"), SpaceModel::hyperbolic(n));
        EXPECT_TRUE(rep.bounded_below(1e-6)) << n;
        EXPECT_GE(rep.refined_q, n * n / 4.0 - 1e-6);
    }
}

TEST(Scan, LargeWidthRecoversTheEuclideanConstant) {
    Params p;
    p.n = 3;
    const auto rep = hpw_scan(build_terms("hpw", p), p, {1000.0}, SpaceModel::hyperbolic(3));
    EXPECT_LE(rep.rows[0].q, 1.01 * 2.25);
    EXPECT_GE(rep.rows[0].q, 2.25);
}

TEST(Scan, AmplitudeDoesNotChangeTheQuotient) {
    Params p;
    p.n = 3;
    const auto inst = build_terms("hpw", p);
    const auto a1 = hpw_scan(inst, p, {0.5, 2.0}, SpaceModel::hyperbolic(3), 1e-10, 1.0);
    const auto a5 = hpw_scan(inst, p, {0.5, 2.0}, SpaceModel::hyperbolic(3), 1e-10, 5.0);
    for (std::size_t i = 0; i < 2; ++i)
        EXPECT_LE(std::abs(a1.rows[i].q - a5.rows[i].q), a1.rows[i].error + a5.rows[i].error);
}

TEST(Scan, EuclideanGaussiansAttainTheBound) {
    Params p;
    p.n = 3;
    const auto rep = hpw_scan(build_terms("hpw", p), p, {0.3, 1.0, 7.0}, SpaceModel::euclidean(3));
    for (const auto& row : rep.rows) EXPECT_NEAR(row.q, 2.25, 1e-8);
}

TEST(FixedPoint, WidthMapHasNoRootAndTheIterationDiverges) {
    const auto rep = solve_paper_alpha(3);
    EXPECT_FALSE(rep.converged);
    EXPECT_FALSE(rep.note.empty());
    EXPECT_GT(rep.min_map_excess, 0.0);
    EXPECT_TRUE(std::isfinite(rep.gap));
    EXPECT_GE(rep.gap, -1e-6);
    for (std::size_t i = 1; i < rep.iterates.size(); ++i) EXPECT_GT(rep.iterates[i], rep.iterates[i - 1]);
}

TEST(FixedPoint, ConventionsAndDomain) {
    EXPECT_THROW(solve_paper_alpha(2), DomainError);
    const double plain = paper_width_map(4, 1.0, MassConvention::Plain);
    const double sphere = paper_width_map(4, 1.0, MassConvention::SphereWeighted);
    EXPECT_NE(plain, sphere);
    // m = 1 is the plain Gaussian: sqrt(pi / a) / 2.
    EXPECT_NEAR(gaussian_mass(1, 2.0), std::sqrt(std::numbers::pi / 2.0) / 2.0, 1e-12);
}
