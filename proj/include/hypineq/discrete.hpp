#pragma once

/**
 * @file discrete.hpp
 * @brief Discrete minimization of a quadratic Rayleigh quotient on a
 *        log-spaced Dirichlet grid: A v = lambda B v.
 *
 * First-order and mass forms use piecewise-linear elements; a Laplacian
 * form uses the nodal second-order difference operator L and A = L^T W L.
 * The smallest eigenvalue comes from shift-invert inverse iteration and is
 * certified with Sylvester inertia counts of LDL^T factorizations.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <boost/math/quadrature/gauss.hpp>

#include "hypineq/catalog.hpp"
#include "hypineq/errors.hpp"
#include "hypineq/geometry.hpp"
#include "hypineq/sharpness.hpp"

namespace hypineq {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct DiscreteGrid {
    double delta = 1e-3;
    double D = 10.0;
    std::size_t points = 2000;
};

struct Forms {
    SparseMatrix A;  ///< LHS quadratic form on interior nodes
    SparseMatrix B;  ///< main RHS quadratic form on interior nodes
    std::vector<double> nodes;
};

struct EigenResult {
    double lambda = std::numeric_limits<double>::quiet_NaN();
    Eigen::VectorXd vector;
    int iterations = 0;
    bool certified = false;
};

struct DiscreteResult {
    std::string id;
    DiscreteGrid grid;
    double lambda_min = std::numeric_limits<double>::quiet_NaN();
    /// Same problem with delta / 10, NaN when not requested.
    double lambda_delta_tenth = std::numeric_limits<double>::quiet_NaN();
    double sharp_constant = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    bool certified = false;
    std::vector<double> nodes;
    std::vector<double> eigenfunction;  ///< nodal values, max |value| = 1
};

inline std::vector<double> log_grid(double delta, double D, std::size_t points) {
    if (!(delta > 0.0) || !(D > delta)) throw DomainError("grid needs 0 < delta < D");
    if (points < 3) throw DomainError("grid needs at least 3 points");
    std::vector<double> x(points);
    const double l0 = std::log(delta), l1 = std::log(D);
    for (std::size_t i = 0; i < points; ++i)
        x[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(points - 1));
    x.front() = delta;
    x.back() = D;
    return x;
}

namespace discrete_detail {

/// Pointwise density multiplying the integrand: d^a * extra * measure.
inline double density(const NumericTerm& t, double d, const SpaceModel& model) {
    double log_w = t.weight_power * std::log(d) + term_detail::log_extra_weight(t, d);
    if (t.integrand == IntegrandKind::DistSqPhiSq) log_w += 2.0 * std::log(d);
    if (t.integrand == IntegrandKind::Dist4PhiSq) log_w += 4.0 * std::log(d);
    if (t.measure == Measure::Lebesgue && model.kind == ModelKind::Hyperbolic)
        log_w += std::log(geometry::lebesgue_radial_factor(d, model.n));
    else
        log_w += geometry::log_volume_weight(d, model);
    return std::exp(log_w);
}

inline void require_quadratic(const NumericTerm& t, const std::string& id) {
    const bool pow_kind = t.integrand == IntegrandKind::AbsPhiPow || t.integrand == IntegrandKind::GradPow;
    if ((pow_kind && t.exponent != 2.0) || t.outer_power != 1.0)
        throw DomainError("discrete minimization of '" + id + "' needs quadratic forms (p = 2, outer power 1)");
}

/// Adds coef * (P1 form of t) over all elements.
inline void add_p1_form(std::vector<Eigen::Triplet<double>>& out, const NumericTerm& t, double coef,
                        const std::vector<double>& x, const SpaceModel& model) {
    using Gauss = boost::math::quadrature::gauss<double, 10>;
    const auto& xg = Gauss::abscissa();
    const auto& wg = Gauss::weights();
    const bool gradient = t.order() == 1;
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(x.size()) - 2;  // interior unknowns
    for (std::size_t e = 0; e + 1 < x.size(); ++e) {
        const double lo = x[e], hi = x[e + 1], h = hi - lo;
        double local[2][2] = {{0, 0}, {0, 0}};
        auto accumulate = [&](double s, double weight) {
            const double d = 0.5 * (lo + hi) + 0.5 * h * s;
            const double w = weight * 0.5 * h * density(t, d, model);
            double f[2];
            if (gradient) {
                f[0] = -1.0 / h;
                f[1] = 1.0 / h;
            } else {
                f[0] = (hi - d) / h;
                f[1] = (d - lo) / h;
            }
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) local[a][b] += w * f[a] * f[b];
        };
        // Boost stores the nonnegative abscissae; zero appears only for odd orders.
        for (std::size_t k = 0; k < xg.size(); ++k) {
            accumulate(xg[k], wg[k]);
            if (xg[k] != 0.0) accumulate(-xg[k], wg[k]);
        }
        const std::ptrdiff_t idx[2] = {static_cast<std::ptrdiff_t>(e) - 1, static_cast<std::ptrdiff_t>(e)};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                if (idx[a] >= 0 && idx[a] < m && idx[b] >= 0 && idx[b] < m)
                    out.emplace_back(idx[a], idx[b], coef * local[a][b]);
    }
}

/// Adds coef * L^T W L with L the nodal radial Laplacian.
inline void add_laplacian_form(std::vector<Eigen::Triplet<double>>& out, const NumericTerm& t, double coef,
                               const std::vector<double>& x, const SpaceModel& model) {
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(x.size()) - 2;
    // Row i of L (interior node i+1) touches unknowns i-1, i, i+1.
    std::vector<std::array<double, 3>> rows(static_cast<std::size_t>(m));
    std::vector<double> weight(static_cast<std::size_t>(m));
    for (std::ptrdiff_t i = 0; i < m; ++i) {
        const std::size_t k = static_cast<std::size_t>(i) + 1;
        const double hm = x[k] - x[k - 1], hp = x[k + 1] - x[k];
        const double k_curv = (model.n - 1) * geometry::mean_curvature_factor(x[k], model);
        const double s = hm + hp;
        const double c2m = 2.0 / (hm * s), c2p = 2.0 / (hp * s), c20 = -2.0 / (hm * hp);
        const double c1m = -hp / (hm * s), c1p = hm / (hp * s), c10 = (hp - hm) / (hm * hp);
        rows[static_cast<std::size_t>(i)] = {c2m + k_curv * c1m, c20 + k_curv * c10, c2p + k_curv * c1p};
        weight[static_cast<std::size_t>(i)] = density(t, x[k], model) * 0.5 * s;
    }
    for (std::ptrdiff_t i = 0; i < m; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        const double w = coef * weight[static_cast<std::size_t>(i)];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                const std::ptrdiff_t ia = i - 1 + a, ib = i - 1 + b;
                if (ia >= 0 && ia < m && ib >= 0 && ib < m) out.emplace_back(ia, ib, w * r[a] * r[b]);
            }
    }
}

inline void add_form(std::vector<Eigen::Triplet<double>>& out, const NumericTerm& t, double coef,
                     const std::vector<double>& x, const SpaceModel& model) {
    if (t.order() == 2)
        add_laplacian_form(out, t, coef, x, model);
    else
        add_p1_form(out, t, coef, x, model);
}

using LDLT = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::NaturalOrdering<int>>;

/// Number of eigenvalues of (A, B) below sigma, from the inertia of A - sigma B.
inline std::ptrdiff_t count_below(const SparseMatrix& A, const SparseMatrix& B, double sigma) {
    LDLT solver(SparseMatrix(A - sigma * B));
    if (solver.info() != Eigen::Success) throw AssemblyError("LDL^T factorization failed at shift " + std::to_string(sigma));
    const auto& D = solver.vectorD();
    return static_cast<std::ptrdiff_t>((D.array() < 0.0).count());
}

}  // namespace discrete_detail

/// Assembles A (all LHS terms) and B (main RHS term) on the interior nodes.
inline Forms assemble_forms(const NumericInequality& inst, const SpaceModel& model, const std::vector<double>& nodes) {
    if (inst.shape != Shape::Linear) throw DomainError("product inequalities have no generalized eigenproblem");
    if (nodes.size() < 3) throw DomainError("need at least one interior node");
    const auto& main = inst.terms[inst.main_rhs()];
    if (main.order() == 2) throw DomainError("a Laplacian denominator is not supported");
    for (const auto& t : inst.terms) {
        if (t.extra_weight != ExtraWeight::None && !(nodes.back() < t.R))
            throw BoundaryWeightSingularity("grid reaches d = R where an extra weight is singular");
    }
    std::vector<Eigen::Triplet<double>> ta, tb;
    for (std::size_t i : inst.indices(Side::LHS)) {
        discrete_detail::require_quadratic(inst.terms[i], inst.id);
        discrete_detail::add_form(ta, inst.terms[i], inst.terms[i].effective_coefficient(), nodes, model);
    }
    discrete_detail::require_quadratic(main, inst.id);
    discrete_detail::add_form(tb, main, 1.0, nodes, model);
    const auto m = static_cast<Eigen::Index>(nodes.size() - 2);
    Forms f;
    f.A.resize(m, m);
    f.B.resize(m, m);
    f.A.setFromTriplets(ta.begin(), ta.end());
    f.B.setFromTriplets(tb.begin(), tb.end());
    f.nodes = nodes;
    return f;
}

/// Smallest eigenvalue of A v = lambda B v for symmetric A and SPD B.
inline EigenResult smallest_generalized_eigenpair(const SparseMatrix& A0, const SparseMatrix& B0,
                                                  int max_iterations = 1000, double rel_tol = 1e-10) {
    using namespace discrete_detail;
    const Eigen::Index m = A0.rows();
    // Symmetric diagonal scaling so that B has unit diagonal.
    Eigen::VectorXd s(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double b = B0.coeff(i, i);
        if (!(b > 0.0)) throw AssemblyError("B has a non-positive diagonal entry at row " + std::to_string(i));
        s[i] = 1.0 / std::sqrt(b);
    }
    const SparseMatrix A = s.asDiagonal() * A0 * s.asDiagonal();
    const SparseMatrix B = s.asDiagonal() * B0 * s.asDiagonal();
    {
        LDLT check(B);
        if (check.info() != Eigen::Success || (check.vectorD().array() <= 0.0).any())
            throw AssemblyError("B is not symmetric positive definite");
    }

    auto rayleigh = [&](const Eigen::VectorXd& v) { return v.dot(A * v) / v.dot(B * v); };
    EigenResult out;
    Eigen::VectorXd x = Eigen::VectorXd::Ones(m);
    double sigma = 0.0;
    LDLT solver(A);
    if (solver.info() != Eigen::Success) throw AssemblyError("LDL^T factorization of A failed");
    double lambda = rayleigh(x), previous = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int it = 0; it < max_iterations; ++it) {
        x = solver.solve(B * x);
        x /= std::sqrt(x.dot(B * x));
        lambda = rayleigh(x);
        out.iterations = it + 1;
        if (std::abs(lambda - previous) <= rel_tol * std::abs(lambda)) {
            converged = true;
            break;
        }
        // After a few plain steps move the shift just below the estimate,
        // keeping A - sigma B positive definite.
        if (it == 5 || (it > 5 && it % 20 == 0)) {
            double trial = lambda * (1.0 - 1e-3);
            while (trial > sigma && count_below(A, B, trial) > 0) trial = sigma + 0.5 * (trial - sigma);
            if (trial > sigma) {
                sigma = trial;
                solver.compute(SparseMatrix(A - sigma * B));
                if (solver.info() != Eigen::Success) throw AssemblyError("shifted factorization failed");
            }
        }
        previous = lambda;
    }
    if (!converged)
        throw NonConvergence("inverse iteration stagnated after " + std::to_string(max_iterations) + " steps", lambda,
                             std::abs(lambda - previous));

    // Certify: no eigenvalue below lambda (1 - eps), at least one below lambda (1 + eps).
    const double eps = 1e-7;
    if (count_below(A, B, lambda * (1.0 - eps)) > 0) {
        // Converged to a higher eigenvalue; bisect the inertia count for the first one.
        double lo = 0.0, hi = lambda;
        while (hi - lo > 1e-12 * hi) {
            const double mid = 0.5 * (lo + hi);
            (count_below(A, B, mid) > 0 ? hi : lo) = mid;
        }
        solver.compute(SparseMatrix(A - lo * (1.0 - 1e-6) * B));
        x = Eigen::VectorXd::Ones(m);
        for (int it = 0; it < 50; ++it) {
            x = solver.solve(B * x);
            x /= std::sqrt(x.dot(B * x));
        }
        lambda = rayleigh(x);
    }
    out.certified = count_below(A, B, lambda * (1.0 - eps)) == 0 && count_below(A, B, lambda * (1.0 + eps)) >= 1;
    out.lambda = lambda;
    out.vector = s.asDiagonal() * x;
    return out;
}

/// Smallest discrete quotient of a linear quadratic inequality on [delta, D].
inline DiscreteResult minimize_discrete(const NumericInequality& inst, const DiscreteGrid& grid,
                                        const SpaceModel& model, bool sensitivity = true) {
    require_model(inst, model);
    if (grid.points < 50) throw DomainError("minimization grid needs at least 50 points");
    DiscreteResult out;
    out.id = inst.id;
    out.grid = grid;
    out.sharp_constant = inst.bound();
    const auto nodes = log_grid(grid.delta, grid.D, grid.points);
    const auto forms = assemble_forms(inst, model, nodes);
    const auto eig = smallest_generalized_eigenpair(forms.A, forms.B);
    out.lambda_min = eig.lambda;
    out.iterations = eig.iterations;
    out.certified = eig.certified;
    out.nodes = nodes;
    out.eigenfunction.assign(nodes.size(), 0.0);
    double peak = 0.0;
    for (Eigen::Index i = 0; i < eig.vector.size(); ++i)
        if (std::abs(eig.vector[i]) > std::abs(peak)) peak = eig.vector[i];
    for (Eigen::Index i = 0; i < eig.vector.size(); ++i)
        out.eigenfunction[static_cast<std::size_t>(i) + 1] = peak == 0.0 ? 0.0 : eig.vector[i] / peak;
    if (sensitivity) {
        const auto fine = assemble_forms(inst, model, log_grid(grid.delta / 10.0, grid.D, grid.points));
        out.lambda_delta_tenth = smallest_generalized_eigenpair(fine.A, fine.B).lambda;
    }
    return out;
}

}  // namespace hypineq
