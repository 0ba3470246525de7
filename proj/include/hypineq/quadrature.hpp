#pragma once

/**
 * @file quadrature.hpp
 * @brief Globally adaptive Gauss-Kronrod (7/15) integration of radial
 *        integrands with a known power-law singularity at the left endpoint
 *        and optional infinite tails.
 *
 * Left-endpoint singularities f(d) ~ c (d-a)^beta, -1 < beta < 0, are removed
 * with the substitution d = a + t^{1/(1+beta)}; the transformed integrand
 * k f(d) (d-a)^{-beta} is bounded. Points with d - a below kSingularFloor are
 * evaluated at the floor (the transformed integrand is constant to relative
 * O(floor) there), which keeps huge intermediate powers from overflowing.
 *
 * Bisection order depends only on the integrand, never on tol or threads, so
 * a run with tol/2 continues the run with tol. The reported pair is the one
 * with the smallest error estimate seen along that sequence.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hypineq/errors.hpp"

namespace hypineq::quadrature {

inline constexpr double kDefaultTol = 1e-9;
inline constexpr std::size_t kMaxSubdivisions = 20000;
inline constexpr double kSingularFloor = 1e-14;
/// Tail search stops here; sinh^{n-1}(d) overflows shortly after.
inline constexpr double kMaxTailDistance = 700.0;

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t subdivisions = 0;
    bool converged = true;
};

enum class TailKind {
    CompactSupport,            ///< integrand vanishes for d >= support_end
    GaussianDecay,             ///< log-concave decay (Gaussian or exponential)
    PolynomialTimesExpGrowth,  ///< not integrable at infinity
    PolynomialDecay,           ///< f ~ d^decay_power, decay_power < -1
};

struct TailClass {
    TailKind kind = TailKind::CompactSupport;
    double support_end = std::numeric_limits<double>::infinity();
    double decay_power = -2.0;

    static TailClass compact(double D) { return {TailKind::CompactSupport, D, 0.0}; }
    static TailClass gaussian() { return {TailKind::GaussianDecay}; }
    static TailClass exp_growth() { return {TailKind::PolynomialTimesExpGrowth}; }
    static TailClass polynomial_decay(double power) {
        return {TailKind::PolynomialDecay, std::numeric_limits<double>::infinity(), power};
    }
};

struct Integrand {
    std::function<double(double)> evaluator;
    /// beta with f(d) ~ c (d - a)^beta as d -> a+, supplied analytically.
    double singularity_power = 0.0;
    TailClass tail;
    /// Interior points where f is not smooth; integration splits there.
    std::vector<double> breakpoints;
    /// Typical feature width; sizes the singular window and tail chunks.
    double length_scale = 1.0;
};

namespace detail {

struct RuleResult {
    double value;
    double error;
};

/// 15-point Kronrod / 7-point Gauss pair with the QUADPACK error heuristic.
inline RuleResult gk15(const std::function<double(double)>& g, double lo, double hi) {
    using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
    using Gauss = boost::math::quadrature::gauss<double, 7>;
    const auto& xk = Kronrod::abscissa();  // xk[0] = 0, Gauss nodes at even indices
    const auto& wk = Kronrod::weights();
    const auto& wg = Gauss::weights();      // wg[0] at 0

    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);

    double fv[15];
    fv[0] = g(mid);
    for (std::size_t i = 1; i < xk.size(); ++i) {
        fv[2 * i - 1] = g(mid - half * xk[i]);
        fv[2 * i] = g(mid + half * xk[i]);
    }

    double rk = wk[0] * fv[0];
    double rg = wg[0] * fv[0];
    double rabs = std::abs(rk);
    for (std::size_t i = 1; i < xk.size(); ++i) {
        const double pair = fv[2 * i - 1] + fv[2 * i];
        rk += wk[i] * pair;
        rabs += wk[i] * (std::abs(fv[2 * i - 1]) + std::abs(fv[2 * i]));
        if (i % 2 == 0) rg += wg[i / 2] * pair;
    }
    const double mean = 0.5 * rk;
    double asc = wk[0] * std::abs(fv[0] - mean);
    for (std::size_t i = 1; i < xk.size(); ++i)
        asc += wk[i] * (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));

    const double value = rk * half;
    double err = std::abs((rk - rg) * half);
    const double resasc = asc * std::abs(half);
    const double resabs = rabs * std::abs(half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    if (!std::isfinite(value) || !std::isfinite(err))
        throw NonConvergence("integrand is not finite on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]",
                             std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity());
    return {value, err};
}

/// A smooth integrand on [lo, hi] after any change of variables.
struct Piece {
    std::function<double(double)> g;
    double lo;
    double hi;
};

/// Globally adaptive bisection over all pieces at once.
inline QuadResult adaptive(const std::vector<Piece>& pieces, double tol, std::size_t max_subdivisions) {
    struct Interval {
        std::size_t piece;
        double lo, hi, value, error;
        std::size_t seq;
    };
    struct ByError {
        bool operator()(const Interval& x, const Interval& y) const {
            if (x.error != y.error) return x.error < y.error;
            return x.seq > y.seq;
        }
    };
    std::priority_queue<Interval, std::vector<Interval>, ByError> heap;
    std::size_t seq = 0;
    double value = 0.0, error = 0.0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (!(pieces[i].hi > pieces[i].lo)) continue;
        const auto r = gk15(pieces[i].g, pieces[i].lo, pieces[i].hi);
        heap.push({i, pieces[i].lo, pieces[i].hi, r.value, r.error, seq++});
        value += r.value;
        error += r.error;
    }

    QuadResult best{value, error, 0, false};
    auto satisfied = [tol](double v, double e) { return e <= tol * std::abs(v) || e == 0.0; };

    std::size_t subdivisions = 0;
    while (!heap.empty()) {
        if (error < best.error_estimate) best = {value, error, subdivisions, false};
        if (satisfied(value, error)) {
            best = {value, error, subdivisions, true};
            break;
        }
        if (subdivisions >= max_subdivisions) break;
        const Interval top = heap.top();
        const double mid = 0.5 * (top.lo + top.hi);
        if (!(mid > top.lo && mid < top.hi)) break;  // cannot bisect further
        heap.pop();
        const auto& g = pieces[top.piece].g;
        const auto left = gk15(g, top.lo, mid);
        const auto right = gk15(g, mid, top.hi);
        heap.push({top.piece, top.lo, mid, left.value, left.error, seq++});
        heap.push({top.piece, mid, top.hi, right.value, right.error, seq++});
        value += left.value + right.value - top.value;
        error += left.error + right.error - top.error;
        ++subdivisions;
    }
    // Re-sum in a fixed order to shed drift from the running updates.
    if (best.converged || heap.empty()) {
        std::vector<Interval> all;
        all.reserve(heap.size());
        while (!heap.empty()) {
            all.push_back(heap.top());
            heap.pop();
        }
        std::sort(all.begin(), all.end(), [](const Interval& x, const Interval& y) { return x.seq < y.seq; });
        double v = 0.0, e = 0.0;
        for (const auto& iv : all) {
            v += iv.value;
            e += iv.error;
        }
        if (best.converged) {
            best.value = v;
            best.error_estimate = std::max(e, 0.0);
        }
    }
    best.subdivisions = subdivisions;
    if (!best.converged) best.converged = satisfied(best.value, best.error_estimate);
    return best;
}

/// Piece for h on [a, a + width] with h(d) ~ c (d-a)^beta, -1 < beta < 0.
inline Piece singular_piece(std::function<double(double)> h, double a, double width, double beta) {
    const double k = 1.0 / (1.0 + beta);
    auto g = [h = std::move(h), a, k, beta](double t) {
        double u = std::pow(t, k);  // u = d - a
        if (!(u >= kSingularFloor)) u = kSingularFloor;
        return k * h(a + u) * std::pow(u, -beta);
    };
    return {std::move(g), 0.0, std::pow(width, 1.0 + beta)};
}

/// Split [lo, hi] at the breakpoints that fall strictly inside.
inline void push_regular(std::vector<Piece>& out, const std::function<double(double)>& f, double lo, double hi,
                         const std::vector<double>& breakpoints) {
    double left = lo;
    for (double bp : breakpoints) {
        if (bp > left && bp < hi) {
            out.push_back({f, left, bp});
            left = bp;
        }
    }
    if (hi > left) out.push_back({f, left, hi});
}

inline std::vector<Piece> finite_pieces(const Integrand& f, double a, double b) {
    std::vector<Piece> pieces;
    const double beta = f.singularity_power;
    if (beta <= -1.0)
        throw DomainError("integrand singularity power " + std::to_string(beta) + " is not integrable");
    double start = a;
    if (beta < 0.0) {
        double window = std::min(b, a + f.length_scale);
        for (double bp : f.breakpoints)
            if (bp > a && bp < window) window = bp;
        pieces.push_back(singular_piece(f.evaluator, a, window - a, beta));
        start = window;
    }
    push_regular(pieces, f.evaluator, start, b, f.breakpoints);
    return pieces;
}

inline QuadResult combine(QuadResult x, const QuadResult& y) {
    x.value += y.value;
    x.error_estimate += y.error_estimate;
    x.subdivisions += y.subdivisions;
    x.converged = x.converged && y.converged;
    return x;
}

}  // namespace detail

/// Integrate f over [a, b]; b may be +infinity. Never throws on
/// non-convergence; inspect QuadResult::converged.
inline QuadResult try_integrate(const Integrand& f, double a, double b, double tol = kDefaultTol,
                                std::size_t max_subdivisions = kMaxSubdivisions) {
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    if (!(a < b)) throw DomainError("integration requires a < b");
    const auto& tail = f.tail;

    if (tail.kind == TailKind::CompactSupport && tail.support_end < b) {
        if (!(tail.support_end > a)) return {};
        b = tail.support_end;
    }
    if (!std::isinf(b)) return detail::adaptive(detail::finite_pieces(f, a, b), tol, max_subdivisions);

    switch (tail.kind) {
    case TailKind::PolynomialTimesExpGrowth:
        throw DivergentTail("integrand grows exponentially; integral over [a, infinity) diverges");
    case TailKind::CompactSupport:
        throw DomainError("compact support with infinite support_end");
    case TailKind::PolynomialDecay: {
        if (!(tail.decay_power < -1.0))
            throw DivergentTail("polynomial tail d^" + std::to_string(tail.decay_power) + " is not integrable");
        double c = std::max(a + f.length_scale, 1.0);
        for (double bp : f.breakpoints) c = std::max(c, bp);
        auto pieces = detail::finite_pieces(f, a, c);
        // d = c / t maps [c, inf) to (0, 1]; g(t) ~ t^{-gamma-2} near t = 0.
        auto g = [ev = f.evaluator, c](double t) { return ev(c / t) * c / (t * t); };
        const double beta = -tail.decay_power - 2.0;
        if (beta < 0.0) {
            pieces.push_back(detail::singular_piece(g, 0.0, 1.0, beta));
        } else {
            auto gs = [g](double t) { return t < kSingularFloor ? 0.0 : g(t); };
            pieces.push_back({gs, 0.0, 1.0});
        }
        return detail::adaptive(pieces, tol, max_subdivisions);
    }
    case TailKind::GaussianDecay:
        break;
    }

    // Log-concave tail: integrate chunks until the tangent-line bound
    // f(D) / |(log f)'(D)| on the remainder is below tol * |value| / 10.
    double D = a + 4.0 * f.length_scale;
    for (double bp : f.breakpoints) D = std::max(D, bp);
    const double chunk_tol = 0.9 * tol;
    QuadResult total = detail::adaptive(detail::finite_pieces(f, a, D), chunk_tol, max_subdivisions);
    const double h = 1e-3 * f.length_scale;
    for (;;) {
        const double fd = std::abs(f.evaluator(D));
        double bound = 0.0;
        bool done = false;
        if (fd == 0.0) {
            done = std::abs(f.evaluator(D - h)) == 0.0;
        } else {
            const double fm = std::abs(f.evaluator(D - h));
            if (fm > 0.0) {
                const double slope = (std::log(fd) - std::log(fm)) / h;
                if (slope < 0.0) {
                    bound = fd / -slope;
                    done = bound <= tol * std::abs(total.value) / 10.0;
                }
            }
        }
        if (done) {
            total.error_estimate += bound;
            return total;
        }
        const double next = D + std::max(f.length_scale, 0.25 * D);
        if (next > kMaxTailDistance) {
            total.converged = false;
            total.error_estimate = std::numeric_limits<double>::infinity();
            return total;
        }
        detail::Piece chunk{f.evaluator, D, next};
        total = detail::combine(total, detail::adaptive({chunk}, chunk_tol, max_subdivisions));
        D = next;
    }
}

/// As try_integrate, but raises NonConvergence carrying the best estimate.
inline QuadResult integrate(const Integrand& f, double a, double b, double tol = kDefaultTol,
                            std::size_t max_subdivisions = kMaxSubdivisions) {
    auto r = try_integrate(f, a, b, tol, max_subdivisions);
    if (!r.converged)
        throw NonConvergence("adaptive quadrature did not reach tol " + std::to_string(tol) + " after " +
                                 std::to_string(r.subdivisions) + " subdivisions",
                             r.value, r.error_estimate);
    return r;
}

}  // namespace hypineq::quadrature
