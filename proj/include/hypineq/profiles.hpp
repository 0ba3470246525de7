#pragma once

/**
 * @file profiles.hpp
 * @brief Radial test functions with analytic value, first and second
 *        derivative, exact support and local powers at the origin.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/interpolators/quintic_hermite.hpp>

#include "hypineq/errors.hpp"
#include "hypineq/geometry.hpp"
#include "hypineq/params.hpp"
#include "hypineq/term.hpp"

namespace hypineq {

/// Behaviour of the profile beyond its last breakpoint.
enum class ProfileTail {
    Compact,   ///< zero for d >= support_hi
    Gaussian,  ///< decays like exp(-a d^2)
    PowerLaw,  ///< value ~ d^tail_power as d -> infinity
};

struct RadialProfile {
    using Fn = std::function<double(double)>;

    Fn value;
    Fn d1;
    Fn d2;
    double support_lo = 0.0;
    double support_hi = std::numeric_limits<double>::infinity();
    /// Leading powers at d -> 0 of value, first derivative and radial
    /// Laplacian. Only meaningful when support_lo == 0.
    double value_power = 0.0;
    double d1_power = 0.0;
    double laplacian_power = 0.0;
    ProfileTail tail = ProfileTail::Compact;
    double tail_power = 0.0;
    std::vector<double> breakpoints;
    double length_scale = 1.0;
    std::string description;

    double laplacian(double d, const SpaceModel& model) const { return geometry::radial_laplacian(*this, d, model); }

    bool touches_origin() const { return support_lo == 0.0; }

    /// The profile multiplied by a constant.
    RadialProfile scaled(double c) const {
        RadialProfile out = *this;
        out.value = [f = value, c](double d) { return c * f(d); };
        out.d1 = [f = d1, c](double d) { return c * f(d); };
        out.d2 = [f = d2, c](double d) { return c * f(d); };
        return out;
    }

    /// The identically zero function on [lo, hi].
    static RadialProfile zero(double lo = 0.5, double hi = 1.0) {
        RadialProfile z;
        z.value = z.d1 = z.d2 = [](double) { return 0.0; };
        z.support_lo = lo;
        z.support_hi = hi;
        z.description = "zero";
        return z;
    }
};

struct FamilyOptions {
    /// Truncation distance for the paper families; infinity keeps the raw outer branch.
    double D = 10.0;
    /// Concentration families: exponent replacing the default base.
    std::optional<double> base_exponent;
    /// Bump: window that must contain the support.
    std::optional<std::pair<double, double>> window;
    std::uint64_t seed = 1;
    /// Explicit bump center and half-width (skip the generator).
    std::optional<double> center, half_width;
    /// Gaussian amplitude.
    double amplitude = 1.0;
    /// Grid samples.
    std::vector<double> grid_d, grid_value;
};

namespace profiles {

/// Quintic smoothstep S(t) = 6t^5 - 15t^4 + 10t^3 and its derivatives.
struct Smoothstep {
    static double s(double t) { return t * t * t * (t * (6.0 * t - 15.0) + 10.0); }
    static double s1(double t) { return 30.0 * t * t * (t - 1.0) * (t - 1.0); }
    static double s2(double t) { return 60.0 * t * (2.0 * t - 1.0) * (t - 1.0); }
};

/// eta = 1 on [0, lo], 0 on [hi, inf), C^2 and monotone in between.
struct Cutoff {
    double lo = 0.5;
    double hi = 1.0;

    double value(double d) const {
        if (d <= lo) return 1.0;
        if (d >= hi) return 0.0;
        return 1.0 - Smoothstep::s((d - lo) / (hi - lo));
    }
    double d1(double d) const {
        if (d <= lo || d >= hi) return 0.0;
        const double w = hi - lo;
        return -Smoothstep::s1((d - lo) / w) / w;
    }
    double d2(double d) const {
        if (d <= lo || d >= hi) return 0.0;
        const double w = hi - lo;
        return -Smoothstep::s2((d - lo) / w) / (w * w);
    }
};

/// f(d) = d^s on (0, inf) with derivatives; d^0 is handled exactly.
struct Power {
    double s;
    double v(double d) const { return std::pow(d, s); }
    double v1(double d) const { return s == 0.0 ? 0.0 : s * std::pow(d, s - 1.0); }
    double v2(double d) const { return s == 0.0 || s == 1.0 ? 0.0 : s * (s - 1.0) * std::pow(d, s - 2.0); }
};

/// Product rule for f * eta.
inline RadialProfile times_cutoff(Power f, Cutoff eta) {
    RadialProfile out;
    out.value = [f, eta](double d) { return d >= eta.hi ? 0.0 : f.v(d) * eta.value(d); };
    out.d1 = [f, eta](double d) { return d >= eta.hi ? 0.0 : f.v1(d) * eta.value(d) + f.v(d) * eta.d1(d); };
    out.d2 = [f, eta](double d) {
        if (d >= eta.hi) return 0.0;
        return f.v2(d) * eta.value(d) + 2.0 * f.v1(d) * eta.d1(d) + f.v(d) * eta.d2(d);
    };
    out.support_lo = 0.0;
    out.support_hi = eta.hi;
    out.value_power = f.s;
    out.d1_power = f.s - 1.0;
    out.laplacian_power = f.s - 2.0;
    out.tail = ProfileTail::Compact;
    out.breakpoints = {eta.lo};
    out.length_scale = eta.lo;
    return out;
}

inline double require(const std::optional<double>& v, const char* name) {
    if (!v) throw AdmissibilityError({std::string("parameter '") + name + "' is required"});
    return *v;
}

/// Inner branch `inner` on [0, 1], d^{-k} beyond, optionally cut off on [D-1, D].
inline RadialProfile two_branch(std::function<double(double)> iv, std::function<double(double)> i1,
                                std::function<double(double)> i2, double k, double D) {
    const Power outer{-k};
    const bool truncated = std::isfinite(D);
    if (truncated && !(D >= 2.0)) throw DomainError("truncation distance D must be >= 2");
    const Cutoff eta{truncated ? D - 1.0 : std::numeric_limits<double>::infinity(),
                     truncated ? D : std::numeric_limits<double>::infinity()};
    RadialProfile out;
    out.value = [=](double d) {
        if (d <= 1.0) return iv(d);
        return truncated ? (d >= D ? 0.0 : outer.v(d) * eta.value(d)) : outer.v(d);
    };
    out.d1 = [=](double d) {
        if (d <= 1.0) return i1(d);
        if (!truncated) return outer.v1(d);
        return d >= D ? 0.0 : outer.v1(d) * eta.value(d) + outer.v(d) * eta.d1(d);
    };
    out.d2 = [=](double d) {
        if (d <= 1.0) return i2(d);
        if (!truncated) return outer.v2(d);
        return d >= D ? 0.0 : outer.v2(d) * eta.value(d) + 2.0 * outer.v1(d) * eta.d1(d) + outer.v(d) * eta.d2(d);
    };
    out.support_lo = 0.0;
    out.breakpoints = {1.0};
    if (truncated) {
        out.support_hi = D;
        out.tail = ProfileTail::Compact;
        out.breakpoints.push_back(D - 1.0);
    } else {
        out.tail = ProfileTail::PowerLaw;
        out.tail_power = -k;
    }
    return out;
}

/// Finite-difference weights (Fornberg) for derivatives 0..2 at z.
inline std::vector<std::array<double, 3>> fd_weights(double z, const std::vector<double>& x) {
    const std::size_t m = x.size();
    std::vector<std::array<double, 3>> c(m, {0.0, 0.0, 0.0});
    double c1 = 1.0, c4 = x[0] - z;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < m; ++i) {
        const int mn = static_cast<int>(std::min<std::size_t>(i, 2));
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    return c;
}

inline RadialProfile grid_profile(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size()) throw DomainError("grid abscissae and values differ in length");
    if (xs.size() < 7) throw DomainError("grid profile needs at least 7 points, got " + std::to_string(xs.size()));
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) throw DomainError("grid abscissae must be strictly increasing");
    if (xs.front() < 0.0) throw DomainError("grid abscissae must be >= 0");
    ys.front() = 0.0;
    ys.back() = 0.0;

    const std::size_t m = xs.size();
    std::vector<double> dy(m), d2y(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t first = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(i) - 2, 0,
                                                             static_cast<std::ptrdiff_t>(m) - 5);
        std::vector<double> stencil(xs.begin() + first, xs.begin() + first + 5);
        const auto w = fd_weights(xs[i], stencil);
        dy[i] = d2y[i] = 0.0;
        for (std::size_t j = 0; j < 5; ++j) {
            dy[i] += w[j][1] * ys[first + j];
            d2y[i] += w[j][2] * ys[first + j];
        }
    }
    const double lo = xs.front(), hi = xs.back();
    using Spline = boost::math::interpolators::quintic_hermite<std::vector<double>>;
    auto spline = std::make_shared<Spline>(std::move(xs), std::move(ys), std::move(dy), std::move(d2y));

    RadialProfile out;
    out.value = [spline, lo, hi](double d) { return d <= lo || d >= hi ? 0.0 : (*spline)(d); };
    out.d1 = [spline, lo, hi](double d) { return d <= lo || d >= hi ? 0.0 : spline->prime(d); };
    out.d2 = [spline, lo, hi](double d) { return d <= lo || d >= hi ? 0.0 : spline->double_prime(d); };
    out.support_lo = lo;
    out.support_hi = hi;
    out.laplacian_power = -1.0;  // a nonzero slope at d = 0 gives (n-1) phi'(0) / d
    out.tail = ProfileTail::Compact;
    out.length_scale = (hi - lo) / 8.0;
    out.description = "grid";
    return out;
}

}  // namespace profiles

/// Reads a two-column text file (d value per line; '#' starts a comment).
inline std::pair<std::vector<double>, std::vector<double>> load_grid_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open grid file '" + path + "'");
    std::vector<double> xs, ys;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double x, y;
        if (!(ls >> x)) continue;
        if (!(ls >> y)) throw ParseError("expected two columns in grid file '" + path + "'", lineno, 1);
        xs.push_back(x);
        ys.push_back(y);
    }
    return {std::move(xs), std::move(ys)};
}

/// Draws bump (center, half-width) inside `window` from a 64-bit Mersenne
/// Twister; uniforms are (gen() >> 11) * 2^-53.
inline std::pair<double, double> draw_bump(std::uint64_t seed, std::pair<double, double> window) {
    std::mt19937_64 gen(seed);
    auto uniform = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
    const double span = window.second - window.first;
    const double w = span * (0.05 + 0.2 * uniform());
    const double c = window.first + w + (span - 2.0 * w) * uniform();
    return {c, w};
}

/// Profile constructor for every family. `shape` is epsilon for the
/// Hardy/Rellich families and the width a for Gaussian; unused otherwise.
inline RadialProfile make_family(FamilyKind kind, double shape, const Params& params,
                                 const FamilyOptions& options = {}) {
    using namespace profiles;
    const bool shaped = kind == FamilyKind::HardyPaper || kind == FamilyKind::HardyConcentration ||
                        kind == FamilyKind::RellichPaper || kind == FamilyKind::RellichConcentration ||
                        kind == FamilyKind::Gaussian;
    if (shaped && !(shape > 0.0)) throw DomainError("family shape parameter must be > 0");
    const double n = params.n;
    const double alpha = params.alpha.value_or(0.0);

    switch (kind) {
    case FamilyKind::HardyConcentration: {
        double base;
        if (options.base_exponent) {
            base = *options.base_exponent;
        } else {
            const double p = require(params.p, "p");
            base = -(n + alpha) / p;
        }
        auto out = times_cutoff(Power{base + shape}, Cutoff{});
        out.description = "hardy-concentration(eps=" + std::to_string(shape) + ")";
        return out;
    }
    case FamilyKind::RellichConcentration: {
        const double base = options.base_exponent.value_or((4.0 - n - alpha) / 2.0);
        auto out = times_cutoff(Power{base + shape}, Cutoff{});
        out.description = "rellich-concentration(eps=" + std::to_string(shape) + ")";
        return out;
    }
    case FamilyKind::HardyPaper: {
        const double p = require(params.p, "p");
        if (!(p > 1.0)) throw AdmissibilityError({"p > 1"});
        const double k = (n + alpha) / p + shape;
        const Power inner{k};
        auto out = two_branch([inner](double d) { return inner.v(d); }, [inner](double d) { return inner.v1(d); },
                              [inner](double d) { return inner.v2(d); }, k, options.D);
        out.value_power = k;
        out.d1_power = k - 1.0;
        out.laplacian_power = k - 2.0;
        out.description = "hardy-paper(eps=" + std::to_string(shape) + ")";
        return out;
    }
    case FamilyKind::RellichPaper: {
        const double k = (n + alpha - 4.0) / 2.0 + shape;
        auto out = two_branch([k](double d) { return -k * (d - 1.0) + 1.0; }, [k](double) { return -k; },
                              [](double) { return 0.0; }, k, options.D);
        out.value_power = 0.0;
        out.d1_power = 0.0;
        out.laplacian_power = -1.0;
        out.description = "rellich-paper(eps=" + std::to_string(shape) + ")";
        return out;
    }
    case FamilyKind::Gaussian: {
        const double a = shape, A = options.amplitude;
        RadialProfile out;
        out.value = [a, A](double d) { return A * std::exp(-a * d * d); };
        out.d1 = [a, A](double d) { return -2.0 * a * d * A * std::exp(-a * d * d); };
        out.d2 = [a, A](double d) { return (4.0 * a * a * d * d - 2.0 * a) * A * std::exp(-a * d * d); };
        out.value_power = 0.0;
        out.d1_power = 1.0;
        out.laplacian_power = 0.0;
        out.tail = ProfileTail::Gaussian;
        out.length_scale = 1.0 / std::sqrt(a);
        out.description = "gaussian(a=" + std::to_string(a) + ")";
        return out;
    }
    case FamilyKind::Bump: {
        double c, w;
        if (options.center && options.half_width) {
            c = *options.center;
            w = *options.half_width;
        } else {
            auto window = options.window.value_or(std::pair{0.05, 5.0});
            if (!options.window && params.R) window.second = std::min(window.second, 0.95 * *params.R);
            if (!(window.second > window.first && window.first >= 0.0))
                throw DomainError("bump window must satisfy 0 <= lo < hi");
            std::tie(c, w) = draw_bump(options.seed, window);
        }
        if (!(w > 0.0) || c - w < 0.0) throw DomainError("bump support must lie in [0, inf) with positive width");
        RadialProfile out;
        auto x_of = [c, w](double d) { return (d - c) / w; };
        out.value = [x_of](double d) {
            const double x = x_of(d);
            return std::abs(x) >= 1.0 ? 0.0 : std::exp(-1.0 / (1.0 - x * x));
        };
        out.d1 = [x_of, w](double d) {
            const double x = x_of(d);
            if (std::abs(x) >= 1.0) return 0.0;
            const double u = 1.0 - x * x;
            return -2.0 * x / (u * u) * std::exp(-1.0 / u) / w;
        };
        out.d2 = [x_of, w](double d) {
            const double x = x_of(d);
            if (std::abs(x) >= 1.0) return 0.0;
            const double u = 1.0 - x * x;
            const double g1 = -2.0 * x / (u * u);
            const double g2 = -2.0 * (1.0 + 3.0 * x * x) / (u * u * u);
            return (g2 + g1 * g1) * std::exp(-1.0 / u) / (w * w);
        };
        out.support_lo = c - w;
        out.support_hi = c + w;
        out.tail = ProfileTail::Compact;
        out.breakpoints = {c};
        out.length_scale = w;
        out.description = "bump(c=" + std::to_string(c) + ",w=" + std::to_string(w) + ")";
        return out;
    }
    case FamilyKind::Grid:
        return grid_profile(options.grid_d, options.grid_value);
    }
    throw DomainError("unknown family kind");
}

/// Exponent s for which the term's integrand with phi = d^s has local power
/// exactly -1 at the origin.
inline double critical_exponent(const NumericTerm& term, int n) {
    if (term.extra_weight == ExtraWeight::InvLogSq)
        throw SpecError("no power rule for a term with a logarithmic weight");
    int derivatives = 0;
    switch (term.integrand) {
    case IntegrandKind::GradPow:
    case IntegrandKind::GradSq: derivatives = 1; break;
    case IntegrandKind::LaplacianSq: derivatives = 2; break;
    default: break;
    }
    double weight = term.weight_power;
    if (term.integrand == IntegrandKind::DistSqPhiSq) weight += 2.0;
    if (term.integrand == IntegrandKind::Dist4PhiSq) weight += 4.0;
    const double volume_power = n - 1.0;
    return derivatives - (volume_power + weight + 1.0) / term.exponent;
}

/// Parsed form of a CLI profile string such as "bump:seed=7" or "hardy-paper:eps=0.1,D=10".
struct ProfileSpec {
    FamilyKind kind = FamilyKind::Bump;
    double shape = 0.0;
    FamilyOptions options;

    static ProfileSpec parse(const std::string& text) {
        ProfileSpec out;
        const auto colon = text.find(':');
        const std::string head = text.substr(0, colon);
        if (head == "bump") out.kind = FamilyKind::Bump;
        else if (head == "gaussian") out.kind = FamilyKind::Gaussian;
        else if (head == "hardy-conc") out.kind = FamilyKind::HardyConcentration;
        else if (head == "rellich-conc") out.kind = FamilyKind::RellichConcentration;
        else if (head == "hardy-paper") out.kind = FamilyKind::HardyPaper;
        else if (head == "rellich-paper") out.kind = FamilyKind::RellichPaper;
        else if (head == "grid") out.kind = FamilyKind::Grid;
        else throw SpecError("unknown profile kind '" + head + "'");
        if (out.kind == FamilyKind::Gaussian) out.shape = 1.0;
        else if (out.kind != FamilyKind::Bump && out.kind != FamilyKind::Grid) out.shape = 0.1;

        std::optional<double> lo, hi;
        std::string file;
        if (colon != std::string::npos) {
            std::stringstream ss(text.substr(colon + 1));
            std::string item;
            while (std::getline(ss, item, ',')) {
                const auto eq = item.find('=');
                if (eq == std::string::npos) throw SpecError("profile option '" + item + "' is not key=value");
                const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
                if (key == "file") {
                    file = val;
                    continue;
                }
                double v;
                try {
                    std::size_t used = 0;
                    v = std::stod(val, &used);
                    if (used != val.size()) throw std::invalid_argument(val);
                } catch (const std::exception&) {
                    throw SpecError("profile option '" + key + "' needs a number, got '" + val + "'");
                }
                if (key == "eps" || key == "a") out.shape = v;
                else if (key == "A") out.options.amplitude = v;
                else if (key == "D") out.options.D = v;
                else if (key == "base") out.options.base_exponent = v;
                else if (key == "seed") out.options.seed = static_cast<std::uint64_t>(v);
                else if (key == "c") out.options.center = v;
                else if (key == "w") out.options.half_width = v;
                else if (key == "lo") lo = v;
                else if (key == "hi") hi = v;
                else throw SpecError("unknown profile option '" + key + "'");
            }
        }
        if (lo || hi) out.options.window = std::pair{lo.value_or(0.05), hi.value_or(5.0)};
        if (out.kind == FamilyKind::Grid) {
            if (file.empty()) throw SpecError("grid profile needs file=PATH");
            std::tie(out.options.grid_d, out.options.grid_value) = load_grid_file(file);
        }
        return out;
    }
};

}  // namespace hypineq
