#pragma once

/**
 * @file params.hpp
 * @brief Parameter tuple of an inequality instance and its expression environment.
 */

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "hypineq/errors.hpp"
#include "hypineq/expr.hpp"

namespace hypineq {

/// Area of the unit sphere S^k in R^{k+1}: 2 pi^{(k+1)/2} / Gamma((k+1)/2).
inline double unit_sphere_area(int k) {
    if (k < 0) throw DomainError("sphere dimension must be >= 0");
    const double h = 0.5 * (k + 1);
    return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

/// Only the fields referenced by an inequality need to be set.
struct Params {
    int n = 3;
    std::optional<double> alpha, p, C, q, s, R, c;

    /// Model constant; n - 1 unless overridden.
    double C_value() const { return C.value_or(static_cast<double>(n - 1)); }

    /// Symbol table for expression evaluation. "Sn" is |S^n|.
    expr::Env env() const {
        expr::Env e;
        e["n"] = n;
        e["C"] = C_value();
        e["Sn"] = unit_sphere_area(n);
        auto put = [&e](const char* name, const std::optional<double>& v) {
            if (v) e[name] = *v;
        };
        put("alpha", alpha);
        put("p", p);
        put("q", q);
        put("s", s);
        put("R", R);
        put("c", c);
        return e;
    }

    /// Sets a field by its expression name; false for unknown names.
    bool set(const std::string& name, double value) {
        if (name == "n") {
            if (value != std::floor(value)) throw DomainError("n must be an integer");
            n = static_cast<int>(value);
        } else if (name == "alpha") alpha = value;
        else if (name == "p") p = value;
        else if (name == "C") C = value;
        else if (name == "q") q = value;
        else if (name == "s") s = value;
        else if (name == "R") R = value;
        else if (name == "c") c = value;
        else return false;
        return true;
    }

    bool operator==(const Params&) const = default;
};

}  // namespace hypineq
