#pragma once

// Seeded case generators for property tests. Each case gets its own
// engine seeded from (suite seed + case index) so a failure names the
// exact seed that reproduces it.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <gtest/gtest.h>

namespace hypineq::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed), seed_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    std::uint64_t seed() const { return seed_; }

private:
    std::mt19937_64 rng_;
    std::uint64_t seed_;
};

template <class Body>
void for_all(int cases, std::uint64_t seed, Body&& body) {
    for (int i = 0; i < cases; ++i) {
        Gen g(seed + static_cast<std::uint64_t>(i));
        SCOPED_TRACE("property case seed " + std::to_string(g.seed()));
        body(g);
    }
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace hypineq::testing
