#pragma once

// Seeded generators for the property tests.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>

#include "invrec/lattice.hpp"
#include "invrec/potential.hpp"

namespace invrec::testing {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2 * std::numbers::pi;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed * 0x9E3779B97F4A7C15ULL + 17); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline Vec3 random_vec(std::mt19937_64& g, double lo = -3, double hi = 3) {
    return Vec3(uniform(g, lo, hi), uniform(g, lo, hi), uniform(g, lo, hi));
}

/// Random basis that passes the admissibility check (rejection sampled).
inline AdmissibleBasis random_admissible_basis(std::mt19937_64& g) {
    for (;;) {
        LatticeBasis b(random_vec(g), random_vec(g), random_vec(g));
        const auto report = check_admissible(b);
        // Keep clear of the thresholds so derived tolerances stay meaningful.
        bool comfortable = report.admissible;
        const double det = std::abs(b[0].dot(b[1].cross(b[2])));
        if (det < 0.2 * b[0].norm() * b[1].norm() * b[2].norm()) comfortable = false;
        for (const auto& v : report.evaluated)
            if (std::abs(v.value) < 1e-3) comfortable = false;
        if (comfortable) return AdmissibleBasis(b);
    }
}

inline std::uint64_t seed_for(int trial, std::uint64_t salt = 0) {
    return 1000003ULL * static_cast<std::uint64_t>(trial) + salt;
}

}  // namespace invrec::testing
