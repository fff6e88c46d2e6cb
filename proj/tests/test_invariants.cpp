#include <doctest.h>

#include <cmath>
#include <cstring>

#include "invrec/errors.hpp"
#include "invrec/invariants.hpp"
#include "support.hpp"

using namespace invrec;
using invrec::testing::kPi;
using invrec::testing::kTwoPi;

namespace {

LatticeBasis staircase() {
    return LatticeBasis(Vec3(kTwoPi, 0, 0), Vec3(kTwoPi, kTwoPi, 0), Vec3(kTwoPi, kTwoPi, kTwoPi));
}

PotentialCoefficients real_potential(std::mt19937_64& g) {
    std::array<cplx, kModeCount> z;
    for (auto& v : z) {
        const double m = invrec::testing::uniform(g, 0.3, 1.5);
        v = invrec::testing::uniform(g, 0, 1) < 0.5 ? -m : m;
    }
    return PotentialCoefficients(AdmissibleBasis::default_fixture(), z);
}

PotentialCoefficients scaled(const PotentialCoefficients& q, double lambda) {
    auto z = q.coefficients();
    for (auto& v : z) v *= lambda;
    return PotentialCoefficients(q.basis(), z);
}

bool same_bits(double x, double y) { return std::memcmp(&x, &y, sizeof x) == 0; }

}  // namespace

TEST_CASE("InvariantSet layout") {
    const auto& keys = InvariantSet::keys();
    CHECK(keys.size() == 40);
    InvariantSet s;
    for (std::size_t n = 0; n < keys.size(); ++n) s[keys[n]] = static_cast<double>(n);
    for (std::size_t n = 0; n < keys.size(); ++n) CHECK(s.values()[n] == static_cast<double>(n));
    CHECK(s.I1_diff(3, 2) == s[{Family::I1Diff, 3, 2}]);
    CHECK_THROWS_AS((s[{Family::I1Sum, 2, 2}]), std::out_of_range);
    CHECK_THROWS_AS((s[{Family::I, 14, 0}]), std::out_of_range);
    CHECK_THROWS_AS((s[{Family::I2Gamma, 0, 0}]), std::out_of_range);
    CHECK(to_string(keys[13]) == "I1 sum 1 2");
    CHECK(to_string(keys.back()) == "I2 gamma 3");
}

TEST_CASE("I by Parseval") {
    std::array<cplx, kModeCount> z;
    z.fill(cplx(0.5, 0.5));
    z[5] = cplx(1, 2);
    z[0] = 1.75;
    const PotentialCoefficients q(AdmissibleBasis::default_fixture(), z);
    CHECK(invariant_I(q, 6) == doctest::Approx(10).epsilon(1e-15));
    CHECK(invariant_I(q, 1) == doctest::Approx(2 * 1.75 * 1.75).epsilon(1e-15));
    CHECK_THROWS_AS(invariant_I(q, 0), std::out_of_range);
}

TEST_CASE("I agrees with 32^3 quadrature") {
    const auto q = random_generic_potential(AdmissibleBasis::default_fixture(), 7);
    const auto reps = enumerate_Q(q.basis().lattice()).representatives;
    for (int k = 1; k <= kModeCount; ++k) {
        const double quad = quadrature_abs2_directional(q, reps[static_cast<std::size_t>(k - 1)], 32);
        CHECK(std::abs(quad - invariant_I(q, k)) <= 1e-10 * (1 + invariant_I(q, k)));
    }
}

TEST_CASE("A1 reference value") {
    const auto b = staircase();
    const double A = coeff_A1(b, GammaVector::from(b, {1, 1, 0}), GammaVector::from(b, {1, 0, 0}));
    CHECK(A == doctest::Approx(25 / (kPi * kPi)).epsilon(1e-13));
}

TEST_CASE("A2 reference value against a hand derivation") {
    const auto b = staircase();
    // beta for (g1, g2): projection of g2 off g1 is (0, 2pi, 0); the plane lattice
    // n g1 + m g2 projects to m (0, 2pi, 0) so that vector is already primitive.
    const Vec3 g1 = b[0], g2 = b[1];
    const Vec3 beta(0, kTwoPi, 0);
    const double by_hand = 2 * (g1.squaredNorm() - g2.squaredNorm()) / std::pow(g2.dot(beta), 2);
    const double A = coeff_A2(b, GammaVector::from(b, {1, 0, 0}), GammaVector::from(b, {0, 1, 0}));
    CHECK(A == doctest::Approx(by_hand).epsilon(1e-13));
    CHECK(A == doctest::Approx(-1 / (2 * kPi * kPi)).epsilon(1e-13));
}

TEST_CASE("A coefficients on random admissible bases") {
    auto g = invrec::testing::rng(20);
    for (int trial = 0; trial < 50; ++trial) {
        const auto basis = invrec::testing::random_admissible_basis(g);
        const auto& L = basis.lattice();
        const InvariantGeometry geo(L);
        for (const auto& key : InvariantSet::keys()) {
            if (key.family == Family::I) continue;
            CHECK(geo.entry(key).A != 0.0);
            CHECK(std::isfinite(geo.entry(key).A));
        }
        for (int i = 1; i <= 3; ++i)
            for (int j = 1; j <= 3; ++j) {
                if (i == j) continue;
                const double A = geo.entry({Family::I2Pair, i, j}).A;
                const double d = L[i - 1].squaredNorm() - L[j - 1].squaredNorm();
                CHECK((A > 0) == (d > 0));
            }
    }
}

TEST_CASE("all-real potentials reduce the sums to signed products") {
    auto g = invrec::testing::rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const auto q = real_potential(g);
        const auto& L = q.basis().lattice();
        auto gv = [&](Coeffs c) { return GammaVector::from(L, c); };
        const auto z = [&](int k) { return q.coefficient(k).real(); };
        const double A1 = coeff_A1(L, gv({1, 1, 0}), gv({1, 0, 0}));
        CHECK(invariant_I1_sum(q, gv({1, 1, 0}), gv({1, 0, 0})) ==
              doctest::Approx(A1 * z(6) * z(1) * z(2)).epsilon(1e-12));
        // (g1, g2): the terms c = g2 and c = -g2 coincide, each A2 z1^2 z6 z8.
        const double A2 = coeff_A2(L, gv({1, 0, 0}), gv({0, 1, 0}));
        CHECK(invariant_I2_sum(q, gv({1, 0, 0}), gv({0, 1, 0})) ==
              doctest::Approx(2 * A2 * z(1) * z(1) * z(6) * z(8)).epsilon(1e-12));
    }
}

TEST_CASE("closed forms agree with the general sums on 200 potentials") {
    const auto basis = AdmissibleBasis::default_fixture();
    const InvariantGeometry geo(basis.lattice());
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto q = random_generic_potential(basis, seed);
        const auto closed = closed_forms(q, geo);
        const auto sums = symmetric_sums(q, geo);
        for (std::size_t n = 0; n < InvariantSet::kSize; ++n)
            CHECK(std::abs(closed.values()[n] - sums.values()[n]) <= 1e-11 * (1 + std::abs(closed.values()[n])));
    }
}

TEST_CASE("closed forms agree with the general sums on random admissible bases") {
    auto g = invrec::testing::rng(22);
    for (int trial = 0; trial < 30; ++trial) {
        const auto basis = invrec::testing::random_admissible_basis(g);
        const auto q = random_generic_potential(basis, static_cast<std::uint64_t>(trial));
        CHECK(max_relative_difference(closed_forms(q), symmetric_sums(q)) <= 1e-11);
    }
}

TEST_CASE("general sums agree with the quadrature of the defining integrals") {
    const auto q = random_generic_potential(AdmissibleBasis::default_fixture(), 3);
    const auto& L = q.basis().lattice();
    for (const auto& key : InvariantSet::keys()) {
        if (key.family == Family::I) continue;
        const auto [ac, bc] = invariant_arguments(key);
        const auto a = GammaVector::from(L, ac), b = GammaVector::from(L, bc);
        const bool first = key.family != Family::I2Pair && key.family != Family::I2Gamma;
        const double sum = first ? invariant_I1_sum(q, a, b) : invariant_I2_sum(q, a, b);
        const double raw = first ? quadrature_I1_integral(q, a, b) : quadrature_I2_integral(q, a, b);
        // The sum representation carries the opposite sign of the integral.
        CHECK(std::abs(sum + raw) <= 1e-8 * std::abs(sum));
    }
}

TEST_CASE("three routes on a batch of potentials") {
    const auto basis = AdmissibleBasis::default_fixture();
    const InvariantGeometry geo(basis.lattice());
    for (std::uint64_t seed = 100; seed < 105; ++seed) {
        const auto q = random_generic_potential(basis, seed);
        const auto sums = symmetric_sums(q, geo);
        const auto quad = quadrature(q, geo);
        for (std::size_t n = 0; n < InvariantSet::kSize; ++n)
            CHECK(std::abs(sums.values()[n] - quad.values()[n]) <= 1e-7 * (1 + std::abs(sums.values()[n])));
    }
}

TEST_CASE("negating beta leaves the sums bit-identical") {
    const auto q = random_generic_potential(AdmissibleBasis::default_fixture(), 5);
    const auto& L = q.basis().lattice();
    for (const auto& key : InvariantSet::keys()) {
        if (key.family == Family::I) continue;
        const auto [ac, bc] = invariant_arguments(key);
        const auto a = GammaVector::from(L, ac), b = GammaVector::from(L, bc);
        const Vec3 beta = orthogonal_decompose(L, a, b).beta;
        CHECK(same_bits(invariant_I1_sum(q, a, b, beta), invariant_I1_sum(q, a, b, -beta)));
        CHECK(same_bits(invariant_I2_sum(q, a, b, beta), invariant_I2_sum(q, a, b, -beta)));
        for (const auto& c : plane_modes(L, a, b)) {
            const double x = c.cart.dot(beta), y = c.cart.dot(-beta);
            CHECK(same_bits(x * x, y * y));
        }
    }
}

TEST_CASE("gauge invariance") {
    auto g = invrec::testing::rng(23);
    const auto basis = AdmissibleBasis::default_fixture();
    const InvariantGeometry geo(basis.lattice());
    for (int trial = 0; trial < 20; ++trial) {
        const auto q = random_generic_potential(basis, static_cast<std::uint64_t>(trial));
        const auto ref = closed_forms(q, geo);
        const Vec3 tau = invrec::testing::random_vec(g, -10, 10);
        CHECK(max_relative_difference(ref, closed_forms(translate(q, tau), geo)) <= 1e-10);
        CHECK(max_relative_difference(ref, closed_forms(invert(q), geo)) <= 1e-10);
        CHECK(max_relative_difference(ref, symmetric_sums(translate(q, tau), geo)) <= 1e-10);
    }
}

TEST_CASE("homogeneity degrees") {
    const auto q = random_generic_potential(AdmissibleBasis::default_fixture(), 9);
    const double lambda = -1.7;
    const auto base = symmetric_sums(q);
    const auto s = symmetric_sums(scaled(q, lambda));
    for (const auto& key : InvariantSet::keys()) {
        int degree = 3;
        if (key.family == Family::I) degree = 2;
        if (key.family == Family::I2Pair || key.family == Family::I2Gamma) degree = 4;
        CHECK(s[key] == doctest::Approx(std::pow(lambda, degree) * base[key]).epsilon(1e-12));
    }
}

TEST_CASE("constructed zero of a reflection entry") {
    // i = 1: Re(z(g11) conj z(g4) z(g1)) vanishes for z1 = z4 = 1, z11 = i.
    std::array<cplx, kModeCount> z;
    z.fill(cplx(0.6, 0.8));
    z[0] = 1;
    z[3] = 1;
    z[10] = cplx(0, 1);
    const PotentialCoefficients q(AdmissibleBasis::default_fixture(), z);
    CHECK(std::abs(closed_forms(q).I1_refl(1)) < 1e-15);
    CHECK(std::abs(symmetric_sums(q).I1_refl(1)) < 1e-13);
}

TEST_CASE("all invariants finite, I positive") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto inv = closed_forms(random_generic_potential(AdmissibleBasis::default_fixture(), seed));
        for (double v : inv.values()) CHECK(std::isfinite(v));
        for (int k = 1; k <= kModeCount; ++k) CHECK(inv.I(k) > 0);
    }
}

TEST_CASE("weighted plane norm with unit weight is the plane-function norm") {
    const auto q = random_generic_potential(AdmissibleBasis::default_fixture(), 4);
    const auto& L = q.basis().lattice();
    const auto a = GammaVector::from(L, {1, 1, 0}), b = GammaVector::from(L, {1, 0, 0});
    const Vec3 beta = orthogonal_decompose(L, a, b).beta;
    // Parseval: each +/- pair contributes 2 |z(c)|^2 |c|^2 / <beta,c>^2.
    double expect = 0;
    for (const auto& c : plane_modes(L, a, b)) expect += std::norm(q.at(c)) * c.cart.squaredNorm() / std::pow(c.cart.dot(beta), 2);
    const double got = quadrature_weighted_plane_norm(q, a, b, std::vector<double>(48, 1.0));
    CHECK(got == doctest::Approx(expect).epsilon(1e-12));
    CHECK_THROWS_AS(quadrature_weighted_plane_norm(q, a, b, std::vector<double>(10, 1.0)), std::invalid_argument);
}
