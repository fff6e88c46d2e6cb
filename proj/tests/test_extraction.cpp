#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "invrec/errors.hpp"
#include "invrec/extraction.hpp"
#include "invrec/invariants.hpp"
#include "support.hpp"

using namespace invrec;
using invrec::testing::kPi;

namespace {

struct Fixture {
    AdmissibleBasis basis = AdmissibleBasis::default_fixture();
    PotentialCoefficients q = random_generic_potential(basis, 1);
    GammaVector delta = basis.vector({1, 0, 0});
};

double relerr(double x, double y) { return std::abs(x - y) / std::max(std::abs(y), 1e-300); }

}  // namespace

TEST_CASE("constants") {
    CHECK(-3 * kAExp + 2 * kAlpha1 == doctest::Approx(-101.0 / 36).epsilon(1e-14));
    CHECK(-kAExp + 2 * kAlpha1 == doctest::Approx(-400.0 / 432).epsilon(1e-14));
    CHECK(kAExp - 6 * kAlpha1 == doctest::Approx(97.0 / 108).epsilon(1e-14));
    CHECK(remainder_bound(1e4) == doctest::Approx(std::pow(1e4, -101.0 / 36) * std::log(1e4)));
}

TEST_CASE("planes through delta partition the mode set") {
    const auto basis = AdmissibleBasis::default_fixture();
    for (const auto& rep : representative_coeffs()) {
        const auto delta = basis.vector(rep);
        const auto planes = delta_planes(basis.lattice(), delta);
        std::set<Coeffs> seen;
        std::size_t total = 0;
        for (const auto& p : planes) {
            CHECK(std::abs(p.b.dot(delta.cart)) <= 1e-9 * p.b.norm() * delta.cart.norm());
            for (const auto& c : p.modes) {
                CHECK(std::abs(delta.cart.dot(p.mode.cart.cross(c.cart))) <= 1e-9 * 1e3);
                seen.insert(c.coeffs);
            }
            total += p.modes.size();
        }
        CHECK(seen.size() == 24);
        CHECK(total == 24);
    }
}

TEST_CASE("geometry regimes") {
    Fixture f;
    for (double rho : {1e3, 1e4, 1e5, 1e6}) {
        for (int m : {1, 2, 3}) {
            const auto g = make_geometry(f.basis.lattice(), f.delta, rho, m);
            CHECK(g.points.size() == static_cast<std::size_t>(m + 1));
            CHECK_FALSE(check_geometry(g).has_value());
            CHECK(g.far_lower > 0.1);
            CHECK(g.far_upper < 50);
        }
    }
    CHECK_THROWS_AS(make_geometry(f.basis.lattice(), f.delta, 1e3, 0), std::invalid_argument);
    CHECK_THROWS_AS(make_geometry(f.basis.lattice(), f.delta, 1e3, 5), std::invalid_argument);
}

TEST_CASE("J by Parseval matches grid quadrature") {
    Fixture f;
    const auto planes = delta_planes(f.basis.lattice(), f.delta);
    for (int j : {0, 2, 5}) {
        const auto p = directional_problem(f.q, f.delta, 0.3, 40);
        const auto e = nearest_eigenpair(p, j);
        const auto w = density_samples(e, 48);
        for (const auto& plane : planes) {
            const double parseval = j_parseval(f.q, f.delta, plane, e);
            const double grid = quadrature_weighted_plane_norm(f.q, f.delta, plane.mode, w, 48);
            CHECK(relerr(parseval, grid) <= 1e-10);
            CHECK(parseval > 0);
        }
    }
}

TEST_CASE("synthetic data model") {
    Fixture f;
    SUBCASE("single plane, no noise") {
        const auto g = make_geometry(f.basis.lattice(), f.delta, 1e4, 1);
        const auto d = generate_synthetic(f.q, g, {2}, 0.3, 0, 9);
        const auto& t = d.truth.at(2);
        const auto& lam = d.Lambda.at(2)[1];
        const Vec3& x = g.points[1];
        const Vec3& b = g.planes[0].b;
        using Quad = boost::multiprecision::cpp_bin_float_quad;
        const Quad x2 = Quad(x.x()) * x.x() + Quad(x.y()) * x.y() + Quad(x.z()) * x.z();
        const double lhs = static_cast<double>(Quad(lam.hi) + lam.lo - x2 - t.mu);
        const double rhs = 0.25 * std::pow(b.squaredNorm(), 2) / std::pow(x.dot(b), 2) * t.J[0];
        CHECK(relerr(lhs, rhs) <= 1e-6);
    }
    SUBCASE("reproducible per seed") {
        const auto g = make_geometry(f.basis.lattice(), f.delta, 1e3, 2);
        const auto a = generate_synthetic(f.q, g, {1, 3}, 0.3, 1, 4);
        const auto b = generate_synthetic(f.q, g, {1, 3}, 0.3, 1, 4);
        const auto c = generate_synthetic(f.q, g, {1, 3}, 0.3, 1, 5);
        bool differs = false;
        for (int j : {1, 3})
            for (std::size_t s = 0; s < 3; ++s) {
                CHECK(a.Lambda.at(j)[s].hi == b.Lambda.at(j)[s].hi);
                CHECK(a.Lambda.at(j)[s].lo == b.Lambda.at(j)[s].lo);
                differs |= a.Lambda.at(j)[s].lo != c.Lambda.at(j)[s].lo || a.Lambda.at(j)[s].hi != c.Lambda.at(j)[s].hi;
            }
        CHECK(differs);
    }
    SUBCASE("noise stays within the bound") {
        const auto g = make_geometry(f.basis.lattice(), f.delta, 1e3, 2);
        const auto clean = generate_synthetic(f.q, g, {3}, 0.3, 0, 4);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto noisy = generate_synthetic(f.q, g, {3}, 0.3, 1, seed);
            for (std::size_t s = 0; s < 3; ++s) {
                const auto& x = noisy.Lambda.at(3)[s];
                const auto& y = clean.Lambda.at(3)[s];
                const double diff = (x.hi - y.hi) + (x.lo - y.lo);
                CHECK(std::abs(diff) <= remainder_bound(1e3) * (1 + 1e-6));
            }
        }
    }
}

TEST_CASE("mu and J recovery") {
    Fixture f;
    SUBCASE("exact without noise") {
        for (double rho : {1e3, 1e6}) {
            const auto g = make_geometry(f.basis.lattice(), f.delta, rho, 2);
            const auto d = generate_synthetic(f.q, g, {1, 2, 3}, 0.3, 0, 1);
            const auto est = solve_mu_J(d);
            for (int j : {1, 2, 3}) {
                const auto& e = est.at(j);
                const auto& t = d.truth.at(j);
                CHECK(std::abs(*e.mu_error) <= 1e-9 * std::abs(t.mu));
                CHECK(relerr(e.mu, t.mu) <= 1e-9);
                for (std::size_t k = 0; k < 2; ++k) CHECK(std::abs(e.J_error[k]) <= 1e-9 * std::abs(t.J[k]));
            }
        }
    }
    SUBCASE("determinant follows the diagonal product") {
        const auto g = make_geometry(f.basis.lattice(), f.delta, 1e5, 2);
        const auto e = solve_mu_J(generate_synthetic(f.q, g, {3}, 0.3, 0, 1)).at(3);
        CHECK(e.det / e.det_predicted == doctest::Approx(1).epsilon(0.5));
    }
    SUBCASE("degenerate sample points are rejected") {
        auto g = make_geometry(f.basis.lattice(), f.delta, 1e3, 2);
        g.points[2] = g.points[1];
        CHECK_THROWS_AS(solve_mu_J(generate_synthetic(f.q, g, {3}, 0.3, 0, 1)), IllConditioned);
    }
}

TEST_CASE("error scaling over the rho sweep") {
    Fixture f;
    SweepConfig cfg;
    cfg.seeds = 16;
    const auto r = extraction_sweep(f.q, f.delta, cfg);
    REQUIRE(r.rows.size() == 4);
    CHECK(std::abs(r.mu_slope / (-101.0 / 36) - 1) <= 0.15);
    CHECK(std::abs(r.J_slope / (-400.0 / 432) - 1) <= 0.15);
    CHECK(std::abs(r.det_slope / (-4 * kAExp) - 1) <= 0.10);
    CHECK(r.zero_noise_error <= 1e-9);
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
        CHECK(r.rows[i].mu_err < r.rows[i - 1].mu_err);
        CHECK(r.rows[i].J_err < r.rows[i - 1].J_err);
    }
    CHECK(loglog_slope({1, 10, 100}, {3, 0.3, 0.03}) == doctest::Approx(-1));
}

TEST_CASE("c expansion") {
    SUBCASE("unit third coefficient") {
        const int j = 10;
        std::map<int, double> r;
        for (int k = 1; k <= 4; ++k) r[k] = 1 / std::pow(j * k, 3);
        const auto c = solve_c_from_residuals(r, j, 4);
        const std::vector<double> expect{0, 0, 1, 0};
        for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(c[i] - expect[i]) <= 1e-8);
    }
    SUBCASE("random profiles on residuals") {
        auto g = invrec::testing::rng(63);
        for (int trial = 0; trial < 60; ++trial) {
            const int n = 1 + trial % kMaxCExpansion;
            const int j = 5 + trial % 7;
            std::vector<double> c(static_cast<std::size_t>(n));
            for (auto& x : c) x = invrec::testing::uniform(g, -2, 2);
            std::map<int, double> r;
            for (int k = 1; k <= n; ++k) {
                double v = 0;
                for (int i = 1; i <= n; ++i) v += c[static_cast<std::size_t>(i - 1)] / std::pow(j * k, i);
                r[k] = v;
            }
            const auto got = solve_c_from_residuals(r, j, n);
            double rmax = 0;
            for (const auto& [k, v] : r) rmax = std::max(rmax, std::abs(v));
            const double eta = std::numeric_limits<double>::epsilon() * rmax;
            for (int i = 1; i <= n; ++i) {
                const double err = std::abs(got[static_cast<std::size_t>(i - 1)] - c[static_cast<std::size_t>(i - 1)]);
                CHECK(err <= 2 * c_expansion_noise_gain(n, i) * eta * std::pow(j, i) + 1e-12);
                if (n <= 4) CHECK(err <= 1e-8 * std::max(1.0, std::abs(c[static_cast<std::size_t>(i - 1)])));
            }
        }
    }
    SUBCASE("random profiles through the baseline subtraction") {
        auto g = invrec::testing::rng(60);
        for (int trial = 0; trial < 50; ++trial) {
            const int n = 1 + trial % kMaxCExpansion;
            const int j = 5 + trial % 7;
            const double dn = invrec::testing::uniform(g, 0.5, 2);
            const double shift = invrec::testing::uniform(g, 0, 1);
            std::vector<double> c(static_cast<std::size_t>(n));
            for (auto& x : c) x = invrec::testing::uniform(g, -2, 2);
            std::map<int, double> mu;
            for (int k = 1; k <= n; ++k) {
                const double jk = j * k;
                double v = dn * dn * (jk + shift) * (jk + shift);
                for (int i = 1; i <= n; ++i) v += c[static_cast<std::size_t>(i - 1)] / std::pow(jk, i);
                mu[k] = v;
            }
            const auto got = solve_c_expansion(mu, j, n, dn, shift);
            // input rounding: one ulp of the largest sample
            const double eta = std::numeric_limits<double>::epsilon() * mu.rbegin()->second;
            for (int i = 1; i <= n; ++i)
                CHECK(std::abs(got[static_cast<std::size_t>(i - 1)] - c[static_cast<std::size_t>(i - 1)]) <=
                      2 * c_expansion_noise_gain(n, i) * eta * std::pow(j, i) + 1e-9);
        }
    }
    SUBCASE("noise propagation is bounded by the inverse row norm") {
        auto g = invrec::testing::rng(61);
        const int j = 10, n = 4;
        const double eta = 1e-9;
        const double gain = c_expansion_noise_gain(n, 3);
        double worst = 0;
        for (int trial = 0; trial < 200; ++trial) {
            std::map<int, double> mu;
            for (int k = 1; k <= n; ++k)
                mu[k] = std::pow(j * k, 2) + 1 / std::pow(j * k, 3) + eta * invrec::testing::uniform(g, -1, 1);
            const double err = std::abs(solve_c_expansion(mu, j, n, 1)[2] - 1);
            CHECK(err <= gain * eta * std::pow(j, 3) * (1 + 1e-6) + 1e-9);
            worst = std::max(worst, err / (eta * std::pow(j, 3)));
        }
        CHECK(worst > 0.05 * gain);
    }
    SUBCASE("guards") {
        std::map<int, double> mu{{1, 1.0}, {2, 1.0}};
        CHECK_THROWS_AS(solve_c_expansion(mu, 10, 3, 1), std::invalid_argument);
        CHECK_THROWS_AS(solve_c_expansion(mu, 10, kMaxCExpansion + 1, 1), IllConditioned);
        CHECK_THROWS_AS(solve_J_expansion(mu, 10, kMaxJExpansion + 1), IllConditioned);
    }
    SUBCASE("directional mass of a single cosine") {
        for (double mu : {0.1, 0.7, 1.5}) {
            // c3 = (1 / 16 pi) int_0^{2 pi} (2 mu cos t)^2 dt = mu^2 / 4
            const double c3 = mu * mu / 4;
            CHECK(directional_mass_from_c3(c3, 1) == doctest::Approx(4 * kPi * mu * mu));
            HillProblem p;
            p.coefficients = cosine_profile(mu);
            CHECK(c3_probe(p, 10, 25).c3_predicted == doctest::Approx(c3));
        }
    }
}

TEST_CASE("J expansion") {
    SUBCASE("synthetic profile") {
        const std::vector<double> J{0.7, 0.0, -0.3, 0.11, 0.05};
        const int j = 10;
        std::map<int, double> samples;
        for (int k = 1; k <= 5; ++k) {
            double v = 0;
            for (int i = 0; i <= 4; ++i) v += J[static_cast<std::size_t>(i)] / std::pow(j * k, i);
            samples[k] = v;
        }
        const auto got = solve_J_expansion(samples, j, 4);
        for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(got[i] - J[i]) <= 1e-8 * std::max(1.0, std::abs(J[i])));
    }
    Fixture f;
    const auto planes = delta_planes(f.basis.lattice(), f.delta);
    const auto& plane = planes[0];
    std::map<int, double> samples;
    const int j = 10;
    for (int k = 1; k <= 5; ++k) {
        const auto p = directional_problem(f.q, f.delta, 0.3, j * k + 20);
        samples[k] = j_parseval(f.q, f.delta, plane, nearest_eigenpair(p, j * k));
    }
    const auto J = solve_J_expansion(samples, j, 4);
    const std::vector<double> one(48, 1.0);
    const double J0 = quadrature_weighted_plane_norm(f.q, f.delta, plane.mode, one, 48);
    const double i1 = invariant_I1_sum(f.q, f.delta, plane.mode);
    const double dn = f.delta.cart.norm();

    SUBCASE("leading coefficient is the plain plane norm") { CHECK(relerr(J[0], J0) <= 1e-8); }
    SUBCASE("first-order coefficient vanishes") { CHECK(std::abs(J[1]) <= 1e-8 * J0); }
    SUBCASE("second-order coefficient carries I1 in units of j |delta|") {
        // with a1 = 0: J2 |delta|^2 = 1/2 int |q|^2 Q = -I1 / 2 in the library convention
        CHECK(relerr(J[2] * dn * dn, -0.5 * i1) <= 1e-3);
        DensityConstants c;
        c.a[4] = 1;
        CHECK(relerr(invariants_from_J(J[0], J[2], 0, std::norm(f.q.at(f.delta)), c, dn).I1, i1) <= 1e-3);
    }
}

TEST_CASE("J to invariants map on constructed data") {
    Fixture f;
    auto g = invrec::testing::rng(62);
    const auto planes = delta_planes(f.basis.lattice(), f.delta);
    const cplx z = f.q.at(f.delta);
    for (int trial = 0; trial < 10; ++trial) {
        DensityConstants c;
        for (auto& x : c.a) x = invrec::testing::uniform(g, -1, 1);
        if (std::abs(c.a[4]) < 0.1) c.a[4] = 0.5;
        const auto& plane = planes[static_cast<std::size_t>(trial) % planes.size()];
        // A2 and A4 sampled on the grid
        std::vector<double> a2(48), a4(48), one(48, 1.0);
        for (int t = 0; t < 48; ++t) {
            const double s = 2 * kPi * t / 48;
            const double Q = 2 * std::real(z * std::polar(1.0, s));
            a2[static_cast<std::size_t>(t)] = Q / 2 + c.a[0] * std::norm(z);
            a4[static_cast<std::size_t>(t)] =
                c.a[3] * Q + c.a[4] * 2 * std::real(z * z * std::polar(1.0, 2 * s)) + c.a[5];
        }
        const double J0 = quadrature_weighted_plane_norm(f.q, f.delta, plane.mode, one, 48);
        const double J2 = quadrature_weighted_plane_norm(f.q, f.delta, plane.mode, a2, 48);
        const double J4 = quadrature_weighted_plane_norm(f.q, f.delta, plane.mode, a4, 48);
        const auto inv = invariants_from_J(J0, J2, J4, std::norm(z), c);
        CHECK(relerr(inv.I1, invariant_I1_sum(f.q, f.delta, plane.mode)) <= 1e-9);
        CHECK(relerr(inv.I2, invariant_I2_sum(f.q, f.delta, plane.mode)) <= 1e-9);
    }
    DensityConstants zero;
    CHECK_THROWS_AS(invariants_from_J(1, 1, 1, 1, zero), std::invalid_argument);
}
