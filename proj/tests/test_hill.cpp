#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "invrec/errors.hpp"
#include "invrec/hill.hpp"
#include "support.hpp"

using namespace invrec;

namespace {

std::map<int, cplx> random_profile(std::mt19937_64& g, int max_n) {
    std::map<int, cplx> c;
    for (int n = 1; n <= max_n; ++n) {
        const cplx z(invrec::testing::uniform(g, -1, 1), invrec::testing::uniform(g, -1, 1));
        const cplx zz = z / std::max(1.0, std::abs(z));
        c[n] = zz;
        c[-n] = std::conj(zz);
    }
    return c;
}

}  // namespace

TEST_CASE("problem validation") {
    HillProblem p;
    p.coefficients = {{1, cplx(0.5, 0.1)}};
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p.coefficients = {{1, cplx(0.5, 0.1)}, {-1, cplx(0.5, -0.1)}};
    CHECK_NOTHROW(validate(p));
    p.coefficients[0] = 1.0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p.coefficients.erase(0);
    p.v = 1.0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p.v = 0.2;
    p.truncation = 11;
    CHECK_THROWS_AS(validate(p), TruncationTooSmall);
    p.truncation = 12;
    CHECK_NOTHROW(validate(p));
}

TEST_CASE("free case is exact") {
    for (double v : {0.0, 0.3, 0.77}) {
        HillProblem p;
        p.delta_norm = 1.7;
        p.v = v;
        p.truncation = 20;
        const auto s = spectrum(p);
        REQUIRE(s.eigenvalues.size() == 41);
        std::vector<double> expect;
        for (int n = -20; n <= 20; ++n) expect.push_back(p.delta_norm * p.delta_norm * (n + v) * (n + v));
        std::sort(expect.begin(), expect.end());
        for (std::size_t i = 0; i < expect.size(); ++i)
            CHECK(std::abs(s.eigenvalues[i] - expect[i]) <= 1e-12 * std::max(1.0, expect[i]));
    }
}

TEST_CASE("matrix is Hermitian and the spectrum sorted") {
    auto g = invrec::testing::rng(50);
    HillProblem p;
    p.coefficients = random_profile(g, 3);
    p.v = 0.41;
    const auto m = hill_matrix(p);
    CHECK((m - m.adjoint()).norm() == 0.0);
    const auto s = spectrum(p);
    CHECK(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
}

TEST_CASE("self-convergence under doubling the truncation") {
    auto g = invrec::testing::rng(51);
    for (int trial = 0; trial < 10; ++trial) {
        HillProblem p;
        p.coefficients = random_profile(g, 1 + trial % 3);
        p.v = invrec::testing::uniform(g, 0, 1);
        p.delta_norm = invrec::testing::uniform(g, 0.7, 2);
        p.truncation = 40;
        const auto a = spectrum(p);
        p.truncation = 80;
        const auto b = spectrum(p);
        for (std::size_t i = 0; i < 10; ++i) CHECK(std::abs(a.eigenvalues[i] - b.eigenvalues[i]) <= 1e-10);
    }
}

TEST_CASE("second-order perturbation for a single cosine") {
    HillProblem p;
    p.coefficients = cosine_profile(0.01);
    p.v = 0.3;
    for (int n = 2; n <= 5; ++n) {
        const auto e = nearest_eigenpair(p, n);
        const double shift = e.mu - (n + p.v) * (n + p.v);
        CHECK(std::abs(shift - cosine_second_order_shift(0.01, 1, 0.3, n)) <= 5e-8);
    }
    SUBCASE("the shift scales as mu^2") {
        const auto e1 = nearest_eigenpair(p, 3);
        p.coefficients = cosine_profile(0.02);
        const auto e2 = nearest_eigenpair(p, 3);
        const double base = 3.3 * 3.3;
        CHECK((e2.mu - base) / (e1.mu - base) == doctest::Approx(4).epsilon(1e-4));
    }
    SUBCASE("|delta| enters as 1/|delta|^2") {
        p.delta_norm = 2;
        const auto e = nearest_eigenpair(p, 3);
        CHECK(std::abs(e.mu - 4 * 3.3 * 3.3 - cosine_second_order_shift(0.01, 2, 0.3, 3)) <= 5e-8);
    }
}

TEST_CASE("v-continuity of the eigenvalues") {
    auto g = invrec::testing::rng(52);
    HillProblem p;
    p.coefficients = random_profile(g, 2);
    p.truncation = 20;
    std::vector<double> prev;
    double worst = 0;
    for (int k = 0; k < 1000; k += 7) {
        p.v = k * 1e-3;
        const auto s = spectrum(p).eigenvalues;
        if (!prev.empty())
            for (std::size_t i = 0; i < 10; ++i) worst = std::max(worst, std::abs(s[i] - prev[i]));
        prev = s;
        p.v += 1e-3;
        const auto t = spectrum(p).eigenvalues;
        double jump = 0;
        for (std::size_t i = 0; i < 10; ++i) jump = std::max(jump, std::abs(t[i] - s[i]));
        CHECK(jump <= 1e-2);
    }
    CHECK(worst > 0);
}

TEST_CASE("eigenfunction density") {
    HillProblem p;
    p.coefficients = cosine_profile(0.3);
    p.v = 0.25;
    const auto e = nearest_eigenpair(p, 4);
    const auto h = density_coefficients(e);
    const int nt = p.truncation;
    CHECK(std::abs(h[static_cast<std::size_t>(2 * nt)] - cplx(1)) < 1e-13);
    for (int m = 1; m <= 2 * nt; ++m)
        CHECK(std::abs(h[static_cast<std::size_t>(2 * nt + m)] -
                       std::conj(h[static_cast<std::size_t>(2 * nt - m)])) < 1e-13);
    const auto samples = density_samples(e, 64);
    double mean = 0;
    for (double x : samples) mean += x / 64;
    CHECK(mean == doctest::Approx(1).epsilon(1e-12));
    // samples agree with the Fourier series of the density
    for (int t = 0; t < 64; t += 9) {
        cplx acc = 0;
        for (int m = -2 * nt; m <= 2 * nt; ++m)
            acc += h[static_cast<std::size_t>(m + 2 * nt)] * std::polar(1.0, m * 2 * invrec::testing::kPi * t / 64);
        CHECK(std::abs(acc.real() - samples[static_cast<std::size_t>(t)]) < 1e-12);
    }
    CHECK_THROWS_AS(nearest_eigenpair(p, 35), TruncationTooSmall);
}

TEST_CASE("gap lengths") {
    SUBCASE("zero potential has no gaps") {
        const auto r = gap_lengths({}, 10);
        for (const auto& row : r.rows) CHECK(row.gap == 0.0);
        CHECK(r.lambda0 == 0.0);
        for (const auto& row : r.rows) CHECK(row.lambda1 == doctest::Approx(row.n * row.n));
    }
    SUBCASE("first gap of 2 mu cos 2x tends to 2 mu") {
        double prev_err = 1;
        for (double mu : {1e-1, 1e-2, 1e-3}) {
            const auto r = gap_lengths(cosine_profile(mu), 3);
            const double err = std::abs(r.rows[0].gap / mu - 2);
            CHECK(err < prev_err);
            prev_err = err;
        }
        CHECK(prev_err < 0.02 * 2);
    }
    SUBCASE("interlacing on random real polynomials") {
        auto g = invrec::testing::rng(53);
        for (int trial = 0; trial < 20; ++trial) {
            const auto p = random_profile(g, 1 + trial % 4);
            const auto r = gap_lengths(p, 12);
            CHECK_NOTHROW(check_interlacing(r));
            for (const auto& row : r.rows) CHECK(row.gap >= 0);
        }
    }
    SUBCASE("a broken chain is reported") {
        GapReport r;
        r.lambda0 = 0;
        r.rows = {{1, 1.0, 1.5, 0.5}, {2, 1.4, 4.0, 2.6}};
        CHECK_THROWS_AS(check_interlacing(r), InterlacingViolation);
    }
    SUBCASE("truncation guard") {
        CHECK_THROWS_AS(gap_lengths(cosine_profile(1, 3), 20, 5), TruncationTooSmall);
        CHECK_NOTHROW(gap_lengths(cosine_profile(1, 3), 20, minimal_gap_truncation(cosine_profile(1, 3), 20)));
    }
    SUBCASE("first gap scales linearly with a small amplitude") {
        const auto a = gap_lengths(cosine_profile(1e-3), 2);
        const auto b = gap_lengths(cosine_profile(3e-3), 2);
        CHECK(b.rows[0].gap / a.rows[0].gap == doctest::Approx(3).epsilon(1e-4));
    }
}

TEST_CASE("gap sequences against the Mathieu asymptotics") {
    // 2 cos 2x: gap_n ~ 8 (1/4)^n / ((n-1)!)^2
    const auto r = gap_lengths(cosine_profile(1), 9);
    double fact = 1;
    for (int n = 1; n <= 9; ++n) {
        if (n > 1) fact *= n - 1;
        const double approx = 8 * std::pow(0.25, n) / (fact * fact);
        if (n >= 5) CHECK(r.rows[static_cast<std::size_t>(n - 1)].gap == doctest::Approx(approx).epsilon(0.05));
    }
}

TEST_CASE("decay comparison") {
    const auto p1 = cosine_profile(1, 1);
    const auto p2 = cosine_profile(1, 2);
    const auto r = gap_decay_compare(p2, p1, 1, 12);
    CHECK(r.degree_high == 2);
    CHECK(r.degree_low == 1);
    REQUIRE(r.exponent_high);
    REQUIRE(r.exponent_low);
    CHECK(*r.exponent_high > *r.exponent_low);

    SUBCASE("identical inputs give identical sequences") {
        const auto again = gap_decay_compare(p2, p1, 1, 12);
        for (std::size_t i = 0; i < r.rows.size(); ++i) {
            CHECK(r.rows[i].gap_high == again.rows[i].gap_high);
            CHECK(r.rows[i].gap_low == again.rows[i].gap_low);
        }
    }
    SUBCASE("even gaps of the degree-2 potential dominate") {
        for (const auto& row : r.rows)
            if (row.n % 2 == 0 && row.n >= 6) CHECK(row.gap_high > row.gap_low);
    }
    SUBCASE("odd gaps of 2 cos 4x vanish") {
        for (const auto& row : r.rows)
            if (row.n % 2 == 1) CHECK(row.underflow_high);
        CHECK_THROWS_AS(require_resolved(r), GapUnderflow);
        const auto v = dominance(r, 8, 12);
        CHECK_FALSE(v.holds);
        CHECK(v.failed == std::vector<int>{9, 11});
    }
    SUBCASE("a degree-2 potential with both harmonics dominates at every n") {
        auto p = p1;
        p[2] = 1.0;
        p[-2] = 1.0;
        const auto full = gap_decay_compare(p, p1, 6, 12);
        const auto v = dominance(full, 6, 12);
        CHECK(v.holds);
    }
    CHECK_THROWS_AS(gap_decay_compare(p1, p2, 1, 5), std::invalid_argument);
}

TEST_CASE("c3 probe") {
    SUBCASE("zero potential") {
        HillProblem p;
        p.v = 0.3;
        p.truncation = 60;
        const auto c = c3_probe(p, 10, 40);
        for (double x : c.coefficients) CHECK(std::abs(x) <= 1e-10);
        CHECK(c.c3_predicted == 0.0);
    }
    SUBCASE("single cosine") {
        HillProblem p;
        p.coefficients = cosine_profile(0.5);
        p.v = 0.3;
        p.truncation = 80;
        const auto c = c3_probe(p, 20, 60);
        CHECK(c.c3_predicted == doctest::Approx(0.0625));
        CHECK(c.second_order_j2 == doctest::Approx(0.125));
        CHECK(c.coefficients[1] == doctest::Approx(c.second_order_j2).epsilon(1e-3));
        // expansion of mu^2 / (2 (j+v)^2) gives -v mu^2 at j^-3
        CHECK(c.coefficients[2] == doctest::Approx(-0.3 * 0.25).epsilon(0.02));
        CHECK(c.fit_rms < 1e-9);
    }
    SUBCASE("directional mass conversion") {
        // int_0^{2pi} |2 mu cos t|^2 dt / (16 pi) = mu^2 / 4
        for (double mu : {0.1, 0.5, 2.0}) {
            HillProblem p;
            p.coefficients = cosine_profile(mu);
            p.truncation = 60;
            const int n = 4096;
            double integral = 0;
            for (int t = 0; t < n; ++t) {
                const double x = 2 * mu * std::cos(2 * invrec::testing::kPi * t / n);
                integral += x * x * 2 * invrec::testing::kPi / n;
            }
            CHECK(c3_probe(p, 10, 30).c3_predicted == doctest::Approx(integral / (16 * invrec::testing::kPi)));
            CHECK(integral / (16 * invrec::testing::kPi) == doctest::Approx(mu * mu / 4));
        }
    }
}
