#include "invrec/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "invrec/errors.hpp"

namespace invrec {

namespace {

using Quad = boost::multiprecision::cpp_bin_float_quad;
using QuadMatrix = std::vector<std::vector<Quad>>;

Wide to_wide(const Quad& x) {
    const auto hi = static_cast<double>(x);
    return {hi, static_cast<double>(x - hi)};
}

Quad from_wide(const Wide& w) { return Quad(w.hi) + Quad(w.lo); }

Quad quad_dot(const Vec3& a, const Vec3& b) {
    return Quad(a.x()) * b.x() + Quad(a.y()) * b.y() + Quad(a.z()) * b.z();
}

// Gaussian elimination with partial pivoting; returns the determinant.
Quad solve_in_place(QuadMatrix a, std::vector<Quad>& rhs) {
    const std::size_t n = rhs.size();
    Quad det = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (abs(a[r][col]) > abs(a[piv][col])) piv = r;
        if (a[piv][col] == 0) return 0;
        if (piv != col) {
            std::swap(a[piv], a[col]);
            std::swap(rhs[piv], rhs[col]);
            det = -det;
        }
        det *= a[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const Quad f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        Quad acc = rhs[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * rhs[c];
        rhs[i] = acc / a[i][i];
    }
    return det;
}

Quad weight(const Vec3& point, const Vec3& b) {
    const Quad b2 = quad_dot(b, b);
    const Quad ip = quad_dot(point, b);
    return b2 * b2 / (4 * ip * ip);
}

// Solves sum_i x_i k^{-(i + offset)} = y_k, k = 1..size.
std::vector<long double> scaled_vandermonde_solve(const std::vector<long double>& y, int offset) {
    const auto n = static_cast<Eigen::Index>(y.size());
    Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> v(n, n);
    Eigen::Matrix<long double, Eigen::Dynamic, 1> rhs(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index i = 0; i < n; ++i)
            v(k, i) = std::pow(static_cast<long double>(k + 1), -static_cast<long double>(i + offset));
        rhs(k) = y[static_cast<std::size_t>(k)];
    }
    const Eigen::Matrix<long double, Eigen::Dynamic, 1> x = v.fullPivLu().solve(rhs);
    return {x.data(), x.data() + n};
}

}  // namespace

double remainder_bound(double rho) { return std::pow(rho, -3 * kAExp + 2 * kAlpha1) * std::log(rho); }

std::vector<DeltaPlane> delta_planes(const LatticeBasis& basis, const GammaVector& delta) {
    std::vector<DeltaPlane> planes;
    const ModeSet q = enumerate_Q(basis);
    for (const auto& c : q.representatives) {
        if (std::abs(c.cart.cross(delta.cart).norm()) <= 1e-12 * c.cart.norm() * delta.cart.norm()) continue;
        bool seen = false;
        for (const auto& p : planes) {
            const double triple = delta.cart.dot(p.mode.cart.cross(c.cart));
            if (std::abs(triple) <= 1e-9 * delta.cart.norm() * p.mode.cart.norm() * c.cart.norm()) seen = true;
        }
        if (seen) continue;
        DeltaPlane p;
        p.mode = c;
        p.b = orthogonal_decompose(basis, delta, c).beta;
        p.modes = plane_modes(basis, delta, c);
        planes.push_back(std::move(p));
    }
    return planes;
}

ExtractionGeometry make_geometry(const LatticeBasis& basis, const GammaVector& delta, double rho, int m) {
    if (!(rho > 1)) throw std::invalid_argument("rho must exceed 1");
    auto planes = delta_planes(basis, delta);
    if (m < 1 || m > static_cast<int>(planes.size()))
        throw std::invalid_argument("m must lie in [1, " + std::to_string(planes.size()) + "]");
    planes.resize(static_cast<std::size_t>(m));

    ExtractionGeometry g;
    g.rho = rho;
    g.delta = delta;
    g.planes = planes;
    const Vec3 dhat = delta.cart.normalized();
    const double near = std::pow(rho, kAExp);

    // s = 0: direction in the plane orthogonal to delta that keeps away from every b_k
    const Vec3 e1 = planes[0].b.normalized();
    const Vec3 e2 = dhat.cross(e1);
    Vec3 best = e1;
    double best_score = -1;
    for (int t = 0; t < 3600; ++t) {
        const double th = std::numbers::pi * t / 3600;
        const Vec3 w = std::cos(th) * e1 + std::sin(th) * e2;
        double score = 1;
        for (const auto& p : planes) score = std::min(score, std::abs(w.dot(p.b.normalized())));
        if (score > best_score) {
            best_score = score;
            best = w;
        }
    }
    g.points.push_back(rho * best);

    for (int s = 1; s <= m; ++s) {
        const Vec3& b = planes[static_cast<std::size_t>(s - 1)].b;
        const double target = near * (1 + 0.1 * s);
        const double along = target / b.norm();
        const Vec3 n = dhat.cross(b.normalized());
        g.points.push_back(target / b.squaredNorm() * b + std::sqrt(rho * rho - along * along) * n);
    }

    g.far_lower = INFINITY;
    g.far_upper = 0;
    for (std::size_t s = 0; s < g.points.size(); ++s) {
        std::vector<double> row;
        for (std::size_t k = 0; k < planes.size(); ++k) {
            const double ip = g.points[s].dot(planes[k].b);
            row.push_back(ip);
            if (s != k + 1) {
                g.far_lower = std::min(g.far_lower, std::abs(ip) / rho);
                g.far_upper = std::max(g.far_upper, std::abs(ip) / rho);
            }
        }
        g.inner.push_back(row);
    }
    return g;
}

std::optional<std::string> check_geometry(const ExtractionGeometry& g) {
    const double near = std::pow(g.rho, kAExp);
    for (std::size_t s = 0; s < g.points.size(); ++s) {
        if (std::abs(g.points[s].dot(g.delta.cart)) > 1e-9 * g.rho * g.delta.cart.norm())
            return "point " + std::to_string(s) + " is not orthogonal to delta";
        if (std::abs(g.points[s].norm() / g.rho - 1) > 1e-9) return "point " + std::to_string(s) + " has |x| != rho";
    }
    for (std::size_t k = 1; k < g.points.size(); ++k) {
        const double ip = std::abs(g.inner[k][k - 1]);
        if (!(ip > near / 3 && ip < 3 * near)) return "near regime fails for k = " + std::to_string(k);
    }
    if (!(g.far_lower > 1e-2)) return "far regime constant c1 too small";
    return std::nullopt;
}

HillProblem directional_problem(const PotentialCoefficients& q, const GammaVector& delta, double v,
                                int truncation) {
    HillProblem p;
    p.delta_norm = delta.cart.norm();
    for (int n = -2; n <= 2; ++n) {
        if (n == 0) continue;
        const cplx z = q.at(n * delta);
        if (z != cplx(0)) p.coefficients[n] = z;
    }
    p.v = v;
    p.truncation = truncation;
    return p;
}

double j_parseval(const PotentialCoefficients& q, const GammaVector& delta, const DeltaPlane& plane,
                  const HillEigenpair& e) {
    const auto h = density_coefficients(e);
    const int hmax = static_cast<int>(h.size() - 1) / 2;
    cplx acc = 0;
    for (const auto& c : plane.modes) {
        const Vec3 wc = c.cart / c.cart.dot(plane.b);
        const cplx zc = q.at(c);
        for (const auto& d : plane.modes) {
            const GammaVector diff = d - c;
            int m = 0;
            bool found = diff.is_zero();
            for (int t = -4; t <= 4 && !found; ++t)
                if (t != 0 && (t * delta).coeffs == diff.coeffs) {
                    m = t;
                    found = true;
                }
            if (!found || std::abs(m) > hmax) continue;
            const Vec3 wd = d.cart / d.cart.dot(plane.b);
            acc += wc.dot(wd) * zc * std::conj(q.at(d)) * h[static_cast<std::size_t>(m + hmax)];
        }
    }
    return acc.real();
}

BandTruth band_truth(const PotentialCoefficients& q, const ExtractionGeometry& g, int j, double v) {
    const auto p = directional_problem(q, g.delta, v, std::max(40, std::abs(j) + 20));
    const auto e = nearest_eigenpair(p, j);
    BandTruth t;
    t.mu = e.mu;
    for (const auto& plane : g.planes) t.J.push_back(j_parseval(q, g.delta, plane, e));
    return t;
}

SyntheticBandData generate_synthetic(const PotentialCoefficients& q, const ExtractionGeometry& g,
                                     const std::vector<int>& j_list, double v, double noise_amp,
                                     std::uint64_t seed) {
    if (!(noise_amp >= 0)) throw std::invalid_argument("noise amplitude must be non-negative");
    SyntheticBandData d;
    d.geometry = g;
    d.j_list = j_list;
    d.v = v;
    d.noise_amp = noise_amp;
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    const double bound = noise_amp * remainder_bound(g.rho);
    for (int j : j_list) {
        const BandTruth t = band_truth(q, g, j, v);
        std::vector<Wide> samples;
        for (const auto& x : g.points) {
            Quad lam = quad_dot(x, x) + Quad(t.mu);
            for (std::size_t k = 0; k < g.planes.size(); ++k) lam += weight(x, g.planes[k].b) * Quad(t.J[k]);
            lam += Quad(bound * u(gen));
            samples.push_back(to_wide(lam));
        }
        d.Lambda[j] = std::move(samples);
        d.truth[j] = t;
    }
    return d;
}

std::map<int, MuJEstimate> solve_mu_J(const SyntheticBandData& data) {
    const auto& g = data.geometry;
    const std::size_t m = g.planes.size();
    if (g.points.size() != m + 1) throw std::invalid_argument("need m + 1 sample points");
    QuadMatrix a(m + 1, std::vector<Quad>(m + 1));
    for (std::size_t s = 0; s <= m; ++s) {
        a[s][0] = 1;
        for (std::size_t k = 0; k < m; ++k) a[s][k + 1] = weight(g.points[s], g.planes[k].b);
    }
    Quad predicted = 1;
    for (std::size_t k = 0; k < m; ++k) predicted *= a[k + 1][k + 1];

    std::map<int, MuJEstimate> out;
    for (const auto& [j, samples] : data.Lambda) {
        if (samples.size() != m + 1) throw std::invalid_argument("sample count does not match the geometry");
        std::vector<Quad> rhs(m + 1);
        for (std::size_t s = 0; s <= m; ++s) rhs[s] = from_wide(samples[s]) - quad_dot(g.points[s], g.points[s]);
        const Quad det = solve_in_place(a, rhs);
        if (abs(det) < 1e-3 * predicted)
            throw IllConditioned("determinant " + std::to_string(static_cast<double>(det)) +
                                 " below 1e-3 of the predicted scale");
        MuJEstimate e;
        e.mu = static_cast<double>(rhs[0]);
        for (std::size_t k = 0; k < m; ++k) e.J.push_back(static_cast<double>(rhs[k + 1]));
        e.det = static_cast<double>(det);
        e.det_predicted = static_cast<double>(predicted);
        if (const auto t = data.truth.find(j); t != data.truth.end()) {
            e.mu_error = static_cast<double>(rhs[0] - Quad(t->second.mu));
            for (std::size_t k = 0; k < m; ++k)
                e.J_error.push_back(static_cast<double>(rhs[k + 1] - Quad(t->second.J[k])));
        }
        out[j] = e;
    }
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope needs two or more points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(x.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SweepReport extraction_sweep(const PotentialCoefficients& q, const GammaVector& delta, const SweepConfig& cfg) {
    if (cfg.seeds < 1) throw std::invalid_argument("seeds must be positive");
    SweepReport rep;
    std::vector<double> rhos, mu_errs, j_errs, dets;
    for (std::size_t r = 0; r < cfg.rhos.size(); ++r) {
        const double rho = cfg.rhos[r];
        const auto g = make_geometry(q.basis().lattice(), delta, rho, cfg.m);
        if (const auto bad = check_geometry(g)) throw std::runtime_error("geometry: " + *bad);

        const auto exact = generate_synthetic(q, g, {cfg.j}, cfg.v, 0, cfg.seed);
        const auto& truth = exact.truth.at(cfg.j);
        const auto est0 = solve_mu_J(exact).at(cfg.j);
        rep.zero_noise_error = std::max(rep.zero_noise_error, std::abs(*est0.mu_error) / std::abs(truth.mu));
        for (std::size_t k = 0; k < truth.J.size(); ++k)
            rep.zero_noise_error = std::max(rep.zero_noise_error, std::abs(est0.J_error[k]) / std::abs(truth.J[k]));

        double mu_sq = 0, j_sq = 0;
        for (int s = 0; s < cfg.seeds; ++s) {
            const auto seed = cfg.seed + 1000003ULL * r + static_cast<std::uint64_t>(s);
            const auto data = generate_synthetic(q, g, {cfg.j}, cfg.v, cfg.noise_amp, seed);
            const auto est = solve_mu_J(data).at(cfg.j);
            mu_sq += std::pow(*est.mu_error, 2);
            double jmax = 0;
            for (double err : est.J_error) jmax = std::max(jmax, std::abs(err));
            j_sq += jmax * jmax;
        }
        SweepRow row;
        row.rho = rho;
        row.mu_err = std::sqrt(mu_sq / cfg.seeds);
        row.J_err = std::sqrt(j_sq / cfg.seeds);
        row.det = est0.det;
        rep.rows.push_back(row);
        rhos.push_back(rho);
        mu_errs.push_back(row.mu_err);
        j_errs.push_back(row.J_err);
        dets.push_back(row.det);
    }
    if (rhos.size() >= 2) {
        rep.mu_slope = loglog_slope(rhos, mu_errs);
        rep.J_slope = loglog_slope(rhos, j_errs);
        rep.det_slope = loglog_slope(rhos, dets);
    }
    return rep;
}

std::vector<double> solve_c_from_residuals(const std::map<int, double>& residuals, int j, int n) {
    if (n < 1 || n > kMaxCExpansion)
        throw IllConditioned("c expansion order must lie in [1, " + std::to_string(kMaxCExpansion) + "]");
    if (j < 1) throw std::invalid_argument("j must be positive");
    std::vector<long double> y;
    for (int k = 1; k <= n; ++k) {
        const auto it = residuals.find(k);
        if (it == residuals.end()) throw std::invalid_argument("missing sample k = " + std::to_string(k));
        y.push_back(it->second);
    }
    const auto x = scaled_vandermonde_solve(y, 1);
    std::vector<double> c;
    for (int i = 1; i <= n; ++i)
        c.push_back(static_cast<double>(x[static_cast<std::size_t>(i - 1)] * std::pow(static_cast<long double>(j), i)));
    return c;
}

std::vector<double> solve_c_expansion(const std::map<int, double>& mu_samples, int j, int n, double delta_norm,
                                      double shift) {
    std::map<int, double> r;
    for (const auto& [k, mu] : mu_samples) {
        const long double jk = static_cast<long double>(j) * k + shift;
        r[k] = static_cast<double>(mu - static_cast<long double>(delta_norm) * delta_norm * jk * jk);
    }
    return solve_c_from_residuals(r, j, n);
}

std::vector<double> solve_J_expansion(const std::map<int, double>& J_samples, int j, int n) {
    if (n < 0 || n > kMaxJExpansion)
        throw IllConditioned("J expansion order must lie in [0, " + std::to_string(kMaxJExpansion) + "]");
    if (j < 1) throw std::invalid_argument("j must be positive");
    std::vector<long double> y;
    for (int k = 1; k <= n + 1; ++k) {
        const auto it = J_samples.find(k);
        if (it == J_samples.end()) throw std::invalid_argument("missing sample k = " + std::to_string(k));
        y.push_back(it->second);
    }
    const auto x = scaled_vandermonde_solve(y, 0);
    std::vector<double> out;
    for (int i = 0; i <= n; ++i)
        out.push_back(static_cast<double>(x[static_cast<std::size_t>(i)] * std::pow(static_cast<long double>(j), i)));
    return out;
}

double c_expansion_noise_gain(int n, int i) {
    if (n < 1 || i < 1 || i > n) throw std::invalid_argument("bad Vandermonde index");
    Eigen::MatrixXd v(n, n);
    for (int k = 0; k < n; ++k)
        for (int c = 0; c < n; ++c) v(k, c) = std::pow(k + 1.0, -(c + 1.0));
    const Eigen::MatrixXd inv = v.inverse();
    return inv.row(i - 1).cwiseAbs().sum();
}

double directional_mass_from_c3(double c3, double delta_norm) {
    return 16 * std::numbers::pi * std::pow(delta_norm, 3) * c3;
}

PlaneInvariants invariants_from_J(double J0, double J2, double J4, double abs2_z_delta, const DensityConstants& c,
                                  double delta_norm) {
    if (c.a[4] == 0) throw std::invalid_argument("a5 must be nonzero");
    J2 *= std::pow(delta_norm, 2);
    J4 *= std::pow(delta_norm, 4);
    const double i1_raw = 2 * (J2 - c.a[0] * abs2_z_delta * J0);
    const double i2_raw = (J4 - c.a[3] * i1_raw - c.a[5] * J0) / c.a[4];
    return {-i1_raw, -i2_raw};
}

}  // namespace invrec
