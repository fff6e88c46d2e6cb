#include "invrec/hill.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "invrec/errors.hpp"

namespace invrec {

namespace {

using ldouble = long double;
using MatrixL = Eigen::Matrix<std::complex<ldouble>, Eigen::Dynamic, Eigen::Dynamic>;

void validate_map(const std::map<int, cplx>& c, const char* what) {
    for (const auto& [n, z] : c) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw std::invalid_argument(std::string(what) + ": non-finite coefficient");
        if (n == 0 && z != cplx(0))
            throw std::invalid_argument(std::string(what) + ": mean must be zero");
        const auto it = c.find(-n);
        const cplx partner = it == c.end() ? cplx(0) : it->second;
        if (std::abs(partner - std::conj(z)) > 1e-14 * std::max(1.0, std::abs(z)))
            throw std::invalid_argument(std::string(what) + ": coefficients are not Hermitian at n = " +
                                        std::to_string(n));
    }
}

cplx lookup(const std::map<int, cplx>& c, int n) {
    const auto it = c.find(n);
    return it == c.end() ? cplx(0) : it->second;
}

std::size_t index_of(int n, int nt) { return static_cast<std::size_t>(n + nt); }

// Ascending eigenvalues of the Fourier matrix with diagonal (2k + shift)^2, k in [lo, hi].
std::vector<ldouble> hill_block_eigenvalues(const TrigPolynomial& p, int lo, int hi, int shift) {
    const int size = hi - lo + 1;
    MatrixL m = MatrixL::Zero(size, size);
    for (int r = 0; r < size; ++r) {
        const ldouble f = 2 * (lo + r) + shift;
        m(r, r) = f * f;
        for (int c = 0; c < size; ++c) {
            if (c == r) continue;
            const cplx z = lookup(p, r - c);
            m(r, c) = std::complex<ldouble>(z.real(), z.imag());
        }
    }
    Eigen::SelfAdjointEigenSolver<MatrixL> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("Hill eigensolve failed");
    std::vector<ldouble> ev(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) ev[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

// Ascending eigenvalues of the T_v matrix in extended precision.
std::vector<ldouble> twisted_eigenvalues(const HillProblem& p) {
    const int nt = p.truncation;
    const int size = 2 * nt + 1;
    MatrixL m = MatrixL::Zero(size, size);
    const ldouble d2 = static_cast<ldouble>(p.delta_norm) * p.delta_norm;
    for (int n = -nt; n <= nt; ++n) {
        const ldouble x = n + static_cast<ldouble>(p.v);
        m(n + nt, n + nt) = d2 * x * x;
        for (const auto& [k, z] : p.coefficients) {
            const int c = n - k;
            if (k == 0 || c < -nt || c > nt) continue;
            m(n + nt, c + nt) = std::complex<ldouble>(z.real(), z.imag());
        }
    }
    Eigen::SelfAdjointEigenSolver<MatrixL> solver(m, Eigen::EigenvaluesOnly);
    std::vector<ldouble> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + size);
    std::sort(ev.begin(), ev.end());
    return ev;
}

std::optional<double> decay_exponent(const std::vector<std::pair<int, double>>& pts) {
    if (pts.size() < 3) return std::nullopt;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [n, g] : pts) {
        const double x = n * std::log(static_cast<double>(n));
        const double y = std::log(g);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double k = static_cast<double>(pts.size());
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace

int max_frequency(const std::map<int, cplx>& coefficients) {
    int m = 0;
    for (const auto& [n, z] : coefficients)
        if (z != cplx(0)) m = std::max(m, std::abs(n));
    return m;
}

void validate(const HillProblem& p) {
    if (!(p.delta_norm > 0) || !std::isfinite(p.delta_norm))
        throw std::invalid_argument("|delta| must be positive");
    if (!(p.v >= 0 && p.v < 1)) throw std::invalid_argument("v must lie in [0, 1)");
    validate_map(p.coefficients, "Hill problem");
    const int need = 2 * max_frequency(p.coefficients) + 10;
    if (p.truncation < need)
        throw TruncationTooSmall("truncation " + std::to_string(p.truncation) + " < " + std::to_string(need));
}

std::map<int, cplx> cosine_profile(double mu, int harmonic) {
    if (harmonic <= 0) throw std::invalid_argument("harmonic must be positive");
    return {{-harmonic, cplx(mu)}, {harmonic, cplx(mu)}};
}

Eigen::MatrixXcd hill_matrix(const HillProblem& p) {
    validate(p);
    const int nt = p.truncation;
    const int size = 2 * nt + 1;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(size, size);
    const double d2 = p.delta_norm * p.delta_norm;
    for (int n = -nt; n <= nt; ++n) {
        const auto r = static_cast<Eigen::Index>(index_of(n, nt));
        m(r, r) = d2 * (n + p.v) * (n + p.v);
        for (const auto& [k, z] : p.coefficients) {
            const int c = n - k;
            if (k == 0 || c < -nt || c > nt) continue;
            m(r, static_cast<Eigen::Index>(index_of(c, nt))) = z;
        }
    }
    return m;
}

HillSpectrum spectrum(const HillProblem& p) {
    const Eigen::MatrixXcd m = hill_matrix(p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    HillSpectrum s;
    s.problem = p;
    s.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
    std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
    return s;
}

HillEigenpair nearest_eigenpair(const HillProblem& p, int j) {
    if (std::abs(j) + 10 > p.truncation)
        throw TruncationTooSmall("level " + std::to_string(j) + " too close to the truncation " +
                                 std::to_string(p.truncation));
    const Eigen::MatrixXcd m = hill_matrix(p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
    const double target = p.delta_norm * p.delta_norm * (j + p.v) * (j + p.v);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < solver.eigenvalues().size(); ++i)
        if (std::abs(solver.eigenvalues()(i) - target) < std::abs(solver.eigenvalues()(best) - target)) best = i;
    HillEigenpair e;
    e.j = j;
    e.mu = solver.eigenvalues()(best);
    const Eigen::VectorXcd vec = solver.eigenvectors().col(best);
    e.fourier.assign(vec.data(), vec.data() + vec.size());
    return e;
}

std::vector<cplx> density_coefficients(const HillEigenpair& e) {
    const int size = static_cast<int>(e.fourier.size());
    const int nt = (size - 1) / 2;
    double norm = 0;
    for (const auto& c : e.fourier) norm += std::norm(c);
    std::vector<cplx> h(static_cast<std::size_t>(4 * nt + 1));
    for (int m = -2 * nt; m <= 2 * nt; ++m) {
        cplx acc = 0;
        for (int n = std::max(-nt, -nt + m); n <= std::min(nt, nt + m); ++n)
            acc += e.fourier[index_of(n, nt)] * std::conj(e.fourier[index_of(n - m, nt)]);
        h[static_cast<std::size_t>(m + 2 * nt)] = acc / norm;
    }
    return h;
}

std::vector<double> density_samples(const HillEigenpair& e, int n) {
    const int size = static_cast<int>(e.fourier.size());
    const int nt = (size - 1) / 2;
    double norm = 0;
    for (const auto& c : e.fourier) norm += std::norm(c);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        const double s = 2 * std::numbers::pi * t / n;
        cplx acc = 0;
        for (int k = -nt; k <= nt; ++k) acc += e.fourier[index_of(k, nt)] * std::polar(1.0, k * s);
        out[static_cast<std::size_t>(t)] = std::norm(acc) / norm;
    }
    return out;
}

double cosine_second_order_shift(double mu, double delta_norm, double v, int n) {
    const double x = n + v;
    return mu * mu * 2 / (4 * x * x - 1) / (delta_norm * delta_norm);
}

int minimal_gap_truncation(const TrigPolynomial& p, int n_max) {
    return n_max / 2 + 2 * max_frequency(p) + 10;
}

GapReport gap_lengths(const TrigPolynomial& p, int n_max, int truncation) {
    if (n_max < 1) throw std::invalid_argument("n_max must be positive");
    validate_map(p, "trigonometric polynomial");
    const int need = minimal_gap_truncation(p, n_max);
    if (truncation == 0) truncation = need + 10;
    if (truncation < need)
        throw TruncationTooSmall("gap truncation " + std::to_string(truncation) + " < " + std::to_string(need));

    // periodic: e^{2ikx}, antiperiodic: e^{i(2k+1)x}
    const auto per = hill_block_eigenvalues(p, -truncation, truncation, 0);
    const auto anti = hill_block_eigenvalues(p, -truncation - 1, truncation, 1);

    GapReport r;
    r.truncation = truncation;
    r.lambda0 = static_cast<double>(per[0]);
    for (int n = 1; n <= n_max; ++n) {
        const auto& src = n % 2 ? anti : per;
        const auto hi = static_cast<std::size_t>(n);
        const auto lo = hi - 1;
        GapRow row;
        row.n = n;
        row.lambda1 = static_cast<double>(src[lo]);
        row.lambda2 = static_cast<double>(src[hi]);
        row.gap = static_cast<double>(src[hi] - src[lo]);
        r.rows.push_back(row);
    }
    check_interlacing(r);
    return r;
}

void check_interlacing(const GapReport& r) {
    double prev = r.lambda0;
    std::string where = "lambda0";
    for (const auto& row : r.rows) {
        if (!(prev < row.lambda1))
            throw InterlacingViolation(where + " >= lambda_{" + std::to_string(row.n) + ",1}");
        if (!(row.lambda1 <= row.lambda2))
            throw InterlacingViolation("lambda_{" + std::to_string(row.n) + ",1} > lambda_{" +
                                       std::to_string(row.n) + ",2}");
        prev = row.lambda2;
        where = "lambda_{" + std::to_string(row.n) + ",2}";
    }
}

DecayReport gap_decay_compare(const TrigPolynomial& pN, const TrigPolynomial& pK, int n_lo, int n_hi) {
    if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("bad gap range");
    DecayReport r;
    r.degree_high = max_frequency(pN);
    r.degree_low = max_frequency(pK);
    if (r.degree_low >= r.degree_high)
        throw std::invalid_argument("the first potential must have the higher degree");
    const auto gh = gap_lengths(pN, n_hi);
    const auto gl = gap_lengths(pK, n_hi);
    std::vector<std::pair<int, double>> fit_h, fit_l;
    for (int n = n_lo; n <= n_hi; ++n) {
        DecayRow row;
        row.n = n;
        row.gap_high = gh.rows[static_cast<std::size_t>(n - 1)].gap;
        row.gap_low = gl.rows[static_cast<std::size_t>(n - 1)].gap;
        row.underflow_high = row.gap_high < kGapUnderflow;
        row.underflow_low = row.gap_low < kGapUnderflow;
        if (!row.underflow_high && n > 1) fit_h.emplace_back(n, row.gap_high);
        if (!row.underflow_low && n > 1) fit_l.emplace_back(n, row.gap_low);
        r.rows.push_back(row);
    }
    r.exponent_high = decay_exponent(fit_h);
    r.exponent_low = decay_exponent(fit_l);
    return r;
}

DominanceVerdict dominance(const DecayReport& r, int n_lo, int n_hi, double ceiling) {
    DominanceVerdict v;
    for (const auto& row : r.rows) {
        if (row.n < n_lo || row.n > n_hi) continue;
        if (row.gap_high >= ceiling || row.gap_low >= ceiling) continue;
        v.checked.push_back(row.n);
        bool ok;
        if (row.underflow_high)
            ok = false;
        else if (row.underflow_low)
            ok = true;
        else
            ok = row.gap_high > row.gap_low;
        if (!ok) v.failed.push_back(row.n);
    }
    v.holds = v.failed.empty() && !v.checked.empty();
    return v;
}

void require_resolved(const DecayReport& r) {
    for (const auto& row : r.rows) {
        if (row.underflow_high)
            throw GapUnderflow("degree-" + std::to_string(r.degree_high) + " gap " + std::to_string(row.n) +
                               " below 1e-13");
        if (row.underflow_low)
            throw GapUnderflow("degree-" + std::to_string(r.degree_low) + " gap " + std::to_string(row.n) +
                               " below 1e-13");
    }
}

C3Probe c3_probe(const HillProblem& p, int j_lo, int j_hi) {
    if (j_lo < 1 || j_hi < j_lo + 4) throw std::invalid_argument("c3 probe needs at least five levels");
    validate(p);
    if (j_hi + 10 > p.truncation)
        throw TruncationTooSmall("c3 probe level " + std::to_string(j_hi) + " too close to the truncation");
    const auto spec = twisted_eigenvalues(p);
    const double d2 = p.delta_norm * p.delta_norm;
    const ldouble d2l = static_cast<ldouble>(p.delta_norm) * p.delta_norm;

    C3Probe out;
    const int rows = j_hi - j_lo + 1;
    Eigen::MatrixXd a(rows, 4);
    Eigen::VectorXd b(rows);
    for (int j = j_lo; j <= j_hi; ++j) {
        const ldouble x = j + static_cast<ldouble>(p.v);
        const ldouble target = d2l * x * x;
        ldouble best = spec.front();
        for (ldouble e : spec)
            if (std::abs(e - target) < std::abs(best - target)) best = e;
        const auto res = static_cast<double>(best - target);
        out.residuals.emplace_back(j, res);
        for (int k = 0; k < 4; ++k) a(j - j_lo, k) = std::pow(static_cast<double>(j), -(k + 1));
        b(j - j_lo) = res;
    }
    const Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
    for (int k = 0; k < 4; ++k) out.coefficients[static_cast<std::size_t>(k)] = x(k);
    out.fit_rms = std::sqrt((a * x - b).squaredNorm() / rows);

    double mass = 0, j2 = 0;
    for (const auto& [n, z] : p.coefficients) {
        mass += std::norm(z);
        if (n > 0) j2 += std::norm(z);
    }
    out.c3_predicted = mass / (8 * d2 * p.delta_norm);
    out.second_order_j2 = j2 / (2 * d2);
    return out;
}

}  // namespace invrec
