#include "invrec/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "invrec/errors.hpp"

namespace invrec {

namespace {

constexpr std::size_t kOffI = 0;
constexpr std::size_t kOffI1Sum = 13;
constexpr std::size_t kOffI1Diff = 19;
constexpr std::size_t kOffI1Gamma = 25;
constexpr std::size_t kOffI1Refl = 28;
constexpr std::size_t kOffI2Pair = 31;
constexpr std::size_t kOffI2Gamma = 37;

constexpr std::array<std::array<int, 2>, 6> kOrderedPairs{{{1, 2}, {1, 3}, {2, 1}, {2, 3}, {3, 1}, {3, 2}}};

bool valid_basis_index(int i) { return i >= 1 && i <= 3; }

std::size_t pair_slot(int i, int j) {
    if (!valid_basis_index(i) || !valid_basis_index(j) || i == j)
        throw std::out_of_range("invariant pair index out of range");
    for (std::size_t n = 0; n < kOrderedPairs.size(); ++n)
        if (kOrderedPairs[n][0] == i && kOrderedPairs[n][1] == j) return n;
    throw std::out_of_range("invariant pair index out of range");
}

std::size_t single_slot(int i) {
    if (!valid_basis_index(i)) throw std::out_of_range("invariant index out of range");
    return static_cast<std::size_t>(i - 1);
}

std::size_t slot(const InvariantKey& key) {
    switch (key.family) {
        case Family::I:
            if (key.i < 1 || key.i > kModeCount) throw std::out_of_range("mode index out of range");
            return kOffI + static_cast<std::size_t>(key.i - 1);
        case Family::I1Sum: return kOffI1Sum + pair_slot(key.i, key.j);
        case Family::I1Diff: return kOffI1Diff + pair_slot(key.i, key.j);
        case Family::I1Gamma: return kOffI1Gamma + single_slot(key.i);
        case Family::I1Refl: return kOffI1Refl + single_slot(key.i);
        case Family::I2Pair: return kOffI2Pair + pair_slot(key.i, key.j);
        case Family::I2Gamma: return kOffI2Gamma + single_slot(key.i);
    }
    throw std::out_of_range("unknown invariant family");
}

bool is_I1(Family f) {
    return f == Family::I1Sum || f == Family::I1Diff || f == Family::I1Gamma || f == Family::I1Refl;
}

Coeffs unit(int i) {
    Coeffs c{0, 0, 0};
    c[static_cast<std::size_t>(i - 1)] = 1;
    return c;
}

Coeffs add(const Coeffs& x, const Coeffs& y) { return {x[0] + y[0], x[1] + y[1], x[2] + y[2]}; }
Coeffs scale(int k, const Coeffs& x) { return {k * x[0], k * x[1], k * x[2]}; }

double A1_from_beta(const GammaVector& a, const GammaVector& b, const Vec3& beta) {
    const Vec3 d = a.cart - b.cart;
    const double bb = b.cart.dot(beta);
    const double db = d.dot(beta);
    return 2 * (1 / (bb * bb) + 1 / (db * db)) * d.dot(b.cart);
}

double A2_from_beta(const GammaVector& a, const GammaVector& b, const Vec3& beta) {
    const double bb = b.cart.dot(beta);
    return 2 * (a.cart - b.cart).dot(a.cart + b.cart) / (bb * bb);
}

double I1_plane_sum(const PotentialCoefficients& q, const GammaVector& a,
                    const std::vector<GammaVector>& plane, const Vec3& beta) {
    cplx sum{};
    for (const auto& c : plane) {
        const cplx zc = q.at(c);
        const cplx zac = q.at(a - c);
        if (zc == cplx{} || zac == cplx{}) continue;
        const double cb = c.cart.dot(beta);
        sum += ((a.cart - c.cart).dot(c.cart) / (cb * cb)) * zac * zc;
    }
    return 2 * std::real(q.at(-a) * sum);
}

double I2_plane_sum(const PotentialCoefficients& q, const GammaVector& a,
                    const std::vector<GammaVector>& plane, const Vec3& beta) {
    cplx sum{};
    for (const auto& c : plane) {
        const cplx zp = q.at(a + c);
        const cplx zm = q.at(a - c);
        if (zp == cplx{} || zm == cplx{}) continue;
        const double cb = c.cart.dot(beta);
        sum += ((a.cart + c.cart).dot(a.cart - c.cart) / (cb * cb)) * zp * zm;
    }
    const cplx zna = q.at(-a);
    return 2 * std::real(zna * zna * sum);
}

// ---- grid engine ---------------------------------------------------------------------------

// One integrand of the form |q_{a,beta}(x)|^2 g(<a,x>) (or g(<a,x>) alone when `pairs` is empty
// and `plain` is set). q_{a,beta} = sum_k 2 w_k Re(z_k e^{i<gamma_k,x>}) over the +/- pairs.
struct GridIntegrand {
    Coeffs a{};
    std::vector<std::pair<int, Vec3>> pairs;  // (mode index 0..12, weight c/<beta,c>)
    std::vector<double> weight;               // g sampled at 2 pi t / N
    bool plain = false;
};

int mod(long v, int n) {
    const long r = v % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

std::vector<double> run_grid(const PotentialCoefficients& q, const std::vector<GridIntegrand>& items,
                             int n) {
    if (n < 8) throw std::invalid_argument("quadrature grid must have at least 8 points per axis");
    const auto N = static_cast<std::size_t>(n);
    const auto& reps = representative_coeffs();

    std::vector<double> cosT(N), sinT(N);
    for (std::size_t t = 0; t < N; ++t) {
        const double ang = 2 * std::numbers::pi * static_cast<double>(t) / n;
        cosT[t] = std::cos(ang);
        sinT[t] = std::sin(ang);
    }

    // Per-mode arrays along the third axis: ReZ_k(i1, i2, t) for fixed (i1, i2).
    std::vector<double> re(kModeCount * N);
    std::vector<double> vx(N), vy(N), vz(N), wt(N);
    std::vector<double> acc(items.size(), 0.0);
    // e^{i s t 2pi/N} for each mode's third coordinate.
    std::vector<double> ec(kModeCount * N), es(kModeCount * N);
    for (int k = 0; k < kModeCount; ++k)
        for (std::size_t t = 0; t < N; ++t) {
            const int idx = mod(static_cast<long>(reps[static_cast<std::size_t>(k)][2]) * static_cast<long>(t), n);
            ec[static_cast<std::size_t>(k) * N + t] = cosT[static_cast<std::size_t>(idx)];
            es[static_cast<std::size_t>(k) * N + t] = sinT[static_cast<std::size_t>(idx)];
        }

    for (int i1 = 0; i1 < n; ++i1) {
        for (int i2 = 0; i2 < n; ++i2) {
            for (int k = 0; k < kModeCount; ++k) {
                const auto& c = reps[static_cast<std::size_t>(k)];
                const auto p = static_cast<std::size_t>(mod(static_cast<long>(c[0]) * i1 + static_cast<long>(c[1]) * i2, n));
                const cplx w = q.coefficient(k + 1) * cplx(cosT[p], sinT[p]);
                const double wr = w.real(), wi = w.imag();
                double* __restrict out = re.data() + static_cast<std::size_t>(k) * N;
                const double* __restrict cr = ec.data() + static_cast<std::size_t>(k) * N;
                const double* __restrict si = es.data() + static_cast<std::size_t>(k) * N;
                for (std::size_t t = 0; t < N; ++t) out[t] = wr * cr[t] - wi * si[t];
            }
            for (std::size_t it = 0; it < items.size(); ++it) {
                const GridIntegrand& g = items[it];
                const long base = static_cast<long>(g.a[0]) * i1 + static_cast<long>(g.a[1]) * i2;
                for (std::size_t t = 0; t < N; ++t)
                    wt[t] = g.weight[static_cast<std::size_t>(mod(base + static_cast<long>(g.a[2]) * static_cast<long>(t), n))];
                double total = 0;
                if (g.plain) {
                    for (std::size_t t = 0; t < N; ++t) total += wt[t];
                } else {
                    std::fill(vx.begin(), vx.end(), 0.0);
                    std::fill(vy.begin(), vy.end(), 0.0);
                    std::fill(vz.begin(), vz.end(), 0.0);
                    for (const auto& [k, w] : g.pairs) {
                        const double* __restrict r = re.data() + static_cast<std::size_t>(k) * N;
                        const double wx = 2 * w.x(), wy = 2 * w.y(), wz = 2 * w.z();
                        for (std::size_t t = 0; t < N; ++t) {
                            vx[t] += wx * r[t];
                            vy[t] += wy * r[t];
                            vz[t] += wz * r[t];
                        }
                    }
                    for (std::size_t t = 0; t < N; ++t)
                        total += (vx[t] * vx[t] + vy[t] * vy[t] + vz[t] * vz[t]) * wt[t];
                }
                acc[it] += total;
            }
        }
    }
    const double cells = static_cast<double>(n) * n * n;
    for (auto& v : acc) v /= cells;
    return acc;
}

std::vector<std::pair<int, Vec3>> vector_pairs(const std::vector<GammaVector>& plane, const Vec3& beta) {
    std::vector<std::pair<int, Vec3>> out;
    for (const auto& c : plane) {
        const ModeRef ref = locate_mode(c.coeffs);
        if (!ref || ref.sign < 0) continue;  // each +/- pair contributes once through 2 Re
        out.emplace_back(ref.k - 1, c.cart / c.cart.dot(beta));
    }
    return out;
}

std::vector<double> profile_table(cplx za, int n, int harmonic, bool square) {
    std::vector<double> table(static_cast<std::size_t>(n));
    const cplx zh = harmonic == 2 ? za * za : za;
    for (int t = 0; t < n; ++t) {
        const double v = 2 * std::real(zh * std::polar(1.0, 2 * std::numbers::pi * harmonic * t / n));
        table[static_cast<std::size_t>(t)] = square ? v * v : v;
    }
    return table;
}

GridIntegrand plane_integrand(const GammaVector& a,
                              const std::vector<GammaVector>& plane, const Vec3& beta,
                              std::vector<double> weight) {
    GridIntegrand g;
    g.a = a.coeffs;
    g.pairs = vector_pairs(plane, beta);
    g.weight = std::move(weight);
    return g;
}

}  // namespace

std::string to_string(const InvariantKey& key) {
    const std::string i = std::to_string(key.i);
    const std::string ij = i + " " + std::to_string(key.j);
    switch (key.family) {
        case Family::I: return "I " + i;
        case Family::I1Sum: return "I1 sum " + ij;
        case Family::I1Diff: return "I1 diff " + ij;
        case Family::I1Gamma: return "I1 gamma " + i;
        case Family::I1Refl: return "I1 refl " + i;
        case Family::I2Pair: return "I2 pair " + ij;
        case Family::I2Gamma: return "I2 gamma " + i;
    }
    return "?";
}

const std::array<InvariantKey, InvariantSet::kSize>& InvariantSet::keys() {
    static const auto table = [] {
        std::array<InvariantKey, kSize> k{};
        std::size_t n = 0;
        for (int m = 1; m <= kModeCount; ++m) k[n++] = {Family::I, m, 0};
        for (const auto& [i, j] : kOrderedPairs) k[n++] = {Family::I1Sum, i, j};
        for (const auto& [i, j] : kOrderedPairs) k[n++] = {Family::I1Diff, i, j};
        for (int i = 1; i <= 3; ++i) k[n++] = {Family::I1Gamma, i, 0};
        for (int i = 1; i <= 3; ++i) k[n++] = {Family::I1Refl, i, 0};
        for (const auto& [i, j] : kOrderedPairs) k[n++] = {Family::I2Pair, i, j};
        for (int i = 1; i <= 3; ++i) k[n++] = {Family::I2Gamma, i, 0};
        return k;
    }();
    return table;
}

double& InvariantSet::operator[](const InvariantKey& key) { return values_[slot(key)]; }
double InvariantSet::operator[](const InvariantKey& key) const { return values_[slot(key)]; }

double max_relative_difference(const InvariantSet& x, const InvariantSet& y) {
    double worst = 0;
    for (std::size_t n = 0; n < InvariantSet::kSize; ++n) {
        const double d = std::abs(x.values()[n] - y.values()[n]) / (1 + std::abs(x.values()[n]));
        worst = std::max(worst, std::isnan(d) ? INFINITY : d);
    }
    return worst;
}

std::pair<Coeffs, Coeffs> invariant_arguments(const InvariantKey& key) {
    (void)slot(key);
    const Coeffs gamma{1, 1, 1};
    switch (key.family) {
        case Family::I: return {representative_coeffs()[static_cast<std::size_t>(key.i - 1)], Coeffs{}};
        case Family::I1Sum: return {add(unit(key.i), unit(key.j)), unit(key.i)};
        case Family::I1Diff: return {add(unit(key.i), scale(-1, unit(key.j))), unit(key.i)};
        case Family::I1Gamma: return {gamma, unit(key.i)};
        case Family::I1Refl: return {add(scale(2, unit(key.i)), scale(-1, gamma)), unit(key.i)};
        case Family::I2Pair: return {unit(key.i), unit(key.j)};
        case Family::I2Gamma: return {unit(key.i), add(gamma, scale(-1, unit(key.i)))};
    }
    throw std::out_of_range("unknown invariant family");
}

double coeff_A1(const LatticeBasis& basis, const GammaVector& a, const GammaVector& b) {
    return A1_from_beta(a, b, orthogonal_decompose(basis, a, b).beta);
}

double coeff_A2(const LatticeBasis& basis, const GammaVector& a, const GammaVector& b) {
    return A2_from_beta(a, b, orthogonal_decompose(basis, a, b).beta);
}

double invariant_I(const PotentialCoefficients& q, int k) {
    if (k < 1 || k > kModeCount) throw std::out_of_range("mode index out of range");
    return 2 * std::norm(q.coefficient(k));
}

double invariant_I1_sum(const PotentialCoefficients& q, const GammaVector& a, const GammaVector& b) {
    return invariant_I1_sum(q, a, b, orthogonal_decompose(q.basis().lattice(), a, b).beta);
}

double invariant_I2_sum(const PotentialCoefficients& q, const GammaVector& a, const GammaVector& b) {
    return invariant_I2_sum(q, a, b, orthogonal_decompose(q.basis().lattice(), a, b).beta);
}

double invariant_I1_sum(const PotentialCoefficients& q, const GammaVector& a, const GammaVector& b,
                        const Vec3& beta) {
    return I1_plane_sum(q, a, plane_modes(q.basis().lattice(), a, b), beta);
}

double invariant_I2_sum(const PotentialCoefficients& q, const GammaVector& a, const GammaVector& b,
                        const Vec3& beta) {
    return I2_plane_sum(q, a, plane_modes(q.basis().lattice(), a, b), beta);
}

InvariantGeometry::InvariantGeometry(const LatticeBasis& basis) : basis_(basis) {
    const auto& keys = InvariantSet::keys();
    for (std::size_t n = 0; n < keys.size(); ++n) {
        const auto [ac, bc] = invariant_arguments(keys[n]);
        Entry& e = entries_[n];
        e.a = GammaVector::from(basis_, ac);
        if (keys[n].family == Family::I) continue;
        e.b = GammaVector::from(basis_, bc);
        e.decomposition = orthogonal_decompose(basis_, e.a, e.b);
        e.plane = plane_modes(basis_, e.a, e.b);
        e.A = is_I1(keys[n].family) ? A1_from_beta(e.a, e.b, e.decomposition.beta)
                                    : A2_from_beta(e.a, e.b, e.decomposition.beta);
    }
}

const InvariantGeometry::Entry& InvariantGeometry::entry(const InvariantKey& key) const {
    return entries_[slot(key)];
}

InvariantSet closed_forms(const PotentialCoefficients& q) {
    return closed_forms(q, InvariantGeometry(q.basis().lattice()));
}

InvariantSet closed_forms(const PotentialCoefficients& q, const InvariantGeometry& geometry) {
    auto z = [&](const Coeffs& c) { return q.at(c); };
    const Coeffs gamma{1, 1, 1};
    auto neg = [](const Coeffs& c) { return scale(-1, c); };

    InvariantSet out;
    for (const auto& key : InvariantSet::keys()) {
        const auto& e = geometry.entry(key);
        const Coeffs gi = key.i >= 1 && key.i <= 3 ? unit(key.i) : Coeffs{};
        const Coeffs gj = key.j >= 1 ? unit(key.j) : Coeffs{};
        double v = 0;
        switch (key.family) {
            case Family::I:
                v = invariant_I(q, key.i);
                break;
            case Family::I1Sum:
                v = e.A * std::real(z(neg(add(gi, gj))) * z(gj) * z(gi));
                break;
            case Family::I1Diff:
                v = e.A * std::real(z(add(neg(gi), gj)) * z(neg(gj)) * z(gi));
                break;
            case Family::I1Gamma:
                v = e.A * std::real(z(neg(gamma)) * z(add(gamma, neg(gi))) * z(gi));
                break;
            case Family::I1Refl:
                v = e.A * std::real(z(add(gamma, scale(-2, gi))) * z(add(gi, neg(gamma))) * z(gi));
                break;
            case Family::I2Pair: {
                const cplx zn = z(neg(gi));
                v = 2 * e.A * std::real(zn * zn * z(add(gi, gj)) * z(add(gi, neg(gj))));
                break;
            }
            case Family::I2Gamma: {
                const cplx zn = z(neg(gi));
                v = 2 * e.A * std::real(zn * zn * z(gamma) * z(add(scale(2, gi), neg(gamma))));
                break;
            }
        }
        out[key] = v;
    }
    return out;
}

InvariantSet symmetric_sums(const PotentialCoefficients& q) {
    return symmetric_sums(q, InvariantGeometry(q.basis().lattice()));
}

InvariantSet symmetric_sums(const PotentialCoefficients& q, const InvariantGeometry& geometry) {
    InvariantSet out;
    for (const auto& key : InvariantSet::keys()) {
        const auto& e = geometry.entry(key);
        if (key.family == Family::I)
            out[key] = invariant_I(q, key.i);
        else if (is_I1(key.family))
            out[key] = I1_plane_sum(q, e.a, e.plane, e.decomposition.beta);
        else
            out[key] = I2_plane_sum(q, e.a, e.plane, e.decomposition.beta);
    }
    return out;
}

InvariantSet quadrature(const PotentialCoefficients& q, int grid) {
    return quadrature(q, InvariantGeometry(q.basis().lattice()), grid);
}

InvariantSet quadrature(const PotentialCoefficients& q, const InvariantGeometry& geometry, int grid) {
    const auto& keys = InvariantSet::keys();
    std::vector<GridIntegrand> items;
    items.reserve(keys.size());
    for (const auto& key : keys) {
        const auto& e = geometry.entry(key);
        const cplx za = q.at(e.a);
        if (key.family == Family::I) {
            GridIntegrand g;
            g.a = e.a.coeffs;
            g.plain = true;
            g.weight = profile_table(za, grid, 1, true);
            items.push_back(std::move(g));
        } else {
            const int harmonic = is_I1(key.family) ? 1 : 2;
            items.push_back(plane_integrand(e.a, e.plane, e.decomposition.beta,
                                            profile_table(za, grid, harmonic, false)));
        }
    }
    const auto raw = run_grid(q, items, grid);
    InvariantSet out;
    for (std::size_t n = 0; n < keys.size(); ++n)
        out.values()[n] = keys[n].family == Family::I ? raw[n] : -raw[n];
    return out;
}

double quadrature_abs2_directional(const PotentialCoefficients& q, const GammaVector& a, int grid) {
    GridIntegrand g;
    g.a = a.coeffs;
    g.plain = true;
    g.weight = profile_table(q.at(a), grid, 1, true);
    return run_grid(q, {g}, grid).front();
}

double quadrature_I1_integral(const PotentialCoefficients& q, const GammaVector& a,
                              const GammaVector& b, int grid) {
    return quadrature_weighted_plane_norm(q, a, b, profile_table(q.at(a), grid, 1, false), grid);
}

double quadrature_I2_integral(const PotentialCoefficients& q, const GammaVector& a,
                              const GammaVector& b, int grid) {
    return quadrature_weighted_plane_norm(q, a, b, profile_table(q.at(a), grid, 2, false), grid);
}

double quadrature_weighted_plane_norm(const PotentialCoefficients& q, const GammaVector& a,
                                      const GammaVector& b, const std::vector<double>& weight,
                                      int grid) {
    if (weight.size() != static_cast<std::size_t>(grid))
        throw std::invalid_argument("weight table length must equal the grid size");
    const auto& basis = q.basis().lattice();
    const Decomposition d = orthogonal_decompose(basis, a, b);
    return run_grid(q, {plane_integrand(a, plane_modes(basis, a, b), d.beta, weight)}, grid).front();
}

}  // namespace invrec
