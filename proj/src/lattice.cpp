#include "invrec/lattice.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "invrec/errors.hpp"

namespace invrec {

namespace {

constexpr double kAdmissibleTol = 1e-9;
constexpr double kCoplanarTol = 1e-10;
constexpr double kCollinearTol = 1e-12;

Eigen::Matrix3d rows_of(const std::array<Vec3, 3>& g) {
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i) m.row(i) = g[static_cast<std::size_t>(i)].transpose();
    return m;
}

bool collinear(const Vec3& a, const Vec3& b) {
    return a.cross(b).norm() <= kCollinearTol * a.norm() * b.norm();
}

}  // namespace

LatticeBasis::LatticeBasis(const Vec3& g1, const Vec3& g2, const Vec3& g3) : g_{g1, g2, g3} {
    const double scale = g1.norm() * g2.norm() * g3.norm();
    const double det = rows_of(g_).determinant();
    if (!(scale > 0) || !std::isfinite(det) || std::abs(det) < 1e-12 * scale) {
        std::ostringstream os;
        os << "basis vectors are linearly dependent (det = " << det << ")";
        throw SingularBasis(os.str());
    }
}

Vec3 LatticeBasis::combine(const Coeffs& c) const {
    return c[0] * g_[0] + c[1] * g_[1] + c[2] * g_[2];
}

LatticeBasis LatticeBasis::default_fixture() {
    const double tp = 2 * std::numbers::pi;
    return LatticeBasis(Vec3(tp, 0, 0), Vec3(tp, tp, 0), Vec3(tp, tp, 2 * tp));
}

GammaVector GammaVector::from(const LatticeBasis& basis, const Coeffs& c) {
    return GammaVector{c, basis.combine(c)};
}

GammaVector GammaVector::operator-() const {
    return GammaVector{{-coeffs[0], -coeffs[1], -coeffs[2]}, -cart};
}

GammaVector operator+(const GammaVector& a, const GammaVector& b) {
    return GammaVector{{a.coeffs[0] + b.coeffs[0], a.coeffs[1] + b.coeffs[1],
                        a.coeffs[2] + b.coeffs[2]},
                       a.cart + b.cart};
}

GammaVector operator-(const GammaVector& a, const GammaVector& b) { return a + (-b); }

GammaVector operator*(int k, const GammaVector& a) {
    return GammaVector{{k * a.coeffs[0], k * a.coeffs[1], k * a.coeffs[2]}, k * a.cart};
}

AdmissibilityReport check_admissible(const LatticeBasis& basis) {
    AdmissibilityReport report;
    auto name = [](int i) { return "g" + std::to_string(i + 1); };
    auto record = [&](std::string tag, double value, double scale) {
        AdmissibilityViolation entry{std::move(tag), value};
        report.evaluated.push_back(entry);
        if (!(std::abs(value) > kAdmissibleTol * scale)) report.violations.push_back(entry);
    };

    constexpr std::array<std::array<int, 3>, 3> triples{{{0, 1, 2}, {0, 2, 1}, {1, 2, 0}}};
    for (const auto& [i, j, k] : triples) {
        (void)k;
        const Vec3& gi = basis[i];
        const Vec3& gj = basis[j];
        record("<" + name(i) + "," + name(j) + ">", gi.dot(gj), gi.norm() * gj.norm());
    }
    for (const auto& [i, j, k] : triples) {
        const Vec3 s = basis[i] + basis[j];
        record("<" + name(i) + "+" + name(j) + "," + name(k) + ">", s.dot(basis[k]),
               s.norm() * basis[k].norm());
    }
    for (const auto& [i, j, k] : triples) {
        (void)k;
        const double ni = basis[i].norm();
        const double nj = basis[j].norm();
        record("|" + name(i) + "|-|" + name(j) + "|", ni - nj, std::max(ni, nj));
    }
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3;
        const int k = (i + 2) % 3;
        const Vec3 plus = basis[i] + basis[j] + basis[k];
        const Vec3 minus = basis[i] - basis[j] - basis[k];
        record("<" + name(i) + "+" + name(j) + "+" + name(k) + "," + name(i) + "-" + name(j) +
                   "-" + name(k) + ">",
               plus.dot(minus), plus.norm() * minus.norm());
    }
    report.admissible = report.violations.empty();
    return report;
}

AdmissibleBasis::AdmissibleBasis(LatticeBasis basis) : basis_(std::move(basis)) {
    const auto report = check_admissible(basis_);
    if (!report.admissible) {
        std::ostringstream os;
        os << "basis violates the admissibility inequalities:";
        for (const auto& v : report.violations) os << ' ' << v.tag << '=' << v.value;
        throw NotAdmissible(os.str());
    }
}

AdmissibleBasis AdmissibleBasis::default_fixture() {
    return AdmissibleBasis(LatticeBasis::default_fixture());
}

std::array<Vec3, 3> dual_basis(const LatticeBasis& basis) {
    // Rows of G are the g_i; the omega_j are the columns of 2 pi G^{-1}.
    const Eigen::Matrix3d inv = rows_of(basis.vectors()).inverse();
    std::array<Vec3, 3> omega;
    for (int j = 0; j < 3; ++j) omega[static_cast<std::size_t>(j)] = 2 * std::numbers::pi * inv.col(j);
    return omega;
}

bool is_visible(const Coeffs& c) {
    if (c == Coeffs{0, 0, 0}) throw ZeroVector("visibility is undefined for the zero vector");
    return std::gcd(std::gcd(std::abs(c[0]), std::abs(c[1])), std::abs(c[2])) == 1;
}

const std::array<Coeffs, kModeCount>& representative_coeffs() {
    static const std::array<Coeffs, kModeCount> table{{
        {1, 0, 0},   {0, 1, 0},  {0, 0, 1},                   // gamma_1..3
        {0, 1, 1},   {1, 0, 1},  {1, 1, 0},  {1, 1, 1},       // gamma_4..7
        {1, -1, 0},  {1, 0, -1}, {0, 1, -1},                  // gamma_8..10
        {-1, 1, 1},  {1, -1, 1}, {1, 1, -1},                  // gamma_11..13
    }};
    return table;
}

ModeRef locate_mode(const Coeffs& c) {
    const auto& reps = representative_coeffs();
    for (int k = 0; k < kModeCount; ++k) {
        const auto& r = reps[static_cast<std::size_t>(k)];
        if (r == c) return {k + 1, +1};
        if (r[0] == -c[0] && r[1] == -c[1] && r[2] == -c[2]) return {k + 1, -1};
    }
    return {};
}

ModeSet enumerate_Q(const LatticeBasis& basis) {
    ModeSet set;
    const auto& reps = representative_coeffs();
    for (std::size_t k = 0; k < reps.size(); ++k) set.representatives[k] = GammaVector::from(basis, reps[k]);
    set.all.reserve(2 * kModeCount);
    for (const auto& g : set.representatives) set.all.push_back(g);
    for (const auto& g : set.representatives) set.all.push_back(-g);
    return set;
}

Decomposition orthogonal_decompose(const LatticeBasis& basis, const GammaVector& a,
                                   const GammaVector& b) {
    if (a.is_zero()) throw ZeroVector("decomposition axis is zero");
    if (b.is_zero() || collinear(a.cart, b.cart))
        throw CollinearInput("second vector lies on the line through the first");

    const Vec3 axis = a.cart / a.cart.squaredNorm();
    auto project = [&](const Vec3& v) -> Vec3 { return v - v.dot(a.cart) * axis; };
    const Vec3 pb = project(b.cart);
    const Vec3 normal = a.cart.cross(b.cart);

    // Lattice vectors in the plane P(a, b) project onto integer multiples of beta.
    Vec3 best = Vec3::Zero();
    double best_norm = std::numeric_limits<double>::infinity();
    constexpr int r = kBetaSearchBound;
    for (int n = -r; n <= r; ++n) {
        for (int m = -r; m <= r; ++m) {
            for (int s = -r; s <= r; ++s) {
                const Vec3 v = basis.combine({n, m, s});
                if (v.isZero(0)) continue;
                if (std::abs(v.dot(normal)) > kCoplanarTol * v.norm() * normal.norm()) continue;
                const Vec3 pv = project(v);
                if (pv.norm() <= kCollinearTol * v.norm()) continue;
                const double len = pv.norm();
                if (len < best_norm * (1 - 1e-12)) {
                    best_norm = len;
                    best = pv;
                }
            }
        }
    }
    if (!std::isfinite(best_norm))
        throw SearchExhausted("no projected lattice vector found within the search bound");

    Decomposition d;
    const double ratio = pb.dot(best) / best.squaredNorm();
    d.s = static_cast<int>(std::lround(ratio));
    if (d.s == 0 || std::abs(ratio - d.s) > 1e-8 * std::max(1.0, std::abs(ratio)))
        throw SearchExhausted("projection of b is not an integer multiple of the shortest vector");
    if (d.s < 0) {
        d.s = -d.s;
        best = -best;
    }
    d.beta = best;
    d.mu = b.cart.dot(a.cart) / a.cart.squaredNorm();
    return d;
}

std::vector<GammaVector> plane_modes(const LatticeBasis& basis, const GammaVector& a,
                                     const GammaVector& b) {
    if (a.is_zero() || b.is_zero() || collinear(a.cart, b.cart))
        throw CollinearInput("plane is undefined for collinear vectors");
    const Vec3 normal = a.cart.cross(b.cart);
    std::vector<GammaVector> out;
    for (const auto& c : enumerate_Q(basis).all) {
        const double triple = normal.dot(c.cart);
        if (std::abs(triple) >= kCoplanarTol * a.cart.norm() * b.cart.norm() * c.cart.norm()) continue;
        if (collinear(a.cart, c.cart)) continue;
        out.push_back(c);
    }
    return out;
}

}  // namespace invrec
