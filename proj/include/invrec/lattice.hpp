#pragma once

// Geometry of the dual lattice: bases, the admissibility inequalities, visible
// elements, the 26-element mode set Q(1,1,1) and planar decompositions.

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace invrec {

using Vec3 = Eigen::Vector3d;
using Coeffs = std::array<int, 3>;

/// Three linearly independent generators of the dual lattice.
class LatticeBasis {
public:
    /// Throws SingularBasis when |det| < 1e-12 |g1||g2||g3|.
    LatticeBasis(const Vec3& g1, const Vec3& g2, const Vec3& g3);

    const Vec3& operator[](int i) const { return g_[static_cast<std::size_t>(i)]; }
    const std::array<Vec3, 3>& vectors() const { return g_; }

    /// n g1 + m g2 + s g3
    Vec3 combine(const Coeffs& c) const;

    /// The fixture {(1,0,0),(1,1,0),(1,1,2)} scaled by 2 pi.
    static LatticeBasis default_fixture();

private:
    std::array<Vec3, 3> g_;
};

/// A lattice element kept in both integer and Cartesian form.
struct GammaVector {
    Coeffs coeffs{};
    Vec3 cart = Vec3::Zero();

    static GammaVector from(const LatticeBasis& basis, const Coeffs& c);
    GammaVector operator-() const;
    bool is_zero() const { return coeffs == Coeffs{0, 0, 0}; }
};

GammaVector operator+(const GammaVector& a, const GammaVector& b);
GammaVector operator-(const GammaVector& a, const GammaVector& b);
GammaVector operator*(int k, const GammaVector& a);

struct AdmissibilityViolation {
    std::string tag;   // e.g. "<g1,g2>", "<g1+g2,g3>", "|g1|-|g2|", "<g1+g2+g3,g1-g2-g3>"
    double value = 0;  // evaluated left-hand side
};

struct AdmissibilityReport {
    bool admissible = true;
    std::vector<AdmissibilityViolation> violations;
    /// Every evaluated instance, in evaluation order (3 + 3 + 3 + 3 = 12 entries).
    std::vector<AdmissibilityViolation> evaluated;
};

/// Evaluates the twelve "!= 0" inequalities; relative tolerance 1e-9.
AdmissibilityReport check_admissible(const LatticeBasis& basis);

/// A basis that passed check_admissible.
class AdmissibleBasis {
public:
    /// Throws NotAdmissible listing the violated inequalities.
    explicit AdmissibleBasis(LatticeBasis basis);

    const LatticeBasis& lattice() const { return basis_; }
    const Vec3& operator[](int i) const { return basis_[i]; }
    Vec3 combine(const Coeffs& c) const { return basis_.combine(c); }
    GammaVector vector(const Coeffs& c) const { return GammaVector::from(basis_, c); }

    static AdmissibleBasis default_fixture();

private:
    LatticeBasis basis_;
};

/// omega_j with <g_i, omega_j> = 2 pi delta_ij.
std::array<Vec3, 3> dual_basis(const LatticeBasis& basis);

/// gcd(|n|,|m|,|s|) == 1. Throws ZeroVector for (0,0,0).
bool is_visible(const Coeffs& c);

/// Number of representatives gamma_1..gamma_13.
inline constexpr int kModeCount = 13;

/// Integer coordinates of gamma_k, k = 1..13, in the fixed index convention.
const std::array<Coeffs, kModeCount>& representative_coeffs();

/// Locates c in Q(1,1,1): returns k in 1..13 with c = +gamma_k (sign = +1) or
/// c = -gamma_k (sign = -1); k = 0 when c is not in Q.
struct ModeRef {
    int k = 0;
    int sign = 0;
    explicit operator bool() const { return k != 0; }
};
ModeRef locate_mode(const Coeffs& c);

struct ModeSet {
    std::array<GammaVector, kModeCount> representatives;
    std::vector<GammaVector> all;  // +gamma_1..+gamma_13, then -gamma_1..-gamma_13
};

ModeSet enumerate_Q(const LatticeBasis& basis);

/// b = s beta + mu a with beta a visible element of the projected lattice.
struct Decomposition {
    int s = 0;
    Vec3 beta = Vec3::Zero();
    double mu = 0;
};

/// Coefficient bound for the beta search.
inline constexpr int kBetaSearchBound = 4;

Decomposition orthogonal_decompose(const LatticeBasis& basis, const GammaVector& a,
                                   const GammaVector& b);

/// Elements of Q(1,1,1) in the plane spanned by a, b, excluding the line through a.
std::vector<GammaVector> plane_modes(const LatticeBasis& basis, const GammaVector& a,
                                     const GammaVector& b);

}  // namespace invrec
