#pragma once

// Spectral invariants I(a), I1(a,b), I2(a,b) of a potential supported on Q(1,1,1).
//
// Three independent routes are provided:
//   * symmetric_sums  - the general plane sums over (P(a,b) ∩ Q) \ aR,
//   * closed_forms    - the reduced single-term expressions with coefficients A1, A2,
//   * quadrature      - tensor-grid integration of the defining integrals over one cell.
//
// Conventions: I(a) = ∫_F |q^a|^2 = 2|z(a)|^2 (|F| = 1). The plane sums carry the opposite
// sign of the raw integrals ∫|q_{a,b}|^2 q^a and ∫|q_{a,b}|^2 (z(a)^2 e^{2i<a,x>} + c.c.);
// the quadrature route reports the negated integrals so all three routes agree.
// The I2 closed forms carry 2 A2: the plane sum picks up the equal terms c and -c.

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "invrec/lattice.hpp"
#include "invrec/potential.hpp"

namespace invrec {

enum class Family { I, I1Sum, I1Diff, I1Gamma, I1Refl, I2Pair, I2Gamma };

struct InvariantKey {
    Family family = Family::I;
    int i = 0;  // mode index for Family::I, otherwise basis index 1..3
    int j = 0;  // second basis index for the pair families, 0 otherwise

    bool operator==(const InvariantKey&) const = default;
};

std::string to_string(const InvariantKey& key);

/// Every invariant consumed by the reconstruction, indexed by InvariantKey.
class InvariantSet {
public:
    static constexpr std::size_t kSize = 13 + 6 + 6 + 3 + 3 + 6 + 3;

    /// Canonical ordering used by files, perturbation and comparisons.
    static const std::array<InvariantKey, kSize>& keys();

    double& operator[](const InvariantKey& key);
    double operator[](const InvariantKey& key) const;

    double I(int k) const { return (*this)[{Family::I, k, 0}]; }
    double I1_sum(int i, int j) const { return (*this)[{Family::I1Sum, i, j}]; }
    double I1_diff(int i, int j) const { return (*this)[{Family::I1Diff, i, j}]; }
    double I1_gamma(int i) const { return (*this)[{Family::I1Gamma, i, 0}]; }
    double I1_refl(int i) const { return (*this)[{Family::I1Refl, i, 0}]; }
    double I2_pair(int i, int j) const { return (*this)[{Family::I2Pair, i, j}]; }
    double I2_gamma(int i) const { return (*this)[{Family::I2Gamma, i, 0}]; }

    const std::array<double, kSize>& values() const { return values_; }
    std::array<double, kSize>& values() { return values_; }

private:
    std::array<double, kSize> values_{};
};

/// Largest entrywise |x - y| / (1 + |x|).
double max_relative_difference(const InvariantSet& x, const InvariantSet& y);

/// The argument pair (a, b) an invariant is evaluated at, as lattice coordinates.
std::pair<Coeffs, Coeffs> invariant_arguments(const InvariantKey& key);

/// A1(a,b) = 2(<b,beta>^-2 + <a-b,beta>^-2) <a-b,b>.
double coeff_A1(const LatticeBasis& basis, const GammaVector& a, const GammaVector& b);
/// A2(a,b) = 2 <a-b,a+b> <b,beta>^-2.
double coeff_A2(const LatticeBasis& basis, const GammaVector& a, const GammaVector& b);

/// I(gamma_k) = 2 |z(gamma_k)|^2.
double invariant_I(const PotentialCoefficients& q, int k);

/// General plane sums; beta taken from orthogonal_decompose(a, b).
double invariant_I1_sum(const PotentialCoefficients& q, const GammaVector& a, const GammaVector& b);
double invariant_I2_sum(const PotentialCoefficients& q, const GammaVector& a, const GammaVector& b);

/// Same sums with an explicitly supplied beta (used to check beta -> -beta symmetry).
double invariant_I1_sum(const PotentialCoefficients& q, const GammaVector& a, const GammaVector& b,
                        const Vec3& beta);
double invariant_I2_sum(const PotentialCoefficients& q, const GammaVector& a, const GammaVector& b,
                        const Vec3& beta);

/// Per-basis cache of the decompositions, plane sets and A-coefficients.
class InvariantGeometry {
public:
    struct Entry {
        GammaVector a, b;
        Decomposition decomposition;
        std::vector<GammaVector> plane;  // empty for Family::I
        double A = 0;                    // A1 or A2 by family, 0 for Family::I
    };

    explicit InvariantGeometry(const LatticeBasis& basis);

    const Entry& entry(const InvariantKey& key) const;
    const LatticeBasis& basis() const { return basis_; }

private:
    LatticeBasis basis_;
    std::array<Entry, InvariantSet::kSize> entries_;
};

InvariantSet closed_forms(const PotentialCoefficients& q);
InvariantSet closed_forms(const PotentialCoefficients& q, const InvariantGeometry& geometry);

InvariantSet symmetric_sums(const PotentialCoefficients& q);
InvariantSet symmetric_sums(const PotentialCoefficients& q, const InvariantGeometry& geometry);

inline constexpr int kDefaultQuadratureGrid = 48;

/// Grid quadrature over {c1 w1 + c2 w2 + c3 w3 : c in [0,1)^3} with `grid` points per axis.
InvariantSet quadrature(const PotentialCoefficients& q, int grid = kDefaultQuadratureGrid);
InvariantSet quadrature(const PotentialCoefficients& q, const InvariantGeometry& geometry,
                        int grid = kDefaultQuadratureGrid);

/// Raw grid integrals for arbitrary arguments (no sign convention applied).
double quadrature_abs2_directional(const PotentialCoefficients& q, const GammaVector& a,
                                   int grid = kDefaultQuadratureGrid);
double quadrature_I1_integral(const PotentialCoefficients& q, const GammaVector& a,
                              const GammaVector& b, int grid = kDefaultQuadratureGrid);
double quadrature_I2_integral(const PotentialCoefficients& q, const GammaVector& a,
                              const GammaVector& b, int grid = kDefaultQuadratureGrid);

/// ∫_F |q_{a,b}(x)|^2 g(<a,x>) dx for a one-variable weight g sampled by the caller
/// at s = 2 pi t / grid, t = 0..grid-1.
double quadrature_weighted_plane_norm(const PotentialCoefficients& q, const GammaVector& a,
                                      const GammaVector& b, const std::vector<double>& weight,
                                      int grid = kDefaultQuadratureGrid);

}  // namespace invrec
