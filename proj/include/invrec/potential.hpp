#pragma once

// Trigonometric-polynomial potentials supported on Q(1,1,1).

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "invrec/lattice.hpp"

namespace invrec {

using cplx = std::complex<double>;

/// Fourier coefficients z(gamma_1..gamma_13) of a real potential; z(-g) = conj z(g).
class PotentialCoefficients {
public:
    /// Throws std::invalid_argument if any coefficient is zero or non-finite.
    PotentialCoefficients(AdmissibleBasis basis, const std::array<cplx, kModeCount>& z);

    const AdmissibleBasis& basis() const { return basis_; }
    const std::array<cplx, kModeCount>& coefficients() const { return z_; }

    /// z(gamma_k), k = 1..13.
    cplx coefficient(int k) const { return z_.at(static_cast<std::size_t>(k - 1)); }

    /// z(c) for any lattice element; exactly 0 outside Q(1,1,1).
    cplx at(const Coeffs& c) const;
    cplx at(const GammaVector& c) const { return at(c.coeffs); }

private:
    AdmissibleBasis basis_;
    std::array<cplx, kModeCount> z_;
};

/// r_k e^{i alpha_k} view with alpha_k in [0, 2 pi).
struct PolarView {
    std::array<double, kModeCount> r{};
    std::array<double, kModeCount> alpha{};
};

PolarView polar(const PotentialCoefficients& q);

/// Sum over the 26 modes; real by Hermitian symmetry.
double evaluate(const PotentialCoefficients& q, const Vec3& x);

/// Direct complex 26-term sum (kept for the reality check).
cplx evaluate_complex(const PotentialCoefficients& q, const Vec3& x);

/// Coefficients of x -> q(x - tau).
PotentialCoefficients translate(const PotentialCoefficients& q, const Vec3& tau);

/// Coefficients of x -> q(-x).
PotentialCoefficients invert(const PotentialCoefficients& q);

/// Coefficients after the unique translation making arg z(gamma_1..3) = 0;
/// computed from integer combinations of the phases, no dual basis needed.
PotentialCoefficients phase_normalized(const PotentialCoefficients& q);

struct GenericityFailure {
    std::string condition;
    double value = 0;
};

struct GenericityReport {
    bool ok = true;
    std::vector<GenericityFailure> failed;
};

/// Product-form conditions on the phase-normalized coefficients; relative threshold 1e-9.
GenericityReport check_genericity(const PotentialCoefficients& q);

/// The thirteen translation-invariant phase combinations, reduced to [0, 2 pi).
std::array<double, 13> phase_combinations(const PotentialCoefficients& q);

/// Q^a(s) = z(a) e^{is} + conj(z(a)) e^{-is}; identically zero when a is not in Q.
class DirectionalProfile {
public:
    explicit DirectionalProfile(cplx za) : za_(za) {}
    cplx coefficient() const { return za_; }
    double operator()(double s) const { return 2 * std::real(za_ * std::polar(1.0, s)); }
    bool is_zero() const { return za_ == cplx{}; }

private:
    cplx za_;
};

DirectionalProfile directional(const PotentialCoefficients& q, const GammaVector& a);

/// Moduli log-uniform in [0.2, 2], arguments uniform in [0, 2 pi), rejection-sampled
/// until check_genericity passes. Throws NonGeneric after max_draws attempts.
PotentialCoefficients random_generic_potential(const AdmissibleBasis& basis, std::uint64_t seed,
                                               int max_draws = 10000, int* draws_used = nullptr);

}  // namespace invrec
