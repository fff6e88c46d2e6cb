#pragma once

// Gauge fixing and the three-step inverse algorithm: invariants -> Fourier coefficients.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "invrec/invariants.hpp"
#include "invrec/potential.hpp"

namespace invrec {

struct GaugeResult {
    PotentialCoefficients q_fixed;
    Vec3 tau = Vec3::Zero();
    bool inverted = false;
};

/// Translate so arg z(gamma_1..3) = 0, then invert if Im z(gamma_7) < 0.
/// Throws NonGeneric if |Im z(gamma_7)| <= 1e-12 |z(gamma_7)| after translation.
GaugeResult gauge_fix(const PotentialCoefficients& q);

struct ReconstructOptions {
    double sign_tol = 1e-8;       // relative tolerance on the third Step-1 equation
    double tie_ratio = 1.1;       // second-best / best residual below this -> AmbiguousSigns
    double det_floor = 1e-9;      // |det| < det_floor * scale -> NonGeneric
    double modulus_clamp = 1e-9;  // r^2 - a^2 >= -modulus_clamp * r^2 clamps to 0
};

struct Residual {
    std::string equation;
    double value = 0;
};

struct SignCandidate {
    std::array<int, 3> signs{};  // (t4, t5, t6)
    double a7 = 0, b7 = 0;       // least-squares solution of the three equations
    double residual = 0;         // relative least-squares residual
    std::array<double, 3> ratios{};
    bool admissible = false;     // ratios > 0 and b7 > 0
    bool exact = false;          // also satisfies the third equation within sign_tol
};

struct Step1Result {
    std::array<cplx, 3> z456{};
    cplx z7{};
    std::array<int, 3> signs{};
    int survivors = 0;
    std::vector<SignCandidate> candidates;  // all 8 triples
    std::vector<Residual> residuals;
    double det_floor = 0;
    std::vector<std::string> warnings;
};

struct StepSolve {
    std::array<cplx, 3> z{};
    std::vector<Residual> residuals;
    double det_floor = 0;
};

/// r_k = sqrt(I(k) / 2). Throws BadModulus for non-positive I(k).
std::array<double, kModeCount> moduli_from_invariants(const InvariantSet& inv);

/// z(gamma_4..7) and the sign triple.
Step1Result solve_step1(const InvariantSet& inv, const InvariantGeometry& geo,
                        const std::array<double, kModeCount>& r, const ReconstructOptions& opt = {});

/// z(gamma_1 - gamma_2), z(gamma_1 - gamma_3), z(gamma_2 - gamma_3).
StepSolve solve_step2(const InvariantSet& inv, const InvariantGeometry& geo,
                      const std::array<double, kModeCount>& r, const std::array<cplx, 3>& z456,
                      const ReconstructOptions& opt = {});

/// z(gamma_2 + gamma_3 - gamma_1), z(gamma_1 + gamma_3 - gamma_2), z(gamma_1 + gamma_2 - gamma_3).
StepSolve solve_step3(const InvariantSet& inv, const InvariantGeometry& geo,
                      const std::array<double, kModeCount>& r, const std::array<cplx, 3>& z456,
                      cplx z7, const ReconstructOptions& opt = {});

struct ReconstructionResult {
    PotentialCoefficients q_hat;
    std::array<int, 3> sign_triple{};
    int survivors = 0;
    std::vector<Residual> residuals;
    double condition_floor = 0;
    std::vector<std::string> warnings;

    double max_residual() const;
};

ReconstructionResult reconstruct(const InvariantSet& inv, const AdmissibleBasis& basis,
                                 const ReconstructOptions& opt = {});
ReconstructionResult reconstruct(const InvariantSet& inv, const AdmissibleBasis& basis,
                                 const InvariantGeometry& geo, const ReconstructOptions& opt = {});

/// max_k |z1(gamma_k) - z2(gamma_k)| after gauge-fixing both.
double compare_mod_gauge(const PotentialCoefficients& q1, const PotentialCoefficients& q2);

/// v -> v + eps * u * max(1, |v|), u ~ U[-1, 1], in canonical key order.
InvariantSet perturb_invariants(const InvariantSet& inv, double eps, std::uint64_t seed);

/// Gauge distance between q and the reconstruction from perturbed closed-form invariants.
double stability_trial(const PotentialCoefficients& q, double eps, std::uint64_t seed,
                       const ReconstructOptions& opt = {});

}  // namespace invrec
