#pragma once

// Synthetic band data for the directional operator and the linear solves that
// recover mu_j(v), J(delta, b_k, j, v) and their large-j expansion coefficients.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "invrec/hill.hpp"
#include "invrec/lattice.hpp"
#include "invrec/potential.hpp"

namespace invrec {

inline constexpr double kAlpha = 1.0 / 432;
inline constexpr double kAlpha1 = 3 * kAlpha;
inline constexpr double kAExp = 406 * kAlpha;

/// rho^{-3a + 2 alpha_1} ln rho
double remainder_bound(double rho);

/// A value carried as hi + lo (about 106 significant bits).
struct Wide {
    double hi = 0, lo = 0;
};

/// One plane P(delta, b) of modes of Q(1,1,1) off the line of delta.
struct DeltaPlane {
    Vec3 b = Vec3::Zero();  // visible element of the projected lattice
    GammaVector mode;       // a mode spanning the plane together with delta
    std::vector<GammaVector> modes;
};

/// Planes through delta covering Q(1,1,1) minus the line of delta, in first-seen order
/// over gamma_1..gamma_13.
std::vector<DeltaPlane> delta_planes(const LatticeBasis& basis, const GammaVector& delta);

struct ExtractionGeometry {
    double rho = 0;
    GammaVector delta;
    std::vector<DeltaPlane> planes;  // b_1..b_m
    std::vector<Vec3> points;        // beta_s + tau, s = 0..m, orthogonal to delta
    std::vector<std::vector<double>> inner;  // inner[s][k] = <beta_s + tau, b_{k+1}>
    double far_lower = 0, far_upper = 0;     // recorded c1, c2 with c1 rho <= |inner| <= c2 rho, s != k
};

/// Uses the first m planes of delta. Throws std::invalid_argument for m < 1, m larger
/// than the number of planes, or rho <= 1.
ExtractionGeometry make_geometry(const LatticeBasis& basis, const GammaVector& delta, double rho, int m);

/// Checks the near/far regimes; returns a description of the first failure.
std::optional<std::string> check_geometry(const ExtractionGeometry& g);

struct BandTruth {
    double mu = 0;
    std::vector<double> J;  // per plane
};

/// T_v problem of the directional profile of q along delta.
HillProblem directional_problem(const PotentialCoefficients& q, const GammaVector& delta, double v,
                                int truncation);

/// J(delta, b, j, v) by Parseval from the eigenfunction density.
double j_parseval(const PotentialCoefficients& q, const GammaVector& delta, const DeltaPlane& plane,
                  const HillEigenpair& e);

/// Ground truth for level j: mu_j(v) and J for every plane of the geometry.
BandTruth band_truth(const PotentialCoefficients& q, const ExtractionGeometry& g, int j, double v);

struct SyntheticBandData {
    ExtractionGeometry geometry;
    std::vector<int> j_list;
    double v = 0;
    double noise_amp = 0;
    std::map<int, std::vector<Wide>> Lambda;  // j -> samples at beta_0..beta_m
    std::map<int, BandTruth> truth;
};

/// Lambda(j, s) = |beta_s+tau|^2 + mu_j + 1/4 sum_k |b_k|^4 / <beta_s+tau, b_k>^2 J_k + noise,
/// noise ~ U[-1, 1] noise_amp remainder_bound(rho).
SyntheticBandData generate_synthetic(const PotentialCoefficients& q, const ExtractionGeometry& g,
                                     const std::vector<int>& j_list, double v, double noise_amp,
                                     std::uint64_t seed);

struct MuJEstimate {
    double mu = 0;
    std::vector<double> J;
    double det = 0;            // determinant of the coefficient matrix
    double det_predicted = 0;  // product of the diagonal weights
    // estimate minus retained truth, evaluated before rounding (set when the data carries truth)
    std::optional<double> mu_error;
    std::vector<double> J_error;
};

/// Solves the (m+1) x (m+1) system for each j. Throws IllConditioned when
/// |det| < 1e-3 det_predicted.
std::map<int, MuJEstimate> solve_mu_J(const SyntheticBandData& data);

struct SweepRow {
    double rho = 0;
    double mu_err = 0, J_err = 0;  // RMS over seeds; J error is the max over planes
    double det = 0;
};

struct SweepReport {
    std::vector<SweepRow> rows;
    double mu_slope = 0, J_slope = 0, det_slope = 0;
    double zero_noise_error = 0;  // max relative error with noise_amp = 0
};

struct SweepConfig {
    std::vector<double> rhos{1e3, 1e4, 1e5, 1e6};
    int m = 2;
    int j = 3;
    double v = 0.3;
    double noise_amp = 1;
    int seeds = 64;
    std::uint64_t seed = 1;
};

SweepReport extraction_sweep(const PotentialCoefficients& q, const GammaVector& delta, const SweepConfig& cfg);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Large-j expansions

inline constexpr int kMaxCExpansion = 6;
inline constexpr int kMaxJExpansion = 5;

/// sum_{i=1..n} c_i / (jk)^i = mu_{jk} - |delta|^2 (jk + shift)^2 for k = 1..n; the standard
/// baseline is shift = 0. Throws IllConditioned for n > kMaxCExpansion,
/// std::invalid_argument when a sample k = 1..n is missing.
std::vector<double> solve_c_expansion(const std::map<int, double>& mu_samples, int j, int n,
                                      double delta_norm, double shift = 0);

/// Same system on residuals r_k = mu_{jk} - baseline. The subtraction in solve_c_expansion
/// loses the digits below the ulp of |jk delta|^2, which the solve amplifies by up to
/// c_expansion_noise_gain(n, i) j^i.
std::vector<double> solve_c_from_residuals(const std::map<int, double>& residuals, int j, int n);

/// sum_{i=0..n} J_i / (jk)^i = J(jk) for k = 1..n+1. Throws IllConditioned for n > kMaxJExpansion.
std::vector<double> solve_J_expansion(const std::map<int, double>& J_samples, int j, int n);

/// sum_k |(V^{-1})_{i,k}| for the scaled Vandermonde matrix V_{k,i} = k^{-i}, i, k = 1..n.
double c_expansion_noise_gain(int n, int i);

/// int_0^{2 pi} |Q|^2 dt = 16 pi |delta|^3 c_3
double directional_mass_from_c3(double c3, double delta_norm);

/// Constants a_1..a_6 of the |phi|^2 expansion (supplied by configuration).
struct DensityConstants {
    std::array<double, 6> a{};
};

struct PlaneInvariants {
    double I1 = 0, I2 = 0;  // in the library sign convention (negated integrals)
};

/// Inverts J_2 = 1/2 int |q|^2 Q + a1 |z|^2 J_0 and
/// J_4 = a4 int |q|^2 Q + a5 int |q|^2 (z^2 e^{2is} + c.c.) + a6 J_0, with J_k the
/// coefficients of (j |delta|)^-k; coefficients of j^-k are rescaled by |delta|^k first.
/// Throws std::invalid_argument when a5 = 0.
PlaneInvariants invariants_from_J(double J0, double J2, double J4, double abs2_z_delta,
                                  const DensityConstants& c, double delta_norm = 1);

}  // namespace invrec
