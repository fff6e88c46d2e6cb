#pragma once

// One-dimensional spectral problems:
//   * T_v(Q): -|delta|^2 y'' + Q(s) y = mu y on [0, 2 pi], y(2 pi) = e^{i 2 pi v} y(0);
//   * the Hill operator -y'' + p(x) y on [0, pi] with periodic / antiperiodic conditions,
//     p(x) = sum_s p_s e^{2 i s x}.

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace invrec {

using cplx = std::complex<double>;

struct HillProblem {
    double delta_norm = 1;
    std::map<int, cplx> coefficients;  // n -> z(n delta), Hermitian, no n = 0 entry
    double v = 0;
    int truncation = 40;
};

/// Throws std::invalid_argument on a non-Hermitian map, a nonzero mean, |delta| <= 0,
/// v outside [0, 1) or non-finite entries; TruncationTooSmall when N_t < 2 max|n| + 10.
void validate(const HillProblem& p);

int max_frequency(const std::map<int, cplx>& coefficients);

/// Q(s) = 2 mu cos(harmonic s).
std::map<int, cplx> cosine_profile(double mu, int harmonic = 1);

/// Rows and columns indexed by n = -N_t..N_t.
Eigen::MatrixXcd hill_matrix(const HillProblem& p);

struct HillSpectrum {
    std::vector<double> eigenvalues;  // ascending, 2 N_t + 1 entries
    HillProblem problem;
};

HillSpectrum spectrum(const HillProblem& p);

/// Eigenpair whose eigenvalue is nearest |delta|^2 (j + v)^2.
struct HillEigenpair {
    double mu = 0;
    int j = 0;
    std::vector<cplx> fourier;  // coefficient of e^{i(n + v)s}, n = -N_t..N_t, unit l2 norm
};

/// Throws TruncationTooSmall unless |j| + 10 <= N_t.
HillEigenpair nearest_eigenpair(const HillProblem& p, int j);

/// Fourier coefficients h_m of |phi(s)|^2 = sum_m h_m e^{i m s}, m = -2N_t..2N_t,
/// normalized to mean one (h_0 = 1).
std::vector<cplx> density_coefficients(const HillEigenpair& e);

/// |phi(2 pi t / n)|^2, t = 0..n-1, mean one.
std::vector<double> density_samples(const HillEigenpair& e, int n);

/// Second-order shift of the level |delta|^2 (n+v)^2 for Q = 2 mu cos s.
double cosine_second_order_shift(double mu, double delta_norm, double v, int n);

// ---------------------------------------------------------------------------
// Hill operator gaps

/// p(x) = sum_s p_s e^{2isx}; real (p_{-s} = conj p_s), p_0 = 0.
using TrigPolynomial = std::map<int, cplx>;

struct GapRow {
    int n = 0;
    double lambda1 = 0, lambda2 = 0, gap = 0;
};

struct GapReport {
    double lambda0 = 0;
    std::vector<GapRow> rows;  // n = 1..n_max
    int truncation = 0;
};

/// Smallest Fourier cutoff accepted by gap_lengths.
int minimal_gap_truncation(const TrigPolynomial& p, int n_max);

/// Periodic (even n) and antiperiodic (odd n) eigenvalues from two truncated Fourier
/// matrices, computed in extended precision. truncation = 0 picks a default.
/// Throws TruncationTooSmall or InterlacingViolation.
GapReport gap_lengths(const TrigPolynomial& p, int n_max, int truncation = 0);

/// Asserts lambda0 < lambda_{1,1} <= lambda_{1,2} < lambda_{2,1} <= ... .
void check_interlacing(const GapReport& r);

inline constexpr double kGapUnderflow = 1e-13;

struct DecayRow {
    int n = 0;
    double gap_high = 0, gap_low = 0;  // higher-degree / lower-degree potential
    bool underflow_high = false, underflow_low = false;
};

struct DecayReport {
    int degree_high = 0, degree_low = 0;
    std::vector<DecayRow> rows;
    /// Slope of log|gamma_n| against n log n over the resolved gaps.
    std::optional<double> exponent_high, exponent_low;
};

/// Gap sequences of two potentials over [n_lo, n_hi]. Gaps below kGapUnderflow are
/// flagged instead of compared. Throws std::invalid_argument unless deg pK < deg pN.
DecayReport gap_decay_compare(const TrigPolynomial& pN, const TrigPolynomial& pK, int n_lo, int n_hi);

struct DominanceVerdict {
    bool holds = true;
    std::vector<int> checked;
    std::vector<int> failed;  // n where the higher-degree gap does not exceed the other
};

/// Rows with n in [n_lo, n_hi] and both gaps below `ceiling`: requires gap_high > gap_low.
/// A flagged gap counts as below kGapUnderflow.
DominanceVerdict dominance(const DecayReport& r, int n_lo, int n_hi, double ceiling = 1e-2);

/// Throws GapUnderflow naming the first flagged row of either sequence, if any.
void require_resolved(const DecayReport& r);

// ---------------------------------------------------------------------------
// Large-j expansion of mu_j(v)

struct C3Probe {
    std::array<double, 4> coefficients{};  // of j^-1 .. j^-4
    double fit_rms = 0;
    double c3_predicted = 0;         // int |Q|^2 / (16 pi |delta|^3)
    double second_order_j2 = 0;      // j^-2 coefficient of the single-harmonic perturbation shift
    std::vector<std::pair<int, double>> residuals;  // (j, mu_j - |delta|^2 (j+v)^2)
};

C3Probe c3_probe(const HillProblem& p, int j_lo, int j_hi);

}  // namespace invrec
