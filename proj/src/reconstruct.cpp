#include "invrec/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "invrec/errors.hpp"

namespace invrec {

namespace {

// Mode indices (1-based) tied to the basis indices 1..3.
constexpr std::array<int, 3> kPairSum{4, 5, 6};      // gamma - gamma_i = gamma_j + gamma_k

struct Pair {
    int i, j;  // basis indices, i < j
    int sum;   // mode of gamma_i + gamma_j
    int diff;  // mode of gamma_i - gamma_j
};
constexpr std::array<Pair, 3> kPairs{{{1, 2, 6, 8}, {1, 3, 5, 9}, {2, 3, 4, 10}}};

int sum_mode_excluding(int i) { return kPairSum[static_cast<std::size_t>(i - 1)]; }

std::string fmt(const char* what, double value, double scale) {
    std::ostringstream os;
    os << what << " (|det| = " << std::abs(value) << ", scale = " << scale << ")";
    return os.str();
}

void require_det(double det, double scale, double floor, const char* what, double& det_floor) {
    det_floor = std::min(det_floor, std::abs(det));
    if (!(std::abs(det) >= floor * scale)) throw NonGeneric(fmt(what, det, scale));
}

double rel(double residual, double scale) { return std::abs(residual) / std::max(scale, 1e-300); }

}  // namespace

GaugeResult gauge_fix(const PotentialCoefficients& q) {
    const auto omega = dual_basis(q.basis().lattice());
    const auto view = polar(q);
    Vec3 tau = Vec3::Zero();
    for (std::size_t k = 0; k < 3; ++k) tau += view.alpha[k] / (2 * std::numbers::pi) * omega[k];
    PotentialCoefficients fixed = translate(q, tau);
    const cplx z7 = fixed.coefficient(7);
    if (std::abs(z7.imag()) <= 1e-12 * std::abs(z7))
        throw NonGeneric("Im z(gamma_7) vanishes after translation; inversion cannot be fixed");
    const bool inverted = z7.imag() < 0;
    if (inverted) fixed = invert(fixed);
    return GaugeResult{std::move(fixed), tau, inverted};
}

std::array<double, kModeCount> moduli_from_invariants(const InvariantSet& inv) {
    std::array<double, kModeCount> r{};
    for (int k = 1; k <= kModeCount; ++k) {
        const double v = inv.I(k);
        if (!(v > 0) || !std::isfinite(v))
            throw BadModulus("I(" + std::to_string(k) + ") must be positive and finite");
        r[static_cast<std::size_t>(k - 1)] = std::sqrt(v / 2);
    }
    return r;
}

Step1Result solve_step1(const InvariantSet& inv, const InvariantGeometry& geo,
                        const std::array<double, kModeCount>& r, const ReconstructOptions& opt) {
    auto R = [&](int k) { return r[static_cast<std::size_t>(k - 1)]; };
    Step1Result out;
    out.det_floor = std::numeric_limits<double>::infinity();

    // Real parts and moduli of the imaginary parts of z(gamma_4..6); index i = basis index
    // excluded from the pair, so slot i - 1 holds mode 3 + i.
    std::array<double, 3> a{}, bmod{}, c{};
    for (const auto& p : kPairs) {
        const int k = 6 - p.i - p.j + 3;  // (2,3)->4, (1,3)->5, (1,2)->6
        const auto s = static_cast<std::size_t>(k - 4);
        const double A = geo.entry({Family::I1Sum, p.i, p.j}).A;
        a[s] = inv.I1_sum(p.i, p.j) / (A * R(p.i) * R(p.j));
        const double rk = R(k);
        double d = rk * rk - a[s] * a[s];
        if (d < 0) {
            if (d < -opt.modulus_clamp * rk * rk) {
                std::ostringstream os;
                os << "r^2 - a^2 = " << d << " for gamma_" << k;
                throw BadModulus(os.str());
            }
            out.warnings.push_back("clamped r^2 - a^2 = " + std::to_string(d) + " to 0 for gamma_" + std::to_string(k));
            d = 0;
        }
        bmod[s] = std::sqrt(d);
    }
    for (std::size_t s = 0; s < 3; ++s) {
        const double rk = R(4 + static_cast<int>(s));
        require_det(a[s] * bmod[s], rk * rk, opt.det_floor, "a_s b_s vanishes in Step 1", out.det_floor);
    }
    for (int i = 1; i <= 3; ++i) {
        const double A = geo.entry({Family::I1Gamma, i, 0}).A;
        c[static_cast<std::size_t>(i - 1)] = inv.I1_gamma(i) / (A * R(i));
    }

    const double cscale = std::abs(c[0]) + std::abs(c[1]) + std::abs(c[2]);
    for (int mask = 0; mask < 8; ++mask) {
        SignCandidate cand;
        std::array<double, 3> bt{};
        for (std::size_t s = 0; s < 3; ++s) {
            cand.signs[s] = (mask >> s) & 1 ? -1 : +1;
            bt[s] = cand.signs[s] * bmod[s];
        }
        // Normal equations of the 3x2 system [a | bt] (a7, b7)^T = c.
        double saa = 0, sab = 0, sbb = 0, sac = 0, sbc = 0;
        for (std::size_t s = 0; s < 3; ++s) {
            saa += a[s] * a[s];
            sab += a[s] * bt[s];
            sbb += bt[s] * bt[s];
            sac += a[s] * c[s];
            sbc += bt[s] * c[s];
        }
        const double det = saa * sbb - sab * sab;
        if (det > 0) {
            cand.a7 = (sac * sbb - sab * sbc) / det;
            cand.b7 = (saa * sbc - sab * sac) / det;
        } else {
            cand.a7 = cand.b7 = std::numeric_limits<double>::quiet_NaN();
        }
        double res2 = 0;
        for (std::size_t s = 0; s < 3; ++s) {
            const double e = a[s] * cand.a7 + bt[s] * cand.b7 - c[s];
            res2 += e * e;
        }
        cand.residual = std::sqrt(res2) / std::max(cscale, 1e-300);

        // b7 from each pair of equations by Cramer.
        bool ratios_ok = true;
        constexpr std::array<std::array<std::size_t, 2>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
        for (std::size_t n = 0; n < 3; ++n) {
            const auto [u, v] = pairs[n];
            const double den = bt[v] * a[u] - bt[u] * a[v];
            cand.ratios[n] = (a[u] * c[v] - a[v] * c[u]) / den;
            if (!(cand.ratios[n] > 0)) ratios_ok = false;
        }
        cand.admissible = ratios_ok && cand.b7 > 0;

        // Exact acceptance: solve the first two equations, check the third.
        const double den01 = a[0] * bt[1] - a[1] * bt[0];
        if (den01 != 0) {
            const double x = (c[0] * bt[1] - c[1] * bt[0]) / den01;
            const double y = (a[0] * c[1] - a[1] * c[0]) / den01;
            const double e = a[2] * x + bt[2] * y - c[2];
            const double scale = std::abs(a[2] * x) + std::abs(bt[2] * y) + std::abs(c[2]);
            cand.exact = cand.admissible && y > 0 && rel(e, scale) <= opt.sign_tol;
        }
        out.survivors += cand.exact;
        out.candidates.push_back(cand);
    }

    const SignCandidate* best = nullptr;
    const SignCandidate* second = nullptr;
    for (const auto& cand : out.candidates) {
        if (!cand.admissible) continue;
        if (!best || cand.residual < best->residual) {
            second = best;
            best = &cand;
        } else if (!second || cand.residual < second->residual) {
            second = &cand;
        }
    }
    if (!best) throw AmbiguousSigns("no sign triple satisfies the positivity conditions");
    if (second && second->residual <= opt.tie_ratio * best->residual) {
        std::ostringstream os;
        os << "sign triples tie: residuals " << best->residual << " and " << second->residual;
        throw AmbiguousSigns(os.str());
    }

    // Determinants of the three pairwise systems for the selected triple.
    std::array<double, 3> bt{};
    for (std::size_t s = 0; s < 3; ++s) bt[s] = best->signs[s] * bmod[s];
    constexpr std::array<std::array<std::size_t, 2>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
    for (const auto& [u, v] : pairs)
        require_det(bt[v] * a[u] - bt[u] * a[v], R(4 + static_cast<int>(u)) * R(4 + static_cast<int>(v)),
                    opt.det_floor, "Step 1 pair system is singular", out.det_floor);

    out.signs = best->signs;
    for (std::size_t s = 0; s < 3; ++s) out.z456[s] = cplx(a[s], bt[s]);
    out.z7 = cplx(best->a7, best->b7);
    for (std::size_t s = 0; s < 3; ++s) {
        const double e = a[s] * best->a7 + bt[s] * best->b7 - c[s];
        out.residuals.push_back({"step1 gamma_" + std::to_string(s + 1), std::abs(e)});
    }
    return out;
}

StepSolve solve_step2(const InvariantSet& inv, const InvariantGeometry& geo,
                      const std::array<double, kModeCount>& r, const std::array<cplx, 3>& z456,
                      const ReconstructOptions& opt) {
    auto R = [&](int k) { return r[static_cast<std::size_t>(k - 1)]; };
    StepSolve out;
    out.det_floor = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < kPairs.size(); ++n) {
        const auto& p = kPairs[n];
        const cplx zs = z456[static_cast<std::size_t>(p.sum - 4)];
        const double as = zs.real(), bs = zs.imag();
        // a x - b y = c_ij ; a x + b y = c_ji  with z(gamma_i - gamma_j) = x + i y
        const double cij = inv.I2_pair(p.i, p.j) / (2 * geo.entry({Family::I2Pair, p.i, p.j}).A * R(p.i) * R(p.i));
        const double cji = inv.I2_pair(p.j, p.i) / (2 * geo.entry({Family::I2Pair, p.j, p.i}).A * R(p.j) * R(p.j));
        const double det = 2 * as * bs;
        require_det(det, R(p.sum) * R(p.sum), opt.det_floor, "Step 2 system is singular", out.det_floor);
        const double x = (cij * bs + bs * cji) / det;
        const double y = (as * cji - as * cij) / det;
        out.z[n] = cplx(x, y);
        const std::string tag = std::to_string(p.i) + std::to_string(p.j);
        out.residuals.push_back({"step2 " + tag + " minus", std::abs(as * x - bs * y - cij)});
        out.residuals.push_back({"step2 " + tag + " plus", std::abs(as * x + bs * y - cji)});
    }
    return out;
}

StepSolve solve_step3(const InvariantSet& inv, const InvariantGeometry& geo,
                      const std::array<double, kModeCount>& r, const std::array<cplx, 3>& z456,
                      cplx z7, const ReconstructOptions& opt) {
    auto R = [&](int k) { return r[static_cast<std::size_t>(k - 1)]; };
    StepSolve out;
    out.det_floor = std::numeric_limits<double>::infinity();
    const double a7 = z7.real(), b7 = z7.imag();
    for (int i = 1; i <= 3; ++i) {
        const int pm = sum_mode_excluding(i);
        const cplx zp = z456[static_cast<std::size_t>(pm - 4)];
        const double ap = zp.real(), bp = zp.imag();
        // a_P x + b_P y = c ; a7 x + b7 y = d  with z(gamma - 2 gamma_i) = x + i y
        const double c = inv.I1_refl(i) / (geo.entry({Family::I1Refl, i, 0}).A * R(i));
        const double d = inv.I2_gamma(i) / (2 * geo.entry({Family::I2Gamma, i, 0}).A * R(i) * R(i));
        const double det = ap * b7 - bp * a7;
        require_det(det, R(pm) * R(7), opt.det_floor, "Step 3 system is singular", out.det_floor);
        const double x = (c * b7 - bp * d) / det;
        const double y = (ap * d - a7 * c) / det;
        out.z[static_cast<std::size_t>(i - 1)] = cplx(x, y);
        const std::string tag = std::to_string(i);
        out.residuals.push_back({"step3 refl " + tag, std::abs(ap * x + bp * y - c)});
        out.residuals.push_back({"step3 gamma " + tag, std::abs(a7 * x + b7 * y - d)});
    }
    return out;
}

double ReconstructionResult::max_residual() const {
    double worst = 0;
    for (const auto& res : residuals) worst = std::max(worst, res.value);
    return worst;
}

ReconstructionResult reconstruct(const InvariantSet& inv, const AdmissibleBasis& basis,
                                 const ReconstructOptions& opt) {
    return reconstruct(inv, basis, InvariantGeometry(basis.lattice()), opt);
}

ReconstructionResult reconstruct(const InvariantSet& inv, const AdmissibleBasis& basis,
                                 const InvariantGeometry& geo, const ReconstructOptions& opt) {
    for (double v : inv.values())
        if (!std::isfinite(v)) throw BadModulus("invariant set contains a non-finite entry");
    const auto r = moduli_from_invariants(inv);
    const Step1Result s1 = solve_step1(inv, geo, r, opt);
    const StepSolve s2 = solve_step2(inv, geo, r, s1.z456, opt);
    const StepSolve s3 = solve_step3(inv, geo, r, s1.z456, s1.z7, opt);

    std::array<cplx, kModeCount> z{};
    for (std::size_t k = 0; k < 3; ++k) z[k] = r[k];
    for (std::size_t k = 0; k < 3; ++k) z[3 + k] = s1.z456[k];
    z[6] = s1.z7;
    for (std::size_t k = 0; k < 3; ++k) z[7 + k] = s2.z[k];
    for (std::size_t k = 0; k < 3; ++k) z[10 + k] = s3.z[k];
    for (std::size_t k = 0; k < z.size(); ++k)
        if (z[k] == cplx{}) throw BadModulus("reconstructed z(gamma_" + std::to_string(k + 1) + ") vanishes");

    ReconstructionResult out{PotentialCoefficients(basis, z), s1.signs, s1.survivors, {}, 0, s1.warnings};
    for (const auto* part : {&s1.residuals, &s2.residuals, &s3.residuals})
        out.residuals.insert(out.residuals.end(), part->begin(), part->end());
    // Modulus consistency of the solved coefficients.
    for (int k = 7; k <= kModeCount; ++k)
        out.residuals.push_back({"modulus gamma_" + std::to_string(k),
                                 std::abs(std::abs(z[static_cast<std::size_t>(k - 1)]) - r[static_cast<std::size_t>(k - 1)])});
    out.condition_floor = std::min({s1.det_floor, s2.det_floor, s3.det_floor});
    return out;
}

double compare_mod_gauge(const PotentialCoefficients& q1, const PotentialCoefficients& q2) {
    const auto f1 = gauge_fix(q1).q_fixed;
    const auto f2 = gauge_fix(q2).q_fixed;
    double d = 0;
    for (int k = 1; k <= kModeCount; ++k) d = std::max(d, std::abs(f1.coefficient(k) - f2.coefficient(k)));
    return d;
}

InvariantSet perturb_invariants(const InvariantSet& inv, double eps, std::uint64_t seed) {
    if (!(eps >= 0)) throw std::invalid_argument("perturbation size must be non-negative");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    InvariantSet out = inv;
    for (auto& v : out.values()) v += eps * u(rng) * std::max(1.0, std::abs(v));
    return out;
}

double stability_trial(const PotentialCoefficients& q, double eps, std::uint64_t seed,
                       const ReconstructOptions& opt) {
    const auto inv = perturb_invariants(closed_forms(q), eps, seed);
    return compare_mod_gauge(q, reconstruct(inv, q.basis(), opt).q_hat);
}

}  // namespace invrec
