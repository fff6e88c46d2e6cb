#include "invrec/potential.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "invrec/errors.hpp"

namespace invrec {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr double kGenericTol = 1e-9;

double wrap_angle(double a) {
    double w = std::fmod(a, kTwoPi);
    if (w < 0) w += kTwoPi;
    if (w >= kTwoPi) w = 0;
    return w;
}

}  // namespace

PotentialCoefficients::PotentialCoefficients(AdmissibleBasis basis,
                                             const std::array<cplx, kModeCount>& z)
    : basis_(std::move(basis)), z_(z) {
    for (int k = 0; k < kModeCount; ++k) {
        const cplx v = z_[static_cast<std::size_t>(k)];
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || v == cplx{}) {
            std::ostringstream os;
            os << "coefficient z(gamma_" << k + 1 << ") must be finite and nonzero";
            throw std::invalid_argument(os.str());
        }
    }
}

cplx PotentialCoefficients::at(const Coeffs& c) const {
    const ModeRef ref = locate_mode(c);
    if (!ref) return {};
    const cplx v = coefficient(ref.k);
    return ref.sign > 0 ? v : std::conj(v);
}

PolarView polar(const PotentialCoefficients& q) {
    PolarView view;
    for (int k = 0; k < kModeCount; ++k) {
        const auto i = static_cast<std::size_t>(k);
        view.r[i] = std::abs(q.coefficients()[i]);
        view.alpha[i] = wrap_angle(std::arg(q.coefficients()[i]));
    }
    return view;
}

double evaluate(const PotentialCoefficients& q, const Vec3& x) {
    const auto modes = enumerate_Q(q.basis().lattice());
    double sum = 0;
    for (int k = 0; k < kModeCount; ++k) {
        const auto i = static_cast<std::size_t>(k);
        sum += 2 * std::real(q.coefficients()[i] * std::polar(1.0, modes.representatives[i].cart.dot(x)));
    }
    return sum;
}

cplx evaluate_complex(const PotentialCoefficients& q, const Vec3& x) {
    cplx sum{};
    for (const auto& c : enumerate_Q(q.basis().lattice()).all) sum += q.at(c) * std::polar(1.0, c.cart.dot(x));
    return sum;
}

PotentialCoefficients translate(const PotentialCoefficients& q, const Vec3& tau) {
    auto z = q.coefficients();
    const auto modes = enumerate_Q(q.basis().lattice());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] *= std::polar(1.0, -modes.representatives[i].cart.dot(tau));
    return PotentialCoefficients(q.basis(), z);
}

PotentialCoefficients invert(const PotentialCoefficients& q) {
    auto z = q.coefficients();
    for (auto& v : z) v = std::conj(v);
    return PotentialCoefficients(q.basis(), z);
}

PotentialCoefficients phase_normalized(const PotentialCoefficients& q) {
    // A translation shifts arg z(n g1 + m g2 + s g3) by -(n t1 + m t2 + s t3) with t_i the
    // shifts of the basis phases; choosing t_i = alpha_i zeroes the first three phases.
    std::array<double, 3> base{};
    for (int i = 0; i < 3; ++i) base[static_cast<std::size_t>(i)] = std::arg(q.coefficient(i + 1));
    auto z = q.coefficients();
    const auto& reps = representative_coeffs();
    for (std::size_t k = 0; k < z.size(); ++k) {
        const double shift = reps[k][0] * base[0] + reps[k][1] * base[1] + reps[k][2] * base[2];
        z[k] *= std::polar(1.0, -shift);
    }
    for (int i = 0; i < 3; ++i) z[static_cast<std::size_t>(i)] = std::abs(q.coefficient(i + 1));
    return PotentialCoefficients(q.basis(), z);
}

GenericityReport check_genericity(const PotentialCoefficients& q) {
    const auto fixed = phase_normalized(q);
    auto a = [&](int k) { return fixed.coefficient(k).real(); };
    auto b = [&](int k) { return fixed.coefficient(k).imag(); };
    auto r = [&](int k) { return std::abs(fixed.coefficient(k)); };

    GenericityReport report;
    auto require = [&](const std::string& name, double value, double scale) {
        if (!(std::abs(value) > kGenericTol * scale)) report.failed.push_back({name, value});
    };

    require("b7", b(7), r(7));
    for (int s = 4; s <= 6; ++s) {
        const std::string is = std::to_string(s);
        require("a" + is + "*b" + is, a(s) * b(s), r(s) * r(s));
    }
    for (int s = 4; s <= 6; ++s) {
        const std::string is = std::to_string(s);
        require("b7*a" + is + "-a7*b" + is, b(7) * a(s) - a(7) * b(s), r(7) * r(s));
    }
    for (int m = 4; m <= 6; ++m) {
        for (int j = m + 1; j <= 6; ++j) {
            const std::string tail = std::to_string(j) + "*a" + std::to_string(m);
            const std::string tail2 = std::to_string(m) + "*a" + std::to_string(j);
            require("b" + tail + "+b" + tail2, b(j) * a(m) + b(m) * a(j), r(j) * r(m));
            require("b" + tail + "-b" + tail2, b(j) * a(m) - b(m) * a(j), r(j) * r(m));
        }
    }
    report.ok = report.failed.empty();
    return report;
}

std::array<double, 13> phase_combinations(const PotentialCoefficients& q) {
    const auto view = polar(q);
    auto al = [&](int k) { return view.alpha[static_cast<std::size_t>(k - 1)]; };
    std::array<double, 13> out{};
    std::size_t n = 0;
    out[n++] = al(7) - al(1) - al(2) - al(3);
    for (int s = 1; s <= 3; ++s) out[n++] = al(7) - al(s + 3) - al(s);
    for (int m = 1; m <= 3; ++m)
        for (int j = m + 1; j <= 3; ++j) out[n++] = al(m + 3) - al(j + 3) + al(m) - al(j);
    out[n++] = al(4) - al(2) - al(3);
    out[n++] = al(5) - al(1) - al(3);
    out[n++] = al(6) - al(1) - al(2);
    out[n++] = al(4) + al(5) - al(1) - al(2) - 2 * al(3);
    out[n++] = al(4) + al(6) - al(1) - al(3) - 2 * al(2);
    out[n++] = al(5) + al(6) - al(2) - al(3) - 2 * al(1);
    for (auto& v : out) v = wrap_angle(v);
    return out;
}

DirectionalProfile directional(const PotentialCoefficients& q, const GammaVector& a) {
    return DirectionalProfile(q.at(a));
}

PotentialCoefficients random_generic_potential(const AdmissibleBasis& basis, std::uint64_t seed,
                                               int max_draws, int* draws_used) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> log_modulus(std::log(0.2), std::log(2.0));
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    for (int draw = 1; draw <= max_draws; ++draw) {
        std::array<cplx, kModeCount> z;
        for (auto& v : z) {
            const double r = std::exp(log_modulus(rng));
            v = std::polar(r, angle(rng));
        }
        PotentialCoefficients q(basis, z);
        if (check_genericity(q).ok) {
            if (draws_used) *draws_used = draw;
            return q;
        }
    }
    throw NonGeneric("rejection sampling exhausted " + std::to_string(max_draws) + " draws");
}

}  // namespace invrec
