#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "invrec/errors.hpp"
#include "invrec/extraction.hpp"
#include "invrec/hill.hpp"
#include "invrec/invariants.hpp"
#include "invrec/io.hpp"
#include "invrec/potential.hpp"
#include "invrec/reconstruct.hpp"

namespace py = pybind11;
using namespace invrec;

namespace {

py::dict invariant_dict(const InvariantSet& inv) {
    py::dict d;
    const auto& keys = InvariantSet::keys();
    for (std::size_t i = 0; i < keys.size(); ++i) d[py::str(to_string(keys[i]))] = inv.values()[i];
    return d;
}

InvariantSet invariant_set(const py::dict& d) {
    std::ostringstream os;
    for (const auto& [k, v] : d) os << py::cast<std::string>(k) << ' ' << format_double(py::cast<double>(v)) << '\n';
    std::istringstream is(os.str());
    return read_invariants(is).values;
}

PotentialCoefficients default_potential(const std::vector<cplx>& z) {
    if (z.size() != static_cast<std::size_t>(kModeCount)) throw std::invalid_argument("expected 13 coefficients");
    std::array<cplx, kModeCount> a;
    std::copy(z.begin(), z.end(), a.begin());
    return PotentialCoefficients(AdmissibleBasis::default_fixture(), a);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spectral invariants and inverse reconstruction for 3-D periodic potentials";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<NonGeneric>(m, "NonGeneric", base.ptr());
    py::register_exception<NotAdmissible>(m, "NotAdmissible", base.ptr());
    py::register_exception<AmbiguousSigns>(m, "AmbiguousSigns", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<IllConditioned>(m, "IllConditioned", base.ptr());
    py::register_exception<TruncationTooSmall>(m, "TruncationTooSmall", base.ptr());

    py::class_<PotentialCoefficients>(m, "Potential")
        .def(py::init(&default_potential), py::arg("coefficients"),
             "13 coefficients z(gamma_1..gamma_13) on the default basis")
        .def_property_readonly("coefficients",
                               [](const PotentialCoefficients& q) {
                                   const auto& z = q.coefficients();
                                   return std::vector<cplx>(z.begin(), z.end());
                               })
        .def("__call__", [](const PotentialCoefficients& q, double x, double y, double z) {
            return evaluate(q, Vec3(x, y, z));
        })
        .def("translate", [](const PotentialCoefficients& q, double x, double y, double z) {
            return translate(q, Vec3(x, y, z));
        })
        .def("invert", [](const PotentialCoefficients& q) { return invert(q); })
        .def("is_generic", [](const PotentialCoefficients& q) { return check_genericity(q).ok; })
        .def("to_text", [](const PotentialCoefficients& q) {
            std::ostringstream os;
            write_potential(os, q);
            return os.str();
        });

    m.def("from_text", [](const std::string& s) {
        std::istringstream is(s);
        return read_potential(is);
    });

    m.def(
        "generate",
        [](std::uint64_t seed) { return random_generic_potential(AdmissibleBasis::default_fixture(), seed); },
        py::arg("seed"));

    m.def(
        "invariants",
        [](const PotentialCoefficients& q, const std::string& route, int grid) {
            if (route == "closed") return invariant_dict(closed_forms(q));
            if (route == "sum") return invariant_dict(symmetric_sums(q));
            if (route == "quad") return invariant_dict(quadrature(q, grid));
            throw std::invalid_argument("route must be closed, sum or quad");
        },
        py::arg("q"), py::arg("route") = "closed", py::arg("grid") = kDefaultQuadratureGrid);

    m.def(
        "reconstruct",
        [](const py::dict& inv) {
            const auto r = reconstruct(invariant_set(inv), AdmissibleBasis::default_fixture());
            return py::make_tuple(r.q_hat, r.sign_triple, r.survivors);
        },
        py::arg("invariants"), "Returns (q_hat, sign_triple, survivors) on the default basis");

    m.def("compare", &compare_mod_gauge, py::arg("q1"), py::arg("q2"));

    m.def(
        "perturb",
        [](const py::dict& inv, double eps, std::uint64_t seed) {
            return invariant_dict(perturb_invariants(invariant_set(inv), eps, seed));
        },
        py::arg("invariants"), py::arg("eps"), py::arg("seed"));

    m.def(
        "hill_spectrum",
        [](const std::map<int, cplx>& coefficients, double v, int truncation, double delta_norm) {
            HillProblem p;
            p.coefficients = coefficients;
            p.v = v;
            p.truncation = truncation;
            p.delta_norm = delta_norm;
            return spectrum(p).eigenvalues;
        },
        py::arg("coefficients"), py::arg("v") = 0.0, py::arg("truncation") = 40, py::arg("delta_norm") = 1.0);

    m.def(
        "gap_lengths",
        [](const std::map<int, cplx>& p, int n_max) {
            std::vector<double> gaps;
            for (const auto& row : gap_lengths(p, n_max).rows) gaps.push_back(row.gap);
            return gaps;
        },
        py::arg("p"), py::arg("n_max"), "Gaps 1..n_max of -y'' + p y with p = sum_s p_s e^{2isx}");

    m.def(
        "extraction_sweep",
        [](std::vector<double> rhos, double noise, int seeds, std::uint64_t seed) {
            const auto q = random_generic_potential(AdmissibleBasis::default_fixture(), 1);
            SweepConfig cfg;
            cfg.rhos = std::move(rhos);
            cfg.noise_amp = noise;
            cfg.seeds = seeds;
            cfg.seed = seed;
            const auto rep = extraction_sweep(q, q.basis().vector(representative_coeffs()[0]), cfg);
            py::dict d;
            d["mu_slope"] = rep.mu_slope;
            d["J_slope"] = rep.J_slope;
            d["det_slope"] = rep.det_slope;
            d["zero_noise_error"] = rep.zero_noise_error;
            return d;
        },
        py::arg("rhos") = std::vector<double>{1e3, 1e4, 1e5, 1e6}, py::arg("noise") = 1.0, py::arg("seeds") = 64,
        py::arg("seed") = 1);
}
