#include "invrec/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "invrec/errors.hpp"
#include "invrec/extraction.hpp"
#include "invrec/hill.hpp"
#include "invrec/invariants.hpp"
#include "invrec/io.hpp"
#include "invrec/potential.hpp"
#include "invrec/reconstruct.hpp"

namespace invrec {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path + "'");
    return in;
}

// Writes to `path`, or to `out` when the path is empty.
template <class Writer>
void emit(const std::string& path, std::ostream& out, Writer&& write) {
    if (path.empty()) {
        write(out);
        return;
    }
    std::ofstream f(path);
    if (!f) throw UsageError("cannot write '" + path + "'");
    write(f);
    if (!f) throw UsageError("write to '" + path + "' failed");
}

PotentialCoefficients load_potential(const std::string& path) {
    auto in = open_input(path);
    return read_potential(in);
}

std::string fmt(double x) { return format_double(x); }

double median(std::vector<double> v) {
    if (v.empty()) return 0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2) return *mid;
    return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

std::string signs_string(const std::array<int, 3>& s) {
    std::string out;
    for (int t : s) out += (out.empty() ? "" : " ") + std::string(t > 0 ? "+1" : "-1");
    return out;
}

// ---------------------------------------------------------------------------

struct GenOptions {
    std::uint64_t seed = 0;
    std::string out;
    std::vector<double> basis;
    int max_draws = 10000;
};

int cmd_gen(const GenOptions& o, std::ostream& out, std::ostream& err) {
    AdmissibleBasis basis = AdmissibleBasis::default_fixture();
    if (!o.basis.empty()) {
        const double s = 2 * std::numbers::pi;
        const auto& b = o.basis;
        basis = AdmissibleBasis(LatticeBasis(s * Vec3(b[0], b[1], b[2]), s * Vec3(b[3], b[4], b[5]),
                                             s * Vec3(b[6], b[7], b[8])));
    }
    int draws = 0;
    const auto q = random_generic_potential(basis, o.seed, o.max_draws, &draws);
    emit(o.out, out, [&](std::ostream& os) { write_potential(os, q); });
    std::ostream& log = o.out.empty() ? err : out;
    const auto report = check_genericity(q);
    log << "genericity " << (report.ok ? "ok" : "failed") << " after " << draws << " draw(s)\n";
    for (const auto& f : report.failed) log << "  failed " << f.condition << ' ' << fmt(f.value) << '\n';
    return kExitOk;
}

struct InvariantsOptions {
    std::string in, out, route = "closed";
    bool check = false;
    int grid = kDefaultQuadratureGrid;
    double tol = 1e-10;
    double quad_tol = 1e-7;
};

int cmd_invariants(const InvariantsOptions& o, std::ostream& out, std::ostream& err) {
    const auto q = load_potential(o.in);
    if (const auto g = check_genericity(q); !g.ok) {
        err << "potential is not generic:";
        for (const auto& f : g.failed) err << ' ' << f.condition;
        err << '\n';
        return kExitPrecondition;
    }
    const InvariantGeometry geo(q.basis().lattice());
    InvariantSet inv;
    if (o.route == "closed")
        inv = closed_forms(q, geo);
    else if (o.route == "sum")
        inv = symmetric_sums(q, geo);
    else
        inv = quadrature(q, geo, o.grid);
    emit(o.out, out, [&](std::ostream& os) { write_invariants(os, inv, &q.basis().lattice()); });
    if (!o.check) return kExitOk;

    std::ostream& log = o.out.empty() ? err : out;
    const auto closed = o.route == "closed" ? inv : closed_forms(q, geo);
    const auto sums = o.route == "sum" ? inv : symmetric_sums(q, geo);
    const auto quad = o.route == "quad" ? inv : quadrature(q, geo, o.grid);
    const double d_cs = max_relative_difference(closed, sums);
    const double d_sq = max_relative_difference(sums, quad);
    log << "closed-vs-sum " << fmt(d_cs) << '\n';
    log << "sum-vs-quad " << fmt(d_sq) << '\n';
    const bool ok = d_cs <= o.tol && d_sq <= o.quad_tol;
    log << "check " << (ok ? "ok" : "FAILED") << '\n';
    return ok ? kExitOk : kExitInconsistent;
}

struct RoundtripOptions {
    int trials = 200;
    std::uint64_t seed = 0;
    double eps = 0;
    std::optional<double> tol;
};

int cmd_roundtrip(const RoundtripOptions& o, std::ostream& out) {
    double gate = o.tol.value_or(1e-8);
    if (const char* env = std::getenv("INVREC_TOL_OVERRIDE")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(v > 0) || !std::isfinite(v))
            throw UsageError("INVREC_TOL_OVERRIDE must be a positive decimal");
        gate = v;
    }
    const auto basis = AdmissibleBasis::default_fixture();
    const InvariantGeometry geo(basis.lattice());
    std::vector<double> dist;
    std::map<std::string, int> failures;
    std::map<std::string, int> triples;
    int unique_survivor = 0;
    for (int t = 0; t < o.trials; ++t) {
        const std::uint64_t s = o.seed + static_cast<std::uint64_t>(t);
        const auto q = random_generic_potential(basis, s);
        auto inv = closed_forms(q, geo);
        if (o.eps > 0) inv = perturb_invariants(inv, o.eps, s);
        try {
            const auto r = reconstruct(inv, basis, geo);
            dist.push_back(compare_mod_gauge(q, r.q_hat));
            ++triples[signs_string(r.sign_triple)];
            if (r.survivors == 1) ++unique_survivor;
        } catch (const AmbiguousSigns&) {
            ++failures["ambiguous-signs"];
        } catch (const NonGeneric&) {
            ++failures["non-generic"];
        } catch (const BadModulus&) {
            ++failures["bad-modulus"];
        }
    }
    int failed = 0;
    for (const auto& [_, n] : failures) failed += n;
    const double max_d = dist.empty() ? 0 : *std::max_element(dist.begin(), dist.end());
    out << "trials " << o.trials << '\n';
    out << "eps " << fmt(o.eps) << '\n';
    out << "reconstructed " << dist.size() << '\n';
    out << "failures " << failed << '\n';
    for (const auto& [kind, n] : failures) out << "  " << kind << ' ' << n << '\n';
    out << "max_distance " << fmt(max_d) << '\n';
    out << "median_distance " << fmt(median(dist)) << '\n';
    out << "unique_survivor " << unique_survivor << '\n';
    for (const auto& [signs, n] : triples) out << "sign_triple " << signs << ' ' << n << '\n';

    if (failed > 0) return kExitInconsistent;
    if (o.eps == 0 || o.tol) {
        out << "gate " << fmt(gate) << ' ' << (max_d <= gate ? "ok" : "FAILED") << '\n';
        if (max_d > gate) return kExitInconsistent;
    }
    return kExitOk;
}

struct HillOptions {
    std::string mode = "perturb", in, pair = "single";
    double mu = 0.01, v = 0.3;
    int truncation = 40, n_max = 12, n_lo = 8, n_hi = 12, count = 10;
};

HillProblem hill_problem(const HillOptions& o) {
    if (!o.in.empty()) {
        auto in = open_input(o.in);
        return read_hill_problem(in);
    }
    HillProblem p;
    p.coefficients = cosine_profile(o.mu);
    p.v = o.v;
    p.truncation = o.truncation;
    validate(p);
    return p;
}

int cmd_hill(const HillOptions& o, std::ostream& out) {
    if (o.mode == "spectrum") {
        const auto s = spectrum(hill_problem(o));
        const auto n = std::min<std::size_t>(static_cast<std::size_t>(o.count), s.eigenvalues.size());
        for (std::size_t i = 0; i < n; ++i) out << i << ' ' << fmt(s.eigenvalues[i]) << '\n';
        return kExitOk;
    }
    if (o.mode == "perturb") {
        if (!o.in.empty()) throw UsageError("perturb mode uses the built-in 2 mu cos s profile");
        const auto p = hill_problem(o);
        const double mu = o.mu;
        const double bound = 5 * std::pow(mu, 4);
        bool ok = true;
        out << "# n shift predicted difference (bound " << fmt(bound) << ")\n";
        for (int n = 2; n <= 5; ++n) {
            const auto e = nearest_eigenpair(p, n);
            const double base = p.delta_norm * p.delta_norm * (n + p.v) * (n + p.v);
            const double pred = cosine_second_order_shift(mu, p.delta_norm, p.v, n);
            const double diff = std::abs(e.mu - base - pred);
            ok = ok && diff <= bound;
            out << n << ' ' << fmt(e.mu - base) << ' ' << fmt(pred) << ' ' << fmt(diff) << '\n';
        }
        out << "perturbation " << (ok ? "ok" : "FAILED") << '\n';
        return ok ? kExitOk : kExitInconsistent;
    }
    if (o.mode == "gaps") {
        TrigPolynomial p{{1, o.mu}, {-1, o.mu}};
        const auto r = gap_lengths(p, o.n_max, o.truncation > 40 ? o.truncation : 0);
        write_gap_report(out, r);
        out << "# gap1/mu " << fmt(r.rows.front().gap / o.mu) << '\n';
        out << "interlacing ok\n";
        return kExitOk;
    }
    if (o.mode == "decay") {
        const TrigPolynomial low{{1, 1.0}, {-1, 1.0}};
        TrigPolynomial high{{2, 1.0}, {-2, 1.0}};
        if (o.pair == "mixed") high = {{1, 1.0}, {-1, 1.0}, {2, 1.0}, {-2, 1.0}};
        const auto r = gap_decay_compare(high, low, o.n_lo, o.n_hi);
        write_decay_report(out, r);
        const auto d = dominance(r, o.n_lo, o.n_hi);
        out << "# checked";
        for (int n : d.checked) out << ' ' << n;
        out << "\n# failed";
        for (int n : d.failed) out << ' ' << n;
        out << "\ndominance " << (d.holds ? "ok" : "FAILED") << '\n';
        return d.holds ? kExitOk : kExitInconsistent;
    }
    if (o.mode == "c3") {
        auto p = hill_problem(o);
        p.truncation = std::max(p.truncation, 70);
        const auto c = c3_probe(p, 20, 60);
        out << "# coefficients of j^-1 .. j^-4\n";
        for (std::size_t i = 0; i < c.coefficients.size(); ++i)
            out << "c" << i + 1 << ' ' << fmt(c.coefficients[i]) << '\n';
        out << "fit_rms " << fmt(c.fit_rms) << '\n';
        out << "second_order_j2 " << fmt(c.second_order_j2) << '\n';
        out << "c3_predicted " << fmt(c.c3_predicted) << '\n';
        return kExitOk;
    }
    throw UsageError("unknown hill mode '" + o.mode + "'");
}

struct ExtractOptions {
    std::string in;
    std::vector<double> rhos{1e3, 1e4, 1e5, 1e6};
    double noise = 1, v = 0.3;
    std::uint64_t seed = 1;
    int seeds = 64, m = 2, j = 3;
};

int cmd_extract(const ExtractOptions& o, std::ostream& out) {
    const auto q = o.in.empty() ? random_generic_potential(AdmissibleBasis::default_fixture(), 1) : load_potential(o.in);
    SweepConfig cfg;
    cfg.rhos = o.rhos;
    cfg.noise_amp = o.noise;
    cfg.seed = o.seed;
    cfg.seeds = o.seeds;
    cfg.m = o.m;
    cfg.j = o.j;
    cfg.v = o.v;
    for (double r : cfg.rhos)
        if (!(r > 1) || !std::isfinite(r)) throw std::invalid_argument("every rho must exceed 1");
    const auto delta = q.basis().vector(representative_coeffs()[0]);
    const auto rep = extraction_sweep(q, delta, cfg);
    write_sweep_report(out, rep);

    bool ok = rep.zero_noise_error <= 1e-9;
    out << "zero_noise " << (ok ? "ok" : "FAILED") << '\n';
    if (o.noise > 0 && rep.rows.size() >= 2) {
        const auto within = [](double got, double want, double rel) { return std::abs(got / want - 1) <= rel; };
        const double mu_t = -101.0 / 36, j_t = -400.0 / 432, det_t = -2 * cfg.m * kAExp;
        const bool mu_ok = within(rep.mu_slope, mu_t, 0.15);
        const bool j_ok = within(rep.J_slope, j_t, 0.15);
        const bool det_ok = within(rep.det_slope, det_t, 0.10);
        out << "mu_slope " << fmt(rep.mu_slope) << " target " << fmt(mu_t) << ' ' << (mu_ok ? "ok" : "FAILED") << '\n';
        out << "J_slope " << fmt(rep.J_slope) << " target " << fmt(j_t) << ' ' << (j_ok ? "ok" : "FAILED") << '\n';
        out << "det_slope " << fmt(rep.det_slope) << " target " << fmt(det_t) << ' ' << (det_ok ? "ok" : "FAILED")
            << '\n';
        ok = ok && mu_ok && j_ok && det_ok;
    }
    return ok ? kExitOk : kExitInconsistent;
}

struct ReconstructCmdOptions {
    std::string in, out;
};

int cmd_reconstruct(const ReconstructCmdOptions& o, std::ostream& out, std::ostream& err) {
    auto in = open_input(o.in);
    const auto file = read_invariants(in);
    const AdmissibleBasis basis = file.basis ? AdmissibleBasis(*file.basis) : AdmissibleBasis::default_fixture();
    const auto r = reconstruct(file.values, basis);
    emit(o.out, out, [&](std::ostream& os) { write_potential(os, r.q_hat); });
    std::ostream& log = o.out.empty() ? err : out;
    log << "sign_triple " << signs_string(r.sign_triple) << '\n';
    log << "survivors " << r.survivors << '\n';
    log << "max_residual " << fmt(r.max_residual()) << '\n';
    log << "condition_floor " << fmt(r.condition_floor) << '\n';
    for (const auto& w : r.warnings) log << "warning " << w << '\n';
    return kExitOk;
}

struct CompareOptions {
    std::string a, b;
    std::optional<double> tol;
};

int cmd_compare(const CompareOptions& o, std::ostream& out) {
    const double d = compare_mod_gauge(load_potential(o.a), load_potential(o.b));
    out << "gauge_distance " << fmt(d) << '\n';
    if (o.tol && d > *o.tol) return kExitInconsistent;
    return kExitOk;
}

struct PerturbOptions {
    std::string in, out;
    double eps = 0;
    std::uint64_t seed = 0;
};

int cmd_perturb(const PerturbOptions& o, std::ostream& out) {
    auto in = open_input(o.in);
    const auto file = read_invariants(in);
    const auto p = perturb_invariants(file.values, o.eps, o.seed);
    const LatticeBasis* basis = file.basis ? &*file.basis : nullptr;
    emit(o.out, out, [&](std::ostream& os) { write_invariants(os, p, basis); });
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Inverse spectral reconstruction of periodic Schroedinger potentials", "invrec"};
    app.require_subcommand(1);

    GenOptions gen;
    auto* g = app.add_subcommand("gen", "Generate a generic potential");
    g->add_option("--seed", gen.seed, "Random seed")->required();
    g->add_option("--out", gen.out, "Output file (default: stdout)");
    g->add_option("--basis", gen.basis, "Nine numbers g1 g2 g3 in units of 2 pi")->expected(9);
    g->add_option("--max-draws", gen.max_draws, "Rejection sampling budget")->check(CLI::PositiveNumber);

    InvariantsOptions inv;
    auto* i = app.add_subcommand("invariants", "Compute the spectral invariants of a potential");
    i->add_option("--in", inv.in, "Potential file")->required();
    i->add_option("--out", inv.out, "Output file (default: stdout)");
    i->add_option("--route", inv.route, "closed, sum or quad")->check(CLI::IsMember({"closed", "sum", "quad"}));
    i->add_flag("--check", inv.check, "Compare all three routes");
    i->add_option("--grid", inv.grid, "Quadrature points per axis")->check(CLI::Range(4, 512));
    i->add_option("--tol", inv.tol, "closed vs sum tolerance for --check")->check(CLI::PositiveNumber);

    RoundtripOptions rt;
    double rt_tol = 0;
    auto* r = app.add_subcommand("roundtrip", "Seeded reconstruction round trips");
    r->add_option("--trials", rt.trials, "Number of trials")->check(CLI::PositiveNumber);
    r->add_option("--seed", rt.seed, "Base seed; trial t uses seed + t")->required();
    r->add_option("--eps", rt.eps, "Relative invariant perturbation")->check(CLI::NonNegativeNumber);
    auto* rt_tol_opt = r->add_option("--tol", rt_tol, "Distance gate")->check(CLI::PositiveNumber);

    HillOptions hill;
    auto* h = app.add_subcommand("hill", "Hill operator checks and reports");
    h->add_option("--mode", hill.mode, "perturb, gaps, decay, c3 or spectrum")
        ->check(CLI::IsMember({"perturb", "gaps", "decay", "c3", "spectrum"}));
    h->add_option("--mu", hill.mu, "Amplitude of 2 mu cos")->check(CLI::PositiveNumber);
    h->add_option("--v", hill.v, "Quasimomentum in [0, 1)")->check(CLI::Range(0.0, 1.0));
    h->add_option("--truncation", hill.truncation, "Fourier cutoff N_t")->check(CLI::PositiveNumber);
    h->add_option("--in", hill.in, "Hill problem file (spectrum, c3)");
    h->add_option("--n-max", hill.n_max, "Largest gap index (gaps)")->check(CLI::PositiveNumber);
    h->add_option("--n-lo", hill.n_lo, "First compared gap (decay)")->check(CLI::PositiveNumber);
    h->add_option("--n-hi", hill.n_hi, "Last compared gap (decay)")->check(CLI::PositiveNumber);
    h->add_option("--pair", hill.pair, "single: 2cos4x vs 2cos2x; mixed: 2cos2x+2cos4x vs 2cos2x")
        ->check(CLI::IsMember({"single", "mixed"}));
    h->add_option("--count", hill.count, "Eigenvalues printed (spectrum)")->check(CLI::PositiveNumber);

    ExtractOptions ex;
    auto* e = app.add_subcommand("extract", "Synthetic extraction sweep over rho");
    e->add_option("--in", ex.in, "Potential file (default: gen --seed 1)");
    e->add_option("--rhos", ex.rhos, "Comma-separated rho values")->delimiter(',');
    e->add_option("--noise", ex.noise, "Noise amplitude in units of the remainder bound")
        ->check(CLI::NonNegativeNumber);
    e->add_option("--seed", ex.seed, "Base seed");
    e->add_option("--seeds", ex.seeds, "Noise draws per rho")->check(CLI::PositiveNumber);
    e->add_option("--m", ex.m, "Number of planes")->check(CLI::PositiveNumber);
    e->add_option("--j", ex.j, "Band index")->check(CLI::PositiveNumber);
    e->add_option("--v", ex.v, "Quasimomentum in [0, 1)")->check(CLI::Range(0.0, 1.0));

    ReconstructCmdOptions rc;
    auto* c = app.add_subcommand("reconstruct", "Reconstruct a potential from an invariant file");
    c->add_option("--in", rc.in, "Invariant file")->required();
    c->add_option("--out", rc.out, "Output file (default: stdout)");

    CompareOptions cmp;
    double cmp_tol = 0;
    auto* m = app.add_subcommand("compare", "Gauge distance between two potential files");
    m->add_option("first", cmp.a, "Potential file")->required();
    m->add_option("second", cmp.b, "Potential file")->required();
    auto* cmp_tol_opt = m->add_option("--tol", cmp_tol, "Exit 3 above this distance")->check(CLI::PositiveNumber);

    PerturbOptions pt;
    auto* p = app.add_subcommand("perturb", "Perturb an invariant file");
    p->add_option("--in", pt.in, "Invariant file")->required();
    p->add_option("--eps", pt.eps, "Relative perturbation")->required()->check(CLI::NonNegativeNumber);
    p->add_option("--seed", pt.seed, "Random seed")->required();
    p->add_option("--out", pt.out, "Output file (default: stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& ex) {
        return app.exit(ex, out, err);
    } catch (const CLI::ParseError& ex) {
        app.exit(ex, out, err);
        return kExitUsage;
    }

    try {
        if (g->parsed()) return cmd_gen(gen, out, err);
        if (i->parsed()) return cmd_invariants(inv, out, err);
        if (r->parsed()) {
            if (rt_tol_opt->count()) rt.tol = rt_tol;
            return cmd_roundtrip(rt, out);
        }
        if (h->parsed()) return cmd_hill(hill, out);
        if (e->parsed()) return cmd_extract(ex, out);
        if (c->parsed()) return cmd_reconstruct(rc, out, err);
        if (m->parsed()) {
            if (cmp_tol_opt->count()) cmp.tol = cmp_tol;
            return cmd_compare(cmp, out);
        }
        if (p->parsed()) return cmd_perturb(pt, out);
    } catch (const UsageError& ex) {
        err << "error: " << ex.what() << '\n' << app.help();
        return kExitUsage;
    } catch (const ParseError& ex) {
        err << "parse error: " << ex.what() << '\n';
        return kExitUsage;
    } catch (const AmbiguousSigns& ex) {
        err << "reconstruction: " << ex.what() << '\n';
        return kExitInconsistent;
    } catch (const BadModulus& ex) {
        err << "reconstruction: " << ex.what() << '\n';
        return kExitInconsistent;
    } catch (const InterlacingViolation& ex) {
        err << "interlacing: " << ex.what() << '\n';
        return kExitInconsistent;
    } catch (const Error& ex) {
        err << "precondition: " << ex.what() << '\n';
        return kExitPrecondition;
    } catch (const std::invalid_argument& ex) {
        err << "invalid configuration: " << ex.what() << '\n';
        return kExitPrecondition;
    }
    return kExitUsage;
}

}  // namespace invrec
