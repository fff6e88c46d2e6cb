#include "invrec/io.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "invrec/errors.hpp"

namespace invrec {

namespace {

struct Line {
    int number = 0;
    std::vector<std::string> tokens;
};

std::vector<Line> tokenize(std::istream& is) {
    std::vector<Line> out;
    std::string raw;
    int n = 0;
    while (std::getline(is, raw)) {
        ++n;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream ss(raw);
        Line line;
        line.number = n;
        for (std::string tok; ss >> tok;) line.tokens.push_back(tok);
        if (!line.tokens.empty()) out.push_back(std::move(line));
    }
    return out;
}

[[noreturn]] void fail(const Line& l, const std::string& what) {
    throw ParseError("line " + std::to_string(l.number) + ": " + what);
}

double number(const Line& l, std::size_t i) {
    if (i >= l.tokens.size()) fail(l, "missing field");
    const std::string& s = l.tokens[i];
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        fail(l, "not a number: " + s);
    }
    if (used != s.size() || !std::isfinite(v)) fail(l, "not a finite number: " + s);
    return v;
}

int integer(const Line& l, std::size_t i) {
    const double v = number(l, i);
    if (v != std::floor(v) || std::abs(v) > 1e9) fail(l, "not an integer: " + l.tokens[i]);
    return static_cast<int>(v);
}

void expect_fields(const Line& l, std::size_t n) {
    if (l.tokens.size() != n)
        fail(l, "expected " + std::to_string(n) + " fields, got " + std::to_string(l.tokens.size()));
}

std::optional<LatticeBasis> collect_lattice(const std::vector<Line>& lattice_lines) {
    if (lattice_lines.empty()) return std::nullopt;
    if (lattice_lines.size() != 3)
        fail(lattice_lines.back(), "expected exactly three lattice lines");
    std::array<Vec3, 3> g;
    for (std::size_t i = 0; i < 3; ++i) {
        const Line& l = lattice_lines[i];
        expect_fields(l, 4);
        g[i] = Vec3(number(l, 1), number(l, 2), number(l, 3));
    }
    return LatticeBasis(g[0], g[1], g[2]);
}

}  // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_lattice(std::ostream& os, const LatticeBasis& basis) {
    for (int i = 0; i < 3; ++i)
        os << "lattice " << format_double(basis[i].x()) << ' ' << format_double(basis[i].y()) << ' '
           << format_double(basis[i].z()) << '\n';
}

void write_potential(std::ostream& os, const PotentialCoefficients& q) {
    write_lattice(os, q.basis().lattice());
    for (int k = 1; k <= kModeCount; ++k) {
        const cplx z = q.coefficient(k);
        os << "coef " << k << ' ' << format_double(z.real()) << ' ' << format_double(z.imag()) << '\n';
    }
}

PotentialCoefficients read_potential(std::istream& is) {
    std::vector<Line> lattice;
    std::array<std::optional<cplx>, kModeCount> z;
    for (const auto& l : tokenize(is)) {
        const std::string& tag = l.tokens[0];
        if (tag == "lattice") {
            lattice.push_back(l);
        } else if (tag == "coef") {
            expect_fields(l, 4);
            const int k = integer(l, 1);
            if (k < 1 || k > kModeCount) fail(l, "mode index out of range");
            auto& slot = z[static_cast<std::size_t>(k - 1)];
            if (slot) fail(l, "duplicate coefficient " + std::to_string(k));
            slot = cplx(number(l, 2), number(l, 3));
        } else {
            fail(l, "unknown tag '" + tag + "'");
        }
    }
    const auto basis = collect_lattice(lattice);
    if (!basis) throw ParseError("missing lattice lines");
    std::array<cplx, kModeCount> values;
    for (std::size_t k = 0; k < z.size(); ++k) {
        if (!z[k]) throw ParseError("missing coefficient " + std::to_string(k + 1));
        values[k] = *z[k];
    }
    return PotentialCoefficients(AdmissibleBasis(*basis), values);
}

void write_invariants(std::ostream& os, const InvariantSet& inv, const LatticeBasis* basis) {
    if (basis) write_lattice(os, *basis);
    const auto& keys = InvariantSet::keys();
    for (std::size_t n = 0; n < keys.size(); ++n)
        os << to_string(keys[n]) << ' ' << format_double(inv.values()[n]) << '\n';
}

InvariantFile read_invariants(std::istream& is) {
    const auto& keys = InvariantSet::keys();
    std::vector<std::string> tags;
    for (const auto& k : keys) tags.push_back(to_string(k));
    std::vector<Line> lattice;
    std::array<std::optional<double>, InvariantSet::kSize> got;
    for (const auto& l : tokenize(is)) {
        if (l.tokens[0] == "lattice") {
            lattice.push_back(l);
            continue;
        }
        std::string tag;
        for (std::size_t i = 0; i + 1 < l.tokens.size(); ++i) tag += (i ? " " : "") + l.tokens[i];
        std::size_t idx = tags.size();
        for (std::size_t i = 0; i < tags.size(); ++i)
            if (tags[i] == tag) idx = i;
        if (idx == tags.size()) fail(l, "unknown invariant '" + tag + "'");
        if (got[idx]) fail(l, "duplicate invariant '" + tag + "'");
        got[idx] = number(l, l.tokens.size() - 1);
    }
    InvariantFile f;
    f.basis = collect_lattice(lattice);
    for (std::size_t i = 0; i < got.size(); ++i) {
        if (!got[i]) throw ParseError("missing invariant '" + tags[i] + "'");
        f.values.values()[i] = *got[i];
    }
    return f;
}

void write_hill_problem(std::ostream& os, const HillProblem& p) {
    os << "hill " << format_double(p.delta_norm) << ' ' << format_double(p.v) << ' ' << p.truncation << '\n';
    for (const auto& [n, z] : p.coefficients)
        os << "hcoef " << n << ' ' << format_double(z.real()) << ' ' << format_double(z.imag()) << '\n';
}

HillProblem read_hill_problem(std::istream& is) {
    HillProblem p;
    bool header = false;
    for (const auto& l : tokenize(is)) {
        if (l.tokens[0] == "hill") {
            if (header) fail(l, "duplicate hill header");
            expect_fields(l, 4);
            p.delta_norm = number(l, 1);
            p.v = number(l, 2);
            p.truncation = integer(l, 3);
            header = true;
        } else if (l.tokens[0] == "hcoef") {
            expect_fields(l, 4);
            const int n = integer(l, 1);
            if (n == 0) fail(l, "the mean coefficient must be absent");
            if (p.coefficients.count(n)) fail(l, "duplicate coefficient " + std::to_string(n));
            const cplx z(number(l, 2), number(l, 3));
            if (z == cplx(0)) fail(l, "zero coefficient");
            p.coefficients[n] = z;
        } else {
            fail(l, "unknown tag '" + l.tokens[0] + "'");
        }
    }
    if (!header) throw ParseError("missing hill header");
    validate(p);
    return p;
}

void write_gap_report(std::ostream& os, const GapReport& r) {
    os << "# n lambda_n1 lambda_n2 gap\n";
    os << "# lambda0 " << format_double(r.lambda0) << '\n';
    for (const auto& row : r.rows)
        os << row.n << ' ' << format_double(row.lambda1) << ' ' << format_double(row.lambda2) << ' '
           << format_double(row.gap) << '\n';
}

void write_decay_report(std::ostream& os, const DecayReport& r) {
    os << "# n gap_deg" << r.degree_high << " gap_deg" << r.degree_low << " flags\n";
    for (const auto& row : r.rows) {
        os << row.n << ' ' << format_double(row.gap_high) << ' ' << format_double(row.gap_low);
        if (row.underflow_high) os << " underflow_deg" << r.degree_high;
        if (row.underflow_low) os << " underflow_deg" << r.degree_low;
        os << '\n';
    }
    if (r.exponent_high) os << "# exponent_deg" << r.degree_high << ' ' << format_double(*r.exponent_high) << '\n';
    if (r.exponent_low) os << "# exponent_deg" << r.degree_low << ' ' << format_double(*r.exponent_low) << '\n';
}

void write_sweep_report(std::ostream& os, const SweepReport& r) {
    os << "# rho mu_err J_err det\n";
    for (const auto& row : r.rows)
        os << format_double(row.rho) << ' ' << format_double(row.mu_err) << ' ' << format_double(row.J_err) << ' '
           << format_double(row.det) << '\n';
    os << "# slope mu " << format_double(r.mu_slope) << '\n';
    os << "# slope J " << format_double(r.J_slope) << '\n';
    os << "# slope det " << format_double(r.det_slope) << '\n';
    os << "# zero-noise relative error " << format_double(r.zero_noise_error) << '\n';
}

DensityConstants parse_density_constants(const std::string& text) {
    std::string s = text;
    for (char& ch : s)
        if (ch == ',') ch = ' ';
    std::istringstream ss(s);
    Line l;
    for (std::string tok; ss >> tok;) l.tokens.push_back(tok);
    if (l.tokens.size() != 6) throw ParseError("expected six constants a1..a6");
    DensityConstants c;
    for (std::size_t i = 0; i < 6; ++i) c.a[i] = number(l, i);
    return c;
}

}  // namespace invrec
