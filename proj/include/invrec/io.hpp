#pragma once

// Plain-text file formats. Numbers are written with %.17g; '#' starts a comment.
//
//   potential:   lattice x y z      (three lines, Cartesian generators)
//                coef k re im       (k = 1..13)
//   invariants:  optional lattice lines, then "<tag> value" for all 40 entries,
//                tags as in to_string(InvariantKey), e.g. "I1 sum 1 2 0.25"
//   hill:        hill |delta| v N_t
//                hcoef n re im
//   reports:     gap rows "n lambda_n1 lambda_n2 gap", sweep rows "rho mu_err J_err det"

#include <iosfwd>
#include <optional>
#include <string>

#include "invrec/extraction.hpp"
#include "invrec/hill.hpp"
#include "invrec/invariants.hpp"
#include "invrec/potential.hpp"

namespace invrec {

std::string format_double(double x);

void write_potential(std::ostream& os, const PotentialCoefficients& q);
/// Throws ParseError on unknown tags, duplicates, missing entries or malformed numbers,
/// and std::invalid_argument (from the constructor) on zero coefficients.
PotentialCoefficients read_potential(std::istream& is);

void write_lattice(std::ostream& os, const LatticeBasis& basis);

struct InvariantFile {
    InvariantSet values;
    std::optional<LatticeBasis> basis;
};

void write_invariants(std::ostream& os, const InvariantSet& inv, const LatticeBasis* basis = nullptr);
InvariantFile read_invariants(std::istream& is);

void write_hill_problem(std::ostream& os, const HillProblem& p);
HillProblem read_hill_problem(std::istream& is);

void write_gap_report(std::ostream& os, const GapReport& r);
void write_decay_report(std::ostream& os, const DecayReport& r);
void write_sweep_report(std::ostream& os, const SweepReport& r);

/// Six comma- or space-separated decimals.
DensityConstants parse_density_constants(const std::string& text);

}  // namespace invrec
