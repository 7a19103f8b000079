#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "entsum/bounds.hpp"

namespace entsum {

struct ParsedSpec {
  Basis basis;
  DiscreteDist dist;
};

// JSON spec file: {"basis":[{"symbol":..,"approx":..}...],
//                  "atoms":[{"coords":[rational strings],"prob":..}...]}
ParsedSpec parse_spec(const std::string& json_text);
ParsedSpec load_spec(const std::string& path);

// Linear expression over basis symbol names, e.g. "2r1+e", "3/2*pi-1".
// Bare rational constants attach to the unique basis symbol with approx 1.
SymValue parse_atom_expr(const Basis& basis, std::string_view text);

// Cell spec grammar: cells separated by '|', atoms by ','.
Collection parse_cells(const ParsedSpec& spec, const std::string& cell_spec);

struct RunOptions {
  std::size_t max_support = kDefaultMaxSupport;
  bool use_mc = false;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  std::uint64_t rank_node_budget = 200'000'000;
};

struct ConvergenceRow {
  long n = 0;
  std::optional<double> h;  // nats
  double h_error_bound = 0;
  std::vector<std::optional<double>> bounds;  // aligned with bound_names
  std::vector<std::optional<double>> gaps;    // h - bound
};

struct ConvergenceTable {
  std::string h_column = "H_exact";
  std::vector<std::string> bound_names;
  std::vector<ConvergenceRow> rows;
  std::vector<std::string> notes;
  std::optional<int> rank;
};

// Exact entropy (or Monte Carlo when flagged) of the N-fold sum over the
// grid, next to the selected asymptotic bounds and their gaps. Bound columns
// are constant formulas per run; a support overflow leaves H absent for the
// affected rows and the run continues.
ConvergenceTable run_convergence(const ParsedSpec& spec,
                                 const std::vector<long>& grid,
                                 const std::vector<std::string>& bounds,
                                 const RunOptions& opts = {});

struct FitResult {
  double slope = 0;
  double intercept = 0;
  long n_lo = 0;
  long n_hi = 0;
  double max_residual = 0;
};

// Ordinary least squares of H against ln N over the rows with lo <= N <= hi.
FitResult fit_scaling(const std::vector<std::pair<long, double>>& points,
                      long lo, long hi);

// Shortest decimal that parses back to the same double, capped at 12
// significant digits.
std::string fmt_sig(double v);

// RFC-4180-style CSV: comma separated, LF line endings, mandatory header.
// log_base 2 converts entropies and bounds from nats to bits for display.
void write_csv(std::ostream& os, const ConvergenceTable& t, int log_base = 0);

int run_cli(int argc, const char* const* argv);

}  // namespace entsum
