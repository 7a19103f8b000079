#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "entsum/support.hpp"

namespace entsum {

// Ordered disjoint nonempty cells over a parent support; no cell equals {0}.
// Atoms within a cell are kept sorted; cell order is preserved as given.
struct Collection {
  SupportSet parent;
  std::vector<std::vector<SymValue>> cells;
  std::vector<SymValue> flat_atoms;  // atoms in cell order
  std::vector<int> flat_cell;        // parallel cell index

  Collection(SupportSet parent, std::vector<std::vector<SymValue>> cells);
  int cell_count() const { return static_cast<int>(cells.size()); }
};

// Two count assignments over the collection's atoms with equal total count
// and equal total value but different per-cell value sums.
struct Witness {
  Int total;
  std::vector<Int> counts_a, counts_b;
  std::vector<SymValue> cell_sums_a, cell_sums_b;
};

struct IncommCertificate {
  bool incommensurable = false;
  // Primitive integer basis of the null space of the decision matrix
  // (coordinate rows plus the all-ones count row), with the per-cell value
  // sums of each basis vector; all sums vanish iff incommensurable.
  std::vector<IntVector> kernel;
  std::vector<std::vector<SymValue>> kernel_cell_sums;
  std::optional<Witness> witness;  // present iff commensurable
};

IncommCertificate is_incommensurable(const Collection& c);

// Exact validation that a witness exhibits commensurability.
bool replay_witness(const Collection& c, const Witness& w);

// Exhaustive search over count assignments with total N <= n_max, grouping
// decompositions by (N, total value). Lexicographic enumeration; throws
// BudgetError instead of truncating silently.
std::optional<Witness> falsify_incommensurability(
    const Collection& c, int n_max, std::size_t state_budget = 5'000'000);

// Disjoint lattice cells of a support plus the leftover atoms. Singleton
// cells are listed first; degenerate iff every cell is a singleton.
struct Prepartition {
  Collection cells;
  std::vector<SymValue> leftover;
  int singleton_count = 0;
  bool degenerate = false;
};

// Orders cells (singletons first), derives the leftover, and checks that
// every cell is a lattice.
Prepartition make_prepartition(const SupportSet& parent,
                               std::vector<std::vector<SymValue>> cells);

// Cells are the rational-span rays of a greedy coordinate basis of the
// support (zero excluded), leftover the rest; always incommensurable, with
// as many cells as the Q-dimension of the support.
Prepartition span_prepartition(const SupportSet& s);

struct RankResult {
  int rank = 0;
  Prepartition certificate;
};

// Maximal number of cells over all non-degenerate prepartitions whose cells
// are lattices and whose collection is incommensurable; exhaustive
// depth-first search with subset pruning. Singletons have rank 0.
RankResult compute_rank(const SupportSet& s,
                        std::uint64_t node_budget = 200'000'000);

// Rank of the random variable on s; shifts cannot change it, so this is
// compute_rank(s).rank (the shift invariance itself is exercised in tests).
int rank_of_variable(const SupportSet& s,
                     std::uint64_t node_budget = 200'000'000);

}  // namespace entsum
