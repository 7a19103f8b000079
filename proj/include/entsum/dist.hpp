#pragma once

#include <cstdint>
#include <vector>

#include "entsum/partition.hpp"

namespace entsum {

inline constexpr std::size_t kDefaultMaxSupport = 5'000'000;

// Exact finite discrete distribution over SymValues: positive rational
// probabilities with exact sum 1, atoms canonically sorted.
struct DiscreteDist {
  SupportSet support;
  std::vector<Rat> probs;  // aligned with support.atoms

  DiscreteDist(SupportSet s, std::vector<Rat> p);
  static DiscreteDist make(Basis basis, std::vector<SymValue> atoms,
                           std::vector<Rat> probs);
  int size() const { return support.size(); }
};

struct EntropyValue {
  long double nats = 0;
  long double error_bound = 0;  // dominates the summation rounding error
};

struct Conditional {
  Rat p_cell;
  DiscreteDist tilde;
};

// Mass of the cell and the exact conditional distribution on it.
Conditional condition(const DiscreteDist& d, const std::vector<SymValue>& cell);

DiscreteDist convolve_pair(const DiscreteDist& a, const DiscreteDist& b,
                           std::size_t max_support = kDefaultMaxSupport);

// Exact law of the sum of n iid copies. Accumulation is keyed by canonical
// SymValue and exact, so the result is independent of evaluation order.
DiscreteDist convolve_iid(const DiscreteDist& d, long n,
                          std::size_t max_support = kDefaultMaxSupport);
DiscreteDist convolve_iid_doubling(const DiscreteDist& d, long n,
                                   std::size_t max_support = kDefaultMaxSupport);

// -sum p ln p in nats; compensated summation with a reported error bound.
EntropyValue entropy(const DiscreteDist& d);

Rat var_over_h2(const DiscreteDist& d);

// One outcome of the joint law of per-cell value sums and per-cell counts
// after n iid draws.
struct JointOutcome {
  std::vector<SymValue> cell_values;
  std::vector<long> cell_counts;
  Rat prob;
};

std::vector<JointOutcome> decompose_by_cells(
    const DiscreteDist& d, long n, const Collection& cells,
    std::size_t max_support = kDefaultMaxSupport);

// k-th output of the counter-based generator seeded with `seed`.
std::uint64_t counter_rng(std::uint64_t seed, std::uint64_t counter);

// Plug-in entropy estimate over sampled sums with the Miller-Madow
// correction; exact SymValue keys, deterministic for a fixed seed.
EntropyValue mc_entropy(const DiscreteDist& d, long n, std::uint64_t samples,
                        std::uint64_t seed);

}  // namespace entsum
