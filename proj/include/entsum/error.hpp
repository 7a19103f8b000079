#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace entsum {

// Base class for computational failures surfaced to callers; the CLI maps
// these to exit code 1 with a JSON diagnostic on stderr.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Convolution (or joint-law enumeration) exceeded the support cap; carries
// the iid order reached when the caller knows it (negative otherwise).
struct SupportOverflowError : Error {
  long n_reached;
  SupportOverflowError(long n, std::size_t cap)
      : Error(n >= 0 ? "support overflow at N=" + std::to_string(n) +
                           " (cap " + std::to_string(cap) + " atoms)"
                     : "support overflow (cap " + std::to_string(cap) +
                           " atoms)"),
        n_reached(n) {}
};

// Exhaustive falsifier ran out of its state budget before a verdict.
struct BudgetError : Error {
  explicit BudgetError(std::size_t budget)
      : Error("budget: enumeration exceeded " + std::to_string(budget) +
              " states") {}
};

// Rank search ran out of its node budget; carries the best rank found so far.
struct RankBudgetError : Error {
  int best_lower_bound;
  RankBudgetError(std::uint64_t budget, int best)
      : Error("budget: rank search exceeded " + std::to_string(budget) +
              " nodes; best rank found so far is " + std::to_string(best)),
        best_lower_bound(best) {}
};

}  // namespace entsum
