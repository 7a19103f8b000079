#pragma once

#include <optional>
#include <string>
#include <vector>

#include "entsum/dist.hpp"

namespace entsum {

enum class BoundName {
  thm1_lattice,
  thm2_multinomial,
  thm4_equality,
  thm4_lower,
  thm4_upper,
  thm7_lower_sltk,
  thm7_lower_seqk,
  cor9
};

enum class BoundDirection { equality, lower, upper };

std::string to_string(BoundName n);
std::string to_string(BoundDirection d);

// Asymptotic expression coeff * ln(N) + intercept in nats. The o(1) term is
// dropped, so a value is never a finite-N certified inequality.
struct BoundReport {
  BoundName name = BoundName::thm1_lattice;
  Rat coeff;                  // half-integer multiplier of ln N
  long double intercept = 0;  // nats
  BoundDirection direction = BoundDirection::lower;
  int k = 0;
  int s = 0;
  Rat q = Rat(1);
  long double lambda = 0;  // 0 when not applicable
  bool asymptotic = true;

  long double value_at(long n) const;
};

// Lattice-sum entropy asymptote from v = Var/h^2.
BoundReport thm1_report(const Rat& v);
long double thm1_lattice(const Rat& v, long n);

// Count-vector entropy asymptote for d categories of probabilities p.
BoundReport thm2_report(const std::vector<Rat>& p);
long double thm2_multinomial(const std::vector<Rat>& p, long n);

// Reports for a covering incommensurable lattice partition: the all-singleton
// equality case, the general lower bound (an equality when s = k-1), and the
// upper bound when s <= k-2.
std::vector<BoundReport> thm4_report(const Prepartition& pp,
                                     const DiscreteDist& d);

// Lower bound for a (possibly non-covering) prepartition; uses the lambda_1
// constant when some cell has two or more atoms and lambda_2 when all cells
// are singletons.
BoundReport thm7_report(const Prepartition& pp, const DiscreteDist& d);

struct Cor9Result {
  int rank = 0;
  long double value = 0;
  std::optional<Prepartition> certificate;
  std::optional<BoundReport> report;
};

// Rank of the support plus the thm7 lower bound evaluated at n on the rank
// certificate. Singletons yield rank 0 with a vacuous zero bound.
Cor9Result cor9_bound(const SupportSet& s, const DiscreteDist& d, long n,
                      std::uint64_t node_budget = 200'000'000);

}  // namespace entsum
