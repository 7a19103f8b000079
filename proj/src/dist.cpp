#include "entsum/dist.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <map>
#include <numeric>

namespace entsum {

namespace {

struct SymLess {
  bool operator()(const SymValue& a, const SymValue& b) const {
    return sym_lt(a, b);
  }
};

// Common-denominator form used inside convolutions: positive integer weights
// over an implicit denominator. Keeps the accumulation in plain integer
// multiply-adds; the exact rational form is restored once per result.
struct WeightedDist {
  Basis basis;
  std::vector<SymValue> atoms;  // sorted
  std::vector<Int> weights;
  Int den;
};

WeightedDist to_weighted(const DiscreteDist& d) {
  WeightedDist w;
  w.basis = d.support.basis;
  w.atoms = d.support.atoms;
  w.den = 1;
  for (const Rat& p : d.probs)
    mpz_lcm(w.den.get_mpz_t(), w.den.get_mpz_t(),
            mpq_denref(p.get_mpq_t()));
  w.weights.reserve(d.probs.size());
  for (const Rat& p : d.probs) {
    Rat scaled = p * Rat(w.den);
    w.weights.push_back(scaled.get_num());
  }
  return w;
}

DiscreteDist to_dist(WeightedDist&& w) {
  std::vector<Rat> probs;
  probs.reserve(w.weights.size());
  for (const Int& weight : w.weights) {
    Rat p(weight, w.den);
    p.canonicalize();
    probs.push_back(std::move(p));
  }
  return DiscreteDist(SupportSet(std::move(w.basis), std::move(w.atoms)),
                      std::move(probs));
}

// Sorted k-way merge over the |b| shifted copies of a's atom list; adding a
// constant preserves the lexicographic order, so each stream is sorted and
// the result comes out sorted with exact accumulated weights.
WeightedDist convolve_weighted(const WeightedDist& a, const WeightedDist& b,
                               std::size_t max_support) {
  const std::size_t ka = a.atoms.size();
  const std::size_t kb = b.atoms.size();
  const Eigen::Index dim = a.atoms[0].size();
  std::vector<std::size_t> pos(kb, 0);
  std::vector<SymValue> heads(kb, sym_zero(static_cast<int>(dim)));
  // heads are updated in place so the hot loop allocates only on new atoms
  const auto set_head = [&](std::size_t j) {
    const SymValue& base = a.atoms[pos[j]];
    const SymValue& shift = b.atoms[j];
    SymValue& h = heads[j];
    for (Eigen::Index t = 0; t < dim; ++t)
      mpq_add(h(t).get_mpq_t(), base(t).get_mpq_t(), shift(t).get_mpq_t());
  };
  for (std::size_t j = 0; j < kb; ++j) set_head(j);
  WeightedDist out;
  out.basis = a.basis;
  out.den = a.den * b.den;
  out.atoms.reserve(ka + kb);
  out.weights.reserve(ka + kb);
  while (true) {
    std::size_t best = kb;
    for (std::size_t j = 0; j < kb; ++j) {
      if (pos[j] == ka) continue;
      if (best == kb || sym_lt(heads[j], heads[best])) best = j;
    }
    if (best == kb) break;
    if (!out.atoms.empty() && sym_eq(out.atoms.back(), heads[best])) {
      mpz_addmul(out.weights.back().get_mpz_t(),
                 a.weights[pos[best]].get_mpz_t(),
                 b.weights[best].get_mpz_t());
    } else {
      if (out.atoms.size() >= max_support)
        throw SupportOverflowError(-1, max_support);
      out.atoms.push_back(heads[best]);
      Int w;
      mpz_mul(w.get_mpz_t(), a.weights[pos[best]].get_mpz_t(),
              b.weights[best].get_mpz_t());
      out.weights.push_back(std::move(w));
    }
    if (++pos[best] < ka) set_head(best);
  }
  return out;
}

}  // namespace

DiscreteDist::DiscreteDist(SupportSet s, std::vector<Rat> p)
    : support(std::move(s)), probs(std::move(p)) {
  if (probs.size() != static_cast<std::size_t>(support.size()))
    throw Error("probability vector does not match support size");
  Rat sum(0);
  for (const Rat& q : probs) {
    if (q <= 0) throw Error("probabilities must be positive");
    sum += q;
  }
  if (sum != 1)
    throw Error("probabilities sum to " + rat_str(sum));
}

DiscreteDist DiscreteDist::make(Basis basis, std::vector<SymValue> atoms,
                                std::vector<Rat> probs) {
  if (atoms.size() != probs.size())
    throw Error("atom and probability counts differ");
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sym_lt(atoms[a], atoms[b]);
  });
  std::vector<SymValue> sorted_a;
  std::vector<Rat> sorted_p;
  sorted_a.reserve(atoms.size());
  sorted_p.reserve(atoms.size());
  for (std::size_t i : order) {
    sorted_a.push_back(std::move(atoms[i]));
    sorted_p.push_back(std::move(probs[i]));
  }
  return DiscreteDist(SupportSet(std::move(basis), std::move(sorted_a)),
                      std::move(sorted_p));
}

Conditional condition(const DiscreteDist& d,
                      const std::vector<SymValue>& cell) {
  Rat mass(0);
  std::vector<SymValue> atoms;
  std::vector<Rat> probs;
  for (const SymValue& v : cell) {
    const int idx = d.support.index_of(v);
    if (idx < 0) continue;
    mass += d.probs[static_cast<std::size_t>(idx)];
    atoms.push_back(v);
    probs.push_back(d.probs[static_cast<std::size_t>(idx)]);
  }
  if (atoms.empty()) throw Error("conditioning on null event");
  for (Rat& p : probs) p /= mass;
  return Conditional{mass, DiscreteDist::make(d.support.basis,
                                              std::move(atoms),
                                              std::move(probs))};
}

DiscreteDist convolve_pair(const DiscreteDist& a, const DiscreteDist& b,
                           std::size_t max_support) {
  if (!a.support.basis.same_as(b.support.basis))
    throw Error("convolution operands use different bases");
  return to_dist(convolve_weighted(to_weighted(a), to_weighted(b),
                                   max_support));
}

DiscreteDist convolve_iid(const DiscreteDist& d, long n,
                          std::size_t max_support) {
  if (n < 1) throw Error("convolution order must be at least 1");
  if (n == 1) return d;
  const WeightedDist base = to_weighted(d);
  WeightedDist acc = base;
  for (long i = 2; i <= n; ++i) {
    try {
      acc = convolve_weighted(acc, base, max_support);
    } catch (const SupportOverflowError&) {
      throw SupportOverflowError(i, max_support);
    }
  }
  return to_dist(std::move(acc));
}

DiscreteDist convolve_iid_doubling(const DiscreteDist& d, long n,
                                   std::size_t max_support) {
  if (n < 1) throw Error("convolution order must be at least 1");
  try {
    WeightedDist square = to_weighted(d);
    WeightedDist result;
    bool have_result = false;
    long remaining = n;
    while (true) {
      if (remaining & 1) {
        result = have_result
                     ? convolve_weighted(result, square, max_support)
                     : square;
        have_result = true;
      }
      remaining >>= 1;
      if (remaining == 0) break;
      square = convolve_weighted(square, square, max_support);
    }
    return to_dist(std::move(result));
  } catch (const SupportOverflowError&) {
    throw SupportOverflowError(n, max_support);
  }
}

EntropyValue entropy(const DiscreteDist& d) {
  long double sum = 0, comp = 0, abs_sum = 0;
  for (const Rat& p : d.probs) {
    const long double x = rat_ldbl(p);
    if (x <= 0) continue;  // conversion of a tiny positive rational underflowed
    const long double term = -x * std::log(x);
    const long double y = term - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    abs_sum += term < 0 ? -term : term;
  }
  EntropyValue out;
  out.nats = sum;
  out.error_bound = LDBL_EPSILON * (8 * abs_sum + 2);
  return out;
}

Rat var_over_h2(const DiscreteDist& d) { return var_over_h2(d.support, d.probs); }

std::vector<JointOutcome> decompose_by_cells(const DiscreteDist& d, long n,
                                             const Collection& cells,
                                             std::size_t max_support) {
  if (n < 1) throw Error("draw count must be at least 1");
  const int k = cells.cell_count();
  const int dim = d.support.basis.dim();
  // cell index per support atom; -1 when the atom is outside every cell
  std::vector<int> cell_of(static_cast<std::size_t>(d.size()), -1);
  for (std::size_t i = 0; i < cells.flat_atoms.size(); ++i) {
    const int idx = d.support.index_of(cells.flat_atoms[i]);
    if (idx < 0)
      throw Error("collection cell atom is not in the distribution support");
    cell_of[static_cast<std::size_t>(idx)] = cells.flat_cell[i];
  }

  struct StateLess {
    bool operator()(const JointOutcome& a, const JointOutcome& b) const {
      for (std::size_t j = 0; j < a.cell_counts.size(); ++j) {
        if (a.cell_counts[j] != b.cell_counts[j])
          return a.cell_counts[j] < b.cell_counts[j];
      }
      for (std::size_t j = 0; j < a.cell_values.size(); ++j) {
        if (!sym_eq(a.cell_values[j], b.cell_values[j]))
          return sym_lt(a.cell_values[j], b.cell_values[j]);
      }
      return false;
    }
  };
  using StateMap = std::map<JointOutcome, Rat, StateLess>;

  JointOutcome zero;
  zero.cell_values.assign(static_cast<std::size_t>(k), sym_zero(dim));
  zero.cell_counts.assign(static_cast<std::size_t>(k), 0);
  StateMap states;
  states.emplace(zero, Rat(1));
  for (long step = 1; step <= n; ++step) {
    StateMap next;
    for (const auto& [state, prob] : states) {
      for (int a = 0; a < d.size(); ++a) {
        JointOutcome moved = state;
        const int j = cell_of[static_cast<std::size_t>(a)];
        if (j >= 0) {
          moved.cell_counts[static_cast<std::size_t>(j)] += 1;
          SymValue& v = moved.cell_values[static_cast<std::size_t>(j)];
          for (int t = 0; t < dim; ++t)
            v(t) += d.support.atoms[static_cast<std::size_t>(a)](t);
        }
        next[std::move(moved)] += prob * d.probs[static_cast<std::size_t>(a)];
        if (next.size() > max_support)
          throw SupportOverflowError(step, max_support);
      }
    }
    states = std::move(next);
  }
  std::vector<JointOutcome> out;
  out.reserve(states.size());
  for (auto& [state, prob] : states) {
    JointOutcome o = state;
    o.prob = prob;
    out.push_back(std::move(o));
  }
  return out;
}

std::uint64_t counter_rng(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

EntropyValue mc_entropy(const DiscreteDist& d, long n, std::uint64_t samples,
                        std::uint64_t seed) {
  if (n < 1) throw Error("draw count must be at least 1");
  if (samples < 1) throw Error("sample count must be at least 1");
  using U128 = unsigned __int128;
  const U128 one_shift_64 = (U128{1}) << 64;
  // cumulative thresholds at 64 fixed-point fraction bits, round-half-up
  std::vector<U128> thresholds;
  thresholds.reserve(d.probs.size());
  Rat cum(0);
  for (const Rat& p : d.probs) {
    cum += p;
    Int scaled_num;
    mpz_mul_2exp(scaled_num.get_mpz_t(), cum.get_num().get_mpz_t(), 64);
    Int den = cum.get_den();
    Int half = den / 2;
    Int rounded = (scaled_num + half) / den;
    U128 t = 0;
    // export the (<= 65 bit) threshold limb by limb
    Int tmp = rounded;
    int shift = 0;
    while (tmp > 0) {
      t |= static_cast<U128>(mpz_get_ui(tmp.get_mpz_t()) &
                             0xffffffffull) << shift;
      tmp >>= 32;
      shift += 32;
    }
    thresholds.push_back(t);
  }
  thresholds.back() = one_shift_64;

  const int dim = d.support.basis.dim();
  std::map<SymValue, std::uint64_t, SymLess> tally;
  std::vector<std::uint32_t> atom_counts(d.probs.size());
  std::uint64_t counter = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    std::fill(atom_counts.begin(), atom_counts.end(), 0u);
    for (long i = 0; i < n; ++i) {
      const U128 u = counter_rng(seed, counter++);
      const auto it =
          std::upper_bound(thresholds.begin(), thresholds.end(), u);
      atom_counts[static_cast<std::size_t>(it - thresholds.begin())] += 1;
    }
    SymValue sum = sym_zero(dim);
    for (std::size_t a = 0; a < atom_counts.size(); ++a) {
      if (atom_counts[a] == 0) continue;
      const Rat w(static_cast<unsigned long>(atom_counts[a]));
      for (int t = 0; t < dim; ++t) sum(t) += w * d.support.atoms[a](t);
    }
    tally[std::move(sum)] += 1;
  }

  long double h = 0, comp = 0, abs_sum = 0;
  const long double total = static_cast<long double>(samples);
  for (const auto& [value, count] : tally) {
    const long double f = static_cast<long double>(count) / total;
    const long double term = -f * std::log(f);
    const long double y = term - comp;
    const long double t = h + y;
    comp = (t - h) - y;
    h = t;
    abs_sum += term < 0 ? -term : term;
  }
  const long double miller_madow =
      static_cast<long double>(tally.size() - 1) / (2.0L * total);
  EntropyValue out;
  out.nats = h + miller_madow;
  out.error_bound = LDBL_EPSILON * (8 * abs_sum + 2);
  return out;
}

}  // namespace entsum
