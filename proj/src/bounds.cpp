#include "entsum/bounds.hpp"

#include <cmath>
#include <numbers>

namespace entsum {

namespace {

const long double kLn2PiE =
    std::log(2.0L * std::numbers::pi_v<long double> *
             std::numbers::e_v<long double>);

long double half_log(const Rat& x) { return 0.5L * std::log(rat_ldbl(x)); }

// exact half-integers for BoundReport coefficients
Rat half_of(long n) {
  Rat r(n, 2);
  r.canonicalize();
  return r;
}

struct CellStats {
  Rat p;            // cell mass under d
  Rat var_over_h2;  // 0 for singletons
};

std::vector<CellStats> cell_stats(const Prepartition& pp,
                                  const DiscreteDist& d) {
  std::vector<CellStats> out;
  out.reserve(pp.cells.cells.size());
  for (const auto& cell : pp.cells.cells) {
    const Conditional cond = condition(d, cell);
    if (cond.tilde.size() != static_cast<int>(cell.size()))
      throw Error("prepartition cell is not contained in the support");
    CellStats st;
    st.p = cond.p_cell;
    st.var_over_h2 = cell.size() >= 2 ? var_over_h2(cond.tilde) : Rat(0);
    out.push_back(std::move(st));
  }
  return out;
}

void require_incommensurable(const Prepartition& pp) {
  if (!is_incommensurable(pp.cells).incommensurable)
    throw Error("prepartition cells are commensurable");
}

}  // namespace

std::string to_string(BoundName n) {
  switch (n) {
    case BoundName::thm1_lattice: return "thm1_lattice";
    case BoundName::thm2_multinomial: return "thm2_multinomial";
    case BoundName::thm4_equality: return "thm4_equality";
    case BoundName::thm4_lower: return "thm4_lower";
    case BoundName::thm4_upper: return "thm4_upper";
    case BoundName::thm7_lower_sltk: return "thm7_lower_sltk";
    case BoundName::thm7_lower_seqk: return "thm7_lower_seqk";
    case BoundName::cor9: return "cor9";
  }
  return "?";
}

std::string to_string(BoundDirection d) {
  switch (d) {
    case BoundDirection::equality: return "equality";
    case BoundDirection::lower: return "lower";
    case BoundDirection::upper: return "upper";
  }
  return "?";
}

long double BoundReport::value_at(long n) const {
  if (n < 1) throw Error("bound evaluation needs N >= 1");
  return rat_ldbl(coeff) * std::log(static_cast<long double>(n)) + intercept;
}

BoundReport thm1_report(const Rat& v) {
  if (v <= 0) throw Error("thm1 requires a positive Var/h^2");
  BoundReport r;
  r.name = BoundName::thm1_lattice;
  r.coeff = Rat(1, 2);
  r.intercept = 0.5L * kLn2PiE + half_log(v);
  r.direction = BoundDirection::equality;
  r.k = 1;
  r.s = 0;
  r.lambda = static_cast<long double>(rat_ldbl(v));
  return r;
}

long double thm1_lattice(const Rat& v, long n) {
  return thm1_report(v).value_at(n);
}

BoundReport thm2_report(const std::vector<Rat>& p) {
  const int d = static_cast<int>(p.size());
  if (d < 2) throw Error("thm2 requires at least two outcomes");
  Rat sum(0), prod(1);
  for (const Rat& pi : p) {
    if (pi <= 0) throw Error("thm2 requires positive probabilities");
    sum += pi;
    prod *= pi;
  }
  if (sum != 1) throw Error("probabilities sum to " + rat_str(sum));
  BoundReport r;
  r.name = BoundName::thm2_multinomial;
  r.coeff = half_of(d - 1);
  r.intercept = 0.5L * (d - 1) * kLn2PiE + half_log(prod);
  r.direction = BoundDirection::equality;
  r.k = d;
  r.s = d;
  r.lambda = std::pow(rat_ldbl(prod), 1.0L / (d - 1));
  return r;
}

long double thm2_multinomial(const std::vector<Rat>& p, long n) {
  return thm2_report(p).value_at(n);
}

std::vector<BoundReport> thm4_report(const Prepartition& pp,
                                     const DiscreteDist& d) {
  if (!pp.leftover.empty())
    throw Error("thm4 requires a covering partition (empty leftover)");
  if (pp.cells.cells.empty()) throw Error("thm4 requires at least one cell");
  require_incommensurable(pp);
  const auto stats = cell_stats(pp, d);
  const int k = static_cast<int>(stats.size());
  const int s = pp.singleton_count;

  Rat singleton_mass(0);
  Rat singleton_prod(1);
  for (int j = 0; j < s; ++j) {
    singleton_mass += stats[static_cast<std::size_t>(j)].p;
    singleton_prod *= stats[static_cast<std::size_t>(j)].p;
  }

  std::vector<BoundReport> out;
  if (s == k) {
    Rat prod(1);
    for (const CellStats& st : stats) prod *= st.p;
    BoundReport r;
    r.name = BoundName::thm4_equality;
    r.coeff = half_of(k - 1);
    r.intercept = 0.5L * (k - 1) * kLn2PiE + half_log(prod);
    r.direction = BoundDirection::equality;
    r.k = k;
    r.s = s;
    out.push_back(r);
    return out;
  }

  // s-term: p_1..p_s (1 - sum_{j<=s} p_j), empty product giving 0 nats
  long double s_term = 0;
  if (s > 0) s_term = half_log(singleton_prod * (Rat(1) - singleton_mass));

  long double lower_tail = 0, upper_tail = 0;
  for (int j = s; j < k; ++j) {
    const CellStats& st = stats[static_cast<std::size_t>(j)];
    lower_tail += half_log(st.p * st.var_over_h2);
    upper_tail += half_log(st.p * st.p * st.var_over_h2);
  }

  BoundReport lower;
  lower.name = BoundName::thm4_lower;
  lower.coeff = half_of(k);
  lower.intercept = 0.5L * k * kLn2PiE + s_term + lower_tail;
  lower.direction =
      s == k - 1 ? BoundDirection::equality : BoundDirection::lower;
  lower.k = k;
  lower.s = s;
  out.push_back(lower);

  if (s <= k - 2) {
    BoundReport upper;
    upper.name = BoundName::thm4_upper;
    upper.coeff = half_of(2 * k - s - 1);
    upper.intercept = 0.5L * (2 * k - s - 1) * kLn2PiE + s_term + upper_tail;
    upper.direction = BoundDirection::upper;
    upper.k = k;
    upper.s = s;
    out.push_back(upper);
  }
  return out;
}

BoundReport thm7_report(const Prepartition& pp, const DiscreteDist& d) {
  if (pp.cells.cells.empty()) throw Error("thm7 requires at least one cell");
  require_incommensurable(pp);
  const auto stats = cell_stats(pp, d);
  const int k = static_cast<int>(stats.size());
  const int s = pp.singleton_count;
  Rat q(0);
  for (const CellStats& st : stats) q += st.p;

  BoundReport r;
  r.k = k;
  r.s = s;
  r.q = q;
  if (s < k) {
    Rat prod(1);
    Rat singleton_mass(0);
    for (int j = 0; j < s; ++j) {
      prod *= stats[static_cast<std::size_t>(j)].p;
      singleton_mass += stats[static_cast<std::size_t>(j)].p;
    }
    prod *= Rat(1) - singleton_mass / q;
    for (int j = s; j < k; ++j) {
      const CellStats& st = stats[static_cast<std::size_t>(j)];
      prod *= st.p * st.var_over_h2;
    }
    if (prod <= 0) throw Error("thm7 lambda is nonpositive");
    r.name = BoundName::thm7_lower_sltk;
    r.coeff = half_of(k);
    r.intercept = 0.5L * k * kLn2PiE + half_log(prod);
    r.direction = BoundDirection::lower;
    r.lambda = std::pow(rat_ldbl(prod), 1.0L / k);
    return r;
  }
  // all cells singletons
  r.name = BoundName::thm7_lower_seqk;
  r.direction = BoundDirection::lower;
  if (k == 1) {
    // single singleton cell: the bound degenerates to zero
    r.coeff = Rat(0);
    r.intercept = 0;
    r.lambda = 1;
    return r;
  }
  Rat prod(1);
  for (const CellStats& st : stats) prod *= st.p;
  prod /= q;
  if (prod <= 0) throw Error("thm7 lambda is nonpositive");
  r.coeff = half_of(k - 1);
  r.intercept = 0.5L * (k - 1) * kLn2PiE + half_log(prod);
  r.lambda = std::pow(rat_ldbl(prod), 1.0L / (k - 1));
  return r;
}

Cor9Result cor9_bound(const SupportSet& s, const DiscreteDist& d, long n,
                      std::uint64_t node_budget) {
  Cor9Result out;
  if (s.size() == 1) {
    out.certificate = compute_rank(s).certificate;
    return out;  // rank 0, vacuous zero bound
  }
  RankResult rr = compute_rank(s, node_budget);
  out.rank = rr.rank;
  out.certificate = std::move(rr.certificate);
  BoundReport report = thm7_report(*out.certificate, d);
  report.name = BoundName::cor9;
  out.value = report.value_at(n);
  out.report = std::move(report);
  return out;
}

}  // namespace entsum
