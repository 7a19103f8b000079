#include "entsum/partition.hpp"

#include <algorithm>
#include <map>

namespace entsum {

namespace {

struct SymLess {
  bool operator()(const SymValue& a, const SymValue& b) const {
    return sym_lt(a, b);
  }
};

SymValue weighted_sum(const std::vector<SymValue>& atoms,
                      const std::vector<Int>& weights, int dim) {
  SymValue out = sym_zero(dim);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (weights[i] == 0) continue;
    const Rat w(weights[i]);
    for (Eigen::Index j = 0; j < out.size(); ++j) out(j) += w * atoms[i](j);
  }
  return out;
}

}  // namespace

Collection::Collection(SupportSet p, std::vector<std::vector<SymValue>> cs)
    : parent(std::move(p)), cells(std::move(cs)) {
  std::vector<SymValue> all;
  for (std::size_t j = 0; j < cells.size(); ++j) {
    auto& cell = cells[j];
    if (cell.empty()) throw Error("collection cell must be nonempty");
    std::sort(cell.begin(), cell.end(), sym_lt);
    for (std::size_t i = 1; i < cell.size(); ++i)
      if (sym_eq(cell[i - 1], cell[i]))
        throw Error("duplicate atom within a collection cell");
    if (cell.size() == 1 && sym_is_zero(cell[0]))
      throw Error("collection cell must not equal {0}");
    for (const SymValue& v : cell) {
      if (!parent.contains(v))
        throw Error("collection cell atom is not in the parent support");
      all.push_back(v);
      flat_atoms.push_back(v);
      flat_cell.push_back(static_cast<int>(j));
    }
  }
  std::sort(all.begin(), all.end(), sym_lt);
  for (std::size_t i = 1; i < all.size(); ++i)
    if (sym_eq(all[i - 1], all[i]))
      throw Error("collection cells must be pairwise disjoint");
}

IncommCertificate is_incommensurable(const Collection& c) {
  IncommCertificate cert;
  const int m = static_cast<int>(c.flat_atoms.size());
  const int dim = c.parent.basis.dim();
  const int k = c.cell_count();
  if (m == 0) {
    cert.incommensurable = true;
    return cert;
  }
  RatMatrix mat(dim + 1, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < dim; ++j) mat(j, i) = c.flat_atoms[i](j);
    mat(dim, i) = 1;  // fixed total count
  }
  cert.kernel = kernel_basis(mat);
  cert.incommensurable = true;
  int best_vec = -1;
  Int best_total;
  for (std::size_t v = 0; v < cert.kernel.size(); ++v) {
    const IntVector& z = cert.kernel[v];
    std::vector<SymValue> sums(static_cast<std::size_t>(k), sym_zero(dim));
    bool violated = false;
    for (int i = 0; i < m; ++i) {
      if (z(i) == 0) continue;
      const Rat w(z(i));
      SymValue& s = sums[static_cast<std::size_t>(c.flat_cell[i])];
      for (int j = 0; j < dim; ++j) s(j) += w * c.flat_atoms[i](j);
    }
    for (const SymValue& s : sums)
      if (!sym_is_zero(s)) violated = true;
    if (violated) {
      cert.incommensurable = false;
      Int total(0);
      for (int i = 0; i < m; ++i)
        if (z(i) > 0) total += z(i);
      if (best_vec < 0 || total < best_total) {
        best_vec = static_cast<int>(v);
        best_total = total;
      }
    }
    cert.kernel_cell_sums.push_back(std::move(sums));
  }
  if (!cert.incommensurable) {
    const IntVector& z = cert.kernel[static_cast<std::size_t>(best_vec)];
    Witness w;
    w.total = best_total;
    w.counts_a.resize(static_cast<std::size_t>(m), Int(0));
    w.counts_b.resize(static_cast<std::size_t>(m), Int(0));
    for (int i = 0; i < m; ++i) {
      if (z(i) > 0) w.counts_a[static_cast<std::size_t>(i)] = z(i);
      if (z(i) < 0) w.counts_b[static_cast<std::size_t>(i)] = -z(i);
    }
    w.cell_sums_a.assign(static_cast<std::size_t>(k), sym_zero(dim));
    w.cell_sums_b.assign(static_cast<std::size_t>(k), sym_zero(dim));
    for (int i = 0; i < m; ++i) {
      const int j = c.flat_cell[i];
      const Rat wa(w.counts_a[static_cast<std::size_t>(i)]);
      const Rat wb(w.counts_b[static_cast<std::size_t>(i)]);
      for (int t = 0; t < dim; ++t) {
        w.cell_sums_a[static_cast<std::size_t>(j)](t) +=
            wa * c.flat_atoms[i](t);
        w.cell_sums_b[static_cast<std::size_t>(j)](t) +=
            wb * c.flat_atoms[i](t);
      }
    }
    cert.witness = std::move(w);
  }
  return cert;
}

bool replay_witness(const Collection& c, const Witness& w) {
  const std::size_t m = c.flat_atoms.size();
  if (w.counts_a.size() != m || w.counts_b.size() != m) return false;
  Int total_a(0), total_b(0);
  for (std::size_t i = 0; i < m; ++i) {
    if (w.counts_a[i] < 0 || w.counts_b[i] < 0) return false;
    total_a += w.counts_a[i];
    total_b += w.counts_b[i];
  }
  if (total_a != w.total || total_b != w.total) return false;
  const int dim = c.parent.basis.dim();
  const SymValue va = weighted_sum(c.flat_atoms, w.counts_a, dim);
  const SymValue vb = weighted_sum(c.flat_atoms, w.counts_b, dim);
  if (!sym_eq(va, vb)) return false;
  const int k = c.cell_count();
  std::vector<SymValue> sa(static_cast<std::size_t>(k), sym_zero(dim));
  std::vector<SymValue> sb(static_cast<std::size_t>(k), sym_zero(dim));
  for (std::size_t i = 0; i < m; ++i) {
    const int j = c.flat_cell[i];
    const Rat wa(w.counts_a[i]), wb(w.counts_b[i]);
    for (int t = 0; t < dim; ++t) {
      sa[static_cast<std::size_t>(j)](t) += wa * c.flat_atoms[i](t);
      sb[static_cast<std::size_t>(j)](t) += wb * c.flat_atoms[i](t);
    }
  }
  for (int j = 0; j < k; ++j) {
    if (!sym_eq(sa[static_cast<std::size_t>(j)],
                w.cell_sums_a[static_cast<std::size_t>(j)]))
      return false;
    if (!sym_eq(sb[static_cast<std::size_t>(j)],
                w.cell_sums_b[static_cast<std::size_t>(j)]))
      return false;
  }
  for (int j = 0; j < k; ++j)
    if (!sym_eq(sa[static_cast<std::size_t>(j)],
                sb[static_cast<std::size_t>(j)]))
      return true;
  return false;
}

namespace {

struct Decomposition {
  std::vector<Int> counts;
  std::vector<SymValue> cell_sums;
};

}  // namespace

std::optional<Witness> falsify_incommensurability(const Collection& c,
                                                  int n_max,
                                                  std::size_t state_budget) {
  if (n_max < 1) throw Error("n_max must be at least 1");
  const int m = static_cast<int>(c.flat_atoms.size());
  const int dim = c.parent.basis.dim();
  const int k = c.cell_count();
  if (m == 0) return std::nullopt;
  std::size_t states = 0;
  std::vector<int> counts(static_cast<std::size_t>(m), 0);
  std::optional<Witness> found;

  for (int total = 1; total <= n_max && !found; ++total) {
    std::map<SymValue, Decomposition, SymLess> seen;
    // lexicographic enumeration of count vectors with the given total
    auto visit = [&](const std::vector<int>& counts_now) {
      if (++states > state_budget) throw BudgetError(state_budget);
      SymValue value = sym_zero(dim);
      std::vector<SymValue> sums(static_cast<std::size_t>(k), sym_zero(dim));
      for (int i = 0; i < m; ++i) {
        if (counts_now[static_cast<std::size_t>(i)] == 0) continue;
        const Rat w(counts_now[static_cast<std::size_t>(i)]);
        for (int t = 0; t < dim; ++t) {
          const Rat contrib = w * c.flat_atoms[i](t);
          value(t) += contrib;
          sums[static_cast<std::size_t>(c.flat_cell[i])](t) += contrib;
        }
      }
      auto it = seen.find(value);
      if (it == seen.end()) {
        Decomposition d;
        d.counts.assign(counts_now.begin(), counts_now.end());
        d.cell_sums = std::move(sums);
        seen.emplace(std::move(value), std::move(d));
        return;
      }
      bool differ = false;
      for (int j = 0; j < k; ++j)
        if (!sym_eq(it->second.cell_sums[static_cast<std::size_t>(j)],
                    sums[static_cast<std::size_t>(j)]))
          differ = true;
      if (!differ) return;
      Witness w;
      w.total = total;
      w.counts_a = it->second.counts;
      w.counts_b.assign(counts_now.begin(), counts_now.end());
      w.cell_sums_a = it->second.cell_sums;
      w.cell_sums_b = std::move(sums);
      found = std::move(w);
    };
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
      if (found) return;
      if (pos == m - 1) {
        counts[static_cast<std::size_t>(pos)] = remaining;
        visit(counts);
        return;
      }
      for (int take = 0; take <= remaining && !found; ++take) {
        counts[static_cast<std::size_t>(pos)] = take;
        self(self, pos + 1, remaining - take);
      }
    };
    if (m == 1) {
      counts[0] = total;
      visit(counts);
    } else {
      rec(rec, 0, total);
    }
  }
  return found;
}

Prepartition make_prepartition(const SupportSet& parent,
                               std::vector<std::vector<SymValue>> cells) {
  for (auto& cell : cells) std::sort(cell.begin(), cell.end(), sym_lt);
  std::stable_sort(cells.begin(), cells.end(),
                   [](const std::vector<SymValue>& a,
                      const std::vector<SymValue>& b) {
                     const bool sa = a.size() == 1, sb = b.size() == 1;
                     if (sa != sb) return sa;  // singletons first
                     return sym_lt(a.front(), b.front());
                   });
  int singletons = 0;
  for (const auto& cell : cells) {
    if (cell.size() == 1) ++singletons;
    if (!detect_lattice(SupportSet(parent.basis, cell)))
      throw Error("prepartition cell is not a lattice");
  }
  Collection col(parent, std::move(cells));
  std::vector<SymValue> leftover;
  for (const SymValue& atom : parent.atoms) {
    bool used = false;
    for (const auto& cell : col.cells)
      for (const SymValue& v : cell)
        if (sym_eq(v, atom)) used = true;
    if (!used) leftover.push_back(atom);
  }
  const bool degenerate =
      !col.cells.empty() &&
      singletons == static_cast<int>(col.cells.size());
  return Prepartition{std::move(col), std::move(leftover), singletons,
                      degenerate};
}

Prepartition span_prepartition(const SupportSet& s) {
  std::vector<RatVector> vectors(s.atoms.begin(), s.atoms.end());
  const QDimension qd = q_dimension(vectors);
  std::vector<std::vector<SymValue>> cells;
  for (int b : qd.basis_indices) {
    const SymValue& x = s.atoms[static_cast<std::size_t>(b)];
    std::vector<SymValue> cell;
    for (const SymValue& y : s.atoms) {
      if (sym_is_zero(y)) continue;
      if (rational_ratio(x, y)) cell.push_back(y);
    }
    cells.push_back(std::move(cell));
  }
  return make_prepartition(s, std::move(cells));
}

namespace {

struct RankSearch {
  const SupportSet& s;
  std::uint64_t budget;
  std::uint64_t nodes = 0;
  int best = 0;
  int max_rank;
  std::vector<std::vector<SymValue>> cells;
  std::vector<std::vector<SymValue>> best_cells;

  RankSearch(const SupportSet& support, std::uint64_t node_budget)
      : s(support), budget(node_budget), max_rank(support.size() - 1) {}

  bool active_incommensurable() const {
    std::vector<std::vector<SymValue>> active;
    for (const auto& cell : cells)
      if (!(cell.size() == 1 && sym_is_zero(cell.front())))
        active.push_back(cell);
    if (active.empty()) return true;
    return is_incommensurable(Collection(s, std::move(active)))
        .incommensurable;
  }

  void leaf() {
    const int k = static_cast<int>(cells.size());
    if (k <= best) return;
    bool nondegenerate = false;
    for (const auto& cell : cells) {
      if (cell.size() == 1 && sym_is_zero(cell.front())) return;
      if (cell.size() >= 2) nondegenerate = true;
    }
    if (!nondegenerate) return;
    best = k;
    best_cells = cells;
  }

  void dfs(int i) {
    if (++nodes > budget) throw RankBudgetError(budget, best);
    if (best == max_rank) return;
    const int m = s.size();
    if (i == m) {
      leaf();
      return;
    }
    if (static_cast<int>(cells.size()) + (m - i) <= best) return;
    const SymValue& atom = s.atoms[static_cast<std::size_t>(i)];
    for (std::size_t t = 0; t < cells.size(); ++t) {
      cells[t].push_back(atom);
      const bool lattice_ok =
          detect_lattice(SupportSet(s.basis, cells[t])).has_value();
      if (lattice_ok && active_incommensurable()) dfs(i + 1);
      cells[t].pop_back();
    }
    cells.push_back({atom});
    if (active_incommensurable()) dfs(i + 1);
    cells.pop_back();
    dfs(i + 1);  // leftover
  }
};

}  // namespace

RankResult compute_rank(const SupportSet& s, std::uint64_t node_budget) {
  if (s.size() == 1) {
    Prepartition cert{Collection(s, {}), s.atoms, 0, true};
    return RankResult{0, std::move(cert)};
  }
  RankSearch search(s, node_budget);
  search.dfs(0);
  return RankResult{search.best,
                    make_prepartition(s, std::move(search.best_cells))};
}

int rank_of_variable(const SupportSet& s, std::uint64_t node_budget) {
  return compute_rank(s, node_budget).rank;
}

}  // namespace entsum
