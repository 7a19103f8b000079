#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "entsum/partition.hpp"
#include "oracles.hpp"

using namespace entsum;

namespace {

SymValue vec(std::initializer_list<Rat> xs) {
  SymValue v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (const Rat& x : xs) v(i++) = x;
  return v;
}

// basis (one, pi): support {1, pi, 1+pi}
SupportSet one_pi_support() {
  return SupportSet(oracle::test_basis(2),
                    {vec({1, 0}), vec({0, 1}), vec({1, 1})});
}

// basis (one, pi, rt2): the six-atom fixture {1,2,pi,1+pi,rt2,2rt2}
SupportSet six_atom_support() {
  return SupportSet(oracle::test_basis(3),
                    {vec({1, 0, 0}), vec({2, 0, 0}), vec({0, 1, 0}),
                     vec({1, 1, 0}), vec({0, 0, 1}), vec({0, 0, 2})});
}

Basis pair_basis() {
  return Basis{{{"r1", "1.234"}, {"r2", "2.345"}}};
}

Basis shifted_basis() {
  return Basis{{{"r1", "1.234"}, {"r2", "2.345"}, {"e", "0.017"}}};
}

SupportSet pair_support() {
  return SupportSet(pair_basis(),
                    {vec({1, 0}), vec({2, 0}), vec({0, 1}), vec({0, 2})});
}

SupportSet shifted_pair_support() {
  return SupportSet(shifted_basis(), {vec({1, 0, 1}), vec({2, 0, 1}),
                                      vec({0, 1, 1}), vec({0, 2, 1})});
}

std::set<std::vector<std::string>> cell_fingerprints(
    const std::vector<std::vector<SymValue>>& cells) {
  std::set<std::vector<std::string>> out;
  for (const auto& cell : cells) {
    std::vector<std::string> fp;
    for (const SymValue& v : cell) {
      std::string s;
      for (const std::string& c : coord_strings(v)) s += c + ",";
      fp.push_back(s);
    }
    std::sort(fp.begin(), fp.end());
    out.insert(fp);
  }
  return out;
}

}  // namespace

TEST_CASE("independent singleton cells are incommensurable") {
  const SupportSet s = one_pi_support();
  const Collection c(s, {{vec({1, 0})}, {vec({0, 1})}});
  const auto cert = is_incommensurable(c);
  CHECK(cert.incommensurable);
  CHECK_FALSE(cert.witness);
  for (const auto& sums : cert.kernel_cell_sums)
    for (const SymValue& v : sums) CHECK(sym_is_zero(v));
}

TEST_CASE("the fixed total count rescues dependent singletons") {
  // {1},{pi},{1+pi}: dependent values, still incommensurable
  const SupportSet s = one_pi_support();
  const Collection c(s, {{vec({1, 0})}, {vec({0, 1})}, {vec({1, 1})}});
  const auto cert = is_incommensurable(c);
  CHECK(cert.incommensurable);
  CHECK(cert.kernel.empty());  // the decision matrix has full column rank
  CHECK_FALSE(falsify_incommensurability(c, 8));
}

TEST_CASE("unshifted two-ray pair is incommensurable") {
  const SupportSet s = pair_support();
  const Collection c(s, {{vec({1, 0}), vec({2, 0})},
                         {vec({0, 1}), vec({0, 2})}});
  const auto cert = is_incommensurable(c);
  CHECK(cert.incommensurable);
  CHECK_FALSE(falsify_incommensurability(c, 6));
}

TEST_CASE("shifting the two-ray pair breaks incommensurability at N=3") {
  const SupportSet s = shifted_pair_support();
  const Collection c(s, {{vec({1, 0, 1}), vec({2, 0, 1})},
                         {vec({0, 1, 1}), vec({0, 2, 1})}});
  const auto cert = is_incommensurable(c);
  REQUIRE_FALSE(cert.incommensurable);
  REQUIRE(cert.witness);
  CHECK(cert.witness->total == 3);
  CHECK(replay_witness(c, *cert.witness));

  // the exhaustive falsifier reproduces the same total value 2r1+2r2+3e
  const auto found = falsify_incommensurability(c, 3);
  REQUIRE(found);
  CHECK(found->total == 3);
  CHECK(replay_witness(c, *found));
  SymValue value = sym_zero(3);
  for (std::size_t i = 0; i < c.flat_atoms.size(); ++i)
    for (int t = 0; t < 3; ++t)
      value(t) += Rat(found->counts_a[i]) * c.flat_atoms[i](t);
  CHECK(sym_eq(value, vec({2, 2, 3})));

  // no witness exists with fewer than three draws
  CHECK_FALSE(falsify_incommensurability(c, 2));
}

TEST_CASE("falsifier is silent on incommensurable inputs") {
  const SupportSet s = one_pi_support();
  CHECK_FALSE(falsify_incommensurability(
      Collection(s, {{vec({1, 0})}, {vec({0, 1})}}), 8));
  // single-cell collections are vacuously incommensurable
  const SupportSet s12(oracle::test_basis(1), {vec({1}), vec({2})});
  CHECK_FALSE(falsify_incommensurability(
      Collection(s12, {{vec({1}), vec({2})}}), 5));
}

TEST_CASE("falsifier budget is an explicit error") {
  const SupportSet s = pair_support();
  const Collection c(s, {{vec({1, 0}), vec({2, 0})},
                         {vec({0, 1}), vec({0, 2})}});
  CHECK_THROWS_AS(falsify_incommensurability(c, 8, 10), BudgetError);
}

TEST_CASE("collection validation") {
  const SupportSet s(oracle::test_basis(1), {vec({0}), vec({1}), vec({2})});
  CHECK_THROWS_AS(Collection(s, {{vec({0})}}), Error);           // {0} cell
  CHECK_THROWS_AS(Collection(s, {{}}), Error);                   // empty cell
  CHECK_THROWS_AS(Collection(s, {{vec({1})}, {vec({1})}}), Error);  // overlap
  CHECK_THROWS_AS(Collection(s, {{vec({5})}}), Error);  // not in parent
  CHECK_NOTHROW(Collection(s, {{vec({0}), vec({1})}}));  // 0 inside a pair
}

TEST_CASE("six-atom fixture: the four-cell singleton-heavy collection is "
          "commensurable") {
  // cells {1},{pi},{1+pi},{rt2,2rt2}: 1 + pi + 2rt2 decomposes two ways
  const SupportSet s = six_atom_support();
  const Collection c(s, {{vec({1, 0, 0})},
                         {vec({0, 1, 0})},
                         {vec({1, 1, 0})},
                         {vec({0, 0, 1}), vec({0, 0, 2})}});
  const auto cert = is_incommensurable(c);
  REQUIRE_FALSE(cert.incommensurable);
  REQUIRE(cert.witness);
  CHECK(cert.witness->total == 3);
  CHECK(replay_witness(c, *cert.witness));
  const auto found = falsify_incommensurability(c, 3);
  REQUIRE(found);
  CHECK(replay_witness(c, *found));
}

TEST_CASE("five-atom family fixture: the four-cell collection is "
          "commensurable") {
  // atoms {r, 2r, r1, r2, r1+r2}; cells {r,2r},{r1},{r2},{r1+r2}
  Basis b{{{"r", "1.1"}, {"r1", "2.2"}, {"r2", "3.3"}}};
  const SupportSet s(b, {vec({1, 0, 0}), vec({2, 0, 0}), vec({0, 1, 0}),
                         vec({0, 0, 1}), vec({0, 1, 1})});
  const Collection c(s, {{vec({1, 0, 0}), vec({2, 0, 0})},
                         {vec({0, 1, 0})},
                         {vec({0, 0, 1})},
                         {vec({0, 1, 1})}});
  const auto cert = is_incommensurable(c);
  REQUIRE_FALSE(cert.incommensurable);
  REQUIRE(cert.witness);
  CHECK(replay_witness(c, *cert.witness));
  const auto found = falsify_incommensurability(c, 3);
  REQUIRE(found);
  CHECK(replay_witness(c, *found));
}

TEST_CASE("span prepartition on pinned sets") {
  SUBCASE("{1, pi, 1+pi}") {
    const auto pp = span_prepartition(one_pi_support());
    CHECK(pp.cells.cell_count() == 2);
    CHECK(cell_fingerprints(pp.cells.cells) ==
          cell_fingerprints({{vec({1, 0})}, {vec({0, 1})}}));
    REQUIRE(pp.leftover.size() == 1);
    CHECK(sym_eq(pp.leftover[0], vec({1, 1})));
    CHECK(pp.degenerate);
    CHECK(pp.singleton_count == 2);
    CHECK(is_incommensurable(pp.cells).incommensurable);
  }
  SUBCASE("six-atom fixture") {
    const auto pp = span_prepartition(six_atom_support());
    CHECK(pp.cells.cell_count() == 3);
    CHECK(cell_fingerprints(pp.cells.cells) ==
          cell_fingerprints({{vec({1, 0, 0}), vec({2, 0, 0})},
                             {vec({0, 1, 0})},
                             {vec({0, 0, 1}), vec({0, 0, 2})}}));
    REQUIRE(pp.leftover.size() == 1);
    CHECK(sym_eq(pp.leftover[0], vec({1, 1, 0})));
    CHECK_FALSE(pp.degenerate);
    CHECK(pp.singleton_count == 1);
    CHECK(is_incommensurable(pp.cells).incommensurable);
  }
  SUBCASE("lattice {0,1,2} excludes zero") {
    const SupportSet s(oracle::test_basis(1), {vec({0}), vec({1}), vec({2})});
    const auto pp = span_prepartition(s);
    CHECK(pp.cells.cell_count() == 1);
    CHECK(cell_fingerprints(pp.cells.cells) ==
          cell_fingerprints({{vec({1}), vec({2})}}));
    REQUIRE(pp.leftover.size() == 1);
    CHECK(sym_eq(pp.leftover[0], vec({0})));
  }
}

TEST_CASE("span prepartition matches the rational-span dimension") {
  oracle::TestRng rng(53);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = static_cast<int>(rng.range(1, 3));
    const SupportSet s =
        oracle::random_support(rng, dim, static_cast<int>(rng.range(1, 5)));
    const auto pp = span_prepartition(s);
    std::vector<RatVector> vectors(s.atoms.begin(), s.atoms.end());
    CHECK(pp.cells.cell_count() == q_dimension(vectors).q);
    CHECK(is_incommensurable(pp.cells).incommensurable);
    // cells plus leftover exactly cover the support
    std::size_t covered = pp.leftover.size();
    for (const auto& cell : pp.cells.cells) covered += cell.size();
    CHECK(covered == s.atoms.size());
    // singletons first
    for (int j = 0; j < pp.singleton_count; ++j)
      CHECK(pp.cells.cells[static_cast<std::size_t>(j)].size() == 1);
    for (int j = pp.singleton_count; j < pp.cells.cell_count(); ++j)
      CHECK(pp.cells.cells[static_cast<std::size_t>(j)].size() >= 2);
  }
}

TEST_CASE("compute_rank on pinned sets") {
  SUBCASE("lattice sets have rank 1") {
    const SupportSet s(oracle::test_basis(1),
                       {vec({0}), vec({1}), vec({2}), vec({3})});
    const auto rr = compute_rank(s);
    CHECK(rr.rank == 1);
    CHECK(is_incommensurable(rr.certificate.cells).incommensurable);
    CHECK_FALSE(rr.certificate.degenerate);
  }
  SUBCASE("two atoms cap at rank 1") {
    const SupportSet s(oracle::test_basis(2), {vec({1, 0}), vec({0, 1})});
    CHECK(compute_rank(s).rank == 1);
  }
  SUBCASE("{0,1,pi} reaches the cardinality cap") {
    const SupportSet s(oracle::test_basis(2),
                       {vec({0, 0}), vec({1, 0}), vec({0, 1})});
    const auto rr = compute_rank(s);
    CHECK(rr.rank == 2);
    CHECK(rr.certificate.singleton_count == 1);
    CHECK(is_incommensurable(rr.certificate.cells).incommensurable);
  }
  SUBCASE("six-atom fixture has rank 3, not 4") {
    // the exhaustive search settles the value; the four-cell claim fails
    // (see the commensurability fixtures above)
    const auto rr = compute_rank(six_atom_support());
    CHECK(rr.rank == 3);
    CHECK_FALSE(rr.certificate.degenerate);
    CHECK(is_incommensurable(rr.certificate.cells).incommensurable);
    CHECK(cell_fingerprints(rr.certificate.cells.cells) ==
          cell_fingerprints({{vec({1, 0, 0}), vec({2, 0, 0})},
                             {vec({0, 1, 0})},
                             {vec({0, 0, 1}), vec({0, 0, 2})}}));
  }
  SUBCASE("singletons have rank 0") {
    const SupportSet s(oracle::test_basis(1), {vec({5})});
    const auto rr = compute_rank(s);
    CHECK(rr.rank == 0);
    CHECK(rr.certificate.cells.cell_count() == 0);
    CHECK(rr.certificate.leftover.size() == 1);
  }
  SUBCASE("{0,1} has rank 1") {
    const SupportSet s(oracle::test_basis(1), {vec({0}), vec({1})});
    CHECK(compute_rank(s).rank == 1);
  }
}

TEST_CASE("rank search budget is an explicit error with a lower bound") {
  try {
    compute_rank(six_atom_support(), 5);
    FAIL("expected RankBudgetError");
  } catch (const RankBudgetError& e) {
    CHECK(e.best_lower_bound >= 0);
    CHECK(e.best_lower_bound <= 3);
  }
}

TEST_CASE("rank is invariant under fresh-symbol shifts") {
  // pinned: the two-ray pair keeps rank 2 after the breaking shift
  const SupportSet s = pair_support();
  CHECK(rank_of_variable(s) == 2);
  const Basis ext = extend_basis(pair_basis(), {"e", "0.017"});
  const SupportSet embedded = embed_support(s, ext);
  SymValue eps = sym_zero(3);
  eps(2) = 1;
  CHECK(rank_of_variable(shift_support(embedded, eps)) == 2);

  oracle::TestRng rng(59);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = static_cast<int>(rng.range(1, 2));
    const SupportSet base =
        oracle::random_support(rng, dim, static_cast<int>(rng.range(2, 4)));
    const int r = compute_rank(base).rank;
    const Basis extended = extend_basis(base.basis, {"eps", "0.001"});
    const SupportSet lifted = embed_support(base, extended);
    SymValue shift = sym_zero(extended.dim());
    shift(extended.dim() - 1) = oracle::random_rat(rng, 1, 3, 2);
    CHECK(compute_rank(shift_support(lifted, shift)).rank == r);
  }
}

TEST_CASE("finite sets: lattice iff rank at most 1") {
  oracle::TestRng rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const SupportSet s = oracle::random_lattice_support(
        rng, static_cast<int>(rng.range(1, 2)),
        static_cast<int>(rng.range(2, 5)));
    CHECK(compute_rank(s).rank == 1);
  }
  for (int trial = 0; trial < 10; ++trial) {
    const SupportSet s = oracle::random_nonlattice_support(rng);
    CHECK(compute_rank(s).rank >= 2);
  }
}

TEST_CASE("dropping, shrinking and merging preserve incommensurability") {
  oracle::TestRng rng(67);
  for (int trial = 0; trial < 50; ++trial) {
    const Collection c = oracle::random_incommensurable_collection(rng);
    const int k = c.cell_count();
    if (k >= 2) {
      // drop each cell in turn
      for (int skip = 0; skip < k; ++skip) {
        std::vector<std::vector<SymValue>> cells;
        for (int j = 0; j < k; ++j)
          if (j != skip) cells.push_back(c.cells[static_cast<std::size_t>(j)]);
        CHECK(is_incommensurable(Collection(c.parent, cells))
                  .incommensurable);
      }
      // merge the first two cells
      std::vector<std::vector<SymValue>> merged;
      std::vector<SymValue> joined = c.cells[0];
      joined.insert(joined.end(), c.cells[1].begin(), c.cells[1].end());
      merged.push_back(std::move(joined));
      for (int j = 2; j < k; ++j)
        merged.push_back(c.cells[static_cast<std::size_t>(j)]);
      CHECK(is_incommensurable(Collection(c.parent, merged)).incommensurable);
    }
    // shrink a random cell to a nonempty subset that is not {0}
    const int target = static_cast<int>(rng.range(0, k - 1));
    std::vector<SymValue> sub;
    for (const SymValue& v : c.cells[static_cast<std::size_t>(target)])
      if (rng.range(0, 1) == 0) sub.push_back(v);
    if (sub.empty())
      sub.push_back(c.cells[static_cast<std::size_t>(target)].front());
    if (sub.size() == 1 && sym_is_zero(sub.front())) continue;
    std::vector<std::vector<SymValue>> cells = c.cells;
    cells[static_cast<std::size_t>(target)] = sub;
    CHECK(is_incommensurable(Collection(c.parent, cells)).incommensurable);
  }
}

TEST_CASE("merging two singleton cells of a degenerate collection") {
  oracle::TestRng rng(71);
  int done = 0;
  while (done < 20) {
    const Collection c = oracle::random_incommensurable_collection(rng, 4, 3);
    bool degenerate = c.cell_count() >= 2;
    for (const auto& cell : c.cells) degenerate = degenerate && cell.size() == 1;
    if (!degenerate) continue;
    ++done;
    std::vector<std::vector<SymValue>> cells;
    cells.push_back({c.cells[0][0], c.cells[1][0]});
    for (int j = 2; j < c.cell_count(); ++j)
      cells.push_back(c.cells[static_cast<std::size_t>(j)]);
    const Collection merged(c.parent, cells);
    CHECK(is_incommensurable(merged).incommensurable);
    const auto pp = make_prepartition(c.parent, cells);
    CHECK_FALSE(pp.degenerate);
    CHECK(pp.cells.cell_count() == c.cell_count() - 1);
  }
}

TEST_CASE("decision procedure agrees with the exhaustive falsifier") {
  oracle::TestRng rng(73);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = static_cast<int>(rng.range(1, 3));
    const SupportSet s =
        oracle::random_support(rng, dim, static_cast<int>(rng.range(2, 5)));
    const Collection c = oracle::random_collection(rng, s, 3);
    const auto cert = is_incommensurable(c);
    const auto witness = falsify_incommensurability(c, 8);
    if (cert.incommensurable) {
      // soundness: no witness can exist at any total
      CHECK_FALSE(witness);
    } else {
      REQUIRE(cert.witness);
      CHECK(replay_witness(c, *cert.witness));
      if (cert.witness->total <= 8) {
        REQUIRE(witness);
        CHECK(replay_witness(c, *witness));
      }
    }
  }
}

TEST_CASE("prepartition ordering and validation") {
  const SupportSet s = six_atom_support();
  const auto pp = make_prepartition(
      s, {{vec({0, 0, 1}), vec({0, 0, 2})}, {vec({0, 1, 0})}});
  REQUIRE(pp.cells.cell_count() == 2);
  CHECK(pp.singleton_count == 1);
  CHECK(pp.cells.cells[0].size() == 1);  // singleton listed first
  CHECK(pp.leftover.size() == 3);
  CHECK_FALSE(pp.degenerate);
  // a non-lattice cell is rejected
  CHECK_THROWS_AS(
      make_prepartition(s, {{vec({1, 0, 0}), vec({2, 0, 0}), vec({0, 1, 0})}}),
      Error);
}
