#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "entsum/support.hpp"
#include "oracles.hpp"

using namespace entsum;

namespace {

SymValue vec(std::initializer_list<Rat> xs) {
  SymValue v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (const Rat& x : xs) v(i++) = x;
  return v;
}

bool reconstructs(const SupportSet& s, const LatticeParam& lat) {
  for (std::size_t i = 0; i < s.atoms.size(); ++i) {
    SymValue expect = lat.offset;
    for (Eigen::Index j = 0; j < expect.size(); ++j)
      expect(j) += Rat(lat.int_coords[i]) * lat.direction(j);
    if (!sym_eq(expect, s.atoms[i])) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("detect_lattice on pinned sets") {
  SUBCASE("two atoms are always a lattice") {
    const SupportSet s(oracle::test_basis(2), {vec({1, 0}), vec({0, 1})});
    const auto lat = detect_lattice(s);
    REQUIRE(lat);
    // canonical form: direction has positive first nonzero coordinate
    CHECK(sym_eq(lat->offset, vec({0, 1})));
    CHECK(sym_eq(lat->direction, vec({1, -1})));
    CHECK(lat->int_coords == std::vector<Int>{Int(0), Int(1)});
    CHECK(reconstructs(s, *lat));
  }
  SUBCASE("arithmetic progression") {
    const SupportSet s(oracle::test_basis(1),
                       {vec({Rat(1, 2)}), vec({Rat(3, 2)}), vec({Rat(5, 2)})});
    const auto lat = detect_lattice(s);
    REQUIRE(lat);
    CHECK(sym_eq(lat->offset, vec({Rat(1, 2)})));
    CHECK(sym_eq(lat->direction, vec({Rat(1)})));
    CHECK(lat->int_coords == std::vector<Int>{Int(0), Int(1), Int(2)});
  }
  SUBCASE("1,2,pi is not a lattice") {
    const SupportSet s(oracle::test_basis(2),
                       {vec({1, 0}), vec({2, 0}), vec({0, 1})});
    CHECK_FALSE(detect_lattice(s));
  }
  SUBCASE("rt2, 2rt2") {
    Basis b{{{"rt2", "1.41421356237310"}}};
    const SupportSet s(b, {vec({1}), vec({2})});
    const auto lat = detect_lattice(s);
    REQUIRE(lat);
    CHECK(sym_eq(lat->offset, vec({1})));
    CHECK(sym_eq(lat->direction, vec({1})));
    CHECK(lat->int_coords == std::vector<Int>{Int(0), Int(1)});
  }
  SUBCASE("singleton convention") {
    const SupportSet s(oracle::test_basis(1), {vec({Rat(7, 3)})});
    const auto lat = detect_lattice(s);
    REQUIRE(lat);
    CHECK(lat->int_coords == std::vector<Int>{Int(0)});
    CHECK(sym_is_zero(lat->direction));
  }
  SUBCASE("gcd reduction of integer coordinates") {
    // {0, 2, 6} has coordinates 0,1,3 with span 2
    const SupportSet s(oracle::test_basis(1),
                       {vec({0}), vec({2}), vec({6})});
    const auto lat = detect_lattice(s);
    REQUIRE(lat);
    CHECK(sym_eq(lat->direction, vec({2})));
    CHECK(lat->int_coords == std::vector<Int>{Int(0), Int(1), Int(3)});
  }
}

TEST_CASE("detect_lattice equivariance and reconstruction") {
  oracle::TestRng rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const int dim = static_cast<int>(rng.range(1, 3));
    const SupportSet s =
        oracle::random_lattice_support(rng, dim, static_cast<int>(rng.range(2, 5)));
    const auto lat = detect_lattice(s);
    REQUIRE(lat);
    CHECK(reconstructs(s, *lat));
    // shifting changes only the offset
    const SymValue shift = oracle::random_sym(rng, dim);
    const auto lat2 = detect_lattice(shift_support(s, shift));
    REQUIRE(lat2);
    CHECK(lat2->int_coords == lat->int_coords);
    CHECK(sym_eq(lat2->direction, lat->direction));
    CHECK(sym_eq(lat2->offset, lat->offset + shift));
    // positive rational rescaling keeps the integer coordinates
    const Rat c = oracle::random_rat(rng, 1, 3, 3);
    std::vector<SymValue> scaled;
    for (const SymValue& a : s.atoms) {
      SymValue x = a;
      for (Eigen::Index j = 0; j < x.size(); ++j) x(j) *= c;
      scaled.push_back(std::move(x));
    }
    const auto lat3 = detect_lattice(SupportSet(s.basis, scaled));
    REQUIRE(lat3);
    CHECK(lat3->int_coords == lat->int_coords);
  }
}

TEST_CASE("var_over_h2 on pinned conditionals") {
  const Basis b1 = oracle::test_basis(1);
  SUBCASE("uniform on {0,1}") {
    const SupportSet s(b1, {vec({0}), vec({1})});
    CHECK(var_over_h2(s, {Rat(1, 2), Rat(1, 2)}) == Rat(1, 4));
  }
  SUBCASE("scale invariance on {rt2, 2rt2}") {
    Basis b{{{"rt2", "1.41421356237310"}}};
    const SupportSet s(b, {vec({1}), vec({2})});
    CHECK(var_over_h2(s, {Rat(1, 2), Rat(1, 2)}) == Rat(1, 4));
  }
  SUBCASE("weights (1/2,1/4,1/4) on coords 0,1,2") {
    const SupportSet s(b1, {vec({0}), vec({1}), vec({2})});
    CHECK(var_over_h2(s, {Rat(1, 2), Rat(1, 4), Rat(1, 4)}) == Rat(11, 16));
  }
  SUBCASE("singleton is an error") {
    const SupportSet s(b1, {vec({1})});
    CHECK_THROWS_WITH_AS(var_over_h2(s, {Rat(1)}),
                         "variance/h^2 undefined for singletons", Error);
  }
  SUBCASE("non-lattice is an error") {
    const SupportSet s(oracle::test_basis(2),
                       {vec({1, 0}), vec({2, 0}), vec({0, 1})});
    CHECK_THROWS_AS(var_over_h2(s, {Rat(1, 3), Rat(1, 3), Rat(1, 3)}), Error);
  }
}

TEST_CASE("var_over_h2 is shift and rescale invariant") {
  oracle::TestRng rng(43);
  for (int trial = 0; trial < 60; ++trial) {
    const int dim = static_cast<int>(rng.range(1, 3));
    const SupportSet s =
        oracle::random_lattice_support(rng, dim, static_cast<int>(rng.range(2, 5)));
    const auto probs = oracle::random_probs(rng, s.size());
    const Rat v = var_over_h2(s, probs);
    const SymValue shift = oracle::random_sym(rng, dim);
    // shifting reorders nothing: lattice sets keep their sorted order only if
    // the shift keeps lex order, which translation does
    CHECK(var_over_h2(shift_support(s, shift), probs) == v);
    Rat c = oracle::random_rat(rng, 1, 3, 2);
    std::vector<SymValue> scaled;
    for (const SymValue& a : s.atoms) {
      SymValue x = a;
      for (Eigen::Index j = 0; j < x.size(); ++j) x(j) *= c;
      scaled.push_back(std::move(x));
    }
    CHECK(var_over_h2(SupportSet(s.basis, scaled), probs) == v);
  }
}

TEST_CASE("shift_support on pinned sets") {
  Basis b{{{"r1", "1.234"}, {"r2", "2.345"}, {"e", "0.01"}}};
  const SupportSet s(b, {vec({1, 0, 0}), vec({2, 0, 0}), vec({0, 1, 0}),
                         vec({0, 2, 0})});
  const SymValue eps = vec({0, 0, 1});
  const SupportSet shifted = shift_support(s, eps);
  CHECK(shifted.contains(vec({1, 0, 1})));
  CHECK(shifted.contains(vec({2, 0, 1})));
  CHECK(shifted.contains(vec({0, 1, 1})));
  CHECK(shifted.contains(vec({0, 2, 1})));
  CHECK(shifted.size() == 4);

  const SupportSet zero_shift = shift_support(s, sym_zero(3));
  for (int i = 0; i < s.size(); ++i)
    CHECK(sym_eq(zero_shift.atoms[static_cast<std::size_t>(i)],
                 s.atoms[static_cast<std::size_t>(i)]));

  const SupportSet s01(oracle::test_basis(1), {vec({0}), vec({1})});
  const SupportSet s12 = shift_support(s01, vec({1}));
  CHECK(s12.contains(vec({1})));
  CHECK(s12.contains(vec({2})));
}

TEST_CASE("support set validation") {
  const Basis b = oracle::test_basis(1);
  CHECK_THROWS_AS(SupportSet(b, {}), Error);
  CHECK_THROWS_AS(SupportSet(b, {vec({1}), vec({1})}), Error);
  CHECK_THROWS_AS(SupportSet(b, {vec({1, 2})}), Error);
  const SupportSet s(b, {vec({3}), vec({1}), vec({2})});
  CHECK(sym_eq(s.atoms[0], vec({1})));  // canonical sort
  CHECK(s.index_of(vec({2})) == 1);
  CHECK(s.index_of(vec({5})) == -1);
}

TEST_CASE("basis extension embeds supports") {
  const Basis b = oracle::test_basis(2);
  const Basis ext = extend_basis(b, {"eps", "0.001"});
  CHECK(ext.dim() == 3);
  CHECK_THROWS_AS(extend_basis(b, {"pi", "3"}), Error);
  const SupportSet s(b, {vec({1, 0}), vec({0, 1})});
  const SupportSet es = embed_support(s, ext);
  CHECK(es.contains(vec({1, 0, 0})));
  CHECK(es.contains(vec({0, 1, 0})));
  CHECK(render_sym(ext, vec({2, 0, 1})) == "2*one+eps");
  CHECK(render_sym(ext, sym_zero(3)) == "0");
  CHECK(render_sym(ext, vec({Rat(3, 2), -1, 0})) == "3/2*one-pi");
}
