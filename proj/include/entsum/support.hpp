#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "entsum/linalg.hpp"

namespace entsum {

struct BasisSymbol {
  std::string name;
  std::string approx;  // decimal string, display only
};

// Declared real symbols, asserted by the user to be linearly independent
// over Q. Coordinate vectors over this basis are the ground truth for all
// equality decisions.
struct Basis {
  std::vector<BasisSymbol> symbols;

  int dim() const { return static_cast<int>(symbols.size()); }
  int index_of(std::string_view name) const;
  bool same_as(const Basis& other) const;
};

// Exact coordinate vector of a real number over a Basis.
using SymValue = RatVector;

bool sym_eq(const SymValue& a, const SymValue& b);
bool sym_lt(const SymValue& a, const SymValue& b);  // lexicographic
bool sym_is_zero(const SymValue& a);
std::size_t hash_sym(const SymValue& a) noexcept;
SymValue sym_zero(int dim);

std::vector<std::string> coord_strings(const SymValue& a);
std::string render_sym(const Basis& basis, const SymValue& a);
long double approx_value(const Basis& basis, const SymValue& a);

// Exact c with b = c * a, when it exists and a is nonzero.
std::optional<Rat> rational_ratio(const SymValue& a, const SymValue& b);

// Finite set of distinct SymValue atoms, canonically sorted.
struct SupportSet {
  Basis basis;
  std::vector<SymValue> atoms;

  SupportSet(Basis b, std::vector<SymValue> a);
  int size() const { return static_cast<int>(atoms.size()); }
  int index_of(const SymValue& v) const;  // -1 when absent
  bool contains(const SymValue& v) const { return index_of(v) >= 0; }
};

std::vector<SymValue> sorted_atoms(std::vector<SymValue> atoms);

// atom_i = offset + int_coords_i * direction, exactly. For two or more atoms
// the integer coordinates have minimum 0 and gcd 1, so direction carries the
// maximal span; singletons get int_coords = [0] and a zero direction.
struct LatticeParam {
  SymValue offset;
  SymValue direction;
  std::vector<Int> int_coords;  // aligned with the sorted atoms
};

std::optional<LatticeParam> detect_lattice(const SupportSet& s);

SupportSet shift_support(const SupportSet& s, const SymValue& a);

// Variance of the integer lattice coordinates under the given conditional
// probabilities (aligned with s.atoms). Equals Var/h^2 of the values since
// the coordinates are gcd-reduced. Requires a lattice support with >= 2
// atoms and probabilities summing to 1.
Rat var_over_h2(const SupportSet& s, const std::vector<Rat>& probs);

Basis extend_basis(const Basis& b, const BasisSymbol& extra);
SymValue embed(const SymValue& v, int new_dim);
SupportSet embed_support(const SupportSet& s, const Basis& extended);

}  // namespace entsum
