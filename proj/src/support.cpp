#include "entsum/support.hpp"

#include <algorithm>
#include <cstdlib>

namespace entsum {

int Basis::index_of(std::string_view name) const {
  for (int i = 0; i < dim(); ++i)
    if (symbols[static_cast<std::size_t>(i)].name == name) return i;
  return -1;
}

bool Basis::same_as(const Basis& other) const {
  if (dim() != other.dim()) return false;
  for (int i = 0; i < dim(); ++i)
    if (symbols[static_cast<std::size_t>(i)].name !=
        other.symbols[static_cast<std::size_t>(i)].name)
      return false;
  return true;
}

bool sym_eq(const SymValue& a, const SymValue& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) return false;
  return true;
}

bool sym_lt(const SymValue& a, const SymValue& b) {
  const Eigen::Index n = std::min(a.size(), b.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = cmp(a(i), b(i));
    if (c != 0) return c < 0;
  }
  return a.size() < b.size();
}

bool sym_is_zero(const SymValue& a) {
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a(i) != 0) return false;
  return true;
}

std::size_t hash_sym(const SymValue& a) noexcept {
  std::size_t h = 0x811c9dc5u ^ static_cast<std::size_t>(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    h ^= hash_rat(a(i)) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

SymValue sym_zero(int dim) { return SymValue::Constant(dim, Rat(0)); }

std::vector<std::string> coord_strings(const SymValue& a) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(a.size()));
  for (Eigen::Index i = 0; i < a.size(); ++i) out.push_back(rat_str(a(i)));
  return out;
}

std::string render_sym(const Basis& basis, const SymValue& a) {
  std::string out;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const Rat& c = a(i);
    if (c == 0) continue;
    const std::string& name = basis.symbols[static_cast<std::size_t>(i)].name;
    if (out.empty()) {
      if (c == 1)
        out = name;
      else if (c == -1)
        out = "-" + name;
      else
        out = rat_str(c) + "*" + name;
    } else {
      if (c == 1)
        out += "+" + name;
      else if (c == -1)
        out += "-" + name;
      else if (c > 0)
        out += "+" + rat_str(c) + "*" + name;
      else
        out += rat_str(c) + "*" + name;
    }
  }
  return out.empty() ? "0" : out;
}

long double approx_value(const Basis& basis, const SymValue& a) {
  long double v = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const std::string& s = basis.symbols[static_cast<std::size_t>(i)].approx;
    v += rat_ldbl(a(i)) * strtold(s.c_str(), nullptr);
  }
  return v;
}

std::optional<Rat> rational_ratio(const SymValue& a, const SymValue& b) {
  Eigen::Index lead = -1;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) != 0) {
      lead = i;
      break;
    }
  }
  if (lead < 0) return std::nullopt;
  const Rat c = b(lead) / a(lead);
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (b(i) != c * a(i)) return std::nullopt;
  return c;
}

std::vector<SymValue> sorted_atoms(std::vector<SymValue> atoms) {
  std::sort(atoms.begin(), atoms.end(), sym_lt);
  return atoms;
}

SupportSet::SupportSet(Basis b, std::vector<SymValue> a)
    : basis(std::move(b)), atoms(sorted_atoms(std::move(a))) {
  if (atoms.empty()) throw Error("support set must be nonempty");
  for (const SymValue& v : atoms)
    if (v.size() != basis.dim())
      throw Error("atom coordinate length does not match basis dimension");
  for (std::size_t i = 1; i < atoms.size(); ++i)
    if (sym_eq(atoms[i - 1], atoms[i])) throw Error("duplicate atom");
}

int SupportSet::index_of(const SymValue& v) const {
  const auto it = std::lower_bound(atoms.begin(), atoms.end(), v, sym_lt);
  if (it == atoms.end() || !sym_eq(*it, v)) return -1;
  return static_cast<int>(it - atoms.begin());
}

std::optional<LatticeParam> detect_lattice(const SupportSet& s) {
  const int n = s.size();
  if (n == 1)
    return LatticeParam{s.atoms[0], sym_zero(s.basis.dim()), {Int(0)}};
  const SymValue step = s.atoms[1] - s.atoms[0];
  std::vector<Rat> ratios(static_cast<std::size_t>(n));
  ratios[0] = 0;
  ratios[1] = 1;
  for (int i = 2; i < n; ++i) {
    const SymValue diff = s.atoms[static_cast<std::size_t>(i)] - s.atoms[0];
    const auto c = rational_ratio(step, diff);
    if (!c) return std::nullopt;
    ratios[static_cast<std::size_t>(i)] = *c;
  }
  Int lcm_den(1);
  for (const Rat& c : ratios)
    mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(),
            mpq_denref(c.get_mpq_t()));
  std::vector<Int> coords(static_cast<std::size_t>(n));
  Int content(0);
  for (int i = 0; i < n; ++i) {
    Rat scaled = ratios[static_cast<std::size_t>(i)] * Rat(lcm_den);
    coords[static_cast<std::size_t>(i)] = scaled.get_num();
    mpz_gcd(content.get_mpz_t(), content.get_mpz_t(),
            coords[static_cast<std::size_t>(i)].get_mpz_t());
  }
  for (Int& c : coords) c /= content;
  const Rat scale = Rat(content) / Rat(lcm_den);
  SymValue direction = step;
  for (Eigen::Index j = 0; j < direction.size(); ++j) direction(j) *= scale;
  return LatticeParam{s.atoms[0], std::move(direction), std::move(coords)};
}

SupportSet shift_support(const SupportSet& s, const SymValue& a) {
  if (a.size() != s.basis.dim())
    throw Error("shift vector does not match basis dimension");
  std::vector<SymValue> atoms;
  atoms.reserve(s.atoms.size());
  for (const SymValue& v : s.atoms) atoms.push_back(v + a);
  return SupportSet(s.basis, std::move(atoms));
}

Rat var_over_h2(const SupportSet& s, const std::vector<Rat>& probs) {
  if (s.size() == 1) throw Error("variance/h^2 undefined for singletons");
  if (probs.size() != static_cast<std::size_t>(s.size()))
    throw Error("probability vector does not match support size");
  const auto lat = detect_lattice(s);
  if (!lat) throw Error("variance/h^2 requires a lattice support");
  Rat sum(0), mean(0), second(0);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0) throw Error("probabilities must be positive");
    sum += probs[i];
    const Rat c(lat->int_coords[i]);
    mean += probs[i] * c;
    second += probs[i] * c * c;
  }
  if (sum != 1) throw Error("probabilities must sum to 1");
  return second - mean * mean;
}

Basis extend_basis(const Basis& b, const BasisSymbol& extra) {
  if (b.index_of(extra.name) >= 0)
    throw Error("basis symbol '" + extra.name + "' already declared");
  Basis out = b;
  out.symbols.push_back(extra);
  return out;
}

SymValue embed(const SymValue& v, int new_dim) {
  if (new_dim < v.size()) throw Error("embed: dimension shrinks");
  SymValue out = sym_zero(new_dim);
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = v(i);
  return out;
}

SupportSet embed_support(const SupportSet& s, const Basis& extended) {
  std::vector<SymValue> atoms;
  atoms.reserve(s.atoms.size());
  for (const SymValue& v : s.atoms) atoms.push_back(embed(v, extended.dim()));
  return SupportSet(extended, std::move(atoms));
}

}  // namespace entsum
