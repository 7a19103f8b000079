#pragma once

#include <gmpxx.h>

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <string_view>

#include "entsum/error.hpp"

namespace entsum {

using Int = mpz_class;

// Exact rational scalar. Canonical form throughout: gcd(|num|, den) = 1,
// den >= 1, zero is 0/1. All arithmetic is exact and total except division
// by zero.
using Rat = mpq_class;

// Largest positive rational g such that a/g and b/g are integers.
// Equals gcd(numerators)/lcm(denominators) of the reduced inputs.
// Throws Error("gcd undefined") when both arguments are zero.
Rat rat_gcd(const Rat& a, const Rat& b);

// Grammar: -?digits(/digits)? — shared with the spec-file format.
Rat parse_rat(std::string_view text);

// Inverse of parse_rat: "a/b", or "a" when the denominator is 1.
std::string rat_str(const Rat& x);

bool rat_is_integer(const Rat& x);

// Conversion by scaled-integer division carrying >= 64 fraction bits, then a
// single rounding into the 64-bit long double mantissa.
long double rat_ldbl(const Rat& x);

std::size_t hash_int(const Int& z) noexcept;
std::size_t hash_rat(const Rat& x) noexcept;

}  // namespace entsum

namespace Eigen {

template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
  using Real = mpq_class;
  using NonInteger = mpq_class;
  using Nested = mpq_class;

  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }

  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 150,
    MulCost = 100
  };
};

}  // namespace Eigen
