#include "entsum/rational.hpp"

#include <cctype>
#include <cmath>

namespace entsum {

Rat rat_gcd(const Rat& a, const Rat& b) {
  if (a == 0 && b == 0) throw Error("gcd undefined");
  // reduce copies so the result depends on values, not representations
  Rat ra = a, rb = b;
  ra.canonicalize();
  rb.canonicalize();
  Rat g;
  mpz_gcd(mpq_numref(g.get_mpq_t()), mpq_numref(ra.get_mpq_t()),
          mpq_numref(rb.get_mpq_t()));
  mpz_lcm(mpq_denref(g.get_mpq_t()), mpq_denref(ra.get_mpq_t()),
          mpq_denref(rb.get_mpq_t()));
  g.canonicalize();
  return g;
}

Rat parse_rat(std::string_view text) {
  const auto fail = [&]() -> Rat {
    throw Error("malformed rational '" + std::string(text) + "'");
  };
  std::size_t i = 0;
  if (i < text.size() && text[i] == '-') ++i;
  const std::size_t num_begin = i;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
    ++i;
  if (i == num_begin) return fail();
  const std::size_t num_end = i;
  std::size_t den_begin = 0, den_end = 0;
  if (i < text.size()) {
    if (text[i] != '/') return fail();
    ++i;
    den_begin = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
      ++i;
    if (i == den_begin || i != text.size()) return fail();
    den_end = i;
  }
  Int num(std::string(text.substr(0, num_end)), 10);
  Int den(1);
  if (den_end > den_begin)
    den = Int(std::string(text.substr(den_begin, den_end - den_begin)), 10);
  if (den == 0)
    throw Error("malformed rational '" + std::string(text) +
                "': zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

std::string rat_str(const Rat& x) { return x.get_str(); }

bool rat_is_integer(const Rat& x) { return x.get_den() == 1; }

long double rat_ldbl(const Rat& x) {
  if (x == 0) return 0.0L;
  const int sign = sgn(x);
  Int num = abs(x.get_num());
  const Int den = x.get_den();
  const long bits_num =
      static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2));
  const long bits_den =
      static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2));
  const long shift = 80 - (bits_num - bits_den);
  Int q;
  if (shift >= 0) {
    Int scaled;
    mpz_mul_2exp(scaled.get_mpz_t(), num.get_mpz_t(),
                 static_cast<mp_bitcnt_t>(shift));
    mpz_tdiv_q(q.get_mpz_t(), scaled.get_mpz_t(), den.get_mpz_t());
  } else {
    Int scaled;
    mpz_mul_2exp(scaled.get_mpz_t(), den.get_mpz_t(),
                 static_cast<mp_bitcnt_t>(-shift));
    mpz_tdiv_q(q.get_mpz_t(), num.get_mpz_t(), scaled.get_mpz_t());
  }
  // q carries ~80 significant bits; split into two exactly representable
  // halves so only the final sum rounds.
  Int hi, lo;
  mpz_tdiv_q_2exp(hi.get_mpz_t(), q.get_mpz_t(), 41);
  mpz_tdiv_r_2exp(lo.get_mpz_t(), q.get_mpz_t(), 41);
  long double v = std::ldexp(static_cast<long double>(hi.get_ui()), 41) +
                  static_cast<long double>(lo.get_ui());
  v = std::ldexp(v, static_cast<int>(-shift));
  return sign < 0 ? -v : v;
}

std::size_t hash_int(const Int& z) noexcept {
  const mpz_srcptr p = z.get_mpz_t();
  std::size_t h = 1469598103934665603ull;
  h ^= static_cast<std::size_t>(mpz_sgn(p)) + 0x9e3779b97f4a7c15ull;
  h *= 1099511628211ull;
  const std::size_t n = mpz_size(p);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<std::size_t>(mpz_getlimbn(p, static_cast<mp_size_t>(i)));
    h *= 1099511628211ull;
  }
  return h;
}

std::size_t hash_rat(const Rat& x) noexcept {
  std::size_t h = hash_int(x.get_num());
  h ^= hash_int(x.get_den()) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

}  // namespace entsum
