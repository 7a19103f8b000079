#include "entsum/linalg.hpp"

namespace entsum {

IntVector primitive_integer(const RatVector& v) {
  const Eigen::Index n = v.size();
  Int lcm_den(1);
  for (Eigen::Index i = 0; i < n; ++i)
    mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(),
            mpq_denref(v(i).get_mpq_t()));
  IntVector w(n);
  Int content(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    Rat scaled = v(i) * Rat(lcm_den);
    w(i) = scaled.get_num();
    mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), w(i).get_mpz_t());
  }
  if (content == 0) return w;  // zero vector
  int lead = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (w(i) != 0) {
      lead = sgn(w(i));
      break;
    }
  }
  if (lead < 0) content = -content;
  for (Eigen::Index i = 0; i < n; ++i) w(i) /= content;
  return w;
}

std::vector<IntVector> kernel_basis(const RatMatrix& m) {
  RatMatrix r = m;
  std::vector<Eigen::Index> pivots;
  const int rank = rref_in_place(r, &pivots);
  const Eigen::Index cols = m.cols();
  std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
  for (Eigen::Index c : pivots) is_pivot[static_cast<std::size_t>(c)] = true;
  std::vector<IntVector> basis;
  for (Eigen::Index f = 0; f < cols; ++f) {
    if (is_pivot[static_cast<std::size_t>(f)]) continue;
    RatVector v = RatVector::Constant(cols, Rat(0));
    v(f) = 1;
    for (int t = 0; t < rank; ++t) v(pivots[static_cast<std::size_t>(t)]) = -r(t, f);
    basis.push_back(primitive_integer(v));
  }
  return basis;
}

QDimension q_dimension(const std::vector<RatVector>& vectors) {
  QDimension out;
  if (vectors.empty()) return out;
  const Eigen::Index dim = vectors.front().size();
  std::vector<RatVector> rows;          // reduced independent rows
  std::vector<Eigen::Index> pivot_col;  // leading column per stored row
  for (std::size_t idx = 0; idx < vectors.size(); ++idx) {
    RatVector v = vectors[idx];
    if (v.size() != dim) throw Error("q_dimension: ragged vector lengths");
    for (std::size_t t = 0; t < rows.size(); ++t) {
      const Rat f = v(pivot_col[t]);
      if (f == 0) continue;
      for (Eigen::Index j = 0; j < dim; ++j) v(j) -= f * rows[t](j);
    }
    Eigen::Index lead = -1;
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (v(j) != 0) {
        lead = j;
        break;
      }
    }
    if (lead < 0) continue;
    const Rat inv = v(lead);
    for (Eigen::Index j = lead; j < dim; ++j) v(j) /= inv;
    rows.push_back(std::move(v));
    pivot_col.push_back(lead);
    out.basis_indices.push_back(static_cast<int>(idx));
  }
  out.q = static_cast<int>(rows.size());
  return out;
}

}  // namespace entsum
