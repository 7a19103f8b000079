#pragma once

#include <Eigen/Core>
#include <vector>

#include "entsum/rational.hpp"

namespace entsum {

using RatMatrix = Eigen::Matrix<Rat, Eigen::Dynamic, Eigen::Dynamic>;
using RatVector = Eigen::Matrix<Rat, Eigen::Dynamic, 1>;
using IntVector = Eigen::Matrix<Int, Eigen::Dynamic, 1>;

// Reduced row echelon form with the first-nonzero pivot rule: for each column
// left to right, the topmost unused row with a nonzero entry becomes the
// pivot. Deterministic for a given matrix. Returns the rank; pivot columns
// are appended to *pivots when given.
template <typename Scalar>
int rref_in_place(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m,
                  std::vector<Eigen::Index>* pivots = nullptr) {
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
    Eigen::Index p = -1;
    for (Eigen::Index i = r; i < rows; ++i) {
      if (m(i, c) != 0) {
        p = i;
        break;
      }
    }
    if (p < 0) continue;
    if (p != r) m.row(p).swap(m.row(r));
    const Scalar inv = m(r, c);
    for (Eigen::Index j = c; j < cols; ++j) m(r, j) /= inv;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == r || m(i, c) == 0) continue;
      const Scalar f = m(i, c);
      for (Eigen::Index j = c; j < cols; ++j) m(i, j) -= f * m(r, j);
    }
    if (pivots) pivots->push_back(c);
    ++r;
  }
  return static_cast<int>(r);
}

// Scales a rational vector to integer entries with content 1 and a positive
// first nonzero entry; the zero vector maps to zeros.
IntVector primitive_integer(const RatVector& v);

// Basis of the right null space over Q, one primitive integer vector per free
// column of the RREF, ordered by free-column index.
std::vector<IntVector> kernel_basis(const RatMatrix& m);

struct QDimension {
  int q = 0;
  std::vector<int> basis_indices;
};

// Rank over Q of the given vectors together with the lexicographically first
// maximal independent subset (greedy left-to-right elimination).
QDimension q_dimension(const std::vector<RatVector>& vectors);

}  // namespace entsum
