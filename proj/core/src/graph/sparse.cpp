#include "disttack/graph/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace disttack {

std::size_t CsrMatrix::find(std::size_t r, NodeId c) const {
  const auto first = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]);
  const auto last = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[r + 1]);
  const auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return npos;
  return static_cast<std::size_t>(it - col.begin());
}

double CsrMatrix::at(std::size_t r, NodeId c) const {
  const std::size_t k = find(r, c);
  return k == npos ? 0.0 : val[k];
}

Matrix CsrMatrix::multiply(const Matrix& dense) const {
  if (static_cast<std::size_t>(dense.rows()) != cols) {
    throw InvalidArgument("CsrMatrix::multiply: inner dimension mismatch");
  }
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(rows), dense.cols());
  for (std::size_t r = 0; r < rows; ++r) {
    auto out_row = out.row(static_cast<Eigen::Index>(r));
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      out_row.noalias() += val[k] * dense.row(col[k]);
    }
  }
  return out;
}

Matrix CsrMatrix::to_dense() const {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      out(static_cast<Eigen::Index>(r), col[k]) = val[k];
    }
  }
  return out;
}

bool CsrMatrix::is_symmetric(double tol) const {
  if (rows != cols) return false;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      const std::size_t t = find(col[k], static_cast<NodeId>(r));
      if (t == npos || std::abs(val[t] - val[k]) > tol) return false;
    }
  }
  return true;
}

CsrMatrix CsrMatrix::with_pattern_of(double fill) const {
  CsrMatrix out = *this;
  std::fill(out.val.begin(), out.val.end(), fill);
  return out;
}

}  // namespace disttack
