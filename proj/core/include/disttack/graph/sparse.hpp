#pragma once

#include <span>
#include <vector>

#include "disttack/types.hpp"

namespace disttack {

// Compressed sparse row matrix with sorted column indices per row.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<NodeId> col;
  std::vector<double> val;

  std::size_t nnz() const noexcept { return col.size(); }

  std::span<const NodeId> row_cols(std::size_t r) const {
    return {col.data() + row_ptr[r], row_ptr[r + 1] - row_ptr[r]};
  }
  std::span<const double> row_vals(std::size_t r) const {
    return {val.data() + row_ptr[r], row_ptr[r + 1] - row_ptr[r]};
  }

  // Position of (r, c) in col/val, or npos when the entry is not stored.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t find(std::size_t r, NodeId c) const;

  // Stored value or 0.
  double at(std::size_t r, NodeId c) const;

  // this * dense
  Matrix multiply(const Matrix& dense) const;

  Matrix to_dense() const;

  bool is_symmetric(double tol = 0.0) const;

  // Same sparsity pattern, all values set to `fill`.
  CsrMatrix with_pattern_of(double fill) const;
};

}  // namespace disttack
