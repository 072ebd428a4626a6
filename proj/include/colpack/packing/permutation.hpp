// permutation.hpp - row permutation that makes the next layer's column groups
// contiguous, so a counter can replace the inter-layer switchbox.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "colpack/core/matrix.hpp"
#include "colpack/core/network.hpp"
#include "colpack/core/types.hpp"

namespace colpack::packing {

// order()[k] is the old index placed at new position k.
class RowPermutation {
 public:
  RowPermutation() = default;
  // Throws InvariantError unless `order` is a bijection on {0..n-1}.
  explicit RowPermutation(std::vector<std::size_t> order);

  static RowPermutation identity(std::size_t n);

  std::size_t size() const noexcept { return order_.size(); }
  const std::vector<std::size_t>& order() const noexcept { return order_; }
  std::size_t operator[](std::size_t k) const { return order_[k]; }

  RowPermutation inverse() const;
  bool is_identity() const;

  friend bool operator==(const RowPermutation&, const RowPermutation&) = default;

 private:
  std::vector<std::size_t> order_;
};

// Lists group 0's columns first (in group order), then group 1's, and so on.
RowPermutation row_permutation(const ColumnGrouping& next_groups);

template <typename T>
Matrix<T> permute_rows(const Matrix<T>& m, const RowPermutation& perm) {
  if (perm.size() != m.rows()) throw InvariantError("permute_rows: size mismatch");
  Matrix<T> out(m.rows(), m.cols());
  for (std::size_t k = 0; k < m.rows(); ++k) {
    auto src = m.row(perm[k]);
    std::copy(src.begin(), src.end(), out.row(k).begin());
  }
  return out;
}

template <typename T>
Matrix<T> permute_cols(const Matrix<T>& m, const RowPermutation& perm) {
  if (perm.size() != m.cols()) throw InvariantError("permute_cols: size mismatch");
  Matrix<T> out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t k = 0; k < m.cols(); ++k) out(r, k) = m(r, perm[k]);
  }
  return out;
}

template <typename T>
std::vector<T> permute_sequence(std::span<const T> values, const RowPermutation& perm) {
  if (perm.size() != values.size()) throw InvariantError("permute_sequence: size mismatch");
  std::vector<T> out(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) out[k] = values[perm[k]];
  return out;
}

// Renames every column c to its new position under `perm`.
ColumnGrouping relabel(const ColumnGrouping& groups, const RowPermutation& perm);

// For every layer l with a packed successor, permutes layer l's rows by the
// successor's grouping and renumbers the successor's columns, shifts and
// grouping to match. The final layer's row order is left untouched, so the
// network computes the same outputs in the same order.
NetworkDef apply_row_permutations(const NetworkDef& net);

}  // namespace colpack::packing
