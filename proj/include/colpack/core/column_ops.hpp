// column_ops.hpp - density and conflict counts of a candidate column group.
#pragma once

#include <cstddef>
#include <span>
#include <sstream>

#include "colpack/core/matrix.hpp"

namespace colpack {

namespace detail {

template <typename T>
void check_columns(const Matrix<T>& f, std::span<const std::size_t> cols) {
  if (cols.empty()) throw InvariantError("malformed grouping: empty column set");
  for (std::size_t c : cols) {
    if (c >= f.cols()) {
      std::ostringstream msg;
      msg << "malformed grouping: column " << c << " outside matrix with "
          << f.cols() << " columns";
      throw InvariantError(msg.str());
    }
  }
}

template <typename T>
std::size_t row_hits(const Matrix<T>& f, std::size_t r,
                     std::span<const std::size_t> cols) {
  std::size_t hits = 0;
  for (std::size_t c : cols) hits += f(r, c) != T{} ? 1 : 0;
  return hits;
}

}  // namespace detail

// Fraction of rows with at least one nonzero among `cols`: the density the
// combined column would have.
template <typename T>
double density(const Matrix<T>& f, std::span<const std::size_t> cols) {
  detail::check_columns(f, cols);
  std::size_t covered = 0;
  for (std::size_t r = 0; r < f.rows(); ++r) {
    if (detail::row_hits(f, r, cols) > 0) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(f.rows());
}

// Number of weights column-combine pruning would remove from this group.
template <typename T>
std::size_t count_conflicts(const Matrix<T>& f,
                            std::span<const std::size_t> cols) {
  detail::check_columns(f, cols);
  std::size_t conflicts = 0;
  for (std::size_t r = 0; r < f.rows(); ++r) {
    const std::size_t hits = detail::row_hits(f, r, cols);
    if (hits > 1) conflicts += hits - 1;
  }
  return conflicts;
}

}  // namespace colpack
