#include "colpack/packing/prune.hpp"

#include <cstdint>

#include "colpack/core/column_ops.hpp"

namespace colpack::packing {

template <typename T>
Matrix<T> group_prune(const Matrix<T>& f, const ColumnGrouping& groups) {
  groups.validate_partition(f.cols());
  Matrix<T> out = f;
  for (const auto& group : groups.groups()) {
    for (std::size_t r = 0; r < out.rows(); ++r) {
      auto row = out.row(r);
      decltype(magnitude(T{})) largest{};
      for (std::size_t c : group) largest = std::max(largest, magnitude(row[c]));
      bool found = false;
      for (std::size_t c : group) {
        if (found || magnitude(row[c]) < largest) {
          row[c] = T{};
        } else {
          found = true;
        }
      }
    }
  }
  return out;
}

template <typename T>
std::size_t total_conflicts(const Matrix<T>& f, const ColumnGrouping& groups) {
  std::size_t total = 0;
  for (const auto& group : groups.groups()) total += count_conflicts(f, std::span(group));
  return total;
}

template Matrix<std::int8_t> group_prune(const Matrix<std::int8_t>&, const ColumnGrouping&);
template Matrix<float> group_prune(const Matrix<float>&, const ColumnGrouping&);
template std::size_t total_conflicts(const Matrix<std::int8_t>&, const ColumnGrouping&);
template std::size_t total_conflicts(const Matrix<float>&, const ColumnGrouping&);

}  // namespace colpack::packing
