// prune.hpp - column-combine pruning.
#pragma once

#include "colpack/core/matrix.hpp"
#include "colpack/core/types.hpp"

namespace colpack::packing {

// Within every group and row keeps only the first entry (in group column
// order) whose magnitude equals the row's maximum in that group; all other
// entries of the row/group become zero.
template <typename T>
Matrix<T> group_prune(const Matrix<T>& f, const ColumnGrouping& groups);

// Total weights group_prune would remove: sum of per-group conflict counts.
template <typename T>
std::size_t total_conflicts(const Matrix<T>& f, const ColumnGrouping& groups);

}  // namespace colpack::packing
