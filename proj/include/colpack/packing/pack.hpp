// pack.hpp - combine pruned columns into a packed filter matrix.
#pragma once

#include "colpack/core/matrix.hpp"
#include "colpack/core/types.hpp"

namespace colpack::packing {

// Requires at most one nonzero per row per group (group_prune applied);
// throws InvariantError otherwise.
PackedFilterMatrix pack(const SparseFilterMatrix& pruned, const ColumnGrouping& groups);

// group_prune followed by pack.
PackedFilterMatrix combine_columns(const SparseFilterMatrix& f, const ColumnGrouping& groups);

// Scatters every packed cell back to its source column.
SparseFilterMatrix unpack(const PackedFilterMatrix& packed);

// Fraction of packed cells holding a nonzero weight.
double packing_efficiency(const PackedFilterMatrix& packed);

}  // namespace colpack::packing
