#include "colpack/packing/pack.hpp"

#include "colpack/core/error.hpp"
#include "colpack/packing/prune.hpp"

namespace colpack::packing {

PackedFilterMatrix pack(const SparseFilterMatrix& pruned, const ColumnGrouping& groups) {
  groups.validate_partition(pruned.cols());
  PackedFilterMatrix packed(pruned.rows(), groups);
  for (std::size_t h = 0; h < groups.size(); ++h) {
    for (std::size_t c : groups[h]) {
      for (std::size_t n = 0; n < pruned.rows(); ++n) {
        const std::int8_t w = pruned(n, c);
        if (w != 0) packed.place(n, h, w, c);
      }
    }
  }
  return packed;
}

PackedFilterMatrix combine_columns(const SparseFilterMatrix& f, const ColumnGrouping& groups) {
  return pack(group_prune(f, groups), groups);
}

SparseFilterMatrix unpack(const PackedFilterMatrix& packed) {
  SparseFilterMatrix out(packed.rows(), packed.source_cols());
  for (std::size_t n = 0; n < packed.rows(); ++n) {
    for (std::size_t h = 0; h < packed.packed_cols(); ++h) {
      if (const auto& cell = packed.cell(n, h)) out(n, cell->source_col) = cell->weight;
    }
  }
  return out;
}

double packing_efficiency(const PackedFilterMatrix& packed) {
  if (packed.packed_cols() < 1 || packed.rows() < 1) {
    throw InvariantError("packing_efficiency: packed matrix has no cells");
  }
  return static_cast<double>(packed.nnz()) /
         static_cast<double>(packed.rows() * packed.packed_cols());
}

}  // namespace colpack::packing
