// types.hpp - column groupings, packed filter matrices and the parameter
// records shared by the packing, training and simulator modules.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "colpack/core/matrix.hpp"

namespace colpack {

// Ordered partition of a filter matrix's columns into combinable groups.
class ColumnGrouping {
 public:
  using Group = std::vector<std::size_t>;

  ColumnGrouping() = default;
  explicit ColumnGrouping(std::vector<Group> groups)
      : groups_(std::move(groups)) {}

  // One singleton group per column; the alpha = 1 grouping.
  static ColumnGrouping identity(std::size_t cols);

  const std::vector<Group>& groups() const noexcept { return groups_; }
  const Group& operator[](std::size_t h) const { return groups_[h]; }
  std::size_t size() const noexcept { return groups_.size(); }
  bool empty() const noexcept { return groups_.empty(); }

  // Total number of column indices across all groups.
  std::size_t column_count() const;
  std::size_t max_group_size() const;

  // Throws InvariantError unless the groups partition {0..cols-1} exactly.
  void validate_partition(std::size_t cols) const;

  // Throws InvariantError if any group holds more than alpha columns.
  void validate_sizes(std::size_t alpha) const;

  // group_of()[c] is the index of the group holding column c.
  std::vector<std::size_t> group_of(std::size_t cols) const;

  // True when every group is a run of consecutive ascending column indices.
  bool contiguous() const;

  friend bool operator==(const ColumnGrouping&, const ColumnGrouping&) = default;

 private:
  std::vector<Group> groups_;
};

struct PackedCell {
  std::int8_t weight = 0;
  std::uint32_t source_col = 0;    // column index in the unpacked matrix
  std::uint32_t channel_slot = 0;  // position of source_col within its group

  friend bool operator==(const PackedCell&, const PackedCell&) = default;
};

// N x G matrix of combined columns; each cell is empty or carries the single
// surviving weight of its row within that group.
class PackedFilterMatrix {
 public:
  PackedFilterMatrix() = default;
  PackedFilterMatrix(std::size_t rows, ColumnGrouping grouping);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t packed_cols() const noexcept { return grouping_.size(); }
  std::size_t source_cols() const { return grouping_.column_count(); }
  const ColumnGrouping& grouping() const noexcept { return grouping_; }

  const std::optional<PackedCell>& cell(std::size_t n, std::size_t h) const {
    return cells_[n * grouping_.size() + h];
  }

  // Stores a weight; throws InvariantError if the cell is already occupied or
  // the source column does not belong to group h.
  void place(std::size_t n, std::size_t h, std::int8_t weight,
             std::size_t source_col);

  std::size_t nnz() const;

  friend bool operator==(const PackedFilterMatrix&,
                         const PackedFilterMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  ColumnGrouping grouping_;
  std::vector<std::optional<PackedCell>> cells_;
};

struct PackingParams {
  std::size_t alpha = 8;  // max columns per group
  double beta = 20.0;     // initial pruning percentage
  double gamma = 0.5;     // average conflicts allowed per row per group
  std::size_t rho = 1;    // target nonzero count

  void validate() const;
};

struct QuantParams {
  int input_bits = 8;
  int weight_bits = 8;
  int acc_bits = 32;  // k
  int out_shift = 0;  // power-of-two requantization shift

  void validate() const;
  friend bool operator==(const QuantParams&, const QuantParams&) = default;
};

}  // namespace colpack
