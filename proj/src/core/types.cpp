#include "colpack/core/types.hpp"

#include <algorithm>
#include <sstream>

#include "colpack/core/error.hpp"

namespace colpack {

ColumnGrouping ColumnGrouping::identity(std::size_t cols) {
  std::vector<Group> groups(cols);
  for (std::size_t c = 0; c < cols; ++c) groups[c] = {c};
  return ColumnGrouping(std::move(groups));
}

std::size_t ColumnGrouping::column_count() const {
  std::size_t n = 0;
  for (const auto& g : groups_) n += g.size();
  return n;
}

std::size_t ColumnGrouping::max_group_size() const {
  std::size_t n = 0;
  for (const auto& g : groups_) n = std::max(n, g.size());
  return n;
}

void ColumnGrouping::validate_partition(std::size_t cols) const {
  std::vector<char> seen(cols, 0);
  std::size_t count = 0;
  for (std::size_t h = 0; h < groups_.size(); ++h) {
    if (groups_[h].empty()) {
      std::ostringstream msg;
      msg << "grouping: group " << h << " is empty";
      throw InvariantError(msg.str());
    }
    for (std::size_t c : groups_[h]) {
      if (c >= cols) {
        std::ostringstream msg;
        msg << "grouping: column " << c << " in group " << h
            << " outside matrix with " << cols << " columns";
        throw InvariantError(msg.str());
      }
      if (seen[c]) {
        std::ostringstream msg;
        msg << "grouping: column " << c << " appears in more than one group";
        throw InvariantError(msg.str());
      }
      seen[c] = 1;
      ++count;
    }
  }
  if (count != cols) {
    std::ostringstream msg;
    msg << "grouping: covers " << count << " of " << cols << " columns";
    throw InvariantError(msg.str());
  }
}

void ColumnGrouping::validate_sizes(std::size_t alpha) const {
  for (std::size_t h = 0; h < groups_.size(); ++h) {
    if (groups_[h].size() > alpha) {
      std::ostringstream msg;
      msg << "grouping: group " << h << " holds " << groups_[h].size()
          << " columns, alpha is " << alpha;
      throw InvariantError(msg.str());
    }
  }
}

std::vector<std::size_t> ColumnGrouping::group_of(std::size_t cols) const {
  validate_partition(cols);
  std::vector<std::size_t> out(cols, 0);
  for (std::size_t h = 0; h < groups_.size(); ++h) {
    for (std::size_t c : groups_[h]) out[c] = h;
  }
  return out;
}

bool ColumnGrouping::contiguous() const {
  for (const auto& g : groups_) {
    for (std::size_t i = 1; i < g.size(); ++i) {
      if (g[i] != g[i - 1] + 1) return false;
    }
  }
  return true;
}

PackedFilterMatrix::PackedFilterMatrix(std::size_t rows, ColumnGrouping grouping)
    : rows_(rows),
      grouping_(std::move(grouping)),
      cells_(rows * grouping_.size()) {}

void PackedFilterMatrix::place(std::size_t n, std::size_t h, std::int8_t weight,
                               std::size_t source_col) {
  if (n >= rows_ || h >= grouping_.size()) {
    throw InvariantError("packed matrix: cell index out of range");
  }
  const auto& group = grouping_[h];
  const auto it = std::find(group.begin(), group.end(), source_col);
  if (it == group.end()) {
    std::ostringstream msg;
    msg << "packed matrix: column " << source_col << " is not in group " << h;
    throw InvariantError(msg.str());
  }
  auto& slot = cells_[n * grouping_.size() + h];
  if (slot.has_value()) {
    std::ostringstream msg;
    msg << "packed matrix: row " << n << " has more than one surviving weight "
        << "in group " << h << " (column-combine pruning not applied?)";
    throw InvariantError(msg.str());
  }
  slot = PackedCell{weight, static_cast<std::uint32_t>(source_col),
                    static_cast<std::uint32_t>(it - group.begin())};
}

std::size_t PackedFilterMatrix::nnz() const {
  std::size_t n = 0;
  for (const auto& c : cells_) {
    if (c.has_value() && c->weight != 0) ++n;
  }
  return n;
}

void PackingParams::validate() const {
  if (alpha < 1) throw ConfigError("alpha must be >= 1");
  if (!(beta >= 0.0 && beta < 100.0)) throw ConfigError("beta must lie in [0, 100)");
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
  if (rho < 1) throw ConfigError("rho must be >= 1");
}

void QuantParams::validate() const {
  if (input_bits != 8 || weight_bits != 8) {
    throw ConfigError("input and weight precision are fixed at 8 bits");
  }
  if (acc_bits != 16 && acc_bits != 32) {
    throw ConfigError("acc_bits must be 16 or 32");
  }
  if (out_shift < 0 || out_shift >= acc_bits) {
    throw ConfigError("out_shift must lie in [0, acc_bits)");
  }
}

}  // namespace colpack
