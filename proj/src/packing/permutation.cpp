#include "colpack/packing/permutation.hpp"

#include <sstream>

#include "colpack/core/error.hpp"

namespace colpack::packing {

RowPermutation::RowPermutation(std::vector<std::size_t> order) : order_(std::move(order)) {
  std::vector<char> seen(order_.size(), 0);
  for (std::size_t v : order_) {
    if (v >= order_.size() || seen[v]) {
      throw InvariantError("row permutation is not a bijection");
    }
    seen[v] = 1;
  }
}

RowPermutation RowPermutation::identity(std::size_t n) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  return RowPermutation(std::move(order));
}

RowPermutation RowPermutation::inverse() const {
  std::vector<std::size_t> inv(order_.size());
  for (std::size_t k = 0; k < order_.size(); ++k) inv[order_[k]] = k;
  return RowPermutation(std::move(inv));
}

bool RowPermutation::is_identity() const {
  for (std::size_t k = 0; k < order_.size(); ++k) {
    if (order_[k] != k) return false;
  }
  return true;
}

RowPermutation row_permutation(const ColumnGrouping& next_groups) {
  const std::size_t n = next_groups.column_count();
  next_groups.validate_partition(n);
  std::vector<std::size_t> order;
  order.reserve(n);
  for (const auto& g : next_groups.groups()) order.insert(order.end(), g.begin(), g.end());
  return RowPermutation(std::move(order));
}

ColumnGrouping relabel(const ColumnGrouping& groups, const RowPermutation& perm) {
  const RowPermutation inv = perm.inverse();
  std::vector<ColumnGrouping::Group> out;
  out.reserve(groups.size());
  for (const auto& g : groups.groups()) {
    ColumnGrouping::Group renamed;
    renamed.reserve(g.size());
    for (std::size_t c : g) {
      if (c >= inv.size()) throw InvariantError("relabel: column outside permutation");
      renamed.push_back(inv[c]);
    }
    out.push_back(std::move(renamed));
  }
  return ColumnGrouping(std::move(out));
}

NetworkDef apply_row_permutations(const NetworkDef& net) {
  require_valid(net);
  NetworkDef out = net;
  for (std::size_t l = 0; l + 1 < out.layers.size(); ++l) {
    LayerDef& next = out.layers[l + 1];
    if (!next.grouping) continue;
    const RowPermutation perm = row_permutation(*next.grouping);
    out.layers[l].weights = permute_rows(out.layers[l].weights, perm);
    next.weights = permute_cols(next.weights, perm);
    next.shifts = permute_sequence(std::span<const std::uint8_t>(next.shifts), perm);
    next.grouping = relabel(*next.grouping, perm);
  }
  return out;
}

}  // namespace colpack::packing
