// prune.hpp - magnitude pruning.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "colpack/core/error.hpp"
#include "colpack/core/matrix.hpp"

namespace colpack::training {

// Number of weights magnitude_prune removes from `nnz` nonzeros.
inline std::size_t prune_count(std::size_t nnz, double beta) {
  if (!(beta >= 0.0 && beta < 100.0)) throw ConfigError("prune: beta must lie in [0, 100)");
  return static_cast<std::size_t>(std::floor(beta / 100.0 * static_cast<double>(nnz)));
}

// Zeroes the floor(beta/100 * nnz) smallest-magnitude nonzeros; equal
// magnitudes are taken in row-major order.
template <typename T>
Matrix<T> magnitude_prune(const Matrix<T>& f, double beta) {
  using Mag = decltype(magnitude(T{}));
  std::vector<std::pair<Mag, std::size_t>> order;
  const auto values = f.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != T{}) order.emplace_back(magnitude(values[i]), i);
  }
  const std::size_t count = prune_count(order.size(), beta);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count),
                    order.end());
  Matrix<T> out = f;
  for (std::size_t k = 0; k < count; ++k) out.values()[order[k].second] = T{};
  return out;
}

}  // namespace colpack::training
