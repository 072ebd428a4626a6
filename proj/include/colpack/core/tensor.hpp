// tensor.hpp - small int8 tensor used for input/output feature maps.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

namespace colpack {

struct Int8Tensor {
  std::vector<std::uint32_t> shape;
  std::vector<std::int8_t> data;

  std::size_t element_count() const {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           std::multiplies<>());
  }

  friend bool operator==(const Int8Tensor&, const Int8Tensor&) = default;
};

}  // namespace colpack
