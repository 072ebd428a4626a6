// layer.hpp - shift block, ReLU/requantization block and a full layer pass
// through the tiled systolic array.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "colpack/core/network.hpp"
#include "colpack/core/tensor.hpp"
#include "colpack/sim/array.hpp"
#include "colpack/sim/tiling.hpp"

namespace colpack::sim {

// maps has shape {channels, height, width}.
Int8Tensor shift_apply(const Int8Tensor& maps, std::span<const std::uint8_t> directions);

// Negative -> 0; otherwise right shift with round-half-away-from-zero,
// saturated to [0, 127].
std::int8_t relu_quant(std::int64_t acc, const QuantParams& q);
std::vector<std::int8_t> relu_quant(std::span<const std::int64_t> acc, const QuantParams& q);

// {channels, height, width} maps -> channels x (height*width) data matrix.
DataMatrix maps_to_data(const Int8Tensor& maps);
Int8Tensor data_to_maps(std::span<const std::int8_t> values, std::size_t channels,
                        std::size_t height, std::size_t width);

struct LayerRun {
  Int8Tensor output;     // {rows, height, width}
  AccMatrix accumulators;
  TiledRun run;
};

// Shift, tiled systolic matmul (MX cells when the layer carries a grouping),
// then ReLU + requantization after each row tile's final column tile.
LayerRun run_layer(const LayerDef& layer, const Int8Tensor& input, const ArrayConfig& cfg);

// Array configuration matching a layer: MX cells when packed, IL otherwise.
ArrayConfig layer_array_config(const LayerDef& layer, std::size_t rows, std::size_t cols);

}  // namespace colpack::sim
