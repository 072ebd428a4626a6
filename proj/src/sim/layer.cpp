#include "colpack/sim/layer.hpp"

#include <algorithm>
#include <sstream>

#include "colpack/core/error.hpp"
#include "colpack/core/quant.hpp"
#include "colpack/core/shift.hpp"
#include "colpack/packing/pack.hpp"

namespace colpack::sim {

namespace {

void require_maps(const Int8Tensor& maps) {
  if (maps.shape.size() != 3) throw ConfigError("feature maps must have rank 3 {C, H, W}");
  if (maps.data.size() != maps.element_count()) {
    throw InvariantError("feature map data does not match its shape");
  }
}

}  // namespace

Int8Tensor shift_apply(const Int8Tensor& maps, std::span<const std::uint8_t> directions) {
  require_maps(maps);
  Int8Tensor out;
  out.shape = maps.shape;
  out.data = shift_maps<std::int8_t>(maps.data, maps.shape[0], maps.shape[1], maps.shape[2],
                                     directions);
  return out;
}

std::int8_t relu_quant(std::int64_t acc, const QuantParams& q) {
  if (acc < 0) return 0;
  return static_cast<std::int8_t>(std::min<std::int64_t>(round_shift(acc, q.out_shift), 127));
}

std::vector<std::int8_t> relu_quant(std::span<const std::int64_t> acc, const QuantParams& q) {
  std::vector<std::int8_t> out(acc.size());
  std::transform(acc.begin(), acc.end(), out.begin(),
                 [&](std::int64_t v) { return relu_quant(v, q); });
  return out;
}

DataMatrix maps_to_data(const Int8Tensor& maps) {
  require_maps(maps);
  const std::size_t plane = static_cast<std::size_t>(maps.shape[1]) * maps.shape[2];
  return DataMatrix(maps.shape[0], plane, maps.data);
}

Int8Tensor data_to_maps(std::span<const std::int8_t> values, std::size_t channels,
                        std::size_t height, std::size_t width) {
  if (values.size() != channels * height * width) {
    throw InvariantError("data_to_maps: size mismatch");
  }
  return Int8Tensor{{static_cast<std::uint32_t>(channels), static_cast<std::uint32_t>(height),
                     static_cast<std::uint32_t>(width)},
                    std::vector<std::int8_t>(values.begin(), values.end())};
}

ArrayConfig layer_array_config(const LayerDef& layer, std::size_t rows, std::size_t cols) {
  if (layer.grouping) {
    const auto width = static_cast<int>(std::max<std::size_t>(1, layer.grouping->max_group_size()));
    return ArrayConfig{rows, cols, CellConfig::multiplexed(layer.quant.acc_bits, width)};
  }
  return ArrayConfig{rows, cols, CellConfig::interleaved(layer.quant.acc_bits)};
}

LayerRun run_layer(const LayerDef& layer, const Int8Tensor& input, const ArrayConfig& cfg) {
  require_maps(input);
  layer.quant.validate();
  if (input.shape[0] != layer.input_channels() || input.shape[1] != layer.height ||
      input.shape[2] != layer.width) {
    std::ostringstream msg;
    msg << "run_layer: input maps {" << input.shape[0] << ", " << input.shape[1] << ", "
        << input.shape[2] << "} do not match layer {" << layer.input_channels() << ", "
        << layer.height << ", " << layer.width << "}";
    throw ConfigError(msg.str());
  }
  if (cfg.cell.acc_bits != layer.quant.acc_bits && cfg.cell.kind != CellKind::kBalanced) {
    throw ConfigError("run_layer: array accumulation width differs from the layer's acc_bits");
  }

  const DataMatrix data = maps_to_data(shift_apply(input, layer.shifts));
  LayerRun result;
  if (layer.grouping) {
    result.run = run_tiled(packing::pack(layer.weights, *layer.grouping), data, cfg);
  } else {
    result.run = run_tiled(layer.weights, data, cfg);
  }
  if (result.run.overflow) {
    throw InvariantError("run_layer: accumulator overflow, acc_bits too small for this layer");
  }
  result.accumulators = result.run.output;

  // ReLU + quantization happen once a row tile's final column tile finished;
  // with the side buffer that is the accumulated value for every row.
  std::vector<std::int8_t> out = relu_quant(result.accumulators.values(), layer.quant);
  result.output = data_to_maps(out, layer.output_channels(), layer.height, layer.width);
  return result;
}

}  // namespace colpack::sim
