#include "colpack/sim/golden.hpp"

#include "colpack/core/error.hpp"
#include "colpack/sim/layer.hpp"

namespace colpack::sim {

AccMatrix reference_matmul(const SparseFilterMatrix& weights, const DataMatrix& data) {
  if (weights.cols() != data.rows()) throw ConfigError("reference_matmul: shape mismatch");
  AccMatrix out(weights.rows(), data.cols());
  for (std::size_t n = 0; n < weights.rows(); ++n) {
    for (std::size_t m = 0; m < weights.cols(); ++m) {
      const std::int64_t w = weights(n, m);
      if (w == 0) continue;
      for (std::size_t d = 0; d < data.cols(); ++d) out(n, d) += w * data(m, d);
    }
  }
  return out;
}

ReferenceLayer reference_layer(const LayerDef& layer, const Int8Tensor& input) {
  const DataMatrix data = maps_to_data(shift_apply(input, layer.shifts));
  ReferenceLayer r;
  r.accumulators = reference_matmul(layer.weights, data);
  r.output = data_to_maps(relu_quant(r.accumulators.values(), layer.quant),
                          layer.output_channels(), layer.height, layer.width);
  return r;
}

ReferenceLayer reference_network(const NetworkDef& net, const Int8Tensor& input) {
  require_valid(net);
  ReferenceLayer r{AccMatrix{}, input};
  for (const LayerDef& layer : net.layers) r = reference_layer(layer, r.output);
  return r;
}

}  // namespace colpack::sim
