// golden.hpp - plain integer reference models (no systolic timing).
#pragma once

#include "colpack/core/network.hpp"
#include "colpack/core/tensor.hpp"
#include "colpack/sim/array.hpp"

namespace colpack::sim {

AccMatrix reference_matmul(const SparseFilterMatrix& weights, const DataMatrix& data);

struct ReferenceLayer {
  AccMatrix accumulators;
  Int8Tensor output;
};

ReferenceLayer reference_layer(const LayerDef& layer, const Int8Tensor& input);

// Runs every layer; returns the last layer's pre-ReLU accumulators and output.
ReferenceLayer reference_network(const NetworkDef& net, const Int8Tensor& input);

}  // namespace colpack::sim
