// export.hpp - float network -> 8-bit NetworkDef, quantized evaluation and
// checkpoints.
#pragma once

#include <filesystem>

#include "colpack/core/network.hpp"
#include "colpack/core/tensor.hpp"
#include "colpack/training/dataset.hpp"
#include "colpack/training/iterative.hpp"
#include "colpack/training/model.hpp"

namespace colpack::training {

struct ExportConfig {
  int acc_bits = 32;
  std::size_t calibration_samples = 64;  // taken from the front of the set
};

// Per-layer weight scale max|w| / 127 with rounding; surviving weights that
// would round to zero become +/-1 so the sparsity pattern (and any grouping)
// carries over exactly. out_shift per layer is the smallest power-of-two
// shift bringing the largest |accumulator| over the calibration samples into
// 8 bits.
NetworkDef export_network(const FloatNet& net, const Dataset& calibration,
                          const ExportConfig& cfg = {});

// Network input maps for a sample: pixel >> 1 as int8, {C, H, W}.
Int8Tensor input_tensor(const Dataset& data, const Sample& s);

// Classifies with the integer reference: last-layer accumulators summed over
// pixels, argmax.
std::size_t quantized_predict(const NetworkDef& net, const Int8Tensor& input);
double quantized_accuracy(const NetworkDef& net, const Dataset& data);

// <dir>/network.json + per-layer SFM1 weights, <dir>/layer<i>.mask,
// <dir>/history.csv.
void save_checkpoint(const std::filesystem::path& dir, const NetworkDef& net, const FloatNet& fnet,
                     const TrainHistory& history);

}  // namespace colpack::training
