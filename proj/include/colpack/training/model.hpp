// model.hpp - float shift-convolution network trained by the reference
// retrainer. Layer l: shift -> pointwise matmul -> ReLU; the last layer skips
// the ReLU and its outputs are averaged over pixels into class logits.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "colpack/core/matrix.hpp"
#include "colpack/core/types.hpp"
#include "colpack/training/dataset.hpp"

namespace colpack::training {

struct FloatLayer {
  FloatMatrix weights;                // out x in
  MaskMatrix mask;                    // 1 = pruned for good
  std::vector<std::uint8_t> shifts;   // one direction per input channel
  std::optional<ColumnGrouping> grouping;

  // Surviving (unmasked) weights.
  std::size_t nnz() const { return mask.size() - mask.nnz(); }
  // Zeroes every masked weight.
  void apply_mask();
  // Marks every zero weight as pruned.
  void mask_zeros();
};

struct FloatNet {
  std::size_t height = 1;
  std::size_t width = 1;
  std::vector<FloatLayer> layers;

  std::size_t nnz() const;
  std::size_t input_channels() const { return layers.front().weights.cols(); }
  std::size_t num_classes() const { return layers.back().weights.rows(); }
};

// channel widths {c0, c1, ..., cL}: L layers, c0 input channels, cL classes.
// He-normal initialisation, round-robin shift directions.
FloatNet make_float_net(const std::vector<std::size_t>& widths, std::size_t height,
                        std::size_t width, std::uint64_t seed);

// Input scaling shared with the quantized network: x = (pixel >> 1) / 128.
std::vector<float> input_activations(const Sample& s);

std::vector<float> logits(const FloatNet& net, const Sample& s);
std::size_t predict(const FloatNet& net, const Sample& s);
// Fraction of correctly classified samples.
double accuracy(const FloatNet& net, const Dataset& data);

}  // namespace colpack::training
