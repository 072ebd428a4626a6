#include "colpack/training/export.hpp"

#include <algorithm>
#include <cmath>

#include "colpack/core/error.hpp"
#include "colpack/core/io.hpp"
#include "colpack/core/quant.hpp"
#include "colpack/sim/golden.hpp"

namespace colpack::training {

Int8Tensor input_tensor(const Dataset& data, const Sample& s) {
  Int8Tensor t{{static_cast<std::uint32_t>(data.channels), static_cast<std::uint32_t>(data.height),
                static_cast<std::uint32_t>(data.width)},
               std::vector<std::int8_t>(s.pixels.size())};
  for (std::size_t i = 0; i < s.pixels.size(); ++i) {
    t.data[i] = static_cast<std::int8_t>(s.pixels[i] >> 1);
  }
  return t;
}

NetworkDef export_network(const FloatNet& net, const Dataset& calibration,
                          const ExportConfig& cfg) {
  NetworkDef out;
  for (const FloatLayer& fl : net.layers) {
    LayerDef layer;
    layer.width = net.width;
    layer.height = net.height;
    layer.shifts = fl.shifts;
    layer.quant.acc_bits = cfg.acc_bits;
    layer.grouping = fl.grouping;
    float max_abs = 0.0f;
    for (std::size_t i = 0; i < fl.weights.size(); ++i) {
      if (!fl.mask.values()[i]) max_abs = std::max(max_abs, std::abs(fl.weights.values()[i]));
    }
    const float scale = max_abs > 0.0f ? max_abs / 127.0f : 1.0f;
    layer.weights = SparseFilterMatrix(fl.weights.rows(), fl.weights.cols());
    for (std::size_t i = 0; i < fl.weights.size(); ++i) {
      if (fl.mask.values()[i]) continue;
      const float w = fl.weights.values()[i];
      long q = std::lround(w / scale);
      q = std::clamp(q, -127L, 127L);
      if (q == 0) q = w < 0.0f ? -1 : 1;
      layer.weights.values()[i] = static_cast<std::int8_t>(q);
    }
    out.layers.push_back(std::move(layer));
  }
  for (const LayerDef& l : out.layers) l.quant.validate();

  // Calibrate shifts layer by layer on the integer pipeline.
  const std::size_t n = std::min(cfg.calibration_samples, calibration.samples.size());
  if (n == 0) throw ConfigError("export_network: calibration set is empty");
  std::vector<Int8Tensor> acts;
  for (std::size_t i = 0; i < n; ++i) acts.push_back(input_tensor(calibration, calibration.samples[i]));
  for (LayerDef& layer : out.layers) {
    layer.quant.out_shift = 0;
    std::int64_t max_abs = 0;
    for (const Int8Tensor& a : acts) {
      auto r = sim::reference_layer(layer, a);
      for (std::int64_t v : r.accumulators.values()) max_abs = std::max(max_abs, v < 0 ? -v : v);
    }
    layer.quant.out_shift = smallest_out_shift(max_abs);
    for (Int8Tensor& a : acts) a = sim::reference_layer(layer, a).output;
  }
  require_valid(out);
  return out;
}

std::size_t quantized_predict(const NetworkDef& net, const Int8Tensor& input) {
  const auto r = sim::reference_network(net, input);
  const AccMatrix& acc = r.accumulators;
  std::size_t best = 0;
  std::int64_t best_sum = 0;
  for (std::size_t k = 0; k < acc.rows(); ++k) {
    std::int64_t sum = 0;
    for (std::int64_t v : acc.row(k)) sum += v;
    if (k == 0 || sum > best_sum) {
      best = k;
      best_sum = sum;
    }
  }
  return best;
}

double quantized_accuracy(const NetworkDef& net, const Dataset& data) {
  if (data.samples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const Sample& s : data.samples) {
    correct += quantized_predict(net, input_tensor(data, s)) == s.label ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(data.samples.size());
}

void save_checkpoint(const std::filesystem::path& dir, const NetworkDef& net, const FloatNet& fnet,
                     const TrainHistory& history) {
  std::filesystem::create_directories(dir);
  save_network(dir / "network.json", net);
  for (std::size_t l = 0; l < fnet.layers.size(); ++l) {
    save_mask(dir / ("layer" + std::to_string(l) + ".mask"), fnet.layers[l].mask);
  }
  write_text_file(dir / "history.csv", history_csv(history));
}

}  // namespace colpack::training
