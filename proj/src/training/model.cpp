#include "colpack/training/model.hpp"

#include <algorithm>
#include <cmath>

#include "colpack/core/error.hpp"
#include "colpack/core/shift.hpp"

namespace colpack::training {

void FloatLayer::apply_mask() {
  auto w = weights.values();
  const auto m = mask.values();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (m[i]) w[i] = 0.0f;
  }
}

void FloatLayer::mask_zeros() {
  const auto w = weights.values();
  auto m = mask.values();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0.0f) m[i] = 1;
  }
}

std::size_t FloatNet::nnz() const {
  std::size_t total = 0;
  for (const FloatLayer& l : layers) total += l.nnz();
  return total;
}

FloatNet make_float_net(const std::vector<std::size_t>& widths, std::size_t height,
                        std::size_t width, std::uint64_t seed) {
  if (widths.size() < 2) throw ConfigError("network needs at least one layer");
  if (std::any_of(widths.begin(), widths.end(), [](std::size_t w) { return w == 0; })) {
    throw ConfigError("network channel widths must be >= 1");
  }
  std::mt19937_64 rng(seed);
  FloatNet net;
  net.height = height;
  net.width = width;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    FloatLayer layer;
    layer.weights = FloatMatrix(widths[l + 1], widths[l]);
    layer.mask = MaskMatrix(widths[l + 1], widths[l]);
    std::normal_distribution<float> dist(0.0f, std::sqrt(2.0f / static_cast<float>(widths[l])));
    for (float& w : layer.weights.values()) {
      do {
        w = dist(rng);
      } while (w == 0.0f);
    }
    layer.shifts = round_robin_shifts(widths[l]);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

std::vector<float> input_activations(const Sample& s) {
  std::vector<float> x(s.pixels.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = static_cast<float>(s.pixels[i] >> 1) / 128.0f;
  }
  return x;
}

std::vector<float> logits(const FloatNet& net, const Sample& s) {
  const std::size_t P = net.height * net.width;
  std::vector<float> act = input_activations(s);
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const FloatLayer& layer = net.layers[l];
    const std::size_t M = layer.weights.cols();
    const std::size_t N = layer.weights.rows();
    const std::vector<float> shifted =
        shift_maps<float>(act, M, net.height, net.width, layer.shifts);
    std::vector<float> z(N * P, 0.0f);
    for (std::size_t n = 0; n < N; ++n) {
      float* zn = z.data() + n * P;
      for (std::size_t m = 0; m < M; ++m) {
        const float w = layer.weights(n, m);
        if (w == 0.0f) continue;
        const float* sm = shifted.data() + m * P;
        for (std::size_t p = 0; p < P; ++p) zn[p] += w * sm[p];
      }
    }
    if (l + 1 < net.layers.size()) {
      for (float& v : z) v = std::max(v, 0.0f);
    }
    act = std::move(z);
  }
  const std::size_t K = net.num_classes();
  std::vector<float> out(K, 0.0f);
  for (std::size_t k = 0; k < K; ++k) {
    float sum = 0.0f;
    for (std::size_t p = 0; p < P; ++p) sum += act[k * P + p];
    out[k] = sum / static_cast<float>(P);
  }
  return out;
}

std::size_t predict(const FloatNet& net, const Sample& s) {
  const auto z = logits(net, s);
  return static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
}

double accuracy(const FloatNet& net, const Dataset& data) {
  if (data.samples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const Sample& s : data.samples) correct += predict(net, s) == s.label ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(data.samples.size());
}

}  // namespace colpack::training
