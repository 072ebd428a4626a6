#include "colpack/training/sgd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "colpack/core/error.hpp"
#include "colpack/core/shift.hpp"

namespace colpack::training {

void TrainConfig::validate() const {
  if (!(eta > 0.0)) throw ConfigError("train: eta must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("train: momentum must lie in [0, 1)");
  if (!(lr_floor_fraction > 0.0 && lr_floor_fraction <= 1.0)) {
    throw ConfigError("train: lr_floor_fraction must lie in (0, 1]");
  }
  if (!(beta_decay > 0.0 && beta_decay < 1.0)) {
    throw ConfigError("train: beta_decay must lie in (0, 1)");
  }
  if (batch_size == 0) throw ConfigError("train: batch_size must be >= 1");
}

double cosine_lr(double start, double end, std::size_t step, std::size_t steps) {
  if (steps == 0) return start;
  const double pi = std::acos(-1.0);
  const double t = static_cast<double>(std::min(step, steps)) / static_cast<double>(steps);
  return end + (start - end) * 0.5 * (1.0 + std::cos(pi * t));
}

namespace {

struct Workspace {
  std::vector<std::vector<float>> shifted;  // per layer: M x P input after shift
  std::vector<std::vector<float>> pre;      // per layer: N x P pre-activation
};

// Forward pass keeping what the backward pass needs; returns the loss.
double forward(const FloatNet& net, const Sample& s, Workspace& ws, std::vector<float>& probs) {
  const std::size_t P = net.height * net.width;
  const std::size_t L = net.layers.size();
  ws.shifted.resize(L);
  ws.pre.resize(L);
  std::vector<float> act = input_activations(s);
  for (std::size_t l = 0; l < L; ++l) {
    const FloatLayer& layer = net.layers[l];
    const std::size_t M = layer.weights.cols();
    const std::size_t N = layer.weights.rows();
    ws.shifted[l] = shift_maps<float>(act, M, net.height, net.width, layer.shifts);
    std::vector<float>& z = ws.pre[l];
    z.assign(N * P, 0.0f);
    for (std::size_t n = 0; n < N; ++n) {
      float* zn = z.data() + n * P;
      for (std::size_t m = 0; m < M; ++m) {
        const float w = layer.weights(n, m);
        if (w == 0.0f) continue;
        const float* sm = ws.shifted[l].data() + m * P;
        for (std::size_t p = 0; p < P; ++p) zn[p] += w * sm[p];
      }
    }
    act = z;
    if (l + 1 < L) {
      for (float& v : act) v = std::max(v, 0.0f);
    }
  }
  const std::size_t K = net.num_classes();
  probs.assign(K, 0.0f);
  for (std::size_t k = 0; k < K; ++k) {
    double sum = 0.0;
    for (std::size_t p = 0; p < P; ++p) sum += act[k * P + p];
    probs[k] = static_cast<float>(sum / static_cast<double>(P));
  }
  const float mx = *std::max_element(probs.begin(), probs.end());
  double denom = 0.0;
  for (float& v : probs) {
    v = std::exp(v - mx);
    denom += v;
  }
  for (float& v : probs) v = static_cast<float>(v / denom);
  return -std::log(std::max(static_cast<double>(probs[s.label]), 1e-30));
}

void backward(const FloatNet& net, const Sample& s, const Workspace& ws,
              const std::vector<float>& probs, std::vector<FloatMatrix>& grads) {
  const std::size_t P = net.height * net.width;
  const std::size_t L = net.layers.size();
  const std::size_t K = net.num_classes();
  std::vector<float> dz(K * P);
  for (std::size_t k = 0; k < K; ++k) {
    const float g = (probs[k] - (k == s.label ? 1.0f : 0.0f)) / static_cast<float>(P);
    std::fill_n(dz.begin() + static_cast<std::ptrdiff_t>(k * P), P, g);
  }
  for (std::size_t l = L; l-- > 0;) {
    const FloatLayer& layer = net.layers[l];
    const std::size_t M = layer.weights.cols();
    const std::size_t N = layer.weights.rows();
    const std::vector<float>& sh = ws.shifted[l];
    FloatMatrix& g = grads[l];
    for (std::size_t n = 0; n < N; ++n) {
      const float* dzn = dz.data() + n * P;
      for (std::size_t m = 0; m < M; ++m) {
        if (layer.mask(n, m)) continue;
        const float* sm = sh.data() + m * P;
        float acc = 0.0f;
        for (std::size_t p = 0; p < P; ++p) acc += dzn[p] * sm[p];
        g(n, m) += acc;
      }
    }
    if (l == 0) break;
    std::vector<float> ds(M * P, 0.0f);
    for (std::size_t n = 0; n < N; ++n) {
      const float* dzn = dz.data() + n * P;
      for (std::size_t m = 0; m < M; ++m) {
        const float w = layer.weights(n, m);
        if (w == 0.0f) continue;
        float* dsm = ds.data() + m * P;
        for (std::size_t p = 0; p < P; ++p) dsm[p] += w * dzn[p];
      }
    }
    // The adjoint of a shift is the opposite shift.
    std::vector<std::uint8_t> back(layer.shifts.size());
    for (std::size_t m = 0; m < back.size(); ++m) back[m] = opposite_shift(layer.shifts[m]);
    dz = shift_maps<float>(ds, M, net.height, net.width, back);
    const std::vector<float>& z_prev = ws.pre[l - 1];
    for (std::size_t i = 0; i < dz.size(); ++i) {
      if (z_prev[i] <= 0.0f) dz[i] = 0.0f;
    }
  }
}

}  // namespace

void sgd_retrain(FloatNet& net, const Dataset& data, const RetrainRequest& request,
                 const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  if (request.epochs == 0) return;
  if (data.samples.empty()) throw ConfigError("sgd_retrain: empty dataset");
  if (data.pixels_per_sample() != net.input_channels() * net.height * net.width) {
    throw ConfigError("sgd_retrain: dataset images do not match the network input");
  }
  for (FloatLayer& layer : net.layers) layer.apply_mask();

  std::vector<FloatMatrix> velocity;
  std::vector<FloatMatrix> grads;
  for (const FloatLayer& layer : net.layers) {
    velocity.emplace_back(layer.weights.rows(), layer.weights.cols());
    grads.emplace_back(layer.weights.rows(), layer.weights.cols());
  }
  std::vector<std::size_t> order(data.samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(request.seed);
  const std::size_t B = cfg.batch_size;
  const std::size_t batches = (order.size() + B - 1) / B;
  const std::size_t steps = batches * request.epochs;
  const auto mu = static_cast<float>(cfg.momentum);
  Workspace ws;
  std::vector<float> probs;
  std::size_t step = 0;

  for (std::size_t epoch = 0; epoch < request.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t b = 0; b < batches; ++b, ++step) {
      for (FloatMatrix& g : grads) std::fill(g.values().begin(), g.values().end(), 0.0f);
      const std::size_t lo = b * B;
      const std::size_t hi = std::min(order.size(), lo + B);
      double loss = 0.0;
      for (std::size_t i = lo; i < hi; ++i) {
        const Sample& s = data.samples[order[i]];
        loss += forward(net, s, ws, probs);
        backward(net, s, ws, probs, grads);
      }
      if (!std::isfinite(loss)) throw InvariantError("sgd_retrain: training diverged (loss not finite)");
      const auto lr = static_cast<float>(cosine_lr(request.lr_start, request.lr_end, step, steps));
      const float scale = 1.0f / static_cast<float>(hi - lo);
      for (std::size_t l = 0; l < net.layers.size(); ++l) {
        FloatLayer& layer = net.layers[l];
        auto w = layer.weights.values();
        auto v = velocity[l].values();
        const auto g = grads[l].values();
        const auto mask = layer.mask.values();
        for (std::size_t i = 0; i < w.size(); ++i) {
          if (mask[i]) {
            w[i] = 0.0f;
            v[i] = 0.0f;
            continue;
          }
          const float gi = g[i] * scale;
          v[i] = mu * v[i] + gi;
          w[i] -= lr * (gi + mu * v[i]);
          if (!std::isfinite(w[i])) throw InvariantError("sgd_retrain: training diverged");
        }
      }
    }
    if (on_epoch) on_epoch(net, epoch);
  }
}

double loss_and_gradient(const FloatNet& net, const Dataset& data, std::vector<FloatMatrix>& grads) {
  if (data.samples.empty()) throw ConfigError("loss_and_gradient: empty dataset");
  grads.clear();
  for (const FloatLayer& layer : net.layers) grads.emplace_back(layer.weights.rows(), layer.weights.cols());
  Workspace ws;
  std::vector<float> probs;
  double loss = 0.0;
  for (const Sample& s : data.samples) {
    loss += forward(net, s, ws, probs);
    backward(net, s, ws, probs, grads);
  }
  const auto n = static_cast<float>(data.samples.size());
  for (FloatMatrix& g : grads) {
    for (float& v : g.values()) v /= n;
  }
  return loss / static_cast<double>(data.samples.size());
}

Retrainer sgd_retrainer(const TrainConfig& cfg) {
  return [cfg](FloatNet& net, const Dataset& data, const RetrainRequest& request,
               const EpochCallback& on_epoch) { sgd_retrain(net, data, request, cfg, on_epoch); };
}

}  // namespace colpack::training
