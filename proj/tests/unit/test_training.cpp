#include <filesystem>
#include <fstream>
#include <random>

#include "colpack/core/column_ops.hpp"
#include "colpack/core/error.hpp"
#include "colpack/core/io.hpp"
#include "colpack/packing/pack.hpp"
#include "colpack/packing/prune.hpp"
#include "colpack/training/dataset.hpp"
#include "colpack/training/export.hpp"
#include "colpack/training/iterative.hpp"
#include "colpack/training/prune.hpp"
#include "colpack/training/sgd.hpp"
#include "doctest.h"
#include "support/oracles.hpp"
#include "support/random.hpp"

using namespace colpack;
using namespace colpack::training;

namespace {

// Independent IDX writer: big-endian header bytes spelled out by hand.
void put_be32(std::ofstream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                     static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(b, 4);
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("colpack_train_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

Dataset balanced(std::size_t per_class, std::size_t classes) {
  Dataset d;
  d.channels = 1;
  d.height = d.width = 1;
  d.num_classes = classes;
  for (std::size_t i = 0; i < per_class * classes; ++i) {
    d.samples.push_back(Sample{{static_cast<std::uint8_t>(i % 256)},
                               static_cast<std::uint32_t>(i % classes)});
  }
  return d;
}

// Two classes: class 0 has a bright channel 0 and dark channel 1, class 1
// the reverse; the hyperplane ch0 = ch1 separates them with a wide margin.
Dataset separable(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> hi(160, 255);
  std::uniform_int_distribution<int> lo(0, 95);
  Dataset d;
  d.channels = 2;
  d.height = d.width = 4;
  d.num_classes = 2;
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    s.label = static_cast<std::uint32_t>(i % 2);
    for (std::size_t ch = 0; ch < 2; ++ch) {
      const bool bright = (ch == 0) == (s.label == 0);
      for (int p = 0; p < 16; ++p) {
        s.pixels.push_back(static_cast<std::uint8_t>(bright ? hi(rng) : lo(rng)));
      }
    }
    d.samples.push_back(s);
  }
  return d;
}

TrainConfig quick_config() {
  TrainConfig cfg;
  cfg.epochs_per_iteration = 2;
  cfg.final_epochs = 2;
  cfg.batch_size = 16;
  return cfg;
}

}  // namespace

TEST_CASE("magnitude_prune with beta = 0 changes nothing") {
  std::mt19937_64 rng(1);
  const auto f = test::random_sparse(6, 7, 0.5, rng);
  CHECK(magnitude_prune(f, 0.0) == f);
}

TEST_CASE("magnitude_prune removes the two smallest magnitudes") {
  SparseFilterMatrix f(1, 4, std::vector<std::int8_t>{5, -1, 3, -2});
  CHECK(magnitude_prune(f, 50.0) == SparseFilterMatrix(1, 4, std::vector<std::int8_t>{5, 0, 3, 0}));
}

TEST_CASE("magnitude_prune matches a sort-based oracle") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const auto f = test::random_sparse(20, 30, 0.4, rng);
    const double beta = (trial % 5) * 20.0 + 0.5 * (trial % 3);
    const auto got = magnitude_prune(f, beta);
    CHECK(got == test::oracle_magnitude_prune(f, beta));
    CHECK(got.nnz() == f.nnz() - static_cast<std::size_t>(beta / 100.0 * static_cast<double>(f.nnz())));
  }
  FloatMatrix fm(3, 3, std::vector<float>{0.5f, -0.1f, 0.0f, 0.2f, -0.2f, 0.9f, 0.1f, 0.0f, -0.3f});
  CHECK(magnitude_prune(fm, 40.0) == test::oracle_magnitude_prune(fm, 40.0));
  CHECK_THROWS_AS(magnitude_prune(fm, 100.0), ConfigError);
}

TEST_CASE("dataset_fraction") {
  const Dataset d = balanced(100, 10);
  CHECK(dataset_fraction(d, 1.0, 3).samples.size() == 1000);
  const Dataset tenth = dataset_fraction(d, 0.1, 3);
  CHECK(tenth.samples.size() == 100);
  for (std::size_t c : tenth.class_counts()) CHECK(c == 10);
  const Dataset again = dataset_fraction(d, 0.1, 3);
  for (std::size_t i = 0; i < tenth.samples.size(); ++i) {
    CHECK(tenth.samples[i].pixels == again.samples[i].pixels);
  }
  CHECK_THROWS_AS(dataset_fraction(d, 0.001, 3), ConfigError);
  CHECK_THROWS_AS(dataset_fraction(d, 0.0, 3), ConfigError);
  CHECK_THROWS_AS(dataset_fraction(d, 1.5, 3), ConfigError);
}

TEST_CASE("load_idx reads a hand-built fixture exactly") {
  const auto dir = temp_dir("idx");
  {
    std::ofstream img(dir / "img", std::ios::binary);
    put_be32(img, 0x803);
    put_be32(img, 4);
    put_be32(img, 2);
    put_be32(img, 3);
    for (int i = 0; i < 24; ++i) img.put(static_cast<char>(i * 10));
    std::ofstream lab(dir / "lab", std::ios::binary);
    put_be32(lab, 0x801);
    put_be32(lab, 4);
    for (char c : {7, 0, 3, 9}) lab.put(c);
  }
  const Dataset d = load_idx(dir / "img", dir / "lab");
  REQUIRE(d.samples.size() == 4);
  CHECK(d.height == 2);
  CHECK(d.width == 3);
  CHECK(d.samples[1].pixels == std::vector<std::uint8_t>{60, 70, 80, 90, 100, 110});
  CHECK(d.samples[3].label == 9);
  CHECK(d.num_classes == 10);
}

TEST_CASE("load_idx rejects mismatched counts, bad magic and empty files") {
  const auto dir = temp_dir("idx_bad");
  {
    std::ofstream img(dir / "img", std::ios::binary);
    put_be32(img, 0x803);
    put_be32(img, 2);
    put_be32(img, 1);
    put_be32(img, 1);
    img.put(1);
    img.put(2);
    std::ofstream lab(dir / "lab", std::ios::binary);
    put_be32(lab, 0x801);
    put_be32(lab, 3);
    for (char c : {0, 1, 2}) lab.put(c);
    std::ofstream wrong(dir / "wrong", std::ios::binary);
    put_be32(wrong, 0x802);
    put_be32(wrong, 2);
    std::ofstream empty(dir / "empty", std::ios::binary);
  }
  CHECK_THROWS_AS(load_idx(dir / "img", dir / "lab"), DataError);
  CHECK_THROWS_AS(load_idx(dir / "img", dir / "wrong"), DataError);
  CHECK_THROWS_AS(load_idx(dir / "empty", dir / "lab"), DataError);
  CHECK_THROWS_AS(load_idx(dir / "missing", dir / "lab"), DataError);
}

TEST_CASE("synthetic task is balanced and deterministic") {
  SyntheticSpec spec;
  spec.train_per_class = 5;
  spec.test_per_class = 2;
  const auto a = make_synthetic(spec);
  const auto b = make_synthetic(spec);
  CHECK(a.train.samples.size() == 50);
  CHECK(a.test.samples.size() == 20);
  for (std::size_t c : a.train.class_counts()) CHECK(c == 5);
  CHECK(a.train.samples[7].pixels == b.train.samples[7].pixels);
  CHECK_NOTHROW(a.train.validate());
}

TEST_CASE("zero epochs leave the network unchanged") {
  FloatNet net = make_float_net({2, 4, 2}, 4, 4, 5);
  const FloatNet before = net;
  sgd_retrain(net, separable(20, 1), RetrainRequest{0, 0.1, 0.0, 1}, TrainConfig{});
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    CHECK(net.layers[l].weights == before.layers[l].weights);
  }
}

TEST_CASE("backpropagation matches finite differences") {
  FloatNet net = make_float_net({2, 5, 4, 2}, 4, 4, 9);
  net.layers[1].mask(0, 1) = 1;
  net.layers[1].apply_mask();
  const Dataset data = separable(8, 4);
  std::vector<FloatMatrix> grads;
  loss_and_gradient(net, data, grads);
  CHECK(grads[1](0, 1) == 0.0f);
  const float h = 1e-3f;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    for (std::size_t i = 0; i < net.layers[l].weights.size(); ++i) {
      if (net.layers[l].mask.values()[i]) continue;
      FloatNet plus = net;
      FloatNet minus = net;
      plus.layers[l].weights.values()[i] += h;
      minus.layers[l].weights.values()[i] -= h;
      std::vector<FloatMatrix> scratch;
      const double numeric = (loss_and_gradient(plus, data, scratch) -
                              loss_and_gradient(minus, data, scratch)) / (2.0 * h);
      CHECK(grads[l].values()[i] == doctest::Approx(numeric).epsilon(0.02).scale(1e-3));
    }
  }
}

TEST_CASE("masked weights stay exactly zero") {
  FloatNet net = make_float_net({2, 6, 2}, 4, 4, 3);
  for (std::size_t i = 0; i < net.layers[0].mask.size(); i += 2) net.layers[0].mask.values()[i] = 1;
  sgd_retrain(net, separable(64, 2), RetrainRequest{10, 0.1, 0.02, 3}, TrainConfig{});
  for (std::size_t i = 0; i < net.layers[0].mask.size(); i += 2) {
    CHECK(net.layers[0].weights.values()[i] == 0.0f);
  }
}

TEST_CASE("a linearly separable two-class set is learned in 50 epochs") {
  const Dataset data = separable(200, 6);
  FloatNet net = make_float_net({2, 8, 2}, 4, 4, 6);
  TrainConfig cfg;
  sgd_retrain(net, data, RetrainRequest{50, cfg.eta, cfg.eta * cfg.lr_floor_fraction, 6}, cfg);
  CHECK(accuracy(net, data) >= 0.95);
}

TEST_CASE("training config validation") {
  TrainConfig cfg;
  cfg.lr_floor_fraction = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = TrainConfig{};
  cfg.beta_decay = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK(cosine_lr(1.0, 0.2, 0, 10) == doctest::Approx(1.0));
  CHECK(cosine_lr(1.0, 0.2, 10, 10) == doctest::Approx(0.2));
  CHECK(cosine_lr(1.0, 0.2, 5, 10) == doctest::Approx(0.6));
}

TEST_CASE("rho at or above nnz runs only the final epochs") {
  SyntheticSpec spec;
  spec.train_per_class = 4;
  spec.test_per_class = 2;
  const auto split = make_synthetic(spec);
  const FloatNet net = make_float_net({8, 8, 10}, 8, 8, 2);
  PackingParams p;
  p.rho = net.nnz();
  const TrainConfig cfg = quick_config();
  const auto res = iterative_train(net, p, cfg, split.train, split.test, sgd_retrainer(cfg));
  CHECK(res.iterations == 0);
  CHECK(res.history.events.empty());
  CHECK(res.history.epochs.size() == cfg.final_epochs);
  CHECK(res.groupings[0] == ColumnGrouping::identity(8));
}

TEST_CASE("iterative training reaches rho with valid groupings") {
  SyntheticSpec spec;
  spec.train_per_class = 6;
  spec.test_per_class = 2;
  const auto split = make_synthetic(spec);
  const FloatNet net = make_float_net({8, 16, 16, 10}, 8, 8, 4);
  PackingParams p;
  p.rho = net.nnz() / 4;
  const TrainConfig cfg = quick_config();
  const auto res = iterative_train(net, p, cfg, split.train, split.test, sgd_retrainer(cfg));
  CHECK(res.net.nnz() <= p.rho);
  REQUIRE(!res.history.events.empty());
  std::size_t previous = net.nnz();
  for (const PruneEvent& e : res.history.events) {
    CHECK(e.nnz_before == previous);
    CHECK(e.nnz_after < e.nnz_before);
    previous = e.nnz_after;
  }
  CHECK(res.history.epochs.size() == res.iterations * cfg.epochs_per_iteration + cfg.final_epochs);
  for (std::size_t l = 0; l < res.net.layers.size(); ++l) {
    const FloatLayer& layer = res.net.layers[l];
    const ColumnGrouping& g = res.groupings[l];
    g.validate_partition(layer.weights.cols());
    g.validate_sizes(p.alpha);
    // Column-combined layers have at most one survivor per row per group.
    CHECK(packing::total_conflicts(layer.weights, g) == 0);
    for (std::size_t i = 0; i < layer.weights.size(); ++i) {
      CHECK((layer.mask.values()[i] != 0) == (layer.weights.values()[i] == 0.0f));
    }
  }
}

TEST_CASE("iterative training reports stagnation") {
  SyntheticSpec spec;
  spec.train_per_class = 2;
  spec.test_per_class = 1;
  const auto split = make_synthetic(spec);
  const FloatNet net = make_float_net({8, 4, 10}, 8, 8, 1);
  PackingParams p{1, 0.0, 0.0, 1};
  const TrainConfig cfg = quick_config();
  CHECK_THROWS_AS(iterative_train(net, p, cfg, split.train, split.test, sgd_retrainer(cfg)),
                  InvariantError);
}

TEST_CASE("export keeps the sparsity pattern and groupings") {
  SyntheticSpec spec;
  spec.train_per_class = 6;
  spec.test_per_class = 4;
  const auto split = make_synthetic(spec);
  const FloatNet net = make_float_net({8, 16, 10}, 8, 8, 8);
  PackingParams p;
  p.rho = net.nnz() / 2;
  const TrainConfig cfg = quick_config();
  const auto res = iterative_train(net, p, cfg, split.train, split.test, sgd_retrainer(cfg));
  const NetworkDef q = export_network(res.net, split.train);
  CHECK_FALSE(validate_network(q).has_value());
  for (std::size_t l = 0; l < q.num_layers(); ++l) {
    const auto& w = q.layers[l].weights;
    for (std::size_t i = 0; i < w.size(); ++i) {
      CHECK((w.values()[i] != 0) == (res.net.layers[l].mask.values()[i] == 0));
    }
    REQUIRE(q.layers[l].grouping.has_value());
    CHECK_NOTHROW(packing::pack(w, *q.layers[l].grouping));
    CHECK(q.layers[l].quant.out_shift >= 0);
  }
  CHECK(q.nnz() == res.net.nnz());
  const double qa = quantized_accuracy(q, split.test);
  CHECK(qa >= 0.0);
  CHECK(qa <= 1.0);

  const auto dir = temp_dir("ckpt");
  save_checkpoint(dir, q, res.net, res.history);
  CHECK(load_network(dir / "network.json").nnz() == q.nnz());
  CHECK(load_mask(dir / "layer0.mask") == res.net.layers[0].mask);
  CHECK(std::filesystem::exists(dir / "history.csv"));
}
