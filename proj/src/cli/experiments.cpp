#include "colpack/cli/experiments.hpp"

#include <future>

#include "colpack/core/error.hpp"
#include "colpack/packing/grouping.hpp"
#include "colpack/packing/pack.hpp"
#include "colpack/packing/prune.hpp"
#include "colpack/sim/tiling.hpp"

namespace colpack::cli {

PackSummary summarize_packing(const SparseFilterMatrix& f, std::size_t alpha, double gamma,
                              std::size_t array_rows, std::size_t array_cols) {
  PackSummary s;
  s.rows = f.rows();
  s.cols = f.cols();
  s.nnz = f.nnz();
  s.density = f.density();
  s.grouping = packing::group_columns(f, alpha, gamma).grouping;
  const auto packed = packing::combine_columns(f, s.grouping);
  s.groups = packed.packed_cols();
  s.nnz_after = packed.nnz();
  s.packing_efficiency = packing::packing_efficiency(packed);
  s.tiles_before = sim::tile_count(f.rows(), f.cols(), array_rows, array_cols);
  s.tiles_after = sim::tile_count(f.rows(), s.groups, array_rows, array_cols);
  return s;
}

nlohmann::json to_json(const PackSummary& s) {
  return {{"rows", s.rows},
          {"cols", s.cols},
          {"nnz", s.nnz},
          {"density", s.density},
          {"groups", s.groups},
          {"nnz_after", s.nnz_after},
          {"pruned_weights", s.nnz - s.nnz_after},
          {"packing_efficiency", s.packing_efficiency},
          {"tiles_before", s.tiles_before},
          {"tiles_after", s.tiles_after}};
}

std::vector<double> default_grid(const std::string& parameter) {
  if (parameter == "alpha") return {1, 2, 4, 8, 16};
  return {0.1, 0.25, 0.5};
}

training::DataSplit load_task(const RunConfig& cfg) {
  if (!cfg.images.empty()) {
    training::Dataset all = training::load_idx(cfg.images, cfg.labels);
    all.validate();
    const std::size_t cut = all.samples.size() * 4 / 5;
    if (cut == 0 || cut == all.samples.size()) throw DataError("IDX set too small to split");
    training::DataSplit split{all, all};
    split.train.samples.assign(all.samples.begin(), all.samples.begin() + static_cast<std::ptrdiff_t>(cut));
    split.test.samples.assign(all.samples.begin() + static_cast<std::ptrdiff_t>(cut), all.samples.end());
    return split;
  }
  training::SyntheticSpec spec;
  spec.channels = cfg.widths.front();
  spec.num_classes = cfg.widths.back();
  spec.train_per_class = cfg.train_per_class;
  spec.test_per_class = cfg.test_per_class;
  spec.noise = cfg.noise;
  spec.seed = cfg.seed;
  return training::make_synthetic(spec);
}

std::vector<std::size_t> fitted_widths(const RunConfig& cfg, const training::Dataset& data) {
  std::vector<std::size_t> w = cfg.widths;
  w.front() = data.channels;
  w.back() = data.num_classes;
  return w;
}

training::TrainConfig train_config(const RunConfig& cfg) {
  training::TrainConfig t;
  t.eta = cfg.eta;
  t.epochs_per_iteration = cfg.epochs_per_iteration;
  t.final_epochs = cfg.final_epochs;
  t.seed = cfg.seed;
  return t;
}

TrainOutcome train_experiment(const RunConfig& cfg, const training::FloatNet& start,
                              const training::Dataset& train, const training::Dataset& test) {
  TrainOutcome out;
  out.initial_nnz = start.nnz();
  PackingParams params = cfg.packing;
  if (!cfg.rho_set) params.rho = std::max<std::size_t>(1, out.initial_nnz / 4);
  out.rho = params.rho;
  const training::TrainConfig tcfg = train_config(cfg);
  out.result = training::iterative_train(start, params, tcfg, train, test,
                                         training::sgd_retrainer(tcfg));
  out.accuracy = training::accuracy(out.result.net, test);
  out.quantized = training::export_network(out.result.net, train,
                                           training::ExportConfig{cfg.acc_bits, 64});
  out.quantized_accuracy = training::quantized_accuracy(out.quantized, test);
  return out;
}

std::vector<SweepPoint> run_sweep(const SparseFilterMatrix& f, const RunConfig& cfg,
                                  const std::vector<double>& values) {
  std::vector<std::future<SweepPoint>> jobs;
  for (double v : values) {
    jobs.push_back(std::async(std::launch::async, [&f, &cfg, v]() {
      RunConfig point = cfg;
      if (cfg.sweep == "alpha") {
        point.packing.alpha = static_cast<std::size_t>(v);
      } else {
        point.packing.gamma = v;
      }
      SweepPoint p;
      p.value = v;
      p.packing = summarize_packing(f, point.packing.alpha, point.packing.gamma, cfg.array_rows,
                                    cfg.array_cols);
      if (cfg.with_accuracy) {
        const training::DataSplit data = load_task(point);
        const training::FloatNet start =
            training::make_float_net(fitted_widths(point, data.train), data.train.height,
                                     data.train.width, point.seed);
        p.accuracy = train_experiment(point, start, data.train, data.test).accuracy;
      }
      return p;
    }));
  }
  std::vector<SweepPoint> points;
  for (auto& j : jobs) points.push_back(j.get());
  return points;
}

}  // namespace colpack::cli
