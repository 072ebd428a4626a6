// experiments.hpp - building blocks shared by the subcommands and the
// acceptance driver.
#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "colpack/cli/config.hpp"
#include "colpack/core/network.hpp"
#include "colpack/training/dataset.hpp"
#include "colpack/training/export.hpp"
#include "colpack/training/iterative.hpp"

namespace colpack::cli {

struct PackSummary {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t nnz = 0;
  std::size_t nnz_after = 0;
  std::size_t groups = 0;
  double density = 0.0;
  double packing_efficiency = 0.0;
  std::size_t tiles_before = 0;
  std::size_t tiles_after = 0;
  ColumnGrouping grouping;
};

PackSummary summarize_packing(const SparseFilterMatrix& f, std::size_t alpha, double gamma,
                              std::size_t array_rows, std::size_t array_cols);
nlohmann::json to_json(const PackSummary& s);

struct SweepPoint {
  double value = 0.0;
  PackSummary packing;
  std::optional<double> accuracy;
};

// Packs `f` at every value of the swept parameter, one concurrent job per
// value; results come back in grid order.
std::vector<SweepPoint> run_sweep(const SparseFilterMatrix& f, const RunConfig& cfg,
                                  const std::vector<double>& values);
std::vector<double> default_grid(const std::string& parameter);

// Synthetic task from the configuration, or an IDX pair split 80/20 in file
// order.
training::DataSplit load_task(const RunConfig& cfg);

training::TrainConfig train_config(const RunConfig& cfg);

struct TrainOutcome {
  training::IterativeResult result;
  NetworkDef quantized;
  std::size_t initial_nnz = 0;
  std::size_t rho = 0;
  double accuracy = 0.0;            // float model on the test split
  double quantized_accuracy = 0.0;  // 8-bit model on the test split
};

// Runs the prune/combine/retrain loop on `train` starting from `start`
// (fresh or pretrained) and exports the result.
TrainOutcome train_experiment(const RunConfig& cfg, const training::FloatNet& start,
                              const training::Dataset& train, const training::Dataset& test);

// Channel widths adjusted to the data: first = input channels, last = classes.
std::vector<std::size_t> fitted_widths(const RunConfig& cfg, const training::Dataset& data);

}  // namespace colpack::cli
