// config.hpp - validated parameters of one CLI invocation.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "colpack/core/types.hpp"

namespace colpack::cli {

struct RunConfig {
  std::string command;
  std::filesystem::path out = "out";

  PackingParams packing;          // alpha, beta, gamma, rho
  bool rho_set = false;           // otherwise rho = 25% of the initial nnz
  std::size_t array_rows = 32;
  std::size_t array_cols = 32;
  int acc_bits = 32;
  std::uint64_t seed = 1;
  double fraction = 1.0;

  // Inputs; a synthetic matrix / task is used when no file is given.
  std::filesystem::path weights;   // SFM1
  std::filesystem::path network;   // network JSON
  std::filesystem::path input;     // TNS1 input maps
  std::filesystem::path images;    // IDX
  std::filesystem::path labels;    // IDX
  std::size_t rows = 96;
  std::size_t cols = 95;
  double density = 0.16;

  // Training.
  std::vector<std::size_t> widths{8, 32, 32, 10};
  double noise = 40.0;
  std::size_t train_per_class = 100;
  std::size_t test_per_class = 50;
  std::size_t epochs_per_iteration = 20;
  std::size_t final_epochs = 100;
  std::size_t pretrain_epochs = 0;
  double eta = 0.05;

  // Sweeps.
  std::string sweep = "gamma";     // alpha | gamma
  std::vector<double> values;      // empty: the default grid of the parameter
  bool with_accuracy = false;

  // Energy.
  std::vector<double> memory_ratios{0.06, 0.1};

  // Throws ConfigError on the first invalid field.
  void validate() const;
};

}  // namespace colpack::cli
