// colpack - column combining, array simulation and pipelining driver.
#include <iostream>

#include <CLI11.hpp>

#include "colpack/cli/commands.hpp"

namespace {

void add_common(CLI::App* app, colpack::cli::RunConfig& cfg) {
  app->add_option("--alpha", cfg.packing.alpha, "Max columns per group");
  app->add_option("--gamma", cfg.packing.gamma, "Conflicts allowed per row per group");
  app->add_option("--array-rows", cfg.array_rows, "Systolic array rows");
  app->add_option("--array-cols", cfg.array_cols, "Systolic array columns");
  app->add_option("--acc-bits", cfg.acc_bits, "Accumulator width k (16 or 32)");
  app->add_option("--seed", cfg.seed, "Random seed");
  app->add_option("--out", cfg.out, "Output directory");
}

void add_matrix_inputs(CLI::App* app, colpack::cli::RunConfig& cfg) {
  app->add_option("--weights", cfg.weights, "SFM1 filter matrix (default: random)");
  app->add_option("--rows", cfg.rows, "Random matrix rows");
  app->add_option("--cols", cfg.cols, "Random matrix columns");
  app->add_option("--density", cfg.density, "Random matrix density");
}

void add_network_inputs(CLI::App* app, colpack::cli::RunConfig& cfg) {
  app->add_option("--network", cfg.network, "Network JSON")->required();
  app->add_option("--input", cfg.input, "TNS1 input maps (default: random)");
}

void add_training(CLI::App* app, colpack::cli::RunConfig& cfg, CLI::Option*& rho) {
  app->add_option("--beta", cfg.packing.beta, "Initial pruning percentage");
  rho = app->add_option("--rho", cfg.packing.rho, "Target nonzero weights (default: 25%)");
  app->add_option("--fraction", cfg.fraction, "Fraction of the training set");
  app->add_option("--images", cfg.images, "IDX image file");
  app->add_option("--labels", cfg.labels, "IDX label file");
  app->add_option("--widths", cfg.widths, "Channel widths, input to classes");
  app->add_option("--noise", cfg.noise, "Synthetic task pixel noise");
  app->add_option("--train-per-class", cfg.train_per_class, "Synthetic training samples per class");
  app->add_option("--test-per-class", cfg.test_per_class, "Synthetic test samples per class");
  app->add_option("--epochs-per-iteration", cfg.epochs_per_iteration, "Retraining epochs per iteration");
  app->add_option("--final-epochs", cfg.final_epochs, "Final retraining epochs");
  app->add_option("--pretrain-epochs", cfg.pretrain_epochs, "Dense pretraining epochs");
  app->add_option("--eta", cfg.eta, "Initial learning rate");
}

}  // namespace

int main(int argc, char** argv) {
  colpack::cli::RunConfig cfg;
  CLI::App app{"Column combining for sparse CNNs on bit-serial systolic arrays"};
  app.require_subcommand(1);

  CLI::Option* train_rho = nullptr;
  CLI::Option* sweep_rho = nullptr;

  auto* pack = app.add_subcommand("pack", "Group, prune and pack one filter matrix");
  add_common(pack, cfg);
  add_matrix_inputs(pack, cfg);

  auto* train = app.add_subcommand("train", "Column-combining training of a shift network");
  add_common(train, cfg);
  add_training(train, cfg, train_rho);

  auto* simulate = app.add_subcommand("simulate", "Run a network on the systolic array");
  add_common(simulate, cfg);
  add_network_inputs(simulate, cfg);

  auto* pipe = app.add_subcommand("pipeline", "Cross-layer pipelined latency");
  add_common(pipe, cfg);
  add_network_inputs(pipe, cfg);

  auto* sweep = app.add_subcommand("sweep", "Packing efficiency over an alpha or gamma grid");
  add_common(sweep, cfg);
  add_matrix_inputs(sweep, cfg);
  add_training(sweep, cfg, sweep_rho);
  sweep->add_option("--param", cfg.sweep, "Swept parameter")->check(CLI::IsMember({"alpha", "gamma"}));
  sweep->add_option("--values", cfg.values, "Grid values");
  sweep->add_flag("--with-accuracy", cfg.with_accuracy, "Train a network per grid point");

  auto* report = app.add_subcommand("report", "Packing and energy summary of a network");
  add_common(report, cfg);
  report->add_option("--network", cfg.network, "Network JSON")->required();
  report->add_option("--memory-ratio", cfg.memory_ratios, "Memory/compute energy ratios r");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
  cfg.rho_set = (train_rho && train_rho->count() > 0) || (sweep_rho && sweep_rho->count() > 0);
  return colpack::cli::run_command(cfg, std::cout, std::cerr);
}
