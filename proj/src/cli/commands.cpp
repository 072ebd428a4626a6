#include "colpack/cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "colpack/cli/energy.hpp"
#include "colpack/cli/experiments.hpp"
#include "colpack/core/error.hpp"
#include "colpack/core/io.hpp"
#include "colpack/core/random.hpp"
#include "colpack/packing/grouping.hpp"
#include "colpack/packing/pack.hpp"
#include "colpack/packing/permutation.hpp"
#include "colpack/packing/prune.hpp"
#include "colpack/pipeline/schedule.hpp"
#include "colpack/sim/golden.hpp"
#include "colpack/sim/layer.hpp"

namespace colpack::cli {
namespace {

namespace fs = std::filesystem;

void write_json(const fs::path& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

SparseFilterMatrix input_matrix(const RunConfig& cfg) {
  if (!cfg.weights.empty()) return load_sfm(cfg.weights);
  return random_filter_matrix(cfg.rows, cfg.cols, cfg.density, cfg.seed);
}

NetworkDef input_network(const RunConfig& cfg) {
  if (cfg.network.empty()) throw ConfigError("--network is required");
  NetworkDef net = load_network(cfg.network);
  require_valid(net);
  return net;
}

Int8Tensor input_maps(const RunConfig& cfg, const LayerDef& first) {
  if (!cfg.input.empty()) return load_tensor(cfg.input);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> dist(0, 127);
  Int8Tensor t;
  t.shape = {static_cast<std::uint32_t>(first.input_channels()),
             static_cast<std::uint32_t>(first.height), static_cast<std::uint32_t>(first.width)};
  t.data.resize(t.element_count());
  for (auto& v : t.data) v = static_cast<std::int8_t>(dist(rng));
  return t;
}

nlohmann::json pass_json(const sim::SimTrace& t) {
  return {{"weight_load", t.cycles_weight_load},
          {"compute", t.cycles_compute},
          {"stream", t.stream_cycles},
          {"word_period", t.word_period},
          {"interleave", t.interleave}};
}

nlohmann::json cycles_json(const sim::ScheduleCycles& c) {
  return {{"total", c.total},
          {"weight_load", c.weight_load},
          {"compute", c.compute},
          {"exposed_load", c.exposed_load}};
}

// Per-layer array fitted to the layer, checked against the physical bound.
std::vector<sim::ArrayConfig> bounded_configs(const NetworkDef& net, const RunConfig& cfg) {
  auto cfgs = pipeline::fitted_configs(net);
  for (std::size_t l = 0; l < cfgs.size(); ++l) {
    if (cfgs[l].rows > cfg.array_rows || cfgs[l].cols > cfg.array_cols) {
      std::ostringstream msg;
      msg << "layer " << l << " needs a " << cfgs[l].rows << "x" << cfgs[l].cols
          << " array, larger than " << cfg.array_rows << "x" << cfg.array_cols;
      throw ConfigError(msg.str());
    }
  }
  return cfgs;
}

NetworkDef with_acc_bits(NetworkDef net, int acc_bits) {
  for (auto& layer : net.layers) layer.quant.acc_bits = acc_bits;
  return net;
}

}  // namespace

nlohmann::json cmd_pack(const RunConfig& cfg) {
  const SparseFilterMatrix f = input_matrix(cfg);
  const auto result = packing::group_columns(f, cfg.packing.alpha, cfg.packing.gamma);
  const SparseFilterMatrix pruned = packing::group_prune(f, result.grouping);
  const PackedFilterMatrix packed = packing::pack(pruned, result.grouping);
  const PackSummary s =
      summarize_packing(f, cfg.packing.alpha, cfg.packing.gamma, cfg.array_rows, cfg.array_cols);

  fs::create_directories(cfg.out);
  save_grouping(cfg.out / "grouping.json",
                GroupingRecord{cfg.packing.alpha, cfg.packing.gamma, result.grouping});
  write_json(cfg.out / "grouping_trace.json", packing::trace_to_json(result.trace));
  save_sfm(cfg.out / "pruned.sfm", pruned);
  save_sfm(cfg.out / "packed_unpacked.sfm", packing::unpack(packed));

  nlohmann::json report = to_json(s);
  report["command"] = "pack";
  report["alpha"] = cfg.packing.alpha;
  report["gamma"] = cfg.packing.gamma;
  report["array"] = {{"rows", cfg.array_rows}, {"cols", cfg.array_cols}};
  report["max_group_size"] = result.grouping.max_group_size();
  write_json(cfg.out / "pack_report.json", report);
  return report;
}

nlohmann::json cmd_train(const RunConfig& cfg) {
  const training::DataSplit data = load_task(cfg);
  const training::TrainConfig tcfg = train_config(cfg);
  training::FloatNet start = training::make_float_net(fitted_widths(cfg, data.train),
                                                      data.train.height, data.train.width,
                                                      cfg.seed);
  std::optional<double> pretrained_accuracy;
  if (cfg.pretrain_epochs > 0) {
    training::train_dense(start, data.train, tcfg, cfg.pretrain_epochs);
    pretrained_accuracy = training::accuracy(start, data.test);
  }
  const training::Dataset train =
      cfg.fraction < 1.0 ? training::dataset_fraction(data.train, cfg.fraction, cfg.seed)
                         : data.train;
  const TrainOutcome outcome = train_experiment(cfg, start, train, data.test);

  fs::create_directories(cfg.out);
  training::save_checkpoint(cfg.out / "checkpoint", outcome.quantized, outcome.result.net,
                            outcome.result.history);
  write_text_file(cfg.out / "history.csv", training::history_csv(outcome.result.history));

  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : outcome.result.history.events) {
    events.push_back({{"iteration", e.iteration},
                      {"epoch", e.epoch},
                      {"beta", e.beta},
                      {"nnz_before", e.nnz_before},
                      {"nnz_after_magnitude", e.nnz_after_magnitude},
                      {"nnz_after", e.nnz_after}});
  }
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : outcome.quantized.layers) {
    const auto packed = packing::combine_columns(layer.weights, *layer.grouping);
    layers.push_back({{"rows", layer.weights.rows()},
                      {"cols", layer.weights.cols()},
                      {"nnz", layer.weights.nnz()},
                      {"groups", packed.packed_cols()},
                      {"packing_efficiency", packing::packing_efficiency(packed)},
                      {"out_shift", layer.quant.out_shift}});
  }
  nlohmann::json report = {{"command", "train"},
                           {"train_samples", train.size()},
                           {"test_samples", data.test.size()},
                           {"fraction", cfg.fraction},
                           {"iterations", outcome.result.iterations},
                           {"nnz_initial", outcome.initial_nnz},
                           {"nnz_final", outcome.result.net.nnz()},
                           {"rho", outcome.rho},
                           {"accuracy", outcome.accuracy},
                           {"quantized_accuracy", outcome.quantized_accuracy},
                           {"events", events},
                           {"layers", layers}};
  if (pretrained_accuracy) report["pretrained_accuracy"] = *pretrained_accuracy;
  write_json(cfg.out / "train_report.json", report);
  return report;
}

nlohmann::json cmd_simulate(const RunConfig& cfg) {
  const NetworkDef net = with_acc_bits(input_network(cfg), cfg.acc_bits);
  Int8Tensor maps = input_maps(cfg, net.layers.front());
  const Int8Tensor input = maps;

  nlohmann::json layers = nlohmann::json::array();
  bool all_match = true;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const LayerDef& layer = net.layers[l];
    const sim::ArrayConfig acfg = sim::layer_array_config(layer, cfg.array_rows, cfg.array_cols);
    const sim::LayerRun run = sim::run_layer(layer, maps, acfg);
    const sim::ReferenceLayer ref = sim::reference_layer(layer, maps);
    const bool match = run.accumulators == ref.accumulators && run.output == ref.output;
    all_match = all_match && match;
    nlohmann::json passes = nlohmann::json::array();
    for (const auto& p : run.run.passes) passes.push_back(pass_json(p));
    layers.push_back({{"layer", l},
                      {"cell", sim::to_string(acfg.cell.kind)},
                      {"mux_width", acfg.cell.mux_width},
                      {"row_tiles", run.run.plan.row_tiles},
                      {"col_tiles", run.run.plan.col_tiles},
                      {"tiles", run.run.plan.tile_count()},
                      {"cycles", cycles_json(run.run.cycles)},
                      {"passes", passes},
                      {"matches_reference", match}});
    maps = run.output;
  }

  fs::create_directories(cfg.out);
  save_tensor(cfg.out / "input.tns", input);
  save_tensor(cfg.out / "output.tns", maps);
  nlohmann::json report = {{"command", "simulate"},
                           {"array", {{"rows", cfg.array_rows}, {"cols", cfg.array_cols}}},
                           {"acc_bits", cfg.acc_bits},
                           {"layers", layers},
                           {"matches_reference", all_match}};
  write_json(cfg.out / "sim_trace.json", report);
  if (!all_match) throw InvariantError("simulated output differs from the reference");
  return report;
}

nlohmann::json cmd_pipeline(const RunConfig& cfg) {
  const NetworkDef net =
      packing::apply_row_permutations(with_acc_bits(input_network(cfg), cfg.acc_bits));
  const auto cfgs = bounded_configs(net, cfg);
  const pipeline::PipelineSchedule schedule = pipeline::schedule_pipeline(net, cfgs);
  const pipeline::LatencyReport latency = pipeline::latency_report(net, cfgs);
  const Int8Tensor input = input_maps(cfg, net.layers.front());
  const pipeline::PipelinedRun piped = pipeline::run_pipelined(net, schedule, input);
  const Int8Tensor sequential = pipeline::run_sequential(net, cfgs, input);
  const bool equal = piped.output == sequential;

  nlohmann::json report = pipeline::report_to_json(latency);
  report["command"] = "pipeline";
  report["outputs_identical"] = equal;
  report["consumed_elements"] = piped.consumed_elements;
  report["causality_violations"] = piped.causality_violations;
  fs::create_directories(cfg.out);
  write_json(cfg.out / "latency.json", report);
  save_tensor(cfg.out / "output.tns", piped.output);
  if (!equal || piped.causality_violations != 0) {
    throw InvariantError("pipelined execution diverged from sequential execution");
  }
  return report;
}

nlohmann::json cmd_sweep(const RunConfig& cfg) {
  const SparseFilterMatrix f = input_matrix(cfg);
  const std::vector<double> values = cfg.values.empty() ? default_grid(cfg.sweep) : cfg.values;
  const std::vector<SweepPoint> points = run_sweep(f, cfg, values);

  std::ostringstream csv;
  csv << "param,value,packing_efficiency,groups,tiles,accuracy\n";
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : points) {
    csv << cfg.sweep << ',' << p.value << ',' << p.packing.packing_efficiency << ','
        << p.packing.groups << ',' << p.packing.tiles_after << ',';
    if (p.accuracy) csv << *p.accuracy;
    csv << '\n';
    nlohmann::json row = to_json(p.packing);
    row["value"] = p.value;
    row["accuracy"] = p.accuracy ? nlohmann::json(*p.accuracy) : nlohmann::json(nullptr);
    rows.push_back(row);
  }
  fs::create_directories(cfg.out);
  write_text_file(cfg.out / "sweep.csv", csv.str());
  nlohmann::json report = {{"command", "sweep"}, {"param", cfg.sweep}, {"points", rows}};
  write_json(cfg.out / "sweep.json", report);
  return report;
}

nlohmann::json cmd_report(const RunConfig& cfg) {
  const NetworkDef net = input_network(cfg);
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const LayerDef& layer = net.layers[l];
    const ColumnGrouping grouping =
        layer.grouping ? *layer.grouping : ColumnGrouping::identity(layer.weights.cols());
    const auto packed = packing::combine_columns(layer.weights, grouping);
    layers.push_back(
        {{"layer", l},
         {"rows", layer.weights.rows()},
         {"cols", layer.weights.cols()},
         {"nnz", layer.weights.nnz()},
         {"groups", packed.packed_cols()},
         {"packing_efficiency", packing::packing_efficiency(packed)},
         {"tiles_before",
          sim::tile_count(layer.weights.rows(), layer.weights.cols(), cfg.array_rows,
                          cfg.array_cols)},
         {"tiles_after", sim::tile_count(layer.weights.rows(), packed.packed_cols(),
                                         cfg.array_rows, cfg.array_cols)}});
  }
  const MacCounts macs = network_mac_counts(net);
  nlohmann::json energy = nlohmann::json::array();
  for (double r : cfg.memory_ratios) {
    const EnergyParams p = energy_params(macs.n_mac, macs.n_mac_opt, r);
    energy.push_back({{"r", r}, {"c", p.c}, {"efficiency_ratio", energy_efficiency_ratio(p)}});
  }
  nlohmann::json report = {{"command", "report"},
                           {"layers", layers},
                           {"n_mac", macs.n_mac},
                           {"n_mac_opt", macs.n_mac_opt},
                           {"energy", energy}};
  fs::create_directories(cfg.out);
  write_json(cfg.out / "report.json", report);
  return report;
}

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    nlohmann::json report;
    if (cfg.command == "pack") {
      report = cmd_pack(cfg);
    } else if (cfg.command == "train") {
      report = cmd_train(cfg);
    } else if (cfg.command == "simulate") {
      report = cmd_simulate(cfg);
    } else if (cfg.command == "pipeline") {
      report = cmd_pipeline(cfg);
    } else if (cfg.command == "sweep") {
      report = cmd_sweep(cfg);
    } else if (cfg.command == "report") {
      report = cmd_report(cfg);
    } else {
      throw ConfigError("unknown command '" + cfg.command + "'");
    }
    out << report.dump(2) << '\n';
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed JSON: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace colpack::cli
