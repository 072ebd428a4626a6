#include "colpack/pipeline/schedule.hpp"

#include <algorithm>
#include <sstream>

#include "colpack/core/error.hpp"
#include "colpack/core/shift.hpp"
#include "colpack/packing/pack.hpp"
#include "colpack/sim/layer.hpp"
#include "colpack/sim/tiling.hpp"

namespace colpack::pipeline {

namespace {

std::size_t array_columns_needed(const LayerDef& layer) {
  return layer.grouping ? layer.grouping->size() : layer.input_channels();
}

std::vector<std::size_t> channel_columns(const LayerDef& layer) {
  if (!layer.grouping) {
    std::vector<std::size_t> cols(layer.input_channels());
    for (std::size_t m = 0; m < cols.size(); ++m) cols[m] = m;
    return cols;
  }
  return layer.grouping->group_of(layer.input_channels());
}

std::uint64_t saturating_sub(std::uint64_t a, std::uint64_t b) { return a > b ? a - b : 0; }

}  // namespace

std::vector<sim::ArrayConfig> fitted_configs(const NetworkDef& net) {
  std::vector<sim::ArrayConfig> cfgs;
  for (const LayerDef& layer : net.layers) {
    cfgs.push_back(
        sim::layer_array_config(layer, layer.output_channels(), array_columns_needed(layer)));
  }
  return cfgs;
}

std::uint64_t PipelineSchedule::ready_cycle(std::size_t layer, std::size_t row, std::size_t pixel,
                                            bool pipelined_mode) const {
  const LayerWindow& w = pipelined_mode ? pipelined[layer] : sequential[layer];
  return w.start + sim::timing::output_last_cycle(configs[layer], row, pixel) + 1;
}

std::uint64_t PipelineSchedule::consume_cycle(std::size_t layer, std::size_t channel,
                                              std::size_t pixel, bool pipelined_mode) const {
  const LayerWindow& w = pipelined_mode ? pipelined[layer] : sequential[layer];
  return w.start + sim::timing::input_first_cycle(configs[layer], column_of[layer][channel], pixel);
}

PipelineSchedule schedule_pipeline(const NetworkDef& net,
                                   const std::vector<sim::ArrayConfig>& cfgs) {
  require_valid(net);
  if (cfgs.size() != net.num_layers()) {
    throw ConfigError("schedule_pipeline: one array configuration per layer required");
  }
  PipelineSchedule s;
  s.configs = cfgs;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const LayerDef& layer = net.layers[l];
    const sim::ArrayConfig& cfg = cfgs[l];
    cfg.validate();
    if (layer.output_channels() > cfg.rows || array_columns_needed(layer) > cfg.cols) {
      std::ostringstream msg;
      msg << "layer " << l << " needs a " << layer.output_channels() << "x"
          << array_columns_needed(layer) << " array but has " << cfg.rows << "x" << cfg.cols
          << "; pipelining assumes one untiled array per layer, use tiling mode instead";
      throw ConfigError(msg.str());
    }
    if (layer.grouping) {
      // Layer 0 reads from the input buffer in any order; later layers are
      // wired straight to the previous array's output rows.
      if (l > 0 && !layer.grouping->contiguous()) {
        std::ostringstream msg;
        msg << "layer " << l << " has non-contiguous column groups; apply the row permutation";
        throw ConfigError(msg.str());
      }
      if (cfg.cell.kind != sim::CellKind::kMultiplexed ||
          layer.grouping->max_group_size() > static_cast<std::size_t>(cfg.cell.mux_width)) {
        throw ConfigError("packed layer " + std::to_string(l) + " needs MX cells wide enough");
      }
    }
    s.column_of.push_back(channel_columns(layer));
  }

  const std::size_t L = net.num_layers();
  s.pipelined.resize(L);
  s.sequential.resize(L);
  for (std::size_t l = 0; l < L; ++l) {
    const LayerDef& layer = net.layers[l];
    const std::uint64_t compute = sim::timing::compute_cycles(cfgs[l], layer.pixels());
    s.pipelined[l].compute_cycles = compute;
    s.sequential[l].compute_cycles = compute;
    if (l == 0) {
      s.pipelined[0].start = 0;
      s.sequential[0].start = 0;
    } else {
      s.sequential[l].start = s.sequential[l - 1].end;
      std::uint64_t start = s.pipelined[l - 1].start;
      for (std::size_t m = 0; m < layer.input_channels(); ++m) {
        for (std::size_t y = 0; y < layer.height; ++y) {
          for (std::size_t x = 0; x < layer.width; ++x) {
            const std::ptrdiff_t src =
                shift_source(layer.shifts[m], y, x, layer.height, layer.width);
            if (src < 0) continue;  // zero padding is available from the start
            const std::size_t d = y * layer.width + x;
            const std::uint64_t ready =
                s.ready_cycle(l - 1, m, static_cast<std::size_t>(src), true);
            const std::uint64_t offset =
                sim::timing::input_first_cycle(cfgs[l], s.column_of[l][m], d);
            start = std::max(start, saturating_sub(ready, offset));
          }
        }
      }
      s.pipelined[l].start = start;
    }
    s.pipelined[l].end = s.pipelined[l].start + compute;
    s.sequential[l].end = s.sequential[l].start + compute;
  }
  s.pipelined_latency = s.pipelined.back().end;
  s.sequential_latency = s.sequential.back().end;
  if (s.pipelined_latency > s.sequential_latency) {
    throw InvariantError("schedule_pipeline: pipelined latency exceeds sequential latency");
  }
  return s;
}

LatencyReport latency_report(const NetworkDef& net, const std::vector<sim::ArrayConfig>& cfgs) {
  const PipelineSchedule s = schedule_pipeline(net, cfgs);
  LatencyReport r;
  r.sequential = s.sequential_latency;
  r.pipelined = s.pipelined_latency;
  r.ratio = static_cast<double>(r.sequential) / static_cast<double>(r.pipelined);
  r.per_layer_pipelined = s.pipelined;
  r.per_layer_sequential = s.sequential;
  return r;
}

nlohmann::json report_to_json(const LatencyReport& report) {
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < report.per_layer_pipelined.size(); ++l) {
    const LayerWindow& p = report.per_layer_pipelined[l];
    const LayerWindow& q = report.per_layer_sequential[l];
    layers.push_back({{"layer", l},
                      {"compute_cycles", p.compute_cycles},
                      {"pipelined_start", p.start},
                      {"pipelined_end", p.end},
                      {"sequential_start", q.start},
                      {"sequential_end", q.end}});
  }
  return {{"sequential", report.sequential},
          {"pipelined", report.pipelined},
          {"ratio", report.ratio},
          {"per_layer", layers}};
}

PipelinedRun run_pipelined(const NetworkDef& net, const PipelineSchedule& schedule,
                           const Int8Tensor& input) {
  require_valid(net);
  PipelinedRun run;
  Int8Tensor current = input;
  // Ready cycle of every element of `current`; network inputs are buffered.
  std::vector<std::uint64_t> ready(current.data.size(), 0);

  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const LayerDef& layer = net.layers[l];
    const std::size_t plane = layer.pixels();
    if (current.shape.size() != 3 || current.shape[0] != layer.input_channels()) {
      throw ConfigError("run_pipelined: input maps do not match layer " + std::to_string(l));
    }
    // What the shift block can hand the array at each consumption cycle.
    Int8Tensor delivered = current;
    for (std::size_t m = 0; m < layer.input_channels(); ++m) {
      for (std::size_t y = 0; y < layer.height; ++y) {
        for (std::size_t x = 0; x < layer.width; ++x) {
          const std::ptrdiff_t src = shift_source(layer.shifts[m], y, x, layer.height, layer.width);
          if (src < 0) continue;
          const std::size_t i = m * plane + static_cast<std::size_t>(src);
          ++run.consumed_elements;
          const std::uint64_t at = schedule.consume_cycle(l, m, y * layer.width + x, true);
          if (at < ready[i]) {
            ++run.causality_violations;
            delivered.data[i] = 0;
          }
        }
      }
    }
    const auto out = sim::run_layer(layer, delivered, schedule.configs[l]);
    current = out.output;
    ready.assign(current.data.size(), 0);
    for (std::size_t n = 0; n < layer.output_channels(); ++n) {
      for (std::size_t d = 0; d < plane; ++d) ready[n * plane + d] = schedule.ready_cycle(l, n, d);
    }
  }
  run.output = current;
  return run;
}

Int8Tensor run_sequential(const NetworkDef& net, const std::vector<sim::ArrayConfig>& cfgs,
                          const Int8Tensor& input) {
  require_valid(net);
  if (cfgs.size() != net.num_layers()) {
    throw ConfigError("run_sequential: one array configuration per layer required");
  }
  Int8Tensor current = input;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    current = sim::run_layer(net.layers[l], current, cfgs[l]).output;
  }
  return current;
}

}  // namespace colpack::pipeline
