// schedule.hpp - cross-layer pipelining with one array per layer.
//
// Layer l starts streaming at cycle T_l. Output element (n, d) of layer l is
// ready for layer l+1 one register hop after its last bit leaves the array:
//   ready(n, d) = T_l + output_last_cycle(n, d) + 1.
// Layer l+1 reads input channel m for pixel d through the shift block from
// pixel src(m, d) of channel m, so its start must satisfy
//   T_{l+1} + input_first_cycle(column(m), d) >= ready(m, src(m, d))
// for every (m, d) with a non-padding source. Sequential execution instead
// waits for the whole previous layer: T_{l+1} = T_l + compute_cycles_l.
#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "colpack/core/network.hpp"
#include "colpack/core/tensor.hpp"
#include "colpack/sim/array.hpp"

namespace colpack::pipeline {

struct LayerWindow {
  std::uint64_t start = 0;  // first input bit enters column 0
  std::uint64_t end = 0;    // one past the last output bit
  std::uint64_t compute_cycles = 0;
};

struct PipelineSchedule {
  std::vector<sim::ArrayConfig> configs;
  // column_of[l][m]: physical array column wired to input channel m.
  std::vector<std::vector<std::size_t>> column_of;
  std::vector<LayerWindow> pipelined;
  std::vector<LayerWindow> sequential;
  std::uint64_t pipelined_latency = 0;
  std::uint64_t sequential_latency = 0;

  // Absolute cycle output element (row, pixel) of layer l is ready downstream.
  std::uint64_t ready_cycle(std::size_t layer, std::size_t row, std::size_t pixel,
                            bool pipelined_mode = true) const;
  // Absolute cycle layer l reads input (channel, pixel).
  std::uint64_t consume_cycle(std::size_t layer, std::size_t channel, std::size_t pixel,
                              bool pipelined_mode = true) const;
};

// One array per layer, sized to the layer: rows x packed columns, MX cells
// when the layer is packed, IL cells otherwise.
std::vector<sim::ArrayConfig> fitted_configs(const NetworkDef& net);

// Throws ConfigError when a layer does not fit its array, or when a packed
// layer after the first has non-contiguous groups (apply the row permutation
// first).
PipelineSchedule schedule_pipeline(const NetworkDef& net,
                                   const std::vector<sim::ArrayConfig>& cfgs);

struct LatencyReport {
  std::uint64_t sequential = 0;
  std::uint64_t pipelined = 0;
  double ratio = 1.0;
  std::vector<LayerWindow> per_layer_pipelined;
  std::vector<LayerWindow> per_layer_sequential;
};

LatencyReport latency_report(const NetworkDef& net, const std::vector<sim::ArrayConfig>& cfgs);
nlohmann::json report_to_json(const LatencyReport& report);

struct PipelinedRun {
  Int8Tensor output;
  std::size_t consumed_elements = 0;
  std::size_t causality_violations = 0;
};

// Executes the network layer by layer on its arrays, handing data between
// layers through a buffer that only exposes an element from its ready cycle
// on. Every read at a consumption cycle before the element is ready counts
// as a causality violation (and reads zero).
PipelinedRun run_pipelined(const NetworkDef& net, const PipelineSchedule& schedule,
                           const Int8Tensor& input);

// Layer-by-layer execution with full intermediate maps.
Int8Tensor run_sequential(const NetworkDef& net, const std::vector<sim::ArrayConfig>& cfgs,
                          const Int8Tensor& input);

}  // namespace colpack::pipeline
