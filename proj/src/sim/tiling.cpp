#include "colpack/sim/tiling.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "colpack/core/error.hpp"

namespace colpack::sim {

std::size_t tile_count(std::size_t rows, std::size_t cols, std::size_t array_rows,
                       std::size_t array_cols) {
  if (array_rows == 0 || array_cols == 0) throw ConfigError("tile_count: empty array");
  return ((rows + array_rows - 1) / array_rows) * ((cols + array_cols - 1) / array_cols);
}

TilePlan tile_plan(std::size_t rows, std::size_t cols, const ArrayConfig& cfg) {
  if (rows < 1 || cols < 1) throw ConfigError("tile_plan: matrix dimensions must be >= 1");
  if (cfg.rows < 1 || cfg.cols < 1) throw ConfigError("tile_plan: array dimensions must be >= 1");
  TilePlan plan;
  plan.matrix_rows = rows;
  plan.matrix_cols = cols;
  plan.array_rows = cfg.rows;
  plan.array_cols = cfg.cols;
  plan.row_tiles = (rows + cfg.rows - 1) / cfg.rows;
  plan.col_tiles = (cols + cfg.cols - 1) / cfg.cols;
  for (std::size_t rt = 0; rt < plan.row_tiles; ++rt) {
    for (std::size_t ct = 0; ct < plan.col_tiles; ++ct) {
      const std::size_t r0 = rt * cfg.rows;
      const std::size_t c0 = ct * cfg.cols;
      plan.tiles.push_back(
          Tile{r0, c0, std::min(cfg.rows, rows - r0), std::min(cfg.cols, cols - c0)});
    }
  }
  for (std::size_t t = 0; t < plan.tiles.size(); ++t) {
    plan.schedule.push_back(Phase{PhaseKind::kWeightLoad, t});
    plan.schedule.push_back(Phase{PhaseKind::kCompute, t});
  }
  return plan;
}

ScheduleCycles schedule_cycles(const TilePlan& plan, const ArrayConfig& cfg, std::size_t samples) {
  ScheduleCycles out;
  const std::uint64_t load = timing::weight_load_cycles(cfg);
  const std::uint64_t stream = timing::stream_cycles(cfg, samples);
  const std::uint64_t compute = timing::compute_cycles(cfg, samples);
  std::uint64_t next_load = 0;
  std::uint64_t previous_end = 0;
  for (std::size_t t = 0; t < plan.tile_count(); ++t) {
    TileCycles c;
    c.load_start = next_load;
    c.compute_start = c.load_start + load;
    c.stream_end = c.compute_start + stream;
    c.compute_end = c.compute_start + compute;
    // Load cycles that extend past the previous tile's drain are exposed.
    out.exposed_load += t == 0 ? load
                               : (c.compute_start > previous_end ? c.compute_start - previous_end : 0);
    next_load = c.stream_end;
    previous_end = c.compute_end;
    out.total = std::max(out.total, c.compute_end);
    out.weight_load += load;
    out.compute += compute;
    out.tiles.push_back(c);
  }
  return out;
}

namespace {

TiledRun run_plan(std::size_t rows, std::size_t cols, const DataMatrix& data,
                  const ArrayConfig& cfg,
                  const std::function<ArrayTile(const Tile&)>& make_tile) {
  cfg.validate();
  TiledRun run;
  run.plan = tile_plan(rows, cols, cfg);
  run.cycles = schedule_cycles(run.plan, cfg, data.cols());
  run.output = AccMatrix(rows, data.cols());

  const std::int64_t lo = -(std::int64_t{1} << (cfg.cell.acc_bits - 1));
  const std::int64_t hi = (std::int64_t{1} << (cfg.cell.acc_bits - 1)) - 1;
  for (const Tile& tile : run.plan.tiles) {
    SimTrace pass = simulate_array(make_tile(tile), data, cfg);
    run.overflow = run.overflow || pass.overflow;
    for (std::size_t i = 0; i < tile.rows; ++i) {
      for (std::size_t d = 0; d < data.cols(); ++d) {
        std::int64_t& acc = run.output(tile.row0 + i, d);
        acc += pass.output(i, d);
        if (acc < lo || acc > hi) run.overflow = true;
      }
    }
    run.passes.push_back(std::move(pass));
  }
  return run;
}

}  // namespace

TiledRun run_tiled(const SparseFilterMatrix& weights, const DataMatrix& data,
                   const ArrayConfig& cfg) {
  if (weights.cols() != data.rows()) {
    std::ostringstream msg;
    msg << "run_tiled: filter matrix has " << weights.cols() << " columns but data has "
        << data.rows() << " channels";
    throw ConfigError(msg.str());
  }
  return run_plan(weights.rows(), weights.cols(), data, cfg, [&](const Tile& t) {
    return plain_tile(weights, t.row0, t.col0, t.rows, t.cols);
  });
}

TiledRun run_tiled(const PackedFilterMatrix& weights, const DataMatrix& data,
                   const ArrayConfig& cfg) {
  if (weights.source_cols() != data.rows()) {
    throw ConfigError("run_tiled: packed matrix source columns do not match data channels");
  }
  if (cfg.cell.kind != CellKind::kMultiplexed) {
    throw ConfigError("run_tiled: packed matrices need MX cells");
  }
  if (weights.grouping().max_group_size() > static_cast<std::size_t>(cfg.cell.mux_width)) {
    std::ostringstream msg;
    msg << "run_tiled: group of " << weights.grouping().max_group_size()
        << " columns exceeds mux_width " << cfg.cell.mux_width;
    throw ConfigError(msg.str());
  }
  return run_plan(weights.rows(), weights.packed_cols(), data, cfg, [&](const Tile& t) {
    return packed_tile(weights, t.row0, t.col0, t.rows, t.cols);
  });
}

}  // namespace colpack::sim
