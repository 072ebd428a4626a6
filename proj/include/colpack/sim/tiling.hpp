// tiling.hpp - partitioned matrix multiplication on a fixed-size array.
//
// Tiles are visited row-tile major. Each pass loads weights then streams the
// whole data matrix; the next tile's weight load starts once the current
// tile's last input bit has entered the array and overlaps its drain. Partial
// sums of the column tiles of one row tile accumulate in a k-bit side buffer.
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "colpack/core/matrix.hpp"
#include "colpack/core/types.hpp"
#include "colpack/sim/array.hpp"

namespace colpack::sim {

struct Tile {
  std::size_t row0 = 0;
  std::size_t col0 = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

enum class PhaseKind { kWeightLoad, kCompute };

struct Phase {
  PhaseKind kind;
  std::size_t tile;
};

struct TilePlan {
  std::size_t matrix_rows = 0;
  std::size_t matrix_cols = 0;
  std::size_t array_rows = 0;
  std::size_t array_cols = 0;
  std::size_t row_tiles = 0;
  std::size_t col_tiles = 0;
  std::vector<Tile> tiles;
  std::vector<Phase> schedule;  // load 0, compute 0, load 1, compute 1, ...

  std::size_t tile_count() const { return tiles.size(); }
  // Last column tile of a row tile: ReLU/quantization follows it.
  bool final_in_row(std::size_t tile) const { return (tile + 1) % col_tiles == 0; }
};

std::size_t tile_count(std::size_t rows, std::size_t cols, std::size_t array_rows,
                       std::size_t array_cols);

TilePlan tile_plan(std::size_t rows, std::size_t cols, const ArrayConfig& cfg);

struct TileCycles {
  std::uint64_t load_start = 0;
  std::uint64_t compute_start = 0;
  std::uint64_t stream_end = 0;
  std::uint64_t compute_end = 0;
};

struct ScheduleCycles {
  std::vector<TileCycles> tiles;
  std::uint64_t total = 0;          // makespan from first weight load
  std::uint64_t weight_load = 0;    // sum of load phases
  std::uint64_t compute = 0;        // sum of compute phases
  std::uint64_t exposed_load = 0;   // load cycles not hidden behind a drain
};

// Cycle accounting of a plan streaming `samples` data columns per pass.
ScheduleCycles schedule_cycles(const TilePlan& plan, const ArrayConfig& cfg, std::size_t samples);

struct TiledRun {
  AccMatrix output;  // matrix rows x samples
  TilePlan plan;
  ScheduleCycles cycles;
  std::vector<SimTrace> passes;
  bool overflow = false;
};

// Plain sparse matrix on BL/IL (or MX with one wire per column) cells.
TiledRun run_tiled(const SparseFilterMatrix& weights, const DataMatrix& data,
                   const ArrayConfig& cfg);
// Packed matrix on MX cells.
TiledRun run_tiled(const PackedFilterMatrix& weights, const DataMatrix& data,
                   const ArrayConfig& cfg);

}  // namespace colpack::sim
