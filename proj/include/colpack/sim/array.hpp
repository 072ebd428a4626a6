// array.hpp - cycle-accurate bit-serial weight-stationary systolic array.
//
// Geometry: cell (i, j) stores weight W[i][j]. Input channel words enter the
// bottom edge of their column and move up one row per cycle; accumulation
// streams enter the left edge at zero and move right one column per cycle,
// leaving at the right edge. Column j's input stream is delayed j cycles and
// row i's accumulation stream is delayed by its distance from the bottom edge
// (rows - 1 - i), which lines every word up with its partner in each cell.
//
// Word timing per input wire: sample d travels in lane q = d % interleave as
// word w = d / interleave; its first bit enters column j at
//   j + w * word_period + input_bits * q.
// A BL array therefore carries one 8-bit word per 8 cycles; an IL/MX array
// with k-bit accumulation carries `interleave` lanes, each lane seeing one
// word per k cycles (k - 8 idle cycles that the other lanes fill).
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "colpack/core/matrix.hpp"
#include "colpack/core/types.hpp"

namespace colpack::sim {

// Input data matrix: one row per input channel, one column per sample.
using DataMatrix = Matrix<std::int8_t>;

enum class CellKind { kBalanced, kInterleaved, kMultiplexed };

const char* to_string(CellKind kind);

struct CellConfig {
  CellKind kind = CellKind::kInterleaved;
  int input_bits = 8;
  int acc_bits = 32;
  int interleave = 4;  // MAC lanes per cell
  int mux_width = 1;   // input channels wired into each cell

  static CellConfig balanced();
  static CellConfig interleaved(int acc_bits);
  static CellConfig multiplexed(int acc_bits, int mux_width);

  int word_period() const { return input_bits > acc_bits ? input_bits : acc_bits; }
  // Idle cycles between consecutive words of one lane on the input wire.
  int word_gap() const { return word_period() - input_bits; }
  // Extra bits per weight load word selecting the multiplexed channel.
  int slot_bits() const;

  void validate() const;
};

struct ArrayConfig {
  std::size_t rows = 32;
  std::size_t cols = 32;
  CellConfig cell;

  void validate() const;
};

struct TileCell {
  std::int8_t weight = 0;
  std::uint8_t channel_slot = 0;
};

// Weights loaded into the array for one pass, plus the data-matrix channels
// wired into each physical column (several for MX columns).
struct ArrayTile {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<TileCell> cells;                     // rows x cols, row-major
  std::vector<std::vector<std::size_t>> channels;  // per column

  const TileCell& cell(std::size_t i, std::size_t j) const { return cells[i * cols + j]; }

  // Dense rows x data_channels weight matrix the tile computes with.
  SparseFilterMatrix unpacked(std::size_t data_channels) const;
};

ArrayTile plain_tile(const SparseFilterMatrix& f, std::size_t row0, std::size_t col0,
                     std::size_t rows, std::size_t cols);
ArrayTile packed_tile(const PackedFilterMatrix& p, std::size_t row0, std::size_t col0,
                      std::size_t rows, std::size_t cols);

struct WordEvent {
  std::size_t line = 0;    // array column for inputs, array row for outputs
  std::size_t sample = 0;
  std::size_t lane = 0;
  std::uint64_t first_cycle = 0;
  std::uint64_t last_cycle = 0;
};

struct SimTrace {
  AccMatrix output;  // tile rows x samples
  std::uint64_t cycles_weight_load = 0;
  std::uint64_t cycles_compute = 0;  // first input bit to last output bit, inclusive
  std::uint64_t cycles_total = 0;
  std::uint64_t stream_cycles = 0;   // cycles until the last input bit has entered
  int word_period = 0;
  int interleave = 0;
  std::vector<WordEvent> input_arrivals;     // first word per (column, sample)
  std::vector<WordEvent> output_departures;  // per (row, sample)
  bool overflow = false;
};

// Runs one weight-stationary pass. Cycle 0 is the first compute cycle; the
// weight load is accounted separately in cycles_weight_load.
SimTrace simulate_array(const ArrayTile& tile, const DataMatrix& data, const ArrayConfig& cfg);

// Closed-form timing of the same schedule.
namespace timing {

std::uint64_t input_first_cycle(const ArrayConfig& cfg, std::size_t column, std::size_t sample);
// Cycle the first/last bit of (row, sample) is on the right-edge output wire.
std::uint64_t output_first_cycle(const ArrayConfig& cfg, std::size_t row, std::size_t sample);
std::uint64_t output_last_cycle(const ArrayConfig& cfg, std::size_t row, std::size_t sample);
std::uint64_t stream_cycles(const ArrayConfig& cfg, std::size_t samples);
std::uint64_t compute_cycles(const ArrayConfig& cfg, std::size_t samples);
std::uint64_t weight_load_cycles(const ArrayConfig& cfg);

}  // namespace timing

}  // namespace colpack::sim
