#include "colpack/sim/array.hpp"

#include <sstream>

#include "colpack/core/error.hpp"
#include "colpack/sim/bitserial.hpp"

namespace colpack::sim {

const char* to_string(CellKind kind) {
  switch (kind) {
    case CellKind::kBalanced:
      return "BL";
    case CellKind::kInterleaved:
      return "IL";
    case CellKind::kMultiplexed:
      return "MX";
  }
  return "?";
}

CellConfig CellConfig::balanced() {
  return CellConfig{CellKind::kBalanced, 8, 8, 1, 1};
}

CellConfig CellConfig::interleaved(int acc_bits) {
  return CellConfig{CellKind::kInterleaved, 8, acc_bits, acc_bits / 8, 1};
}

CellConfig CellConfig::multiplexed(int acc_bits, int mux_width) {
  return CellConfig{CellKind::kMultiplexed, 8, acc_bits, acc_bits / 8, mux_width};
}

int CellConfig::slot_bits() const {
  int bits = 0;
  while ((1 << bits) < mux_width) ++bits;
  return bits;
}

void CellConfig::validate() const {
  if (input_bits != 8) throw ConfigError("cell: input words are 8 bits");
  if (mux_width < 1 || mux_width > 8) throw ConfigError("cell: mux_width must lie in 1..8");
  switch (kind) {
    case CellKind::kBalanced:
      if (acc_bits != input_bits) throw ConfigError("BL cell: acc_bits must equal input_bits");
      if (interleave != 1) throw ConfigError("BL cell: interleave must be 1");
      if (mux_width != 1) throw ConfigError("BL cell: no input multiplexing");
      break;
    case CellKind::kInterleaved:
    case CellKind::kMultiplexed:
      if (acc_bits != 16 && acc_bits != 32) {
        throw ConfigError("IL/MX cell: acc_bits must be 16 or 32");
      }
      if (interleave != acc_bits / input_bits) {
        throw ConfigError("IL/MX cell: interleave must equal acc_bits / input_bits");
      }
      if (kind == CellKind::kInterleaved && mux_width != 1) {
        throw ConfigError("IL cell: no input multiplexing");
      }
      break;
  }
}

void ArrayConfig::validate() const {
  if (rows < 1 || cols < 1) throw ConfigError("array dimensions must be >= 1");
  cell.validate();
}

SparseFilterMatrix ArrayTile::unpacked(std::size_t data_channels) const {
  SparseFilterMatrix out(rows, data_channels);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const TileCell& c = cell(i, j);
      if (c.weight == 0) continue;
      if (c.channel_slot >= channels[j].size()) {
        throw ConfigError("tile: channel_slot selects an unwired channel");
      }
      const std::size_t ch = channels[j][c.channel_slot];
      if (ch >= data_channels) throw ConfigError("tile: channel outside data matrix");
      out(i, ch) = c.weight;
    }
  }
  return out;
}

ArrayTile plain_tile(const SparseFilterMatrix& f, std::size_t row0, std::size_t col0,
                     std::size_t rows, std::size_t cols) {
  if (row0 + rows > f.rows() || col0 + cols > f.cols()) {
    throw InvariantError("plain_tile: tile exceeds filter matrix");
  }
  ArrayTile t{rows, cols, std::vector<TileCell>(rows * cols), {}};
  t.channels.resize(cols);
  for (std::size_t j = 0; j < cols; ++j) t.channels[j] = {col0 + j};
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) t.cells[i * cols + j].weight = f(row0 + i, col0 + j);
  }
  return t;
}

ArrayTile packed_tile(const PackedFilterMatrix& p, std::size_t row0, std::size_t col0,
                      std::size_t rows, std::size_t cols) {
  if (row0 + rows > p.rows() || col0 + cols > p.packed_cols()) {
    throw InvariantError("packed_tile: tile exceeds packed matrix");
  }
  ArrayTile t{rows, cols, std::vector<TileCell>(rows * cols), {}};
  t.channels.resize(cols);
  for (std::size_t j = 0; j < cols; ++j) t.channels[j] = p.grouping()[col0 + j];
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (const auto& c = p.cell(row0 + i, col0 + j)) {
        t.cells[i * cols + j] = TileCell{c->weight, static_cast<std::uint8_t>(c->channel_slot)};
      }
    }
  }
  return t;
}

namespace timing {

namespace {

struct Slot {
  std::uint64_t word;
  std::uint64_t lane;
};

Slot slot_of(const ArrayConfig& cfg, std::size_t sample) {
  const auto lanes = static_cast<std::uint64_t>(cfg.cell.interleave);
  return {sample / lanes, sample % lanes};
}

std::uint64_t lane_start(const ArrayConfig& cfg, std::size_t sample) {
  const Slot s = slot_of(cfg, sample);
  return s.word * static_cast<std::uint64_t>(cfg.cell.word_period()) +
         s.lane * static_cast<std::uint64_t>(cfg.cell.input_bits);
}

}  // namespace

std::uint64_t input_first_cycle(const ArrayConfig& cfg, std::size_t column, std::size_t sample) {
  return column + lane_start(cfg, sample);
}

std::uint64_t output_first_cycle(const ArrayConfig& cfg, std::size_t row, std::size_t sample) {
  // Cell (row, cols-1) computes bit 0 at its offset; the result register puts
  // it on the output wire one cycle later.
  return (cfg.cols - 1) + (cfg.rows - 1 - row) + lane_start(cfg, sample) + 1;
}

std::uint64_t output_last_cycle(const ArrayConfig& cfg, std::size_t row, std::size_t sample) {
  return output_first_cycle(cfg, row, sample) + cfg.cell.word_period() - 1;
}

std::uint64_t stream_cycles(const ArrayConfig& cfg, std::size_t samples) {
  if (samples == 0) return 0;
  return input_first_cycle(cfg, cfg.cols - 1, samples - 1) + cfg.cell.input_bits;
}

std::uint64_t compute_cycles(const ArrayConfig& cfg, std::size_t samples) {
  if (samples == 0) return 0;
  return output_last_cycle(cfg, 0, samples - 1) + 1;
}

std::uint64_t weight_load_cycles(const ArrayConfig& cfg) {
  return cfg.rows * static_cast<std::uint64_t>(8 + cfg.cell.slot_bits());
}

}  // namespace timing

SimTrace simulate_array(const ArrayTile& tile, const DataMatrix& data, const ArrayConfig& cfg) {
  cfg.validate();
  const CellConfig& cell = cfg.cell;
  if (tile.rows > cfg.rows || tile.cols > cfg.cols) {
    std::ostringstream msg;
    msg << "simulate_array: " << tile.rows << "x" << tile.cols << " tile does not fit "
        << cfg.rows << "x" << cfg.cols << " array";
    throw ConfigError(msg.str());
  }
  if (tile.channels.size() != tile.cols || tile.cells.size() != tile.rows * tile.cols) {
    throw InvariantError("simulate_array: malformed tile");
  }
  for (std::size_t j = 0; j < tile.cols; ++j) {
    if (tile.channels[j].size() > static_cast<std::size_t>(cell.mux_width)) {
      throw ConfigError("simulate_array: column wires more channels than mux_width");
    }
    for (std::size_t ch : tile.channels[j]) {
      if (ch >= data.rows()) throw ConfigError("simulate_array: channel outside data matrix");
    }
  }
  for (std::size_t i = 0; i < tile.rows; ++i) {
    for (std::size_t j = 0; j < tile.cols; ++j) {
      const TileCell& c = tile.cell(i, j);
      if (c.channel_slot >= cell.mux_width) {
        std::ostringstream msg;
        msg << "simulate_array: channel_slot " << int{c.channel_slot} << " at cell (" << i
            << ", " << j << ") exceeds mux_width " << cell.mux_width;
        throw ConfigError(msg.str());
      }
      if (c.weight != 0 && c.channel_slot >= tile.channels[j].size()) {
        throw ConfigError("simulate_array: channel_slot selects an unwired channel");
      }
    }
  }

  const std::size_t R = cfg.rows;
  const std::size_t C = cfg.cols;
  const std::size_t D = data.cols();
  const auto P = static_cast<std::uint64_t>(cell.word_period());
  const auto B = static_cast<std::uint64_t>(cell.input_bits);
  const auto S = static_cast<std::size_t>(cell.interleave);
  const auto MX = static_cast<std::size_t>(cell.mux_width);

  SimTrace trace;
  trace.output = AccMatrix(tile.rows, D);
  trace.word_period = cell.word_period();
  trace.interleave = cell.interleave;
  trace.cycles_weight_load = timing::weight_load_cycles(cfg);
  trace.cycles_compute = timing::compute_cycles(cfg, D);
  trace.stream_cycles = timing::stream_cycles(cfg, D);
  trace.cycles_total = trace.cycles_weight_load + trace.cycles_compute;
  if (D == 0) return trace;

  // Weight-stationary state: one MAC per lane per cell; padding cells hold 0.
  std::vector<BitSerialMac> macs(R * C * S);
  std::vector<std::uint8_t> slot(R * C, 0);
  for (std::size_t i = 0; i < R; ++i) {
    for (std::size_t j = 0; j < C; ++j) {
      std::int8_t w = 0;
      if (i < tile.rows && j < tile.cols) {
        w = tile.cell(i, j).weight;
        slot[i * C + j] = tile.cell(i, j).channel_slot;
      }
      for (std::size_t q = 0; q < S; ++q) macs[(i * C + j) * S + q] = BitSerialMac(w, cell.acc_bits);
    }
  }

  std::vector<std::uint8_t> x_wire(R * C * MX, 0);  // bit at each cell's data input
  std::vector<std::uint8_t> y_reg(R * C * S, 0);    // registered accumulation output
  std::vector<std::uint64_t> out_raw(tile.rows * D, 0);

  auto offset = [&](std::size_t i, std::size_t j) -> std::uint64_t { return j + (R - 1 - i); };

  for (std::uint64_t t = 0; t < trace.cycles_compute; ++t) {
    // 1. Right-edge output wires carry what the last column computed at t-1.
    if (t > 0) {
      for (std::size_t i = 0; i < tile.rows; ++i) {
        for (std::size_t q = 0; q < S; ++q) {
          const std::uint64_t base = offset(i, C - 1) + q * B;
          if (t - 1 < base) continue;
          const std::uint64_t lp = t - 1 - base;
          const std::size_t d = (lp / P) * S + q;
          if (d >= D) continue;
          const std::uint64_t b = lp % P;
          const std::uint8_t bit = y_reg[(i * C + C - 1) * S + q];
          out_raw[i * D + d] |= static_cast<std::uint64_t>(bit) << b;
          if (b == P - 1) {
            trace.output(i, d) = sign_extend(out_raw[i * D + d], cell.acc_bits);
            trace.output_departures.push_back(WordEvent{i, d, q, t - (P - 1), t});
          }
        }
      }
    }

    // 2. Input bits move up one row; the bottom row samples the feed.
    for (std::size_t i = 0; i + 1 < R; ++i) {
      std::copy_n(x_wire.begin() + static_cast<std::ptrdiff_t>((i + 1) * C * MX), C * MX,
                  x_wire.begin() + static_cast<std::ptrdiff_t>(i * C * MX));
    }
    for (std::size_t j = 0; j < C; ++j) {
      std::uint8_t* wires = &x_wire[((R - 1) * C + j) * MX];
      std::fill_n(wires, MX, 0);
      if (j >= tile.cols || t < j) continue;
      const std::uint64_t local = t - j;
      const std::uint64_t phase = local % P;
      const std::size_t q = static_cast<std::size_t>(phase / B);
      if (q >= S) continue;
      const std::size_t d = static_cast<std::size_t>(local / P) * S + q;
      if (d >= D) continue;
      const std::uint64_t b = phase % B;
      for (std::size_t m = 0; m < tile.channels[j].size(); ++m) {
        const auto word = static_cast<std::uint8_t>(data(tile.channels[j][m], d));
        wires[m] = static_cast<std::uint8_t>((word >> b) & 1u);
      }
      if (b == 0) trace.input_arrivals.push_back(WordEvent{j, d, q, t, t + B - 1});
    }

    // 3. Cells fire right to left so each reads its left neighbour's t-1 output.
    for (std::size_t i = 0; i < R; ++i) {
      for (std::size_t jj = C; jj-- > 0;) {
        const std::size_t cell_index = i * C + jj;
        const std::uint8_t x_bit = x_wire[cell_index * MX + slot[cell_index]];
        for (std::size_t q = 0; q < S; ++q) {
          const std::uint64_t base = offset(i, jj) + q * B;
          std::uint8_t& out = y_reg[cell_index * S + q];
          if (t < base) {
            out = 0;
            continue;
          }
          const std::uint64_t lp = t - base;
          const std::uint64_t b = lp % P;
          BitSerialMac& mac = macs[cell_index * S + q];
          if (b == 0) mac.reset();
          const int y_in = jj == 0 ? 0 : y_reg[(cell_index - 1) * S + q];
          out = static_cast<std::uint8_t>(mac.step(x_bit, y_in));
          if (b == P - 1 && mac.overflow()) {
            const std::size_t d = static_cast<std::size_t>(lp / P) * S + q;
            if (d < D) trace.overflow = true;
          }
        }
      }
    }
  }
  return trace;
}

}  // namespace colpack::sim
