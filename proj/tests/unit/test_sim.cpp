#include <random>

#include "colpack/core/error.hpp"
#include "colpack/core/shift.hpp"
#include "colpack/packing/grouping.hpp"
#include "colpack/packing/pack.hpp"
#include "colpack/packing/prune.hpp"
#include "colpack/sim/array.hpp"
#include "colpack/sim/bitserial.hpp"
#include "colpack/sim/golden.hpp"
#include "colpack/sim/layer.hpp"
#include "colpack/sim/tiling.hpp"
#include "doctest.h"
#include "support/oracles.hpp"
#include "support/random.hpp"

using namespace colpack;
using namespace colpack::sim;

namespace {

bool fits(std::int64_t v, int bits) {
  return v >= -(std::int64_t{1} << (bits - 1)) && v < (std::int64_t{1} << (bits - 1));
}

ArrayConfig array(std::size_t r, std::size_t c, CellConfig cell) { return ArrayConfig{r, c, cell}; }

}  // namespace

TEST_CASE("bit-serial MAC: zero weight passes the accumulation through") {
  const std::vector<std::int8_t> x{-128, -1, 0, 1, 127};
  const std::vector<std::int64_t> y{5, -7, 1 << 20, -(1 << 20), 0};
  const auto r = bitserial_mac(x, 0, y, 32);
  CHECK(r.y_out == y);
  CHECK_FALSE(r.overflow);
  CHECK(r.cycles == 5 * 32);
}

TEST_CASE("bit-serial MAC: 1 x 1 + 0 = 1") {
  const std::vector<std::int8_t> x{1};
  const std::vector<std::int64_t> y{0};
  CHECK(bitserial_mac(x, 1, y, 32).y_out[0] == 1);
}

TEST_CASE("bit-serial MAC: exhaustive cross product at k = 32") {
  std::vector<std::int8_t> xs;
  for (int v = -128; v <= 127; ++v) xs.push_back(static_cast<std::int8_t>(v));
  for (std::int64_t y0 : {std::int64_t{0}, std::int64_t{1} << 20, -(std::int64_t{1} << 20)}) {
    const std::vector<std::int64_t> ys(xs.size(), y0);
    for (int w = -128; w <= 127; ++w) {
      const auto r = bitserial_mac(xs, static_cast<std::int8_t>(w), ys, 32);
      bool all = !r.overflow;
      for (std::size_t i = 0; i < xs.size(); ++i) all = all && r.y_out[i] == y0 + xs[i] * w;
      REQUIRE_MESSAGE(all, "w = " << w << ", y = " << y0);
    }
  }
}

TEST_CASE("bit-serial MAC: k = 16 flags exactly the wrapping words") {
  std::vector<std::int8_t> xs;
  for (int v = -128; v <= 127; ++v) xs.push_back(static_cast<std::int8_t>(v));
  for (std::int64_t y0 : {std::int64_t{0}, std::int64_t{16384}, std::int64_t{-16384}}) {
    for (int w = -128; w <= 127; ++w) {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const std::vector<std::int8_t> x1{xs[i]};
        const std::vector<std::int64_t> y1{y0};
        const auto r = bitserial_mac(x1, static_cast<std::int8_t>(w), y1, 16);
        const std::int64_t exact = y0 + xs[i] * w;
        REQUIRE(r.overflow == !fits(exact, 16));
        if (!r.overflow) REQUIRE(r.y_out[0] == exact);
      }
    }
  }
}

TEST_CASE("bit-serial MAC rejects accumulation inputs wider than k") {
  const std::vector<std::int8_t> x{1};
  const std::vector<std::int64_t> y{1 << 20};
  CHECK_THROWS_AS(bitserial_mac(x, 1, y, 16), ConfigError);
}

TEST_CASE("cell configuration rules") {
  CHECK_NOTHROW(CellConfig::balanced().validate());
  CHECK(CellConfig::interleaved(32).interleave == 4);
  CHECK(CellConfig::interleaved(16).interleave == 2);
  CHECK(CellConfig::interleaved(32).word_gap() == 24);
  CHECK(CellConfig::interleaved(16).word_gap() == 8);
  CHECK_THROWS_AS(CellConfig::interleaved(24).validate(), ConfigError);
  CHECK_THROWS_AS(CellConfig::multiplexed(32, 9).validate(), ConfigError);
  CellConfig bad = CellConfig::balanced();
  bad.acc_bits = 16;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK(CellConfig::multiplexed(32, 8).slot_bits() == 3);
}

TEST_CASE("3x3 identity on BL cells reproduces the input with skewed timing") {
  SparseFilterMatrix eye(3, 3, std::vector<std::int8_t>{1, 0, 0, 0, 1, 0, 0, 0, 1});
  DataMatrix data(3, 4, std::vector<std::int8_t>{1, -2, 3, 4, 5, 6, -7, 8, 9, 10, 11, -12});
  const ArrayConfig cfg = array(3, 3, CellConfig::balanced());
  const SimTrace tr = simulate_array(plain_tile(eye, 0, 0, 3, 3), data, cfg);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t d = 0; d < 4; ++d) CHECK(tr.output(i, d) == data(i, d));
  }
  CHECK_FALSE(tr.overflow);
  CHECK(tr.word_period == 8);
  // Row i leaves one cycle after row i+1 (skew), word after word every 8 cycles.
  for (const WordEvent& e : tr.output_departures) {
    CHECK(e.first_cycle == timing::output_first_cycle(cfg, e.line, e.sample));
    CHECK(e.first_cycle == 2 + (2 - e.line) + 8 * e.sample + 1);
  }
  for (const WordEvent& e : tr.input_arrivals) CHECK(e.first_cycle == e.line + 8 * e.sample);
}

TEST_CASE("random 3x3 by 3x4 on IL cells at k = 32 matches the reference") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const auto w = test::random_int8(3, 3, rng);
    const auto x = test::random_int8(3, 4, rng);
    const ArrayConfig cfg = array(3, 3, CellConfig::interleaved(32));
    const SimTrace tr = simulate_array(plain_tile(w, 0, 0, 3, 3), x, cfg);
    CHECK(tr.output == test::oracle_matmul(w, x));
    CHECK(tr.interleave == 4);
    // Consecutive words of one lane on one input wire are 32 cycles apart,
    // leaving a 24-cycle gap after each 8-bit word.
    for (const WordEvent& a : tr.input_arrivals) {
      for (const WordEvent& b : tr.input_arrivals) {
        if (a.line == b.line && a.lane == b.lane && b.sample == a.sample + 4) {
          CHECK(b.first_cycle - a.last_cycle - 1 == 24);
        }
      }
    }
  }
}

TEST_CASE("MX cells select their channel: two-column example") {
  // Packed column 0 combines channels {0, 1}, packed column 1 holds channel 2.
  // Rows 0 and 2 use channel 0, row 1 uses channel 1.
  SparseFilterMatrix sparse(3, 3, std::vector<std::int8_t>{2, 0, 1, 0, -3, 0, 5, 0, 4});
  const ColumnGrouping g({{0, 1}, {2}});
  const auto packed = packing::pack(sparse, g);
  const ArrayConfig cfg = array(3, 2, CellConfig::multiplexed(32, 2));
  DataMatrix x(3, 5);
  std::mt19937_64 rng(9);
  x = test::random_int8(3, 5, rng);
  const SimTrace tr = simulate_array(packed_tile(packed, 0, 0, 3, 2), x, cfg);
  CHECK(tr.output == test::oracle_matmul(sparse, x));
}

TEST_CASE("channel slot beyond the mux width is a configuration error") {
  ArrayTile t{1, 1, {TileCell{3, 2}}, {{0, 1}}};
  DataMatrix x(2, 1, std::int8_t{1});
  CHECK_THROWS_AS(simulate_array(t, x, array(1, 1, CellConfig::multiplexed(32, 2))),
                  ConfigError);
}

TEST_CASE("simulate_array equals the reference for every cell kind") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t R = 1 + rng() % 6;
    const std::size_t C = 1 + rng() % 6;
    const std::size_t rows = 1 + rng() % R;
    const std::size_t cols = 1 + rng() % C;
    const std::size_t D = 1 + rng() % 9;
    const int kind = trial % 3;
    if (kind == 0) {
      // BL: keep products within 8-bit accumulation.
      const auto w = test::random_int8(rows, cols, rng, -1, 1);
      const auto x = test::random_int8(cols, D, rng, -20, 20);
      const auto tr = simulate_array(plain_tile(w, 0, 0, rows, cols), x,
                                     array(R, C, CellConfig::balanced()));
      CHECK(tr.output == test::oracle_matmul(w, x));
      CHECK_FALSE(tr.overflow);
    } else {
      const int k = kind == 1 ? 16 : 32;
      const auto w = test::random_int8(rows, cols, rng, k == 16 ? -12 : -128, k == 16 ? 12 : 127);
      const auto x = test::random_int8(cols, D, rng);
      const auto tr = simulate_array(plain_tile(w, 0, 0, rows, cols), x,
                                     array(R, C, CellConfig::interleaved(k)));
      CHECK(tr.output == test::oracle_matmul(w, x));
      CHECK_FALSE(tr.overflow);
    }
  }
}

TEST_CASE("simulation flags k-bit overflow") {
  SparseFilterMatrix w(1, 4, std::int8_t{-128});
  DataMatrix x(4, 1, std::int8_t{-128});
  CHECK(simulate_array(plain_tile(w, 0, 0, 1, 4), x, array(1, 4, CellConfig::interleaved(16)))
            .overflow);
  CHECK_FALSE(
      simulate_array(plain_tile(w, 0, 0, 1, 4), x, array(1, 4, CellConfig::interleaved(32)))
          .overflow);
}

TEST_CASE("interleaved lanes equal independent single-stream runs") {
  std::mt19937_64 rng(12);
  const auto w = test::random_int8(4, 4, rng);
  const auto x = test::random_int8(4, 4, rng);
  const ArrayConfig cfg = array(4, 4, CellConfig::interleaved(32));
  const auto all = simulate_array(plain_tile(w, 0, 0, 4, 4), x, cfg);
  for (std::size_t d = 0; d < 4; ++d) {
    DataMatrix one(4, 1);
    for (std::size_t m = 0; m < 4; ++m) one(m, 0) = x(m, d);
    const auto single = simulate_array(plain_tile(w, 0, 0, 4, 4), one, cfg);
    for (std::size_t i = 0; i < 4; ++i) CHECK(all.output(i, d) == single.output(i, 0));
  }
}

TEST_CASE("halving the accumulator halves the per-word compute cycles") {
  const ArrayConfig c32 = array(8, 8, CellConfig::interleaved(32));
  const ArrayConfig c16 = array(8, 8, CellConfig::interleaved(16));
  CHECK(c32.cell.word_period() == 32);
  CHECK(c16.cell.word_period() == 16);
  // Steady-state cycles per sample: word_period / interleave = 8 for both;
  // per word it halves.
  const auto span32 = timing::output_first_cycle(c32, 0, 4) - timing::output_first_cycle(c32, 0, 0);
  const auto span16 = timing::output_first_cycle(c16, 0, 2) - timing::output_first_cycle(c16, 0, 0);
  CHECK(span32 == 32);
  CHECK(span16 == 16);
}

TEST_CASE("measured departures match the closed-form timing") {
  std::mt19937_64 rng(3);
  const auto w = test::random_int8(5, 4, rng);
  const auto x = test::random_int8(4, 11, rng);
  for (int k : {16, 32}) {
    const ArrayConfig cfg = array(6, 5, CellConfig::interleaved(k));
    const auto tr = simulate_array(plain_tile(w, 0, 0, 5, 4), x, cfg);
    CHECK(tr.output_departures.size() == 5 * 11);
    std::uint64_t last = 0;
    for (const WordEvent& e : tr.output_departures) {
      CHECK(e.first_cycle == timing::output_first_cycle(cfg, e.line, e.sample));
      CHECK(e.last_cycle == timing::output_last_cycle(cfg, e.line, e.sample));
      last = std::max(last, e.last_cycle);
    }
    CHECK(tr.cycles_compute >= last + 1);
    CHECK(tr.input_arrivals.size() == 4 * 11);
  }
}

TEST_CASE("tile plans") {
  const ArrayConfig cfg = array(32, 32, CellConfig::interleaved(32));
  CHECK(tile_plan(96, 95, cfg).tile_count() == 9);
  CHECK(tile_plan(96, 17, cfg).tile_count() == 3);
  CHECK(tile_plan(32, 32, cfg).tile_count() == 1);
  const auto plan = tile_plan(70, 40, cfg);
  CHECK(plan.tile_count() == tile_count(70, 40, 32, 32));
  std::vector<int> cover(70 * 40, 0);
  for (const Tile& t : plan.tiles) {
    for (std::size_t r = t.row0; r < t.row0 + t.rows; ++r) {
      for (std::size_t c = t.col0; c < t.col0 + t.cols; ++c) ++cover[r * 40 + c];
    }
  }
  CHECK(std::all_of(cover.begin(), cover.end(), [](int v) { return v == 1; }));
  REQUIRE(plan.schedule.size() == 2 * plan.tile_count());
  CHECK(plan.schedule[0].kind == PhaseKind::kWeightLoad);
  CHECK(plan.schedule[1].kind == PhaseKind::kCompute);
  CHECK(plan.final_in_row(1));
  CHECK_FALSE(plan.final_in_row(0));
}

TEST_CASE("weight loads overlap the previous drain") {
  const ArrayConfig cfg = array(8, 8, CellConfig::interleaved(32));
  const auto plan = tile_plan(16, 16, cfg);
  const auto cyc = schedule_cycles(plan, cfg, 16);
  REQUIRE(cyc.tiles.size() == 4);
  for (std::size_t t = 1; t < 4; ++t) {
    CHECK(cyc.tiles[t].load_start == cyc.tiles[t - 1].stream_end);
    CHECK(cyc.tiles[t].load_start < cyc.tiles[t - 1].compute_end);
  }
  CHECK(cyc.total == cyc.tiles.back().compute_end);
}

TEST_CASE("tiled runs accumulate column tiles exactly") {
  std::mt19937_64 rng(31);
  const auto w = test::random_sparse(13, 11, 0.4, rng);
  const auto x = test::random_int8(11, 6, rng);
  const auto run = run_tiled(w, x, array(4, 3, CellConfig::interleaved(32)));
  CHECK(run.output == test::oracle_matmul(w, x));
  CHECK(run.plan.tile_count() == 4 * 4);
  CHECK_FALSE(run.overflow);
}

TEST_CASE("MX runs on packed matrices equal IL runs on the unpacked matrix") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = test::random_sparse(20, 24, 0.15, rng);
    const auto g = packing::group_columns(f, 8, 0.5).grouping;
    const auto pruned = packing::group_prune(f, g);
    const auto packed = packing::pack(pruned, g);
    const auto x = test::random_int8(24, 7, rng);
    const auto mx = run_tiled(packed, x, array(8, 8, CellConfig::multiplexed(32, 8)));
    const auto il = run_tiled(pruned, x, array(8, 8, CellConfig::interleaved(32)));
    CHECK(mx.output == il.output);
    CHECK(mx.plan.tile_count() <= il.plan.tile_count());
  }
}

TEST_CASE("packed runs demand MX cells wide enough for the groups") {
  const SparseFilterMatrix f(2, 4, std::vector<std::int8_t>{1, 0, 0, 0, 0, 0, 0, 2});
  const auto packed = packing::pack(f, ColumnGrouping({{0, 1, 2, 3}}));
  const DataMatrix x(4, 1, std::int8_t{1});
  CHECK_THROWS_AS(run_tiled(packed, x, array(4, 4, CellConfig::interleaved(32))), ConfigError);
  CHECK_THROWS_AS(run_tiled(packed, x, array(4, 4, CellConfig::multiplexed(32, 2))), ConfigError);
}

TEST_CASE("shift block") {
  Int8Tensor m{{1, 2, 2}, {1, 2, 3, 4}};
  const std::vector<std::uint8_t> ident{kIdentityShift};
  CHECK(shift_apply(m, ident) == m);
  const std::vector<std::uint8_t> right{5};  // dx = +1
  CHECK(shift_apply(m, right).data == std::vector<std::int8_t>{0, 1, 0, 3});
}

TEST_CASE("shift then opposite shift restores the interior") {
  std::mt19937_64 rng(4);
  const auto m = test::random_maps(9, 5, 6, rng, -128, 127);
  std::vector<std::uint8_t> dirs(9), back(9);
  for (std::uint8_t d = 0; d < 9; ++d) {
    dirs[d] = d;
    back[d] = opposite_shift(d);
  }
  const auto round = shift_apply(shift_apply(m, dirs), back);
  for (std::size_t c = 0; c < 9; ++c) {
    const auto off = shift_offset(static_cast<std::uint8_t>(c));
    for (std::size_t y = 0; y < 5; ++y) {
      for (std::size_t x = 0; x < 6; ++x) {
        const std::size_t i = (c * 5 + y) * 6 + x;
        const long sy = static_cast<long>(y) + off.dy;
        const long sx = static_cast<long>(x) + off.dx;
        const bool lost = sy < 0 || sy >= 5 || sx < 0 || sx >= 6;
        if (lost) {
          CHECK(round.data[i] == 0);
        } else {
          CHECK(round.data[i] == m.data[i]);
        }
      }
    }
  }
}

TEST_CASE("ReLU and requantization") {
  const QuantParams q0{8, 8, 32, 0};
  CHECK(relu_quant(-5, q0) == 0);
  CHECK(relu_quant(300, QuantParams{8, 8, 32, 2}) == 75);
  CHECK(relu_quant(std::int64_t{1} << 20, QuantParams{8, 8, 32, 4}) == 127);
  CHECK(relu_quant(6, QuantParams{8, 8, 32, 2}) == 2);
}

TEST_CASE("run_layer on a single identity weight") {
  LayerDef layer;
  layer.weights = SparseFilterMatrix(1, 1, std::int8_t{1});
  layer.width = 3;
  layer.height = 2;
  layer.shifts = {kIdentityShift};
  Int8Tensor in{{1, 2, 3}, {1, -2, 3, 127, -128, 0}};
  const auto r = run_layer(layer, in, layer_array_config(layer, 4, 4));
  CHECK(r.output.data == std::vector<std::int8_t>{1, 0, 3, 127, 0, 0});
}

TEST_CASE("run_layer with negative weights on positive inputs is all zero") {
  LayerDef layer;
  layer.weights = SparseFilterMatrix(3, 2, std::int8_t{-4});
  layer.width = layer.height = 3;
  layer.shifts = {4, 4};
  std::mt19937_64 rng(1);
  const auto in = test::random_maps(2, 3, 3, rng, 1, 100);
  const auto r = run_layer(layer, in, layer_array_config(layer, 4, 4));
  CHECK(std::all_of(r.output.data.begin(), r.output.data.end(), [](auto v) { return v == 0; }));
}

TEST_CASE("run_layer equals the plain reference, packed and unpacked") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 6; ++trial) {
    LayerDef layer;
    layer.weights = test::random_sparse(20, 12, 0.3, rng);
    layer.width = 4;
    layer.height = 3;
    layer.shifts = round_robin_shifts(12);
    layer.quant.acc_bits = trial % 2 == 0 ? 32 : 16;
    layer.quant.out_shift = 6;
    if (trial >= 3) {
      const auto g = packing::group_columns(layer.weights, 4, 0.5).grouping;
      layer.weights = packing::group_prune(layer.weights, g);
      layer.grouping = g;
    }
    const auto in = test::random_maps(12, 3, 4, rng, 0, 40);
    const auto got = run_layer(layer, in, layer_array_config(layer, 8, 8));
    const auto want = reference_layer(layer, in);
    CHECK(got.accumulators == want.accumulators);
    CHECK(got.output == want.output);
  }
}

TEST_CASE("run_layer rejects mismatched inputs") {
  LayerDef layer;
  layer.weights = SparseFilterMatrix(2, 2, std::int8_t{1});
  layer.width = layer.height = 2;
  layer.shifts = {4, 4};
  Int8Tensor in{{3, 2, 2}, std::vector<std::int8_t>(12, 0)};
  CHECK_THROWS_AS(run_layer(layer, in, layer_array_config(layer, 2, 2)), ConfigError);
}
