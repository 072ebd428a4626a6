#include <filesystem>
#include <random>
#include <sstream>

#include "colpack/core/column_ops.hpp"
#include "colpack/core/error.hpp"
#include "colpack/core/io.hpp"
#include "colpack/core/network.hpp"
#include "colpack/core/quant.hpp"
#include "colpack/core/shift.hpp"
#include "colpack/core/types.hpp"
#include "doctest.h"
#include "support/oracles.hpp"
#include "support/random.hpp"

using namespace colpack;

namespace {

std::vector<std::size_t> cols_of(std::initializer_list<std::size_t> c) { return c; }

LayerDef make_layer(std::size_t rows, std::size_t cols, std::size_t side = 2) {
  LayerDef l;
  l.weights = SparseFilterMatrix(rows, cols, std::int8_t{1});
  l.width = side;
  l.height = side;
  l.shifts = round_robin_shifts(cols);
  return l;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("colpack_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("density of a single column counts covered rows") {
  SparseFilterMatrix f(4, 1, std::vector<std::int8_t>{1, 0, 2, 0});
  CHECK(density(f, cols_of({0})) == doctest::Approx(0.5));
}

TEST_CASE("density is 1 when columns tile all rows disjointly") {
  SparseFilterMatrix f(3, 3, std::vector<std::int8_t>{5, 0, 0, 0, -2, 0, 0, 0, 9});
  CHECK(density(f, cols_of({0, 1, 2})) == 1.0);
}

TEST_CASE("density and conflicts match a brute-force row scan") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = test::random_sparse(96, 2, 0.16, rng);
    const std::vector<std::size_t> cols{0, 1};
    CHECK(density(f, cols) * 96.0 ==
          doctest::Approx(static_cast<double>(test::oracle_covered_rows(f, cols))));
    CHECK(count_conflicts(f, cols) == test::oracle_conflicts(f, cols));
  }
}

TEST_CASE("count_conflicts follows its definition") {
  SparseFilterMatrix shared(3, 2, std::vector<std::int8_t>{1, 1, 1, 0, 0, 1});
  CHECK(count_conflicts(shared, cols_of({0, 1})) == 1);
  SparseFilterMatrix disjoint(2, 2, std::vector<std::int8_t>{1, 0, 0, 1});
  CHECK(count_conflicts(disjoint, cols_of({0, 1})) == 0);
  SparseFilterMatrix three(2, 3, std::int8_t{4});
  CHECK(count_conflicts(three, cols_of({0, 1, 2})) == 4);
}

TEST_CASE("column operations reject malformed groups") {
  SparseFilterMatrix f(2, 2, std::int8_t{1});
  CHECK_THROWS_AS(density(f, cols_of({2})), InvariantError);
  CHECK_THROWS_AS(count_conflicts(f, std::vector<std::size_t>{}), InvariantError);
}

TEST_CASE("grouping partition and size validation") {
  ColumnGrouping ok({{0, 2}, {1}});
  CHECK_NOTHROW(ok.validate_partition(3));
  CHECK_THROWS_AS(ok.validate_partition(4), InvariantError);
  CHECK_THROWS_AS(ColumnGrouping({{0, 1}, {1}}).validate_partition(2), InvariantError);
  CHECK_THROWS_AS(ok.validate_sizes(1), InvariantError);
  CHECK(ok.group_of(3) == std::vector<std::size_t>{0, 1, 0});
  CHECK_FALSE(ok.contiguous());
  CHECK(ColumnGrouping({{0, 1}, {2}}).contiguous());
  CHECK(ColumnGrouping::identity(3).size() == 3);
}

TEST_CASE("packed matrix rejects double occupancy and foreign columns") {
  PackedFilterMatrix p(2, ColumnGrouping({{0, 1}, {2}}));
  p.place(0, 0, 5, 1);
  CHECK(p.cell(0, 0)->channel_slot == 1);
  CHECK_THROWS_AS(p.place(0, 0, 3, 0), InvariantError);
  CHECK_THROWS_AS(p.place(1, 1, 3, 0), InvariantError);
  CHECK(p.nnz() == 1);
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(PackingParams{}.validate());
  CHECK_THROWS_AS((PackingParams{0, 20, 0.5, 1}).validate(), ConfigError);
  CHECK_THROWS_AS((PackingParams{8, 100, 0.5, 1}).validate(), ConfigError);
  CHECK_THROWS_AS((PackingParams{8, 20, -0.1, 1}).validate(), ConfigError);
  CHECK_THROWS_AS((PackingParams{8, 20, 0.5, 0}).validate(), ConfigError);
  CHECK_NOTHROW((QuantParams{8, 8, 16, 3}).validate());
  CHECK_THROWS_AS((QuantParams{8, 8, 24, 0}).validate(), ConfigError);
  CHECK_THROWS_AS((QuantParams{4, 8, 32, 0}).validate(), ConfigError);
}

TEST_CASE("validate_network accepts matching layers") {
  NetworkDef net{{make_layer(8, 4), make_layer(3, 8)}};
  CHECK_FALSE(validate_network(net).has_value());
}

TEST_CASE("validate_network reports the first violation with its layer") {
  NetworkDef mismatch{{make_layer(16, 4), make_layer(3, 8)}};
  auto diag = validate_network(mismatch);
  REQUIRE(diag.has_value());
  CHECK(diag->layer == 0);
  CHECK(diag->message.find("dimension mismatch") != std::string::npos);

  NetworkDef shifts{{make_layer(8, 4)}};
  shifts.layers[0].shifts.pop_back();
  diag = validate_network(shifts);
  REQUIRE(diag.has_value());
  CHECK(diag->message.find("shift") != std::string::npos);

  CHECK(validate_network(NetworkDef{}).has_value());
  CHECK_THROWS_AS(require_valid(NetworkDef{}), ConfigError);
}

TEST_CASE("shift directions encode the eight neighbours and identity") {
  CHECK(shift_offset(kIdentityShift).dy == 0);
  CHECK(shift_offset(kIdentityShift).dx == 0);
  CHECK(shift_offset(5).dx == 1);
  CHECK(opposite_shift(5) == 3);
  const auto rr = round_robin_shifts(11);
  CHECK(rr[9] == 0);
  CHECK(rr[10] == 1);
}

TEST_CASE("requantization rounds half away from zero") {
  CHECK(round_shift(300, 2) == 75);
  CHECK(round_shift(6, 2) == 2);   // 1.5 -> 2
  CHECK(round_shift(-6, 2) == -2);
  CHECK(round_shift(5, 2) == 1);   // 1.25 -> 1
  CHECK(smallest_out_shift(127) == 0);
  CHECK(smallest_out_shift(128) == 1);
  CHECK(smallest_out_shift(254) == 1);
  CHECK(smallest_out_shift(255) == 2);
  CHECK(smallest_out_shift(-1000) == 3);
}

TEST_CASE("SFM1 round trip is bit-identical") {
  std::mt19937_64 rng(3);
  const auto m = test::random_int8(7, 5, rng);
  std::stringstream buf;
  write_sfm(buf, m);
  const std::string bytes = buf.str();
  CHECK(bytes.substr(0, 4) == "SFM1");
  CHECK(bytes.size() == 4 + 8 + 35);
  CHECK(static_cast<unsigned char>(bytes[4]) == 7);
  CHECK(read_sfm(buf) == m);
}

TEST_CASE("SFM1 reader rejects bad magic and truncation") {
  std::stringstream bad("XXXX");
  CHECK_THROWS_AS(read_sfm(bad), DataError);
  SparseFilterMatrix m(2, 2, std::int8_t{1});
  std::stringstream buf;
  write_sfm(buf, m);
  std::stringstream cut(buf.str().substr(0, buf.str().size() - 1));
  CHECK_THROWS_AS(read_sfm(cut), DataError);
}

TEST_CASE("mask and tensor round trips") {
  MaskMatrix mask(3, 2, std::vector<std::uint8_t>{0, 1, 1, 0, 0, 1});
  std::stringstream mb;
  write_mask(mb, mask);
  CHECK(read_mask(mb) == mask);

  std::mt19937_64 rng(5);
  const auto t = test::random_maps(3, 4, 5, rng, -128, 127);
  std::stringstream tb;
  write_tensor(tb, t);
  CHECK(tb.str().substr(0, 4) == "TNS1");
  CHECK(read_tensor(tb) == t);
}

TEST_CASE("grouping JSON round trip") {
  GroupingRecord rec{8, 0.5, ColumnGrouping({{0, 3}, {1, 2}})};
  const auto j = grouping_to_json(rec);
  CHECK(j.at("alpha") == 8);
  CHECK(grouping_from_json(j) == rec);
}

TEST_CASE("network files round trip through JSON and SFM1") {
  const auto dir = temp_dir("network");
  NetworkDef net{{make_layer(8, 4, 3), make_layer(3, 8, 3)}};
  net.layers[0].quant.out_shift = 2;
  net.layers[1].quant.acc_bits = 16;
  net.layers[1].grouping = ColumnGrouping({{0, 1, 2, 3}, {4, 5, 6, 7}});
  save_network(dir / "net.json", net);
  const NetworkDef back = load_network(dir / "net.json");
  REQUIRE(back.num_layers() == 2);
  for (std::size_t l = 0; l < 2; ++l) {
    CHECK(back.layers[l].weights == net.layers[l].weights);
    CHECK(back.layers[l].shifts == net.layers[l].shifts);
    CHECK(back.layers[l].quant == net.layers[l].quant);
    CHECK(back.layers[l].grouping == net.layers[l].grouping);
    CHECK(back.layers[l].width == 3);
  }
}

TEST_CASE("loading a missing network file is a data error") {
  CHECK_THROWS_AS(load_network("/nonexistent/net.json"), DataError);
}
