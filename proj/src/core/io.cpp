#include "colpack/core/io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "colpack/core/error.hpp"

namespace colpack {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> bytes = {
      static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
      static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes.data(), bytes.size());
}

std::uint32_t get_u32(std::istream& in, const char* what) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw DataError(std::string("truncated ") + what + " header");
  }
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void expect_magic(std::istream& in, const char (&magic)[5]) {
  char got[4] = {};
  if (!in.read(got, 4)) throw DataError(std::string("missing ") + magic + " magic");
  if (std::memcmp(got, magic, 4) != 0) {
    throw DataError(std::string("bad magic, expected ") + magic);
  }
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xffffffffu) throw ConfigError(std::string(what) + " exceeds u32 range");
  return static_cast<std::uint32_t>(v);
}

template <typename T>
void write_byte_matrix(std::ostream& out, const Matrix<T>& m) {
  static_assert(sizeof(T) == 1);
  out.write("SFM1", 4);
  put_u32(out, checked_u32(m.rows(), "rows"));
  put_u32(out, checked_u32(m.cols(), "cols"));
  out.write(reinterpret_cast<const char*>(m.values().data()),
            static_cast<std::streamsize>(m.size()));
  if (!out) throw DataError("failed writing SFM1 payload");
}

template <typename T>
Matrix<T> read_byte_matrix(std::istream& in) {
  static_assert(sizeof(T) == 1);
  expect_magic(in, "SFM1");
  const std::uint32_t rows = get_u32(in, "SFM1");
  const std::uint32_t cols = get_u32(in, "SFM1");
  if (rows == 0 || cols == 0) throw DataError("SFM1 matrix has a zero dimension");
  std::vector<T> values(static_cast<std::size_t>(rows) * cols);
  if (!in.read(reinterpret_cast<char*>(values.data()),
               static_cast<std::streamsize>(values.size()))) {
    throw DataError("truncated SFM1 payload");
  }
  return Matrix<T>(rows, cols, std::move(values));
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace

void write_sfm(std::ostream& out, const SparseFilterMatrix& m) { write_byte_matrix(out, m); }
SparseFilterMatrix read_sfm(std::istream& in) { return read_byte_matrix<std::int8_t>(in); }

void save_sfm(const fs::path& path, const SparseFilterMatrix& m) {
  auto out = open_out(path);
  write_sfm(out, m);
}

SparseFilterMatrix load_sfm(const fs::path& path) {
  auto in = open_in(path);
  return read_sfm(in);
}

void write_mask(std::ostream& out, const MaskMatrix& m) {
  for (std::uint8_t v : m.values()) {
    if (v > 1) throw InvariantError("mask entries must be 0 or 1");
  }
  write_byte_matrix(out, m);
}

MaskMatrix read_mask(std::istream& in) {
  MaskMatrix m = read_byte_matrix<std::uint8_t>(in);
  for (std::uint8_t v : m.values()) {
    if (v > 1) throw DataError("mask file holds a byte other than 0/1");
  }
  return m;
}

void save_mask(const fs::path& path, const MaskMatrix& m) {
  auto out = open_out(path);
  write_mask(out, m);
}

MaskMatrix load_mask(const fs::path& path) {
  auto in = open_in(path);
  return read_mask(in);
}

void write_tensor(std::ostream& out, const Int8Tensor& t) {
  if (t.data.size() != t.element_count()) {
    throw InvariantError("tensor data size does not match its shape");
  }
  out.write("TNS1", 4);
  put_u32(out, checked_u32(t.shape.size(), "rank"));
  for (std::uint32_t d : t.shape) put_u32(out, d);
  out.write(reinterpret_cast<const char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size()));
  if (!out) throw DataError("failed writing TNS1 payload");
}

Int8Tensor read_tensor(std::istream& in) {
  expect_magic(in, "TNS1");
  Int8Tensor t;
  const std::uint32_t rank = get_u32(in, "TNS1");
  if (rank == 0 || rank > 8) throw DataError("TNS1 rank must lie in 1..8");
  t.shape.resize(rank);
  for (auto& d : t.shape) d = get_u32(in, "TNS1");
  t.data.resize(t.element_count());
  if (!in.read(reinterpret_cast<char*>(t.data.data()),
               static_cast<std::streamsize>(t.data.size()))) {
    throw DataError("truncated TNS1 payload");
  }
  return t;
}

void save_tensor(const fs::path& path, const Int8Tensor& t) {
  auto out = open_out(path);
  write_tensor(out, t);
}

Int8Tensor load_tensor(const fs::path& path) {
  auto in = open_in(path);
  return read_tensor(in);
}

json grouping_to_json(const GroupingRecord& record) {
  return json{{"alpha", record.alpha},
              {"gamma", record.gamma},
              {"groups", record.grouping.groups()}};
}

GroupingRecord grouping_from_json(const json& j) {
  try {
    GroupingRecord r;
    r.alpha = j.at("alpha").get<std::size_t>();
    r.gamma = j.at("gamma").get<double>();
    r.grouping = ColumnGrouping(j.at("groups").get<std::vector<std::vector<std::size_t>>>());
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("grouping JSON: ") + e.what());
  }
}

void save_grouping(const fs::path& path, const GroupingRecord& record) {
  write_text_file(path, grouping_to_json(record).dump(2) + "\n");
}

GroupingRecord load_grouping(const fs::path& path) {
  return grouping_from_json(read_json(path));
}

void save_network(const fs::path& json_path, const NetworkDef& net) {
  const fs::path dir = json_path.parent_path();
  const std::string stem = json_path.stem().string();
  json layers = json::array();
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const LayerDef& layer = net.layers[l];
    const std::string weights_name = stem + "_layer" + std::to_string(l) + ".sfm";
    save_sfm(dir / weights_name, layer.weights);
    json entry{{"weights", weights_name},
               {"width", layer.width},
               {"height", layer.height},
               {"shifts", layer.shifts},
               {"acc_bits", layer.quant.acc_bits},
               {"out_shift", layer.quant.out_shift}};
    if (layer.grouping) {
      const std::string grouping_name =
          stem + "_layer" + std::to_string(l) + "_grouping.json";
      save_grouping(dir / grouping_name,
                    GroupingRecord{layer.grouping->max_group_size(), 0.0, *layer.grouping});
      entry["grouping"] = grouping_name;
    }
    layers.push_back(std::move(entry));
  }
  write_text_file(json_path, json{{"layers", layers}}.dump(2) + "\n");
}

NetworkDef load_network(const fs::path& json_path) {
  const json j = read_json(json_path);
  const fs::path dir = json_path.parent_path();
  NetworkDef net;
  try {
    for (const json& entry : j.at("layers")) {
      LayerDef layer;
      layer.weights = load_sfm(dir / entry.at("weights").get<std::string>());
      layer.width = entry.at("width").get<std::size_t>();
      layer.height = entry.at("height").get<std::size_t>();
      layer.shifts = entry.at("shifts").get<std::vector<std::uint8_t>>();
      layer.quant.acc_bits = entry.at("acc_bits").get<int>();
      layer.quant.out_shift = entry.at("out_shift").get<int>();
      if (entry.contains("grouping")) {
        layer.grouping = load_grouping(dir / entry.at("grouping").get<std::string>()).grouping;
      }
      net.layers.push_back(std::move(layer));
    }
  } catch (const json::exception& e) {
    throw DataError(json_path.string() + ": " + e.what());
  }
  return net;
}

void write_text_file(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace colpack
