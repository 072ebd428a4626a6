// io.hpp - on-disk formats.
//
//   SFM1  filter matrix   "SFM1" u32 rows u32 cols int8[rows*cols] (row-major, LE)
//   mask  same layout as SFM1 with 0/1 bytes
//   TNS1  int8 tensor     "TNS1" u32 rank u32 dims[rank] int8[prod(dims)]
//   grouping JSON         {"alpha":a,"gamma":g,"groups":[[col,...],...]}
//   network JSON          {"layers":[{"weights":"<path>","width":W,"height":H,
//                          "shifts":[...],"acc_bits":k,"out_shift":s}]}
//
// Network weight paths are resolved relative to the JSON file's directory. A
// layer may carry an optional "grouping" path naming a grouping JSON file.
#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "colpack/core/matrix.hpp"
#include "colpack/core/network.hpp"
#include "colpack/core/tensor.hpp"
#include "colpack/core/types.hpp"

namespace colpack {

void write_sfm(std::ostream& out, const SparseFilterMatrix& m);
SparseFilterMatrix read_sfm(std::istream& in);
void save_sfm(const std::filesystem::path& path, const SparseFilterMatrix& m);
SparseFilterMatrix load_sfm(const std::filesystem::path& path);

void write_mask(std::ostream& out, const MaskMatrix& m);
MaskMatrix read_mask(std::istream& in);
void save_mask(const std::filesystem::path& path, const MaskMatrix& m);
MaskMatrix load_mask(const std::filesystem::path& path);

void write_tensor(std::ostream& out, const Int8Tensor& t);
Int8Tensor read_tensor(std::istream& in);
void save_tensor(const std::filesystem::path& path, const Int8Tensor& t);
Int8Tensor load_tensor(const std::filesystem::path& path);

struct GroupingRecord {
  std::size_t alpha = 1;
  double gamma = 0.0;
  ColumnGrouping grouping;

  friend bool operator==(const GroupingRecord&, const GroupingRecord&) = default;
};

nlohmann::json grouping_to_json(const GroupingRecord& record);
GroupingRecord grouping_from_json(const nlohmann::json& j);
void save_grouping(const std::filesystem::path& path, const GroupingRecord& record);
GroupingRecord load_grouping(const std::filesystem::path& path);

// Writes <dir>/<stem>.json plus one <stem>_layer<i>.sfm per layer (and a
// <stem>_layer<i>_grouping.json for packed layers).
void save_network(const std::filesystem::path& json_path, const NetworkDef& net);
NetworkDef load_network(const std::filesystem::path& json_path);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace colpack
