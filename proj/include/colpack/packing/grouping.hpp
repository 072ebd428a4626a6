// grouping.hpp - dense-column-first greedy column grouping.
//
// Columns are popped in ascending index order. Each one joins the existing
// group whose combined column would be densest, among groups that stay within
// `alpha` columns and whose total conflicts after admission stay within
// gamma * rows. When no group qualifies the column opens a new group.
// Density ties go to the lowest group index.
#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "colpack/core/matrix.hpp"
#include "colpack/core/types.hpp"

namespace colpack::packing {

struct GroupingStep {
  std::size_t selected_col = 0;
  // One entry per group existing when the column was considered: density and
  // conflict count of (group + column).
  std::vector<double> candidate_densities;
  std::vector<std::size_t> candidate_overlaps;
  std::size_t chosen_group = 0;
  bool opened_group = false;

  friend bool operator==(const GroupingStep&, const GroupingStep&) = default;
};

struct GroupingTrace {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t alpha = 1;
  double gamma = 0.0;
  std::vector<GroupingStep> steps;
  ColumnGrouping grouping;

  friend bool operator==(const GroupingTrace&, const GroupingTrace&) = default;
};

struct GroupingResult {
  ColumnGrouping grouping;
  GroupingTrace trace;
};

template <typename T>
GroupingResult group_columns(const Matrix<T>& f, std::size_t alpha, double gamma);

// Rebuilds the grouping from the recorded admission decisions alone.
ColumnGrouping replay(const GroupingTrace& trace);

nlohmann::json trace_to_json(const GroupingTrace& trace);
GroupingTrace trace_from_json(const nlohmann::json& j);

}  // namespace colpack::packing
