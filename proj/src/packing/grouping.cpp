#include "colpack/packing/grouping.hpp"

#include <cstdint>

#include "colpack/core/error.hpp"

namespace colpack::packing {

namespace {

// Running nonzero pattern of one group.
struct GroupState {
  std::vector<std::size_t> cols;
  std::vector<std::uint32_t> row_hits;
  std::size_t covered = 0;
  std::size_t conflicts = 0;
};

}  // namespace

template <typename T>
GroupingResult group_columns(const Matrix<T>& f, std::size_t alpha, double gamma) {
  if (alpha < 1) throw ConfigError("group_columns: alpha must be >= 1");
  if (!(gamma >= 0.0)) throw ConfigError("group_columns: gamma must be >= 0");
  if (f.rows() < 1 || f.cols() < 1) {
    throw ConfigError("group_columns: empty filter matrix");
  }

  const std::size_t n_rows = f.rows();
  const double conflict_cap = gamma * static_cast<double>(n_rows);

  GroupingTrace trace;
  trace.rows = n_rows;
  trace.cols = f.cols();
  trace.alpha = alpha;
  trace.gamma = gamma;
  trace.steps.reserve(f.cols());

  std::vector<GroupState> groups;
  std::vector<std::size_t> col_rows;

  for (std::size_t c = 0; c < f.cols(); ++c) {
    col_rows.clear();
    for (std::size_t r = 0; r < n_rows; ++r) {
      if (f(r, c) != T{}) col_rows.push_back(r);
    }

    GroupingStep step;
    step.selected_col = c;
    step.candidate_densities.reserve(groups.size());
    step.candidate_overlaps.reserve(groups.size());

    std::size_t best = groups.size();
    std::size_t best_covered = 0;
    for (std::size_t h = 0; h < groups.size(); ++h) {
      const GroupState& g = groups[h];
      std::size_t fresh = 0;
      std::size_t overlap = 0;
      for (std::size_t r : col_rows) {
        if (g.row_hits[r] == 0) {
          ++fresh;
        } else {
          ++overlap;
        }
      }
      const std::size_t covered = g.covered + fresh;
      const std::size_t conflicts = g.conflicts + overlap;
      step.candidate_densities.push_back(static_cast<double>(covered) /
                                         static_cast<double>(n_rows));
      step.candidate_overlaps.push_back(conflicts);

      const bool fits = g.cols.size() + 1 <= alpha &&
                        static_cast<double>(conflicts) <= conflict_cap;
      if (fits && (best == groups.size() || covered > best_covered)) {
        best = h;
        best_covered = covered;
      }
    }

    if (best == groups.size()) {
      groups.push_back(GroupState{{}, std::vector<std::uint32_t>(n_rows, 0), 0, 0});
      step.opened_group = true;
    }
    GroupState& target = groups[best];
    for (std::size_t r : col_rows) {
      if (target.row_hits[r] == 0) {
        ++target.covered;
      } else {
        ++target.conflicts;
      }
      ++target.row_hits[r];
    }
    target.cols.push_back(c);
    step.chosen_group = best;
    trace.steps.push_back(std::move(step));
  }

  std::vector<ColumnGrouping::Group> out;
  out.reserve(groups.size());
  for (auto& g : groups) out.push_back(std::move(g.cols));
  trace.grouping = ColumnGrouping(std::move(out));
  return GroupingResult{trace.grouping, std::move(trace)};
}

template GroupingResult group_columns(const Matrix<std::int8_t>&, std::size_t, double);
template GroupingResult group_columns(const Matrix<float>&, std::size_t, double);

ColumnGrouping replay(const GroupingTrace& trace) {
  std::vector<ColumnGrouping::Group> groups;
  for (const GroupingStep& step : trace.steps) {
    if (step.opened_group) {
      if (step.chosen_group != groups.size()) {
        throw InvariantError("trace replay: opened group index out of order");
      }
      groups.emplace_back();
    } else if (step.chosen_group >= groups.size()) {
      throw InvariantError("trace replay: step joins a group that does not exist");
    }
    groups[step.chosen_group].push_back(step.selected_col);
  }
  return ColumnGrouping(std::move(groups));
}

nlohmann::json trace_to_json(const GroupingTrace& trace) {
  nlohmann::json steps = nlohmann::json::array();
  for (const GroupingStep& s : trace.steps) {
    steps.push_back({{"selected_col", s.selected_col},
                     {"candidate_densities", s.candidate_densities},
                     {"candidate_overlaps", s.candidate_overlaps},
                     {"chosen_group", s.chosen_group},
                     {"opened_group", s.opened_group}});
  }
  return {{"rows", trace.rows},   {"cols", trace.cols},
          {"alpha", trace.alpha}, {"gamma", trace.gamma},
          {"steps", steps},       {"groups", trace.grouping.groups()}};
}

GroupingTrace trace_from_json(const nlohmann::json& j) {
  try {
    GroupingTrace t;
    t.rows = j.at("rows").get<std::size_t>();
    t.cols = j.at("cols").get<std::size_t>();
    t.alpha = j.at("alpha").get<std::size_t>();
    t.gamma = j.at("gamma").get<double>();
    for (const auto& s : j.at("steps")) {
      GroupingStep step;
      step.selected_col = s.at("selected_col").get<std::size_t>();
      step.candidate_densities = s.at("candidate_densities").get<std::vector<double>>();
      step.candidate_overlaps = s.at("candidate_overlaps").get<std::vector<std::size_t>>();
      step.chosen_group = s.at("chosen_group").get<std::size_t>();
      step.opened_group = s.at("opened_group").get<bool>();
      t.steps.push_back(std::move(step));
    }
    t.grouping = ColumnGrouping(
        j.at("groups").get<std::vector<std::vector<std::size_t>>>());
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("grouping trace JSON: ") + e.what());
  }
}

}  // namespace colpack::packing
