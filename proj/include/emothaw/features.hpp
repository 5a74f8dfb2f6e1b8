#pragma once

// Timing and ductus features per task, and the participants x 20 matrix.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "emothaw/corpus.hpp"
#include "emothaw/dass.hpp"
#include "emothaw/error.hpp"
#include "emothaw/svc.hpp"
#include "emothaw/task.hpp"

namespace emothaw {

/// Durations in milliseconds. in_air + on_paper == total always holds.
struct TaskFeatures {
  std::int64_t in_air_ms = 0;
  std::int64_t on_paper_ms = 0;
  std::int64_t total_ms = 0;
  std::int64_t pen_down_strokes = 0;

  bool operator==(const TaskFeatures&) const = default;
};

/// Each interval t[i+1] - t[i] is charged to the pen status of sample i, so a
/// gap where the pen left sensing range counts as in-air time.
inline TaskFeatures extract_task_features(const TaskRecording& recording) {
  TaskFeatures f;
  const auto& pts = recording.points;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const std::int64_t dt = pts[i + 1].timestamp - pts[i].timestamp;
    (pts[i].pen_status == PenStatus::OnPaper ? f.on_paper_ms : f.in_air_ms) += dt;
  }
  if (!pts.empty()) f.total_ms = pts.back().timestamp - pts.front().timestamp;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].pen_status == PenStatus::OnPaper &&
        (i == 0 || pts[i - 1].pen_status != PenStatus::OnPaper))
      ++f.pen_down_strokes;
  }
  return f;
}

enum class FeatureKind { InAir = 0, OnPaper = 1, Total = 2, Strokes = 3 };

inline constexpr std::array<FeatureKind, 4> kAllFeatureKinds = {
    FeatureKind::InAir, FeatureKind::OnPaper, FeatureKind::Total, FeatureKind::Strokes};

inline constexpr std::size_t kFeaturesPerTask = 4;
inline constexpr std::size_t kFeatureCount = kFeatureTasks.size() * kFeaturesPerTask;

constexpr std::string_view feature_kind_name(FeatureKind kind) noexcept {
  switch (kind) {
    case FeatureKind::InAir: return "in_air";
    case FeatureKind::OnPaper: return "on_paper";
    case FeatureKind::Total: return "total";
    case FeatureKind::Strokes: return "strokes";
  }
  return "unknown";
}

constexpr std::string_view feature_kind_label(FeatureKind kind) noexcept {
  switch (kind) {
    case FeatureKind::InAir: return "in-air duration";
    case FeatureKind::OnPaper: return "on-paper duration";
    case FeatureKind::Total: return "total duration";
    case FeatureKind::Strokes: return "number of pen-down strokes";
  }
  return "unknown";
}

/// Column layout is task-major: (pentagons, house, handprint, clock, cursive)
/// x (in_air, on_paper, total, strokes).
constexpr std::size_t feature_column(TaskId task, FeatureKind kind) {
  std::size_t t = 0;
  while (t < kFeatureTasks.size() && kFeatureTasks[t] != task) ++t;
  return t * kFeaturesPerTask + static_cast<std::size_t>(kind);
}

constexpr TaskId column_task(std::size_t column) { return kFeatureTasks[column / kFeaturesPerTask]; }

constexpr FeatureKind column_kind(std::size_t column) {
  return static_cast<FeatureKind>(column % kFeaturesPerTask);
}

inline std::string column_name(std::size_t column) {
  return std::string(task_name(column_task(column))) + "_" +
         std::string(feature_kind_name(column_kind(column)));
}

/// Report-style name, e.g. "in-air duration (clock)".
inline std::string column_display_name(std::size_t column) {
  return std::string(feature_kind_label(column_kind(column))) + " (" +
         std::string(task_name(column_task(column))) + ")";
}

inline std::vector<std::string> canonical_column_names() {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < kFeatureCount; ++c) names.push_back(column_name(c));
  return names;
}

/// Dense row-major matrix of features, one row per participant.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<std::string> participant_ids, std::vector<std::string> column_names,
                std::vector<double> values)
      : ids_(std::move(participant_ids)), names_(std::move(column_names)), values_(std::move(values)) {
    if (values_.size() != ids_.size() * names_.size())
      throw Error(Errc::ShapeMismatch, "value count does not match rows x columns");
  }

  std::size_t rows() const noexcept { return ids_.size(); }
  std::size_t cols() const noexcept { return names_.size(); }
  double at(std::size_t r, std::size_t c) const noexcept { return values_[r * cols() + c]; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {values_.data() + r * cols(), cols()};
  }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<std::string>& participant_ids() const noexcept { return ids_; }
  const std::vector<std::string>& column_names() const noexcept { return names_; }

  /// Copy of the listed rows, in the given order.
  FeatureMatrix select_rows(std::span<const std::size_t> rows) const {
    std::vector<std::string> ids;
    std::vector<double> values;
    ids.reserve(rows.size());
    values.reserve(rows.size() * cols());
    for (std::size_t r : rows) {
      ids.push_back(ids_[r]);
      auto src = row(r);
      values.insert(values.end(), src.begin(), src.end());
    }
    return FeatureMatrix(std::move(ids), names_, std::move(values));
  }

  bool operator==(const FeatureMatrix&) const = default;

 private:
  std::vector<std::string> ids_;
  std::vector<std::string> names_;
  std::vector<double> values_;
};

enum class MissingTaskPolicy { Strict, DropParticipant };

struct AssembledFeatures {
  FeatureMatrix matrix;
  std::vector<std::string> dropped;  // participant ids excluded
  std::vector<Warning> warnings;
};

/// Builds the 20-column matrix. Loop tasks are ignored even when present.
/// Rows follow participant_id order regardless of the input order.
inline AssembledFeatures assemble_feature_matrix(const std::vector<Session>& sessions,
                                                 MissingTaskPolicy policy) {
  if (sessions.empty()) throw Error(Errc::EmptyCorpus, "no sessions");
  std::vector<std::size_t> order(sessions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sessions[a].participant_id < sessions[b].participant_id;
  });

  AssembledFeatures out;
  std::vector<std::string> ids;
  std::vector<double> values;
  for (std::size_t idx : order) {
    const Session& s = sessions[idx];
    std::vector<TaskId> missing;
    for (TaskId task : kFeatureTasks)
      if (!s.recordings.contains(task)) missing.push_back(task);
    if (!missing.empty()) {
      std::string list;
      for (TaskId t : missing) list += (list.empty() ? "" : ", ") + std::string(task_roman(t));
      if (policy == MissingTaskPolicy::Strict)
        throw Error(Errc::MissingTask, "participant " + s.participant_id + " lacks task " + list);
      out.dropped.push_back(s.participant_id);
      out.warnings.push_back({0, "participant " + s.participant_id + " dropped, missing task " + list});
      continue;
    }
    ids.push_back(s.participant_id);
    for (TaskId task : kFeatureTasks) {
      const TaskFeatures f = extract_task_features(s.recordings.at(task));
      values.push_back(static_cast<double>(f.in_air_ms));
      values.push_back(static_cast<double>(f.on_paper_ms));
      values.push_back(static_cast<double>(f.total_ms));
      values.push_back(static_cast<double>(f.pen_down_strokes));
    }
  }
  if (ids.empty()) throw Error(Errc::EmptyCorpus, "every participant was dropped");
  out.matrix = FeatureMatrix(std::move(ids), canonical_column_names(), std::move(values));
  return out;
}

namespace detail {

inline void append_number(std::string& out, double v) {
  char buf[32];
  std::to_chars_result res;
  if (std::isfinite(v) && v == std::nearbyint(v) && std::fabs(v) < 9.0e15)
    res = std::to_chars(buf, buf + sizeof buf, static_cast<std::int64_t>(v));
  else
    res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace detail

/// Header "participant_id,<column names>", one row per participant.
inline std::string format_feature_csv(const FeatureMatrix& m) {
  std::string out = "participant_id";
  for (const auto& n : m.column_names()) out += "," + n;
  out.push_back('\n');
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out += m.participant_ids()[r];
    for (double v : m.row(r)) {
      out.push_back(',');
      detail::append_number(out, v);
    }
    out.push_back('\n');
  }
  return out;
}

inline FeatureMatrix parse_feature_csv(std::string_view text) {
  auto lines = text_lines(text);
  if (lines.empty()) throw Error(Errc::EmptyInput, "feature file is empty");
  auto header = split_csv(lines.front().second);
  if (header.size() < 2 || header[0] != "participant_id")
    throw Error(Errc::MalformedRow, "feature header must start with participant_id");
  std::vector<std::string> names(header.begin() + 1, header.end());
  std::vector<std::string> ids;
  std::vector<double> values;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto [no, line] = lines[i];
    auto fields = split_csv(line);
    if (fields.size() != header.size())
      throw Error(Errc::MalformedRow, "features line " + std::to_string(no) + ": wrong field count");
    ids.emplace_back(fields[0]);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      double v = 0;
      auto f = fields[c];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(v))
        throw Error(Errc::MalformedRow, "features line " + std::to_string(no) + ": bad number");
      values.push_back(v);
    }
  }
  if (ids.empty()) throw Error(Errc::EmptyCorpus, "feature file has no rows");
  return FeatureMatrix(std::move(ids), std::move(names), std::move(values));
}

}  // namespace emothaw
