#pragma once

// Reading and writing of SVC tablet recordings (ASCII, seven integer
// channels per sample), angle normalization and stroke segmentation.

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emothaw/error.hpp"
#include "emothaw/task.hpp"

namespace emothaw {

enum class PenStatus : unsigned char { InAir = 0, OnPaper = 1 };

inline constexpr int kAzimuthMax = 4095;
inline constexpr int kAltitudeMax = 1023;

struct SamplePoint {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t timestamp = 0;  // milliseconds
  PenStatus pen_status = PenStatus::InAir;
  int azimuth_raw = 0;   // [0, 4095]
  int altitude_raw = 0;  // [0, 1023]
  std::int64_t pressure = 0;

  bool operator==(const SamplePoint&) const = default;
};

struct TaskRecording {
  std::optional<TaskId> task;
  std::vector<SamplePoint> points;
  std::optional<std::int64_t> declared_count;

  bool operator==(const TaskRecording&) const = default;
};

enum class ParseMode { Strict, Lenient };

struct SvcParseResult {
  TaskRecording recording;
  std::vector<Warning> warnings;
};

namespace detail {

inline bool is_column_space(char c) noexcept { return c == ' ' || c == '\t'; }

inline void split_columns(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_column_space(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_column_space(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
}

inline std::optional<std::int64_t> parse_int(std::string_view token) noexcept {
  std::int64_t value = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return value;
}

inline std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

}  // namespace detail

/// Parses one SVC recording. An optional lone integer on the first non-blank
/// line is taken as the declared point count. Lines may end in LF or CRLF;
/// blank lines are ignored.
///
/// Strict mode rejects duplicate timestamps, count mismatches, pen-down
/// samples with zero pressure, and a header-only file. Lenient mode drops a
/// duplicate-timestamp row and reports the rest as warnings.
inline SvcParseResult parse_svc(std::string_view text, ParseMode mode,
                                std::optional<TaskId> task = std::nullopt) {
  const bool strict = mode == ParseMode::Strict;
  SvcParseResult result;
  result.recording.task = task;
  auto& points = result.recording.points;

  std::vector<std::string_view> cols;
  std::size_t line_no = 0;
  std::size_t rows_read = 0;
  bool seen_content = false;
  std::size_t pos = 0;

  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    detail::split_columns(line, cols);
    if (cols.empty()) continue;
    const std::string where = detail::at_line(line_no);

    if (!seen_content && cols.size() == 1) {
      seen_content = true;
      auto count = detail::parse_int(cols[0]);
      if (!count || *count < 0)
        throw Error(Errc::MalformedRow, where + "count header is not a non-negative integer");
      result.recording.declared_count = *count;
      continue;
    }
    seen_content = true;

    if (cols.size() != 7)
      throw Error(Errc::MalformedRow,
                  where + "expected 7 columns, found " + std::to_string(cols.size()));
    std::int64_t v[7];
    for (std::size_t c = 0; c < 7; ++c) {
      auto parsed = detail::parse_int(cols[c]);
      if (!parsed)
        throw Error(Errc::MalformedRow, where + "column " + std::to_string(c + 1) +
                                            " is not an integer");
      v[c] = *parsed;
    }
    ++rows_read;

    if (v[3] != 0 && v[3] != 1)
      throw Error(Errc::RangeViolation, where + "pen status must be 0 or 1");
    if (v[4] < 0 || v[4] > kAzimuthMax)
      throw Error(Errc::RangeViolation, where + "azimuth outside [0, 4095]");
    if (v[5] < 0 || v[5] > kAltitudeMax)
      throw Error(Errc::RangeViolation, where + "altitude outside [0, 1023]");
    if (v[6] < 0) throw Error(Errc::RangeViolation, where + "negative pressure");

    SamplePoint p;
    p.x = v[0];
    p.y = v[1];
    p.timestamp = v[2];
    p.pen_status = v[3] == 1 ? PenStatus::OnPaper : PenStatus::InAir;
    p.azimuth_raw = static_cast<int>(v[4]);
    p.altitude_raw = static_cast<int>(v[5]);
    p.pressure = v[6];

    if (p.pen_status == PenStatus::InAir && p.pressure != 0)
      throw Error(Errc::RangeViolation, where + "in-air sample with non-zero pressure");
    if (p.pen_status == PenStatus::OnPaper && p.pressure == 0) {
      if (strict) throw Error(Errc::RangeViolation, where + "pen-down sample with zero pressure");
      result.warnings.push_back({line_no, "pen-down sample with zero pressure"});
    }

    if (!points.empty()) {
      const std::int64_t prev = points.back().timestamp;
      if (p.timestamp < prev)
        throw Error(Errc::TimestampViolation, where + "timestamp decreases");
      if (p.timestamp == prev) {
        if (strict) throw Error(Errc::TimestampViolation, where + "duplicate timestamp");
        result.warnings.push_back({line_no, "duplicate timestamp, row dropped"});
        continue;
      }
    }
    points.push_back(p);
  }

  if (!seen_content) throw Error(Errc::EmptyInput, "no content");
  if (rows_read == 0) {
    if (strict) throw Error(Errc::EmptyInput, "count header without sample rows");
  }
  const auto& declared = result.recording.declared_count;
  if (declared && *declared != static_cast<std::int64_t>(rows_read)) {
    std::string msg = "declared count " + std::to_string(*declared) + " but " +
                      std::to_string(rows_read) + " rows present";
    if (strict) throw Error(Errc::MalformedRow, msg);
    result.warnings.push_back({0, std::move(msg)});
  }
  return result;
}

/// Writes the count header followed by one LF-terminated row per sample,
/// columns separated by single spaces.
inline std::string serialize_svc(const TaskRecording& recording) {
  std::string out;
  out.reserve(16 + recording.points.size() * 48);
  char buf[24];
  auto put = [&](std::int64_t value) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    out.append(buf, ptr);
  };
  put(static_cast<std::int64_t>(recording.points.size()));
  out.push_back('\n');
  for (const auto& p : recording.points) {
    put(p.x);
    out.push_back(' ');
    put(p.y);
    out.push_back(' ');
    put(p.timestamp);
    out.push_back(' ');
    put(static_cast<std::int64_t>(p.pen_status));
    out.push_back(' ');
    put(p.azimuth_raw);
    out.push_back(' ');
    put(p.altitude_raw);
    out.push_back(' ');
    put(p.pressure);
    out.push_back('\n');
  }
  return out;
}

struct PenAngles {
  double azimuth_deg = 0.0;
  double altitude_deg = 0.0;
};

/// Maps raw tablet angles onto degrees using the full-scale values as
/// normalization factors (4095 -> 360 deg, 1023 -> 90 deg). Not rounded.
inline PenAngles normalize_angles(int azimuth_raw, int altitude_raw) {
  if (azimuth_raw < 0 || azimuth_raw > kAzimuthMax)
    throw Error(Errc::RangeViolation, "azimuth outside [0, 4095]");
  if (altitude_raw < 0 || altitude_raw > kAltitudeMax)
    throw Error(Errc::RangeViolation, "altitude outside [0, 1023]");
  return {azimuth_raw * 360.0 / kAzimuthMax, altitude_raw * 90.0 / kAltitudeMax};
}

enum class StrokeKind : unsigned char { InAir = 0, OnPaper = 1 };

/// Maximal run of samples sharing one pen status; indices are inclusive.
struct Stroke {
  StrokeKind kind = StrokeKind::OnPaper;
  std::size_t start_index = 0;
  std::size_t end_index = 0;

  std::size_t size() const noexcept { return end_index - start_index + 1; }
  bool operator==(const Stroke&) const = default;
};

inline std::vector<Stroke> segment_strokes(const TaskRecording& recording) {
  std::vector<Stroke> strokes;
  const auto& pts = recording.points;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= pts.size(); ++i) {
    if (i == pts.size() || pts[i].pen_status != pts[start].pen_status) {
      strokes.push_back({pts[start].pen_status == PenStatus::OnPaper ? StrokeKind::OnPaper
                                                                    : StrokeKind::InAir,
                         start, i - 1});
      start = i;
    }
  }
  return strokes;
}

inline std::size_t count_on_paper_strokes(const std::vector<Stroke>& strokes) noexcept {
  std::size_t n = 0;
  for (const auto& s : strokes) n += s.kind == StrokeKind::OnPaper;
  return n;
}

}  // namespace emothaw
