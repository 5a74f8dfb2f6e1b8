#pragma once

// Participant data model: DASS-42 scale scores, severity banding,
// dichotomized emotion labels and label co-occurrence statistics.

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "emothaw/error.hpp"
#include "emothaw/svc.hpp"
#include "emothaw/task.hpp"

namespace emothaw {

enum class Scale { Depression, Anxiety, Stress };

inline constexpr std::array<Scale, 3> kAllScales = {Scale::Depression, Scale::Anxiety,
                                                   Scale::Stress};

constexpr std::string_view scale_name(Scale scale) noexcept {
  switch (scale) {
    case Scale::Depression: return "depression";
    case Scale::Anxiety: return "anxiety";
    case Scale::Stress: return "stress";
  }
  return "unknown";
}

enum class SeverityLevel { Normal, Mild, Moderate, Severe, ExtremelySevere };

inline constexpr std::array<SeverityLevel, 5> kAllLevels = {
    SeverityLevel::Normal, SeverityLevel::Mild, SeverityLevel::Moderate, SeverityLevel::Severe,
    SeverityLevel::ExtremelySevere};

constexpr std::string_view severity_name(SeverityLevel level) noexcept {
  switch (level) {
    case SeverityLevel::Normal: return "normal";
    case SeverityLevel::Mild: return "mild";
    case SeverityLevel::Moderate: return "moderate";
    case SeverityLevel::Severe: return "severe";
    case SeverityLevel::ExtremelySevere: return "extremely_severe";
  }
  return "unknown";
}

/// Each scale sums 14 items rated 0..3.
inline constexpr int kMaxScaleScore = 42;

/// Inclusive score range of a severity band on one scale.
struct ScoreBand {
  int low = 0;
  int high = 0;
};

/// Lower edges of Mild, Moderate, Severe and Extremely Severe per scale.
constexpr std::array<int, 4> severity_lower_edges(Scale scale) noexcept {
  switch (scale) {
    case Scale::Depression: return {10, 14, 21, 28};
    case Scale::Anxiety: return {8, 10, 15, 20};
    case Scale::Stress: return {15, 19, 26, 34};
  }
  return {0, 0, 0, 0};
}

constexpr ScoreBand severity_band(Scale scale, SeverityLevel level) noexcept {
  const auto edges = severity_lower_edges(scale);
  const int idx = static_cast<int>(level);
  const int low = idx == 0 ? 0 : edges[static_cast<std::size_t>(idx - 1)];
  const int high = idx == 4 ? kMaxScaleScore : edges[static_cast<std::size_t>(idx)] - 1;
  return {low, high};
}

inline SeverityLevel severity_level(Scale scale, int score) {
  if (score < 0 || score > kMaxScaleScore)
    throw Error(Errc::ScoreOutOfRange, std::string(scale_name(scale)) + " score " +
                                           std::to_string(score) + " outside [0, 42]");
  const auto edges = severity_lower_edges(scale);
  int level = 0;
  for (int edge : edges) level += score >= edge;
  return static_cast<SeverityLevel>(level);
}

struct DassScores {
  int depression = 0;
  int anxiety = 0;
  int stress = 0;

  int get(Scale scale) const noexcept {
    switch (scale) {
      case Scale::Depression: return depression;
      case Scale::Anxiety: return anxiety;
      case Scale::Stress: return stress;
    }
    return 0;
  }
  bool operator==(const DassScores&) const = default;
};

struct EmotionLabels {
  bool depressed = false;
  bool anxious = false;
  bool stressed = false;

  bool get(Scale scale) const noexcept {
    switch (scale) {
      case Scale::Depression: return depressed;
      case Scale::Anxiety: return anxious;
      case Scale::Stress: return stressed;
    }
    return false;
  }
  bool operator==(const EmotionLabels&) const = default;
};

/// Positive label means any level above Normal:
/// depressed > 9, anxious > 7, stressed > 14.
inline EmotionLabels dichotomize(const DassScores& scores) {
  return {severity_level(Scale::Depression, scores.depression) != SeverityLevel::Normal,
          severity_level(Scale::Anxiety, scores.anxiety) != SeverityLevel::Normal,
          severity_level(Scale::Stress, scores.stress) != SeverityLevel::Normal};
}

enum class LabelPair { AnxStr, StrDep, AnxDep };

inline constexpr std::array<LabelPair, 3> kAllPairs = {LabelPair::AnxStr, LabelPair::StrDep,
                                                       LabelPair::AnxDep};

constexpr std::pair<Scale, Scale> pair_scales(LabelPair pair) noexcept {
  switch (pair) {
    case LabelPair::AnxStr: return {Scale::Anxiety, Scale::Stress};
    case LabelPair::StrDep: return {Scale::Stress, Scale::Depression};
    case LabelPair::AnxDep: return {Scale::Anxiety, Scale::Depression};
  }
  return {Scale::Anxiety, Scale::Stress};
}

/// 2x2 contingency table. Index 0 is the negative state, 1 the positive one;
/// counts[i][j] holds participants with first label i and second label j.
struct CrossTable {
  LabelPair pair = LabelPair::AnxStr;
  std::array<std::array<long, 2>, 2> counts{};
  std::array<std::array<double, 2>, 2> percent{};

  long total() const noexcept {
    return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
  }
};

inline CrossTable cross_tabulate(const std::vector<EmotionLabels>& labels, LabelPair pair) {
  if (labels.empty()) throw Error(Errc::EmptyInput, "no labels to cross-tabulate");
  const auto [first, second] = pair_scales(pair);
  CrossTable table;
  table.pair = pair;
  for (const auto& l : labels) ++table.counts[l.get(first)][l.get(second)];
  const double n = static_cast<double>(labels.size());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) table.percent[i][j] = 100.0 * table.counts[i][j] / n;
  return table;
}

struct ChiSquareResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Upper tail of the chi-square distribution with one degree of freedom.
inline double chi_square_1df_sf(double x) {
  if (x <= 0.0) return 1.0;
  return std::erfc(std::sqrt(x / 2.0));
}

/// Pearson's chi-square for a 2x2 table, without continuity correction.
inline ChiSquareResult chi_square_2x2(const std::array<std::array<long, 2>, 2>& t) {
  const double a = t[0][0], b = t[0][1], c = t[1][0], d = t[1][1];
  if (a < 0 || b < 0 || c < 0 || d < 0)
    throw Error(Errc::DegenerateMarginal, "negative cell count");
  const double r0 = a + b, r1 = c + d, c0 = a + c, c1 = b + d;
  if (r0 == 0 || r1 == 0 || c0 == 0 || c1 == 0)
    throw Error(Errc::DegenerateMarginal, "a row or column marginal is zero");
  const double n = a + b + c + d;
  const double cross = a * d - b * c;
  ChiSquareResult r;
  r.statistic = n * cross * cross / (r0 * r1 * c0 * c1);
  r.p_value = chi_square_1df_sf(r.statistic);
  return r;
}

/// One participant: scores plus whichever task recordings are available.
struct Session {
  std::string participant_id;
  DassScores scores;
  std::map<TaskId, TaskRecording> recordings;
};

}  // namespace emothaw
