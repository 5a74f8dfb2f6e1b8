#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "emothaw/dass.hpp"
#include "emothaw/features.hpp"
#include "emothaw/parallel.hpp"
#include "emothaw/random_forest.hpp"
#include "emothaw/rng.hpp"

namespace emothaw {

struct LoocvResult {
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::vector<bool> predictions;  // per row, in input order
  double recall_positive = 0.0;   // NaN when the class is absent
  double recall_negative = 0.0;
  std::vector<Warning> warnings;
};

/// Leave-one-out: each row is predicted by a forest trained on all other
/// rows. The training rows are put in participant_id order and the forest
/// seed is derived from (rep_seed, participant_id), so the outcome for a
/// participant does not depend on the input row order. forest_config.seed is
/// ignored. A fold whose training labels are single-class predicts that class.
inline LoocvResult loocv(const FeatureMatrix& data, const std::vector<bool>& labels,
                         const ForestConfig& forest_config, std::uint64_t rep_seed, unsigned threads = 1) {
  const std::size_t n = data.rows();
  if (n < 2) throw Error(Errc::TooFewRows, "leave-one-out needs at least 2 rows");
  if (labels.size() != n) throw Error(Errc::ShapeMismatch, "label count differs from row count");

  std::vector<std::size_t> by_id(n);
  std::iota(by_id.begin(), by_id.end(), std::size_t{0});
  const auto& ids = data.participant_ids();
  std::stable_sort(by_id.begin(), by_id.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });

  LoocvResult result;
  result.predictions.assign(n, false);
  std::vector<char> fell_back(n, 0);
  std::vector<char> predicted(n, 0);

  parallel_for(n, threads, [&](std::size_t held_out) {
    std::vector<std::size_t> train;
    train.reserve(n - 1);
    for (std::size_t r : by_id)
      if (r != held_out) train.push_back(r);
    std::vector<bool> train_labels;
    train_labels.reserve(train.size());
    for (std::size_t r : train) train_labels.push_back(labels[r]);
    const auto positives = std::count(train_labels.begin(), train_labels.end(), true);
    if (positives == 0 || positives == static_cast<std::ptrdiff_t>(train_labels.size())) {
      predicted[held_out] = positives != 0;
      fell_back[held_out] = 1;
      return;
    }
    ForestConfig cfg = forest_config;
    cfg.seed = derive_seed(rep_seed, {fnv1a64(ids[held_out])});
    cfg.threads = 1;
    const Forest forest = train_forest(data.select_rows(train), train_labels, cfg);
    predicted[held_out] = predict(forest, data.row(held_out)).label;
  });

  std::size_t pos_total = 0, pos_hit = 0, neg_total = 0, neg_hit = 0;
  for (std::size_t r = 0; r < n; ++r) {
    result.predictions[r] = predicted[r] != 0;
    const bool hit = result.predictions[r] == labels[r];
    result.correct += hit;
    (labels[r] ? pos_total : neg_total) += 1;
    (labels[r] ? pos_hit : neg_hit) += hit;
    if (fell_back[r])
      result.warnings.push_back({0, "fold " + ids[r] + ": single-class training split, majority prediction"});
  }
  result.accuracy = static_cast<double>(result.correct) / static_cast<double>(n);
  result.recall_positive = pos_total ? static_cast<double>(pos_hit) / pos_total : std::nan("");
  result.recall_negative = neg_total ? static_cast<double>(neg_hit) / neg_total : std::nan("");
  return result;
}

/// Sample quantile by linear interpolation between order statistics
/// (position (n - 1) * q in the sorted list).
inline double quantile_linear(std::vector<double> values, double q) {
  if (values.empty()) throw Error(Errc::EmptyInput, "quantile of an empty list");
  std::sort(values.begin(), values.end());
  const double pos = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

struct FiveNumberSummary {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  bool operator==(const FiveNumberSummary&) const = default;
};

inline FiveNumberSummary five_number_summary(const std::vector<double>& values) {
  return {quantile_linear(values, 0.0), quantile_linear(values, 0.25), quantile_linear(values, 0.5),
          quantile_linear(values, 0.75), quantile_linear(values, 1.0)};
}

struct CvConfig {
  ForestConfig forest;
  std::size_t repetitions = 10;
  std::uint64_t master_seed = 0;
  unsigned threads = 1;  // folds trained concurrently; 0 = hardware threads
};

struct CvReport {
  std::string target;
  std::vector<double> per_repetition_accuracy;
  double mean = 0.0;
  FiveNumberSummary summary;
  double majority_baseline = 0.0;
  double mean_recall_positive = 0.0;
  double mean_recall_negative = 0.0;
  std::size_t fallback_folds = 0;

  bool operator==(const CvReport& o) const {
    auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
    return target == o.target && per_repetition_accuracy == o.per_repetition_accuracy && mean == o.mean &&
           summary == o.summary && majority_baseline == o.majority_baseline &&
           same(mean_recall_positive, o.mean_recall_positive) &&
           same(mean_recall_negative, o.mean_recall_negative) && fallback_folds == o.fallback_folds;
  }
};

/// Repeats leave-one-out with repetition seeds derived from (master_seed, rep).
inline CvReport repeated_cv(const FeatureMatrix& data, const std::vector<bool>& labels, const CvConfig& config,
                            std::string target = {}) {
  if (config.repetitions < 1) throw Error(Errc::InvalidConfig, "repetitions must be >= 1");
  CvReport report;
  report.target = std::move(target);
  double rec_pos = 0, rec_neg = 0;
  for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
    const auto r = loocv(data, labels, config.forest, derive_seed(config.master_seed, {rep}), config.threads);
    report.per_repetition_accuracy.push_back(r.accuracy);
    rec_pos += r.recall_positive;
    rec_neg += r.recall_negative;
    report.fallback_folds += r.warnings.size();
  }
  const double c = static_cast<double>(config.repetitions);
  report.mean = std::accumulate(report.per_repetition_accuracy.begin(), report.per_repetition_accuracy.end(), 0.0) / c;
  report.summary = five_number_summary(report.per_repetition_accuracy);
  report.mean_recall_positive = rec_pos / c;
  report.mean_recall_negative = rec_neg / c;
  const auto positives = static_cast<double>(std::count(labels.begin(), labels.end(), true));
  const double n = static_cast<double>(labels.size());
  report.majority_baseline = std::max(positives, n - positives) / n;
  return report;
}

inline std::string format_cv_csv_header() {
  return "target,mean,min,q1,median,q3,max,majority_baseline,recall_positive,recall_negative,per_repetition\n";
}

inline std::string format_cv_csv_row(const CvReport& r) {
  std::ostringstream out;
  out << std::setprecision(17) << r.target << ',' << r.mean << ',' << r.summary.min << ',' << r.summary.q1 << ','
      << r.summary.median << ',' << r.summary.q3 << ',' << r.summary.max << ',' << r.majority_baseline << ','
      << r.mean_recall_positive << ',' << r.mean_recall_negative << ',';
  for (std::size_t i = 0; i < r.per_repetition_accuracy.size(); ++i)
    out << (i ? ";" : "") << r.per_repetition_accuracy[i];
  out << '\n';
  return out.str();
}

/// One text row per target: mean accuracy and the five-number summary, in %.
inline std::string format_cv_text_row(const CvReport& r) {
  std::string name = r.target;
  if (!name.empty()) name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
  std::ostringstream out;
  out << std::fixed << std::setprecision(1) << std::left << std::setw(12) << name << std::right << std::setw(6)
      << 100 * r.mean << "   [min " << 100 * r.summary.min << ", q1 " << 100 * r.summary.q1 << ", median "
      << 100 * r.summary.median << ", q3 " << 100 * r.summary.q3 << ", max " << 100 * r.summary.max
      << "; baseline " << 100 * r.majority_baseline << "]\n";
  return out.str();
}

}  // namespace emothaw
