#pragma once

// Feature ranking over an ensemble of forests: within each forest and each
// importance measure features are ranked (1 = most important), and the ranks
// are summed over measures and forests. Lowest sum ranks first.

#include <algorithm>
#include <array>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "emothaw/features.hpp"
#include "emothaw/parallel.hpp"
#include "emothaw/random_forest.hpp"
#include "emothaw/rng.hpp"

namespace emothaw {

struct RankConfig {
  std::size_t n_forests = 50;
  ForestConfig forest;  // forest.seed is ignored; seeds derive from master_seed
  std::uint64_t master_seed = 0;
  /// Forests trained concurrently; 0 = hardware threads.
  unsigned threads = 1;
};

struct FeatureRank {
  std::size_t column = 0;
  std::string name;          // column name as found in the matrix
  std::string display_name;  // e.g. "in-air duration (clock)"
  long rank_sum = 0;
  std::array<double, kImportanceMeasures> mean_rank{};
  std::size_t final_rank = 0;

  bool operator==(const FeatureRank&) const = default;
};

struct RankReport {
  std::size_t n_forests = 0;
  std::vector<FeatureRank> features;  // matrix column order

  bool operator==(const RankReport&) const = default;
};

/// Canonical columns get report-style names; anything else keeps its own.
inline std::string display_name_for(const std::string& column) {
  for (std::size_t c = 0; c < kFeatureCount; ++c)
    if (column_name(c) == column) return column_display_name(c);
  return column;
}

/// Ranks 1..p by descending value; equal values keep lower index first.
inline std::vector<std::size_t> descending_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<std::size_t> rank(values.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) rank[order[pos]] = pos + 1;
  return rank;
}

/// Ranks using one forest per explicit seed. Forest j trains with
/// derive_seed(seed_j, {0}) and permutes with derive_seed(seed_j, {1}).
inline RankReport rank_features_with_seeds(const FeatureMatrix& data, const std::vector<bool>& labels,
                                           const ForestConfig& forest_config,
                                           const std::vector<std::uint64_t>& forest_seeds,
                                           unsigned threads = 1) {
  if (forest_seeds.empty()) throw Error(Errc::InvalidConfig, "n_forests must be >= 1");
  const std::size_t p = data.cols();
  const std::size_t nf = forest_seeds.size();
  // ranks[forest][measure][feature]
  std::vector<std::array<std::vector<std::size_t>, kImportanceMeasures>> ranks(nf);

  parallel_for(nf, threads, [&](std::size_t j) {
    ForestConfig cfg = forest_config;
    cfg.seed = derive_seed(forest_seeds[j], {0});
    cfg.threads = 1;
    const Forest forest = train_forest(data, labels, cfg);
    const auto imp = importance(forest, data, labels, derive_seed(forest_seeds[j], {1}));
    for (std::size_t m = 0; m < kImportanceMeasures; ++m) {
      std::vector<double> values(p);
      for (std::size_t f = 0; f < p; ++f) values[f] = imp[f].measure(m);
      ranks[j][m] = descending_ranks(values);
    }
  });

  RankReport report;
  report.n_forests = nf;
  report.features.resize(p);
  for (std::size_t f = 0; f < p; ++f) {
    auto& fr = report.features[f];
    fr.column = f;
    fr.name = data.column_names()[f];
    fr.display_name = display_name_for(fr.name);
    for (std::size_t m = 0; m < kImportanceMeasures; ++m) {
      long sum = 0;
      for (std::size_t j = 0; j < nf; ++j) sum += static_cast<long>(ranks[j][m][f]);
      fr.rank_sum += sum;
      fr.mean_rank[m] = static_cast<double>(sum) / static_cast<double>(nf);
    }
  }
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return report.features[a].rank_sum < report.features[b].rank_sum;
  });
  for (std::size_t pos = 0; pos < p; ++pos) report.features[order[pos]].final_rank = pos + 1;
  return report;
}

/// Forest seeds derive as (master_seed, forest_index).
inline RankReport rank_features(const FeatureMatrix& data, const std::vector<bool>& labels,
                                const RankConfig& config) {
  std::vector<std::uint64_t> seeds(config.n_forests);
  for (std::size_t j = 0; j < seeds.size(); ++j) seeds[j] = derive_seed(config.master_seed, {j});
  return rank_features_with_seeds(data, labels, config.forest, seeds, config.threads);
}

/// First k features by final rank.
inline std::vector<FeatureRank> top_k_table(const RankReport& report, std::size_t k = 10) {
  if (k > report.features.size())
    throw Error(Errc::KTooLarge, "k = " + std::to_string(k) + " exceeds " +
                                     std::to_string(report.features.size()) + " features");
  std::vector<FeatureRank> sorted = report.features;
  std::sort(sorted.begin(), sorted.end(),
            [](const FeatureRank& a, const FeatureRank& b) { return a.final_rank < b.final_rank; });
  sorted.resize(k);
  return sorted;
}

/// CSV: feature,task,rank_sum,final_rank,m1_mean_rank..m4_mean_rank in final
/// rank order. `task` is empty for non-canonical columns.
inline std::string format_rank_csv(const RankReport& report) {
  std::ostringstream out;
  out << "feature,task,rank_sum,final_rank,m1_mean_rank,m2_mean_rank,m3_mean_rank,m4_mean_rank\n";
  out << std::setprecision(17);
  for (const auto& fr : top_k_table(report, report.features.size())) {
    std::string feature = fr.name, task;
    for (std::size_t c = 0; c < kFeatureCount; ++c) {
      if (column_name(c) == fr.name) {
        feature = std::string(feature_kind_name(column_kind(c)));
        task = std::string(task_name(column_task(c)));
      }
    }
    out << feature << ',' << task << ',' << fr.rank_sum << ',' << fr.final_rank;
    for (double m : fr.mean_rank) out << ',' << m;
    out << '\n';
  }
  return out.str();
}

/// Top-k names two per line, then a rank listing.
inline std::string format_rank_table(const RankReport& report, std::string_view model, std::size_t k = 10) {
  const auto top = top_k_table(report, k);
  std::ostringstream out;
  out << "Random Forest Model: " << model << " (" << report.n_forests << " forests)\n";
  for (std::size_t i = 0; i < top.size(); i += 2) {
    out << "  " << top[i].display_name;
    if (i + 1 < top.size()) out << ", " << top[i + 1].display_name;
    out << '\n';
  }
  out << "\n  rank  rank_sum  feature\n";
  for (const auto& fr : top)
    out << "  " << std::setw(4) << fr.final_rank << "  " << std::setw(8) << fr.rank_sum << "  "
        << fr.display_name << '\n';
  return out.str();
}

}  // namespace emothaw
