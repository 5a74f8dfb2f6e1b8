#pragma once

// Binary-classification random forest grown from Gini-split CART trees on
// bootstrap samples, with out-of-bag error, margins and four importance
// measures (permutation error delta, mean margin decrease, margin sign
// balance, Gini decrease).

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "emothaw/error.hpp"
#include "emothaw/features.hpp"
#include "emothaw/parallel.hpp"
#include "emothaw/rng.hpp"

namespace emothaw {

struct ForestConfig {
  std::size_t n_tree = 100;
  std::size_t mtry = 5;
  std::uint64_t seed = 0;
  std::size_t min_node_size = 1;
  /// Worker threads for tree growing and importance; 0 = hardware threads.
  /// Results do not depend on this value.
  unsigned threads = 1;
  /// When set, single-class training data yields single-leaf trees instead
  /// of SingleClassInput.
  bool allow_single_class = false;
};

using ClassCounts = std::array<std::uint32_t, 2>;

/// 1 - sum of squared class proportions.
inline double gini_impurity(std::span<const std::uint32_t> counts) {
  double total = 0;
  for (auto c : counts) total += c;
  if (total <= 0) throw Error(Errc::EmptySplit, "gini impurity of an empty node");
  double sum_sq = 0;
  for (auto c : counts) sum_sq += (c / total) * (c / total);
  return 1.0 - sum_sq;
}

struct TreeNode {
  static constexpr std::int32_t kLeaf = -1;

  std::int32_t feature = kLeaf;
  double threshold = 0.0;  // samples with value <= threshold go left
  std::int32_t left = -1;
  std::int32_t right = -1;
  ClassCounts counts{};     // in-bag class counts reaching this node
  double weighted_gain = 0;  // Gini decrease x node sample count

  bool is_leaf() const noexcept { return feature == kLeaf; }
  /// Majority class; ties go to the negative class.
  bool label() const noexcept { return counts[1] > counts[0]; }
};

class DecisionTree {
 public:
  /// Predicts using `value(feature)` to look up the sample's feature values.
  template <class ValueOf>
  bool predict_with(ValueOf&& value) const {
    std::int32_t id = 0;
    while (!nodes_[static_cast<std::size_t>(id)].is_leaf()) {
      const auto& n = nodes_[static_cast<std::size_t>(id)];
      id = value(static_cast<std::size_t>(n.feature)) <= n.threshold ? n.left : n.right;
    }
    return nodes_[static_cast<std::size_t>(id)].label();
  }

  bool predict(std::span<const double> x) const {
    return predict_with([&](std::size_t f) { return x[f]; });
  }

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  /// Number of times each training row was drawn into the bootstrap sample.
  const std::vector<std::uint32_t>& inbag_counts() const noexcept { return inbag_; }
  /// Training rows absent from the bootstrap sample, ascending.
  const std::vector<std::size_t>& oob_rows() const noexcept { return oob_; }
  std::size_t depth() const {
    std::size_t best = 0;
    std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 1}};
    while (!stack.empty()) {
      auto [id, d] = stack.back();
      stack.pop_back();
      best = std::max(best, d);
      const auto& n = nodes_[static_cast<std::size_t>(id)];
      if (!n.is_leaf()) {
        stack.push_back({n.left, d + 1});
        stack.push_back({n.right, d + 1});
      }
    }
    return best;
  }

 private:
  friend class TreeGrower;
  std::vector<TreeNode> nodes_;
  std::vector<std::uint32_t> inbag_;
  std::vector<std::size_t> oob_;
};

/// Grows one tree. Split candidates are mtry distinct features per node; the
/// split maximizing Gini gain wins, ties going to the lower feature index and
/// then the lower threshold. Thresholds are midpoints between adjacent
/// distinct sorted values.
class TreeGrower {
 public:
  TreeGrower(const FeatureMatrix& data, const std::vector<bool>& labels, const ForestConfig& config)
      : data_(data), labels_(labels), config_(config) {}

  DecisionTree grow(std::uint64_t tree_seed) {
    Rng rng(tree_seed);
    const std::size_t n = data_.rows();
    DecisionTree tree;
    tree.inbag_.assign(n, 0);
    samples_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      samples_[i] = uniform_index(rng, n);
      ++tree.inbag_[samples_[i]];
    }
    for (std::size_t r = 0; r < n; ++r)
      if (tree.inbag_[r] == 0) tree.oob_.push_back(r);

    features_.resize(data_.cols());
    struct Pending {
      std::int32_t node;
      std::size_t begin, end;
    };
    tree.nodes_.push_back(make_node(0, n));
    std::vector<Pending> stack{{0, 0, n}};
    while (!stack.empty()) {
      const Pending p = stack.back();
      stack.pop_back();
      auto split = find_split(p.begin, p.end, rng);
      if (!split) continue;
      auto mid = std::partition(samples_.begin() + static_cast<std::ptrdiff_t>(p.begin),
                                samples_.begin() + static_cast<std::ptrdiff_t>(p.end),
                                [&](std::size_t s) { return data_.at(s, split->feature) <= split->threshold; });
      const std::size_t cut = static_cast<std::size_t>(mid - samples_.begin());
      const auto left_id = static_cast<std::int32_t>(tree.nodes_.size());
      tree.nodes_.push_back(make_node(p.begin, cut));
      tree.nodes_.push_back(make_node(cut, p.end));
      auto& node = tree.nodes_[static_cast<std::size_t>(p.node)];
      node.feature = static_cast<std::int32_t>(split->feature);
      node.threshold = split->threshold;
      node.left = left_id;
      node.right = left_id + 1;
      node.weighted_gain = split->weighted_gain;
      // Right pushed first so the left subtree is expanded first.
      stack.push_back({left_id + 1, cut, p.end});
      stack.push_back({left_id, p.begin, cut});
    }
    return tree;
  }

 private:
  struct Split {
    std::size_t feature;
    double threshold;
    double weighted_gain;
  };

  TreeNode make_node(std::size_t begin, std::size_t end) const {
    TreeNode node;
    for (std::size_t i = begin; i < end; ++i) ++node.counts[labels_[samples_[i]] ? 1 : 0];
    return node;
  }

  std::optional<Split> find_split(std::size_t begin, std::size_t end, Rng& rng) {
    const std::size_t size = end - begin;
    ClassCounts counts{};
    for (std::size_t i = begin; i < end; ++i) ++counts[labels_[samples_[i]] ? 1 : 0];
    if (size <= config_.min_node_size || counts[0] == 0 || counts[1] == 0) return std::nullopt;

    // Partial Fisher-Yates draws mtry distinct candidates.
    const std::size_t p = data_.cols();
    std::iota(features_.begin(), features_.end(), std::size_t{0});
    for (std::size_t k = 0; k < config_.mtry; ++k) {
      std::size_t j = k + uniform_index(rng, p - k);
      std::swap(features_[k], features_[j]);
    }
    std::vector<std::size_t> candidates(features_.begin(),
                                        features_.begin() + static_cast<std::ptrdiff_t>(config_.mtry));
    std::sort(candidates.begin(), candidates.end());

    const double n = static_cast<double>(size);
    const double parent = (double(counts[0]) * counts[0] + double(counts[1]) * counts[1]) / n;
    std::optional<Split> best;
    double best_crit = parent;
    const double min_improvement = 1e-10 * n;

    for (std::size_t f : candidates) {
      column_.clear();
      for (std::size_t i = begin; i < end; ++i)
        column_.push_back({data_.at(samples_[i], f), labels_[samples_[i]]});
      std::sort(column_.begin(), column_.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (column_.front().first == column_.back().first) continue;
      double left[2] = {0, 0};
      for (std::size_t i = 0; i + 1 < size; ++i) {
        left[column_[i].second ? 1 : 0] += 1;
        if (column_[i].first == column_[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = n - nl;
        const double r0 = counts[0] - left[0], r1 = counts[1] - left[1];
        const double crit = (left[0] * left[0] + left[1] * left[1]) / nl + (r0 * r0 + r1 * r1) / nr;
        if (crit > best_crit + (best ? 0.0 : min_improvement)) {
          best_crit = crit;
          best = Split{f, column_[i].first + (column_[i + 1].first - column_[i].first) / 2.0,
                       crit - parent};
        }
      }
    }
    if (best && best->weighted_gain <= min_improvement) return std::nullopt;
    return best;
  }

  const FeatureMatrix& data_;
  const std::vector<bool>& labels_;
  const ForestConfig& config_;
  std::vector<std::size_t> samples_;
  std::vector<std::size_t> features_;
  std::vector<std::pair<double, bool>> column_;
};

struct Prediction {
  bool label = false;
  double vote_fraction = 0.0;  // share of trees voting for `label`
};

class Forest {
 public:
  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
  const ForestConfig& config() const noexcept { return config_; }
  const std::vector<bool>& labels() const noexcept { return labels_; }
  std::size_t n_features() const noexcept { return n_features_; }
  /// Per training row: votes for (negative, positive) from trees where the
  /// row was out of bag.
  const std::vector<ClassCounts>& oob_votes() const noexcept { return oob_votes_; }

 private:
  friend Forest train_forest(const FeatureMatrix&, const std::vector<bool>&, const ForestConfig&);
  std::vector<DecisionTree> trees_;
  ForestConfig config_;
  std::vector<bool> labels_;
  std::size_t n_features_ = 0;
  std::vector<ClassCounts> oob_votes_;
};

inline void validate_forest_input(const FeatureMatrix& data, const std::vector<bool>& labels,
                                  const ForestConfig& config) {
  if (labels.size() != data.rows())
    throw Error(Errc::ShapeMismatch, std::to_string(labels.size()) + " labels for " +
                                         std::to_string(data.rows()) + " rows");
  if (data.rows() == 0 || data.cols() == 0) throw Error(Errc::ShapeMismatch, "empty feature matrix");
  if (config.n_tree < 1) throw Error(Errc::InvalidConfig, "n_tree must be >= 1");
  if (config.mtry < 1 || config.mtry > data.cols())
    throw Error(Errc::InvalidConfig, "mtry must lie in [1, " + std::to_string(data.cols()) + "]");
  if (config.min_node_size < 1) throw Error(Errc::InvalidConfig, "min_node_size must be >= 1");
}

/// Tree t draws from its own stream seeded by (config.seed, t), so the
/// forest is identical for any thread count.
inline Forest train_forest(const FeatureMatrix& data, const std::vector<bool>& labels,
                           const ForestConfig& config) {
  validate_forest_input(data, labels, config);
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  if ((positives == 0 || positives == labels.size()) && !config.allow_single_class)
    throw Error(Errc::SingleClassInput, "training labels contain a single class");

  Forest forest;
  forest.config_ = config;
  forest.labels_ = labels;
  forest.n_features_ = data.cols();
  forest.trees_.resize(config.n_tree);
  parallel_for(config.n_tree, config.threads, [&](std::size_t t) {
    TreeGrower grower(data, labels, config);
    forest.trees_[t] = grower.grow(derive_seed(config.seed, {t}));
  });

  forest.oob_votes_.assign(data.rows(), ClassCounts{});
  for (const auto& tree : forest.trees_)
    for (std::size_t r : tree.oob_rows()) ++forest.oob_votes_[r][tree.predict(data.row(r)) ? 1 : 0];
  return forest;
}

/// Majority vote over all trees; ties go to the negative class.
inline Prediction predict(const Forest& forest, std::span<const double> x) {
  if (x.size() != forest.n_features())
    throw Error(Errc::ShapeMismatch, "sample has " + std::to_string(x.size()) + " features, forest expects " +
                                         std::to_string(forest.n_features()));
  std::size_t positive = 0;
  for (const auto& tree : forest.trees()) positive += tree.predict(x);
  const std::size_t total = forest.trees().size();
  Prediction p;
  p.label = positive * 2 > total;
  p.vote_fraction = static_cast<double>(p.label ? positive : total - positive) / total;
  return p;
}

namespace detail {

/// Correct minus incorrect OOB votes for a row.
inline long vote_balance(const ClassCounts& votes, bool label) {
  const int truth = label ? 1 : 0;
  return static_cast<long>(votes[truth]) - static_cast<long>(votes[1 - truth]);
}

}  // namespace detail

struct OobSummary {
  double error = 0.0;
  std::size_t covered = 0;  // rows with at least one OOB vote
  std::size_t skipped = 0;  // rows that were in-bag for every tree
};

/// A row counts as correctly classified only when correct votes strictly
/// outnumber incorrect ones, i.e. when its margin is positive.
inline OobSummary oob_summary(const std::vector<ClassCounts>& votes, const std::vector<bool>& labels) {
  OobSummary s;
  std::size_t wrong = 0;
  for (std::size_t r = 0; r < votes.size(); ++r) {
    if (votes[r][0] + votes[r][1] == 0) {
      ++s.skipped;
      continue;
    }
    ++s.covered;
    wrong += detail::vote_balance(votes[r], labels[r]) <= 0;
  }
  if (s.covered == 0) throw Error(Errc::NoOobCoverage, "no training row is out of bag for any tree");
  s.error = static_cast<double>(wrong) / static_cast<double>(s.covered);
  return s;
}

inline OobSummary oob_summary(const Forest& forest) {
  return oob_summary(forest.oob_votes(), forest.labels());
}

inline double oob_error(const Forest& forest) { return oob_summary(forest).error; }

/// (correct - incorrect) / total votes, in [-1, 1].
inline double margin(const ClassCounts& votes, bool label) {
  const std::uint32_t total = votes[0] + votes[1];
  if (total == 0) throw Error(Errc::NoOobVotes, "row has no OOB votes");
  return static_cast<double>(detail::vote_balance(votes, label)) / total;
}

/// Margin of a training row over the trees where it was out of bag.
inline double margin(const Forest& forest, std::size_t row) {
  if (row >= forest.oob_votes().size()) throw Error(Errc::ShapeMismatch, "row index out of range");
  const auto& votes = forest.oob_votes()[row];
  if (votes[0] + votes[1] == 0) throw Error(Errc::NoOobVotes, "row " + std::to_string(row) + " has no OOB votes");
  return margin(votes, forest.labels()[row]);
}

struct FeatureImportance {
  double oob_error_delta = 0;       // permuted OOB error - original OOB error
  double mean_margin_decrease = 0;  // mean of (original - permuted) margins
  double margin_count_norm = 0;     // (#decreased - #increased) / #covered rows
  double gini_decrease = 0;         // sum of weighted Gini gains / n_tree

  double measure(std::size_t m) const noexcept {
    switch (m) {
      case 0: return oob_error_delta;
      case 1: return mean_margin_decrease;
      case 2: return margin_count_norm;
      default: return gini_decrease;
    }
  }
  bool operator==(const FeatureImportance&) const = default;
};

inline constexpr std::size_t kImportanceMeasures = 4;

/// Per-feature importance. For the permutation measures each tree shuffles
/// feature i among its own OOB rows with a stream seeded by (perm_seed, i, t),
/// then re-votes those rows.
inline std::vector<FeatureImportance> importance(const Forest& forest, const FeatureMatrix& data,
                                                 const std::vector<bool>& labels, std::uint64_t perm_seed) {
  if (data.rows() != forest.oob_votes().size() || labels != forest.labels() ||
      data.cols() != forest.n_features())
    throw Error(Errc::ShapeMismatch, "importance needs the forest's training data");
  const OobSummary base = oob_summary(forest);
  const std::size_t p = data.cols();
  const std::size_t n = data.rows();
  std::vector<FeatureImportance> result(p);

  parallel_for(p, forest.config().threads, [&](std::size_t f) {
    std::vector<ClassCounts> votes(n, ClassCounts{});
    std::vector<std::size_t> shuffled;
    for (std::size_t t = 0; t < forest.trees().size(); ++t) {
      const auto& tree = forest.trees()[t];
      const auto& oob = tree.oob_rows();
      shuffled = oob;
      Rng rng(derive_seed(perm_seed, {f, t}));
      for (std::size_t k = shuffled.size(); k > 1; --k) std::swap(shuffled[k - 1], shuffled[uniform_index(rng, k)]);
      for (std::size_t k = 0; k < oob.size(); ++k) {
        const auto row = data.row(oob[k]);
        const double swapped = data.at(shuffled[k], f);
        const bool vote = tree.predict_with([&](std::size_t j) { return j == f ? swapped : row[j]; });
        ++votes[oob[k]][vote ? 1 : 0];
      }
    }
    const OobSummary permuted = oob_summary(votes, labels);
    FeatureImportance& imp = result[f];
    imp.oob_error_delta = permuted.error - base.error;
    double margin_drop = 0;
    long decreased = 0, increased = 0;
    for (std::size_t r = 0; r < n; ++r) {
      const auto& orig = forest.oob_votes()[r];
      const std::uint32_t total = orig[0] + orig[1];
      if (total == 0) continue;
      const long before = detail::vote_balance(orig, labels[r]);
      const long after = detail::vote_balance(votes[r], labels[r]);
      margin_drop += static_cast<double>(before - after) / total;
      decreased += after < before;
      increased += after > before;
    }
    imp.mean_margin_decrease = margin_drop / static_cast<double>(base.covered);
    imp.margin_count_norm = static_cast<double>(decreased - increased) / static_cast<double>(base.covered);
  });

  for (const auto& tree : forest.trees())
    for (const auto& node : tree.nodes())
      if (!node.is_leaf()) result[static_cast<std::size_t>(node.feature)].gini_decrease += node.weighted_gain;
  for (auto& imp : result) imp.gini_decrease /= static_cast<double>(forest.trees().size());
  return result;
}

/// Deterministic plain-text summary for debugging.
inline std::string describe_forest(const Forest& forest) {
  std::ostringstream out;
  out << "trees " << forest.trees().size() << " mtry " << forest.config().mtry << " min_node_size "
      << forest.config().min_node_size << " seed " << forest.config().seed << '\n';
  try {
    const auto s = oob_summary(forest);
    out << "oob_error " << s.error << " covered " << s.covered << " skipped " << s.skipped << '\n';
  } catch (const Error&) {
    out << "oob_error n/a\n";
  }
  for (std::size_t t = 0; t < forest.trees().size(); ++t) {
    const auto& tree = forest.trees()[t];
    const auto leaves = std::count_if(tree.nodes().begin(), tree.nodes().end(),
                                      [](const TreeNode& nd) { return nd.is_leaf(); });
    out << "tree " << t << " nodes " << tree.nodes().size() << " leaves " << leaves << " depth "
        << tree.depth() << " oob " << tree.oob_rows().size() << '\n';
  }
  return out.str();
}

}  // namespace emothaw
