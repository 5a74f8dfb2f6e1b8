// Command-line front end: validate, features, rank, cv, synth, crosstab.
//
// Exit codes: 0 success, 1 validation or runtime failure, 2 usage error.

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "emothaw/emothaw.hpp"

namespace {

using namespace emothaw;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct ForestFlags {
  std::size_t n_tree = 100;
  std::size_t mtry = 5;
  std::size_t min_node_size = 1;
  unsigned threads = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--n-tree", n_tree, "Trees per forest")->check(CLI::PositiveNumber);
    cmd->add_option("--mtry", mtry, "Candidate features per split")->check(CLI::PositiveNumber);
    cmd->add_option("--min-node-size", min_node_size, "Nodes at or below this size are not split")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--threads", threads, "Worker threads (0 = all cores); results do not depend on it");
  }
  ForestConfig config() const {
    ForestConfig c;
    c.n_tree = n_tree;
    c.mtry = mtry;
    c.min_node_size = min_node_size;
    return c;
  }
};

std::string default_corpus_root() {
  const char* env = std::getenv("EMOTHAW_CORPUS");
  return env ? env : "";
}

ParseMode parse_mode(const std::string& s) { return s == "lenient" ? ParseMode::Lenient : ParseMode::Strict; }

struct LabeledData {
  FeatureMatrix matrix;
  std::map<std::string, DassScores, std::less<>> scores;
};

LabeledData load_labeled(const std::string& features_csv, const std::string& labels_csv) {
  LabeledData d;
  d.matrix = parse_feature_csv(read_text_file(features_csv));
  for (const auto& row : parse_labels_csv(read_text_file(labels_csv))) d.scores.emplace(row.participant_id, row.scores);
  std::vector<std::string> missing, extra;
  std::set<std::string, std::less<>> feature_ids(d.matrix.participant_ids().begin(), d.matrix.participant_ids().end());
  for (const auto& id : feature_ids)
    if (!d.scores.contains(id)) missing.push_back(id);
  for (const auto& [id, s] : d.scores)
    if (!feature_ids.contains(id)) extra.push_back(id);
  if (feature_ids.size() != d.matrix.rows())
    throw Error(Errc::IdMismatch, "feature file repeats a participant_id");
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "participant ids differ between feature and label files";
    if (!missing.empty()) msg += "; no label for " + missing.front() + (missing.size() > 1 ? " and others" : "");
    if (!extra.empty()) msg += "; no features for " + extra.front() + (extra.size() > 1 ? " and others" : "");
    throw Error(Errc::IdMismatch, msg);
  }
  return d;
}

std::vector<bool> target_labels(const LabeledData& d, Scale target) {
  std::vector<bool> labels;
  for (const auto& id : d.matrix.participant_ids()) labels.push_back(dichotomize(d.scores.find(id)->second).get(target));
  return labels;
}

std::vector<Scale> parse_targets(const std::string& target) {
  if (target == "all") return {kAllScales.begin(), kAllScales.end()};
  return {scale_from_name(target)};
}

std::string capitalized(std::string_view s) {
  std::string out(s);
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

int cmd_validate(const std::string& root, const std::string& mode) {
  const LoadedCorpus corpus = load_corpus(root, parse_mode(mode));
  std::size_t warn = 0;
  for (const auto& f : corpus.files) {
    warn += f.status == FileStatus::Warn;
    std::cout << file_status_name(f.status) << ' ' << f.path;
    for (const auto& m : f.messages) std::cout << "\n    " << m;
    std::cout << '\n';
  }
  std::cout << "participants " << corpus.sessions.size() << ", files " << corpus.files.size() << ", warnings "
            << warn << ", failures " << corpus.failures() << '\n';
  return corpus.failures() == 0 ? kExitOk : kExitFailure;
}

int cmd_features(const std::string& root, const std::string& out, const std::string& policy,
                 const std::string& mode, double time_scale) {
  const LoadedCorpus corpus = load_corpus(root, parse_mode(mode));
  for (const auto& f : corpus.files)
    if (f.status == FileStatus::Fail)
      for (const auto& m : f.messages) std::cerr << "error " << f.path << ": " << m << '\n';
  const auto assembled = assemble_feature_matrix(
      corpus.sessions, policy == "drop" ? MissingTaskPolicy::DropParticipant : MissingTaskPolicy::Strict);
  for (const auto& w : assembled.warnings) std::cerr << "warning: " << w.message << '\n';
  const std::string csv = format_feature_csv(assembled.matrix);
  if (out.empty()) {
    std::cout << csv;
    return kExitOk;
  }
  write_text_file(out, csv);
  const auto& m = assembled.matrix;
  std::cout << "wrote " << m.rows() << " x " << m.cols() << " features to " << out << "\n\n";
  std::cout << std::fixed << std::setprecision(1) << "task        in-air  on-paper  total  strokes  (means)\n";
  for (TaskId task : kFeatureTasks) {
    double sum[4] = {0, 0, 0, 0};
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (FeatureKind k : kAllFeatureKinds) sum[static_cast<int>(k)] += m.at(r, feature_column(task, k));
    const double n = static_cast<double>(m.rows());
    std::cout << std::left << std::setw(10) << task_name(task) << std::right << std::setw(8)
              << sum[0] / n * time_scale << std::setw(10) << sum[1] / n * time_scale << std::setw(7)
              << sum[2] / n * time_scale << std::setw(9) << sum[3] / n << '\n';
  }
  return kExitOk;
}

int cmd_rank(const std::string& features, const std::string& labels_csv, const std::string& target,
             std::uint64_t seed, std::size_t n_forests, std::size_t k, const std::string& out,
             const ForestFlags& flags) {
  const LabeledData data = load_labeled(features, labels_csv);
  std::ostringstream csv;
  for (Scale scale : parse_targets(target)) {
    RankConfig cfg;
    cfg.n_forests = n_forests;
    cfg.forest = flags.config();
    cfg.master_seed = seed;
    cfg.threads = flags.threads;
    const auto report = rank_features(data.matrix, target_labels(data, scale), cfg);
    std::cout << format_rank_table(report, capitalized(scale_name(scale)), k) << '\n';
    std::string body = format_rank_csv(report);
    if (target == "all") {
      // Prefix each row with the target when several reports share a file.
      std::istringstream lines(body);
      std::string line;
      bool header = true;
      while (std::getline(lines, line)) {
        if (header) {
          if (csv.tellp() == 0) csv << "target," << line << '\n';
          header = false;
        } else {
          csv << scale_name(scale) << ',' << line << '\n';
        }
      }
    } else {
      csv << body;
    }
  }
  if (!out.empty()) write_text_file(out, csv.str());
  return kExitOk;
}

int cmd_cv(const std::string& features, const std::string& labels_csv, const std::string& target,
           std::uint64_t seed, std::size_t reps, const std::string& out, const ForestFlags& flags) {
  const LabeledData data = load_labeled(features, labels_csv);
  std::string csv = format_cv_csv_header();
  std::cout << "Random Forest Model  Accuracy (in %)\n";
  for (Scale scale : parse_targets(target)) {
    CvConfig cfg;
    cfg.forest = flags.config();
    cfg.repetitions = reps;
    cfg.master_seed = seed;
    cfg.threads = flags.threads;
    const auto report = repeated_cv(data.matrix, target_labels(data, scale), cfg, std::string(scale_name(scale)));
    if (report.fallback_folds)
      std::cerr << "warning: " << report.fallback_folds << " folds used majority prediction (single-class split)\n";
    std::cout << format_cv_text_row(report);
    csv += format_cv_csv_row(report);
  }
  if (!out.empty()) write_text_file(out, csv);
  return kExitOk;
}

int cmd_synth(const std::string& config_path, const std::string& out, std::optional<std::uint64_t> seed,
              std::optional<std::size_t> n, unsigned threads) {
  SynthConfig cfg;
  if (!config_path.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_text_file(config_path));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::InvalidConfig, e.what());
    }
    cfg = synth_config_from_json(j);
  }
  if (seed) cfg.seed = *seed;
  if (n) cfg.n_participants = *n;
  const SynthCorpus corpus = generate_corpus(cfg, threads);
  write_corpus(out, corpus.sessions);
  write_text_file(fs::path(out) / "manifest.json", corpus.manifest.dump(2) + "\n");
  const auto dist = score_distribution_summary(corpus);
  std::cout << "wrote " << corpus.sessions.size() << " participants to " << out << '\n';
  for (Scale s : kAllScales) {
    const auto k = static_cast<std::size_t>(s);
    std::cout << std::left << std::setw(11) << scale_name(s) << std::right;
    for (SeverityLevel level : kAllLevels)
      std::cout << ' ' << severity_name(level) << '=' << dist.band_counts[k][static_cast<std::size_t>(level)];
    std::cout << std::fixed << std::setprecision(3) << "  prevalence " << dist.prevalence[k] << '\n';
  }
  return kExitOk;
}

int cmd_crosstab(const std::string& labels_csv) {
  std::vector<EmotionLabels> labels;
  for (const auto& row : parse_labels_csv(read_text_file(labels_csv))) labels.push_back(dichotomize(row.scores));
  if (labels.empty()) throw Error(Errc::EmptyInput, "label file has no rows");
  std::cout << "participants " << labels.size() << "\n";
  for (LabelPair pair : kAllPairs) {
    const auto [first, second] = pair_scales(pair);
    const auto table = cross_tabulate(labels, pair);
    std::cout << '\n' << scale_name(first) << " x " << scale_name(second) << '\n';
    std::cout << std::fixed << std::setprecision(1);
    const char* names[2] = {"no", "yes"};
    std::cout << "              " << scale_name(second) << "=no   " << scale_name(second) << "=yes\n";
    for (int i = 0; i < 2; ++i) {
      std::cout << "  " << std::left << std::setw(10) << (std::string(names[i])) << std::right;
      for (int j = 0; j < 2; ++j)
        std::cout << std::setw(6) << table.counts[i][j] << " (" << std::setw(5) << table.percent[i][j] << "%)";
      std::cout << "   [" << scale_name(first) << '=' << names[i] << "]\n";
    }
    try {
      const auto chi = chi_square_2x2(table.counts);
      std::cout << std::setprecision(4) << "  chi2 " << chi.statistic << "  p " << std::scientific
                << std::setprecision(3) << chi.p_value << std::defaultfloat << '\n';
    } catch (const Error& e) {
      std::cout << "  chi2 not computable: " << e.what() << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Handwriting-based emotional state analysis: SVC parsing, features, random forests"};
  app.require_subcommand(1);

  std::string corpus = default_corpus_root();
  std::string mode = "strict";
  std::string out;
  std::string policy = "strict";
  double time_scale = 0.001;
  std::string features_csv, labels_csv, target = "depression", config_path;
  std::uint64_t seed = 0;
  std::size_t n_forests = 50, reps = 10, k = 10;
  std::optional<std::uint64_t> synth_seed;
  std::optional<std::size_t> synth_n;
  unsigned synth_threads = 1;
  ForestFlags rank_flags, cv_flags;

  const auto modes = CLI::IsMember({"strict", "lenient"});
  const auto targets = CLI::IsMember({"depression", "anxiety", "stress", "all"});

  auto* validate = app.add_subcommand("validate", "Check every recording and the label file of a corpus");
  validate->add_option("corpus", corpus, "Corpus root (default: $EMOTHAW_CORPUS)");
  validate->add_option("--mode", mode, "Parse mode")->check(modes);

  auto* features = app.add_subcommand("features", "Extract the 20-column feature matrix as CSV");
  features->add_option("corpus", corpus, "Corpus root (default: $EMOTHAW_CORPUS)");
  features->add_option("--out", out, "Output CSV (default: stdout)");
  features->add_option("--policy", policy, "Missing-task policy")->check(CLI::IsMember({"strict", "drop"}));
  features->add_option("--mode", mode, "Parse mode")->check(modes);
  features->add_option("--time-scale", time_scale, "Multiplier from milliseconds to report units (seconds)");

  auto* rank = app.add_subcommand("rank", "Rank features by summed importance ranks over a forest ensemble");
  rank->add_option("--features", features_csv, "Feature CSV")->required();
  rank->add_option("--labels", labels_csv, "Label CSV")->required();
  rank->add_option("--target", target, "Emotional state")->check(targets);
  rank->add_option("--seed", seed, "Master seed");
  rank->add_option("--n-forests", n_forests, "Forests in the ensemble")->check(CLI::PositiveNumber);
  rank->add_option("--k", k, "Rows in the printed table");
  rank->add_option("--out", out, "Rank report CSV");
  rank_flags.attach(rank);

  auto* cv = app.add_subcommand("cv", "Repeated leave-one-out cross-validation accuracy");
  cv->add_option("--features", features_csv, "Feature CSV")->required();
  cv->add_option("--labels", labels_csv, "Label CSV")->required();
  cv->add_option("--target", target, "Emotional state")->check(targets)->default_val("all");
  cv->add_option("--seed", seed, "Master seed");
  cv->add_option("--reps", reps, "Repetitions")->check(CLI::PositiveNumber);
  cv->add_option("--out", out, "Report CSV");
  cv_flags.attach(cv);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth->add_option("--config", config_path, "JSON config (default: built-in defaults)");
  synth->add_option("--out", out, "Output corpus root")->required();
  synth->add_option("--seed", synth_seed, "Override the config seed");
  synth->add_option("--n", synth_n, "Override the participant count");
  synth->add_option("--threads", synth_threads, "Worker threads (0 = all cores)");

  auto* crosstab = app.add_subcommand("crosstab", "Label co-occurrence tables with Pearson chi-square");
  crosstab->add_option("--labels", labels_csv, "Label CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (validate->parsed() || features->parsed()) {
      if (corpus.empty()) {
        std::cerr << "error: no corpus given and EMOTHAW_CORPUS is unset\n";
        return kExitUsage;
      }
    }
    if (validate->parsed()) return cmd_validate(corpus, mode);
    if (features->parsed()) {
      if (!features->count("--mode")) mode = "lenient";
      return cmd_features(corpus, out, policy, mode, time_scale);
    }
    if (rank->parsed()) return cmd_rank(features_csv, labels_csv, target, seed, n_forests, k, out, rank_flags);
    if (cv->parsed()) return cmd_cv(features_csv, labels_csv, target, seed, reps, out, cv_flags);
    if (synth->parsed()) return cmd_synth(config_path, out, synth_seed, synth_n, synth_threads);
    if (crosstab->parsed()) return cmd_crosstab(labels_csv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
