#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "emothaw/features.hpp"
#include "emothaw/synth.hpp"
#include "support/oracles.hpp"

using namespace emothaw;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return Errc::IoError;
}

std::string corpus_bytes(const SynthCorpus& c) {
  std::string out = c.manifest.dump();
  for (const auto& s : c.sessions) {
    out += s.participant_id + ' ' + std::to_string(s.scores.depression) + ' ' + std::to_string(s.scores.anxiety) +
           ' ' + std::to_string(s.scores.stress) + '\n';
    for (const auto& [task, rec] : s.recordings) out += serialize_svc(rec);
  }
  return out;
}

SynthConfig quick_config(std::uint64_t seed, std::size_t n = 129) {
  SynthConfig c;
  c.seed = seed;
  c.n_participants = n;
  // Coarser sampling keeps the corpora small; durations are unaffected.
  c.sampling_period_ms = 40;
  return c;
}

/// Column values split by the label of one emotion.
std::pair<std::vector<double>, std::vector<double>> split_by_label(const SynthCorpus& c, Scale emotion,
                                                                   std::size_t column) {
  const auto m = assemble_feature_matrix(c.sessions, MissingTaskPolicy::Strict).matrix;
  std::vector<double> pos, neg;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    // Rows are sorted by participant id, which is the generation order.
    (c.ground_truth[r].get(emotion) ? pos : neg).push_back(m.at(r, column));
  }
  return {pos, neg};
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

}  // namespace

TEST(Synth, SameConfigGivesIdenticalCorpus) {
  auto cfg = quick_config(7, 20);
  cfg.effects = drawing_duration_effects(Scale::Depression, 2.0);
  const auto a = generate_corpus(cfg);
  const auto b = generate_corpus(cfg);
  EXPECT_EQ(corpus_bytes(a), corpus_bytes(b));
  EXPECT_EQ(corpus_bytes(a), corpus_bytes(generate_corpus(cfg, 4)));
  cfg.seed = 8;
  EXPECT_NE(corpus_bytes(a), corpus_bytes(generate_corpus(cfg)));
}

TEST(Synth, ShapeIdsAndManifest) {
  auto cfg = quick_config(1, 129);
  cfg.effects = drawing_duration_effects(Scale::Depression, 3.0);
  const auto c = generate_corpus(cfg);
  ASSERT_EQ(c.sessions.size(), 129u);
  ASSERT_EQ(c.ground_truth.size(), 129u);
  EXPECT_EQ(c.sessions.front().participant_id, "p001");
  EXPECT_EQ(c.sessions.back().participant_id, "p129");
  for (const auto& s : c.sessions) EXPECT_EQ(s.recordings.size(), 7u);
  EXPECT_EQ(c.manifest.at("config").at("n_participants"), 129);
  EXPECT_EQ(c.manifest.at("config").at("effects").size(), cfg.effects.size());
  std::size_t depressed = 0;
  for (const auto& t : c.ground_truth) depressed += t.depressed;
  EXPECT_EQ(c.manifest.at("positives").at("depression"), depressed);
  EXPECT_EQ(synth_config_from_json(c.manifest.at("config")).effects.size(), cfg.effects.size());
}

TEST(Synth, ScoresMatchGroundTruth) {
  auto cfg = quick_config(2, 200);
  cfg.prevalence = {0.3, 0.5, 0.7};
  const auto c = generate_corpus(cfg);
  for (std::size_t i = 0; i < c.sessions.size(); ++i) {
    const auto& s = c.sessions[i].scores;
    for (Scale scale : kAllScales) {
      EXPECT_GE(s.get(scale), 0);
      EXPECT_LE(s.get(scale), kMaxScaleScore);
    }
    EXPECT_EQ(dichotomize(s), c.ground_truth[i]);
  }
}

TEST(Synth, RecordingsRoundTripStrictly) {
  const auto c = generate_corpus(quick_config(3, 30));
  for (const auto& s : c.sessions) {
    for (const auto& [task, rec] : s.recordings) {
      const auto text = serialize_svc(rec);
      const auto parsed = parse_svc(text, ParseMode::Strict, task);
      EXPECT_TRUE(parsed.warnings.empty());
      EXPECT_EQ(parsed.recording.points, rec.points);
      EXPECT_EQ(serialize_svc(parsed.recording), text);
      for (const auto& p : rec.points) EXPECT_NO_THROW(normalize_angles(p.azimuth_raw, p.altitude_raw));
    }
  }
}

TEST(Synth, LoopsArePenDownOnly) {
  const auto c = generate_corpus(quick_config(4, 10));
  for (const auto& s : c.sessions) {
    for (TaskId loop : {TaskId::LoopsLeft, TaskId::LoopsRight}) {
      const auto& rec = s.recordings.at(loop);
      ASSERT_FALSE(rec.points.empty());
      for (const auto& p : rec.points) EXPECT_EQ(p.pen_status, PenStatus::OnPaper);
      const auto f = extract_task_features(rec);
      EXPECT_EQ(f.in_air_ms, 0);
      EXPECT_EQ(f.pen_down_strokes, 1);
    }
  }
}

TEST(Synth, FeatureIdentityOnEveryRecording) {
  auto cfg = quick_config(5, 40);
  cfg.sampling_period_ms = 10;
  cfg.effects = drawing_duration_effects(Scale::Anxiety, 2.5);
  const auto c = generate_corpus(cfg);
  for (const auto& s : c.sessions) {
    for (const auto& [task, rec] : s.recordings) {
      const auto f = extract_task_features(rec);
      EXPECT_EQ(f.in_air_ms + f.on_paper_ms, f.total_ms);
      const auto brute = testkit::brute_force_features(rec);
      EXPECT_EQ(f.in_air_ms, brute.in_air);
      EXPECT_EQ(f.on_paper_ms, brute.on_paper);
      EXPECT_EQ(f.pen_down_strokes, brute.strokes);
    }
  }
}

TEST(Synth, NullEffectIndistinguishable) {
  const std::size_t column = feature_column(TaskId::Clock, FeatureKind::OnPaper);
  int rejected = 0;
  const int seeds = 30;
  for (int i = 0; i < seeds; ++i) {
    auto cfg = quick_config(100 + static_cast<std::uint64_t>(i));
    cfg.effects = drawing_duration_effects(Scale::Depression, 1.0);
    const auto [pos, neg] = split_by_label(generate_corpus(cfg), Scale::Depression, column);
    rejected += testkit::mann_whitney_p(pos, neg) < 0.05;
  }
  EXPECT_LE(rejected, seeds / 10);
}

TEST(Synth, ClockOnPaperEffectRecovered) {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    auto cfg = quick_config(seed);
    cfg.effects = {{Scale::Depression, TaskId::Clock, FeatureKind::OnPaper, 3.0}};
    const auto c = generate_corpus(cfg);
    const auto [pos, neg] =
        split_by_label(c, Scale::Depression, feature_column(TaskId::Clock, FeatureKind::OnPaper));
    ASSERT_FALSE(pos.empty());
    ASSERT_FALSE(neg.empty());
    const double ratio = mean(pos) / mean(neg);
    EXPECT_GE(ratio, 2.0) << "seed " << seed;
    EXPECT_LE(ratio, 4.0) << "seed " << seed;
    // An untouched column stays near 1.
    const auto [p2, n2] = split_by_label(c, Scale::Depression, feature_column(TaskId::House, FeatureKind::OnPaper));
    EXPECT_NEAR(mean(p2) / mean(n2), 1.0, 0.25);
  }
}

TEST(ScoreDistribution, HalfPrevalence) {
  auto cfg = quick_config(21);
  cfg.prevalence = {0.5, 0.5, 0.5};
  const auto d = score_distribution_summary(generate_corpus(cfg));
  EXPECT_EQ(d.participants, 129u);
  const double depressed = d.prevalence[0] * 129;
  EXPECT_NEAR(depressed, 65, 15);
  for (Scale s : kAllScales) {
    const auto& counts = d.band_counts[static_cast<std::size_t>(s)];
    EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), std::size_t{0}), 129u);
  }
}

TEST(ScoreDistribution, SingleParticipant) {
  const auto d = score_distribution_summary(generate_corpus(quick_config(22, 1)));
  for (Scale s : kAllScales) {
    const auto& counts = d.band_counts[static_cast<std::size_t>(s)];
    EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), std::size_t{0}), 1u);
    EXPECT_EQ(std::count(counts.begin(), counts.end(), 1u), 1);
  }
}

TEST(ScoreDistribution, ZeroPrevalenceAllNormal) {
  auto cfg = quick_config(23, 60);
  cfg.prevalence = {0, 0, 0};
  const auto c = generate_corpus(cfg);
  const auto d = score_distribution_summary(c);
  for (Scale s : kAllScales) {
    EXPECT_EQ(d.band_counts[static_cast<std::size_t>(s)][static_cast<std::size_t>(SeverityLevel::Normal)], 60u);
    EXPECT_EQ(d.prevalence[static_cast<std::size_t>(s)], 0.0);
  }
  EXPECT_EQ(code_of([] { score_distribution_summary(std::vector<Session>{}); }), Errc::EmptyCorpus);
}

TEST(Synth, InvalidConfigRejected) {
  auto expect_invalid = [](auto mutate) {
    SynthConfig c;
    mutate(c);
    EXPECT_EQ(code_of([&] { generate_corpus(c); }), Errc::InvalidConfig);
  };
  expect_invalid([](SynthConfig& c) { c.n_participants = 0; });
  expect_invalid([](SynthConfig& c) { c.prevalence[1] = 1.5; });
  expect_invalid([](SynthConfig& c) { c.prevalence[0] = -0.1; });
  expect_invalid([](SynthConfig& c) { c.sampling_period_ms = 0; });
  expect_invalid([](SynthConfig& c) { c.label_coupling = 2; });
  expect_invalid([](SynthConfig& c) { c.effects = {{Scale::Stress, TaskId::House, FeatureKind::InAir, 0.0}}; });
  expect_invalid([](SynthConfig& c) { c.effects = {{Scale::Stress, TaskId::House, FeatureKind::InAir, -2.0}}; });

  EXPECT_EQ(code_of([] { synth_config_from_json(nlohmann::json::parse(R"({"n_participants": "many"})")); }),
            Errc::InvalidConfig);
  EXPECT_EQ(code_of([] {
              synth_config_from_json(nlohmann::json::parse(
                  R"({"effects": [{"emotion": "joy", "task": "clock", "feature": "in_air", "factor": 2}]})"));
            }),
            Errc::InvalidConfig);
  EXPECT_EQ(code_of([] { synth_config_from_json(nlohmann::json::array()); }), Errc::InvalidConfig);
}

TEST(Synth, ConfigJsonRoundTrip) {
  SynthConfig c;
  c.n_participants = 17;
  c.seed = 0xfeedbeefcafeULL;
  c.prevalence = {0.1, 0.2, 0.3};
  c.label_coupling = 0.4;
  c.effects = drawing_duration_effects(Scale::Stress, 1.7);
  c.task_bases[6].strokes = 31;
  const auto back = synth_config_from_json(nlohmann::json::parse(synth_config_to_json(c).dump()));
  EXPECT_EQ(synth_config_to_json(back), synth_config_to_json(c));
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.effects.size(), c.effects.size());
  const auto defaults = synth_config_from_json(nlohmann::json::object());
  EXPECT_EQ(defaults.n_participants, 129u);
  EXPECT_EQ(defaults.sampling_period_ms, 10);
}

TEST(Synth, CoupledLabelsCoOccur) {
  auto cfg = quick_config(31);
  cfg.prevalence = {0.4, 0.4, 0.4};
  cfg.label_coupling = 1.0;
  const auto c = generate_corpus(cfg);
  std::array<std::array<long, 2>, 2> table{};
  for (const auto& t : c.ground_truth) ++table[t.depressed ? 0 : 1][t.anxious ? 0 : 1];
  EXPECT_LT(chi_square_2x2(table).p_value, 0.01);
}

TEST(Synth, IndependentLabelsRarelyAssociated) {
  int significant = 0;
  const int seeds = 30;
  for (int i = 0; i < seeds; ++i) {
    auto cfg = quick_config(400 + static_cast<std::uint64_t>(i), 129);
    cfg.prevalence = {0.5, 0.5, 0.5};
    const auto c = generate_corpus(cfg);
    std::array<std::array<long, 2>, 2> table{};
    for (const auto& t : c.ground_truth) ++table[t.stressed ? 0 : 1][t.depressed ? 0 : 1];
    significant += chi_square_2x2(table).p_value <= 0.05;
  }
  EXPECT_LE(significant, seeds / 10);
}
