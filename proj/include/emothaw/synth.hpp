#pragma once

// Seeded generator of synthetic corpora: DASS scores plus seven SVC
// recordings per participant, with planted multiplicative effects on stroke
// durations or stroke counts for participants carrying a given label.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "emothaw/dass.hpp"
#include "emothaw/error.hpp"
#include "emothaw/features.hpp"
#include "emothaw/parallel.hpp"
#include "emothaw/rng.hpp"
#include "emothaw/svc.hpp"
#include "emothaw/task.hpp"

namespace emothaw {

/// Multiplies `feature` of `task` by `factor` for participants whose
/// `emotion` label is positive. InAir and OnPaper scale the respective
/// durations, Total scales both, Strokes scales the stroke count.
struct PlantedEffect {
  Scale emotion = Scale::Depression;
  TaskId task = TaskId::Clock;
  FeatureKind feature = FeatureKind::OnPaper;
  double factor = 1.0;
};

/// Per-task base parameters, before participant heterogeneity and effects.
struct TaskBase {
  double on_paper_s = 10.0;
  double in_air_s = 10.0;
  double strokes = 10.0;
};

inline std::array<TaskBase, 7> default_task_bases() {
  return {{
      {9.0, 6.0, 6.0},     // pentagons
      {20.0, 15.0, 20.0},  // house
      {20.0, 15.0, 40.0},  // handprint
      {10.0, 0.0, 1.0},    // loops, left hand
      {8.0, 0.0, 1.0},     // loops, right hand
      {8.7, 22.0, 18.0},   // clock
      {25.0, 12.0, 25.0},  // cursive
  }};
}

struct SynthConfig {
  std::size_t n_participants = 129;
  std::uint64_t seed = 0;
  std::vector<PlantedEffect> effects;
  /// Probability of a positive label, indexed by Scale.
  std::array<double, 3> prevalence = {0.35, 0.35, 0.35};
  /// Probability that a participant's three labels come from one shared
  /// uniform draw instead of independent ones. Marginals are unchanged.
  double label_coupling = 0.0;
  int sampling_period_ms = 10;
  /// Log-scale spread of a participant's overall tempo and of each task.
  double participant_sigma = 0.2;
  double task_sigma = 0.25;
  /// Chance that an in-air gap loses samples (pen beyond sensing range).
  double unregistered_gap_rate = 0.3;
  std::array<TaskBase, 7> task_bases = default_task_bases();
};

/// Depression effect of `factor` on in-air and on-paper durations of the
/// three drawing tasks (pentagons, house, clock).
inline std::vector<PlantedEffect> drawing_duration_effects(Scale emotion, double factor) {
  std::vector<PlantedEffect> effects;
  for (TaskId task : {TaskId::Pentagons, TaskId::House, TaskId::Clock})
    for (FeatureKind kind : {FeatureKind::InAir, FeatureKind::OnPaper}) effects.push_back({emotion, task, kind, factor});
  return effects;
}

struct SynthCorpus {
  std::vector<Session> sessions;
  std::vector<EmotionLabels> ground_truth;  // parallel to sessions
  nlohmann::json manifest;
};

inline void validate_synth_config(const SynthConfig& c) {
  auto fail = [](const std::string& what) { throw Error(Errc::InvalidConfig, what); };
  if (c.n_participants < 1) fail("n_participants must be >= 1");
  for (double p : c.prevalence)
    if (!(p >= 0.0 && p <= 1.0)) fail("prevalence must lie in [0, 1]");
  if (!(c.label_coupling >= 0.0 && c.label_coupling <= 1.0)) fail("label_coupling must lie in [0, 1]");
  if (c.sampling_period_ms < 1) fail("sampling_period_ms must be >= 1");
  if (!(c.participant_sigma >= 0.0) || !(c.task_sigma >= 0.0)) fail("sigmas must be >= 0");
  if (!(c.unregistered_gap_rate >= 0.0 && c.unregistered_gap_rate <= 1.0))
    fail("unregistered_gap_rate must lie in [0, 1]");
  for (const auto& e : c.effects)
    if (!(e.factor > 0.0) || !std::isfinite(e.factor)) fail("effect factors must be > 0");
  for (const auto& b : c.task_bases)
    if (!(b.on_paper_s > 0.0) || !(b.in_air_s >= 0.0) || !(b.strokes >= 1.0)) fail("invalid task base");
}

namespace detail {

inline int draw_score(Rng& rng, Scale scale, bool positive) {
  SeverityLevel level = SeverityLevel::Normal;
  if (positive) level = kAllLevels[1 + uniform_index(rng, 4)];
  const ScoreBand band = severity_band(scale, level);
  return band.low + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(band.high - band.low + 1)));
}

/// Splits `total` into `parts` positive shares with mild irregularity.
inline std::vector<double> split_duration(Rng& rng, double total, std::size_t parts) {
  std::uniform_real_distribution<double> weight(0.5, 1.5);
  std::vector<double> w(parts);
  double sum = 0;
  for (auto& x : w) sum += (x = weight(rng));
  for (auto& x : w) x = total * x / sum;
  return w;
}

struct PenState {
  std::int64_t x = 0, y = 0, t = 0;
  int azimuth = 0, altitude = 0;
};

inline void emit(Rng& rng, PenState& pen, std::vector<SamplePoint>& out, PenStatus status) {
  std::uniform_int_distribution<int> step(-30, 30);
  std::uniform_int_distribution<int> pressure(20, 1023);
  pen.x += step(rng);
  pen.y += step(rng);
  out.push_back({pen.x, pen.y, pen.t, status, pen.azimuth, pen.altitude,
                 status == PenStatus::OnPaper ? pressure(rng) : 0});
}

/// Alternating in-air / on-paper runs. A leading in-air run precedes the
/// first stroke when in_air_ms > 0; each run's duration is carried by the
/// interval following its last sample, so the recording's attributed times
/// approximate the requested totals.
inline TaskRecording synthesize_task(Rng& rng, TaskId task, double on_paper_ms, double in_air_ms,
                                     std::size_t strokes, int period, double gap_rate, PenState pen) {
  TaskRecording rec;
  rec.task = task;
  const auto on = split_duration(rng, on_paper_ms, strokes);
  const auto air = in_air_ms > 0 ? split_duration(rng, in_air_ms, strokes) : std::vector<double>(strokes, 0.0);
  std::bernoulli_distribution lose_samples(gap_rate);
  auto run = [&](double duration, PenStatus status) {
    const auto ms = std::max<std::int64_t>(period, std::llround(duration));
    std::int64_t samples = std::max<std::int64_t>(1, ms / period);
    if (status == PenStatus::InAir && samples > 5 && lose_samples(rng)) samples = std::max<std::int64_t>(1, samples / 3);
    const std::int64_t end = pen.t + ms;
    for (std::int64_t k = 0; k < samples; ++k) {
      emit(rng, pen, rec.points, status);
      pen.t += period;
    }
    pen.t = std::max(pen.t, end);
  };
  for (std::size_t s = 0; s < strokes; ++s) {
    if (air[s] > 0) run(air[s], PenStatus::InAir);
    run(on[s], PenStatus::OnPaper);
  }
  rec.declared_count = static_cast<std::int64_t>(rec.points.size());
  return rec;
}

inline std::string participant_id(std::size_t index, std::size_t n) {
  std::size_t width = std::max<std::size_t>(3, std::to_string(n).size());
  std::string digits = std::to_string(index + 1);
  return "p" + std::string(width - digits.size(), '0') + digits;
}

}  // namespace detail

inline nlohmann::json synth_config_to_json(const SynthConfig& c) {
  nlohmann::json j;
  j["n_participants"] = c.n_participants;
  j["seed"] = c.seed;
  j["prevalence"] = {{"depression", c.prevalence[0]}, {"anxiety", c.prevalence[1]}, {"stress", c.prevalence[2]}};
  j["label_coupling"] = c.label_coupling;
  j["sampling_period_ms"] = c.sampling_period_ms;
  j["participant_sigma"] = c.participant_sigma;
  j["task_sigma"] = c.task_sigma;
  j["unregistered_gap_rate"] = c.unregistered_gap_rate;
  j["effects"] = nlohmann::json::array();
  for (const auto& e : c.effects)
    j["effects"].push_back({{"emotion", scale_name(e.emotion)},
                            {"task", task_name(e.task)},
                            {"feature", feature_kind_name(e.feature)},
                            {"factor", e.factor}});
  j["task_bases"] = nlohmann::json::object();
  for (TaskId t : kAllTasks) {
    const auto& b = c.task_bases[static_cast<std::size_t>(task_number(t) - 1)];
    j["task_bases"][std::string(task_name(t))] = {
        {"on_paper_s", b.on_paper_s}, {"in_air_s", b.in_air_s}, {"strokes", b.strokes}};
  }
  return j;
}

inline Scale scale_from_name(std::string_view name) {
  for (Scale s : kAllScales)
    if (scale_name(s) == name) return s;
  throw Error(Errc::InvalidConfig, "unknown emotion '" + std::string(name) + "'");
}

inline TaskId task_from_name(std::string_view name) {
  for (TaskId t : kAllTasks)
    if (task_name(t) == name) return t;
  throw Error(Errc::InvalidConfig, "unknown task '" + std::string(name) + "'");
}

inline FeatureKind feature_kind_from_name(std::string_view name) {
  for (FeatureKind k : kAllFeatureKinds)
    if (feature_kind_name(k) == name) return k;
  throw Error(Errc::InvalidConfig, "unknown feature '" + std::string(name) + "'");
}

/// Reads a config; absent keys keep their defaults.
inline SynthConfig synth_config_from_json(const nlohmann::json& j) {
  SynthConfig c;
  try {
    if (!j.is_object()) throw Error(Errc::InvalidConfig, "config must be a JSON object");
    c.n_participants = j.value("n_participants", c.n_participants);
    c.seed = j.value("seed", c.seed);
    if (j.contains("prevalence")) {
      const auto& p = j.at("prevalence");
      for (Scale s : kAllScales)
        c.prevalence[static_cast<std::size_t>(s)] =
            p.value(std::string(scale_name(s)), c.prevalence[static_cast<std::size_t>(s)]);
    }
    c.label_coupling = j.value("label_coupling", c.label_coupling);
    c.sampling_period_ms = j.value("sampling_period_ms", c.sampling_period_ms);
    c.participant_sigma = j.value("participant_sigma", c.participant_sigma);
    c.task_sigma = j.value("task_sigma", c.task_sigma);
    c.unregistered_gap_rate = j.value("unregistered_gap_rate", c.unregistered_gap_rate);
    if (j.contains("effects")) {
      for (const auto& e : j.at("effects")) {
        c.effects.push_back({scale_from_name(e.at("emotion").get<std::string>()),
                             task_from_name(e.at("task").get<std::string>()),
                             feature_kind_from_name(e.at("feature").get<std::string>()),
                             e.at("factor").get<double>()});
      }
    }
    if (j.contains("task_bases")) {
      for (const auto& [name, b] : j.at("task_bases").items()) {
        auto& base = c.task_bases[static_cast<std::size_t>(task_number(task_from_name(name)) - 1)];
        base.on_paper_s = b.value("on_paper_s", base.on_paper_s);
        base.in_air_s = b.value("in_air_s", base.in_air_s);
        base.strokes = b.value("strokes", base.strokes);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, e.what());
  }
  validate_synth_config(c);
  return c;
}

/// Participant i draws from its own stream seeded by (seed, i).
inline SynthCorpus generate_corpus(const SynthConfig& config, unsigned threads = 1) {
  validate_synth_config(config);
  const std::size_t n = config.n_participants;
  SynthCorpus corpus;
  corpus.sessions.resize(n);
  corpus.ground_truth.resize(n);

  parallel_for(n, threads, [&](std::size_t i) {
    Rng rng(derive_seed(config.seed, {i}));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    EmotionLabels truth;
    const bool coupled = unit(rng) < config.label_coupling;
    const double shared = unit(rng);
    std::array<bool, 3> label{};
    for (Scale s : kAllScales) {
      const double u = unit(rng);
      label[static_cast<std::size_t>(s)] = (coupled ? shared : u) < config.prevalence[static_cast<std::size_t>(s)];
    }
    truth.depressed = label[0];
    truth.anxious = label[1];
    truth.stressed = label[2];

    Session& session = corpus.sessions[i];
    session.participant_id = detail::participant_id(i, n);
    session.scores.depression = detail::draw_score(rng, Scale::Depression, truth.depressed);
    session.scores.anxiety = detail::draw_score(rng, Scale::Anxiety, truth.anxious);
    session.scores.stress = detail::draw_score(rng, Scale::Stress, truth.stressed);

    std::lognormal_distribution<double> tempo_dist(0.0, config.participant_sigma);
    std::lognormal_distribution<double> task_dist(0.0, config.task_sigma);
    const double tempo = tempo_dist(rng);

    detail::PenState pen;
    pen.x = 45000 + static_cast<std::int64_t>(uniform_index(rng, 10000));
    pen.y = 30000 + static_cast<std::int64_t>(uniform_index(rng, 8000));
    pen.t = 10000000 + static_cast<std::int64_t>(uniform_index(rng, 10000000));
    pen.azimuth = 1700 + static_cast<int>(uniform_index(rng, 400));
    pen.altitude = 450 + static_cast<int>(uniform_index(rng, 150));

    for (TaskId task : kAllTasks) {
      const auto& base = config.task_bases[static_cast<std::size_t>(task_number(task) - 1)];
      double on = base.on_paper_s * 1000.0 * tempo * task_dist(rng);
      double air = base.in_air_s * 1000.0 * tempo * task_dist(rng);
      double strokes = base.strokes * task_dist(rng);
      if (is_feature_task(task)) {
        for (const auto& e : config.effects) {
          if (e.task != task || !truth.get(e.emotion)) continue;
          switch (e.feature) {
            case FeatureKind::InAir: air *= e.factor; break;
            case FeatureKind::OnPaper: on *= e.factor; break;
            case FeatureKind::Total: air *= e.factor; on *= e.factor; break;
            case FeatureKind::Strokes: strokes *= e.factor; break;
          }
        }
      } else {
        air = 0.0;
        strokes = 1.0;
      }
      const auto n_strokes = static_cast<std::size_t>(std::max(1.0, std::round(strokes)));
      auto rec = detail::synthesize_task(rng, task, on, air, n_strokes, config.sampling_period_ms,
                                         config.unregistered_gap_rate, pen);
      pen.t = rec.points.back().timestamp + 5000 + static_cast<std::int64_t>(uniform_index(rng, 20000));
      session.recordings.emplace(task, std::move(rec));
    }
    corpus.ground_truth[i] = truth;
  });

  corpus.manifest["generator"] = "emothaw-synth";
  corpus.manifest["config"] = synth_config_to_json(config);
  corpus.manifest["notes"] =
      "Durations are lognormal around task_bases (seconds) scaled by a per-participant tempo; planted effects "
      "multiply the stated feature for label-positive participants. Loop tasks are single pen-down strokes.";
  std::size_t positives[3] = {0, 0, 0};
  for (const auto& t : corpus.ground_truth)
    for (Scale s : kAllScales) positives[static_cast<std::size_t>(s)] += t.get(s);
  corpus.manifest["positives"] = {
      {"depression", positives[0]}, {"anxiety", positives[1]}, {"stress", positives[2]}};
  return corpus;
}

struct ScoreDistribution {
  /// counts[scale][level]
  std::array<std::array<std::size_t, 5>, 3> band_counts{};
  std::array<double, 3> prevalence{};
  std::size_t participants = 0;
};

inline ScoreDistribution score_distribution_summary(const std::vector<Session>& sessions) {
  if (sessions.empty()) throw Error(Errc::EmptyCorpus, "no sessions");
  ScoreDistribution d;
  d.participants = sessions.size();
  for (const auto& s : sessions) {
    const auto labels = dichotomize(s.scores);
    for (Scale scale : kAllScales) {
      const auto k = static_cast<std::size_t>(scale);
      ++d.band_counts[k][static_cast<std::size_t>(severity_level(scale, s.scores.get(scale)))];
      d.prevalence[k] += labels.get(scale);
    }
  }
  for (auto& p : d.prevalence) p /= static_cast<double>(sessions.size());
  return d;
}

inline ScoreDistribution score_distribution_summary(const SynthCorpus& corpus) {
  return score_distribution_summary(corpus.sessions);
}

}  // namespace emothaw
