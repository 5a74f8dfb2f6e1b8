#include <gtest/gtest.h>

#include "emothaw/dass.hpp"
#include "emothaw/rng.hpp"
#include "support/oracles.hpp"

using namespace emothaw;

TEST(SeverityLevel, BandEdges) {
  EXPECT_EQ(severity_level(Scale::Depression, 9), SeverityLevel::Normal);
  EXPECT_EQ(severity_level(Scale::Depression, 10), SeverityLevel::Mild);
  EXPECT_EQ(severity_level(Scale::Depression, 28), SeverityLevel::ExtremelySevere);
  EXPECT_EQ(severity_level(Scale::Anxiety, 20), SeverityLevel::ExtremelySevere);
  EXPECT_EQ(severity_level(Scale::Anxiety, 9), SeverityLevel::Mild);
  EXPECT_EQ(severity_level(Scale::Anxiety, 10), SeverityLevel::Moderate);
  EXPECT_EQ(severity_level(Scale::Stress, 0), SeverityLevel::Normal);
  EXPECT_EQ(severity_level(Scale::Stress, 33), SeverityLevel::Severe);
  EXPECT_EQ(severity_level(Scale::Stress, 34), SeverityLevel::ExtremelySevere);
}

TEST(SeverityLevel, OutOfRange) {
  for (Scale s : kAllScales) {
    try {
      severity_level(s, 43);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::ScoreOutOfRange);
    }
    EXPECT_THROW(severity_level(s, -1), Error);
  }
}

TEST(SeverityLevel, MonotoneAndBandsPartitionRange) {
  for (Scale s : kAllScales) {
    int covered = 0;
    for (SeverityLevel level : kAllLevels) {
      const auto band = severity_band(s, level);
      for (int score = band.low; score <= band.high; ++score) EXPECT_EQ(severity_level(s, score), level);
      covered += band.high - band.low + 1;
    }
    EXPECT_EQ(covered, kMaxScaleScore + 1);
    for (int score = 1; score <= kMaxScaleScore; ++score)
      EXPECT_LE(severity_level(s, score - 1), severity_level(s, score));
  }
}

TEST(Dichotomize, Examples) {
  EXPECT_EQ(dichotomize({9, 7, 14}), (EmotionLabels{false, false, false}));
  EXPECT_EQ(dichotomize({10, 8, 15}), (EmotionLabels{true, true, true}));
  EXPECT_EQ(dichotomize({0, 0, 0}), (EmotionLabels{false, false, false}));
}

TEST(Dichotomize, ExhaustiveAgreesWithSeverity) {
  for (int score = 0; score <= kMaxScaleScore; ++score) {
    const auto labels = dichotomize({score, score, score});
    EXPECT_EQ(labels.depressed, severity_level(Scale::Depression, score) != SeverityLevel::Normal);
    EXPECT_EQ(labels.anxious, severity_level(Scale::Anxiety, score) != SeverityLevel::Normal);
    EXPECT_EQ(labels.stressed, severity_level(Scale::Stress, score) != SeverityLevel::Normal);
    EXPECT_EQ(labels.depressed, score > 9);
    EXPECT_EQ(labels.anxious, score > 7);
    EXPECT_EQ(labels.stressed, score > 14);
  }
}

TEST(CrossTabulate, Examples) {
  auto single = cross_tabulate({{true, true, true}}, LabelPair::AnxStr);
  EXPECT_EQ(single.counts[1][1], 1);
  EXPECT_DOUBLE_EQ(single.percent[1][1], 100.0);

  std::vector<EmotionLabels> four = {
      {false, false, false}, {false, false, true}, {false, true, false}, {false, true, true}};
  auto t = cross_tabulate(four, LabelPair::AnxStr);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_DOUBLE_EQ(t.percent[i][j], 25.0);

  std::vector<EmotionLabels> ten(10);
  for (int i = 0; i < 3; ++i) ten[i] = {false, true, true};
  auto t10 = cross_tabulate(ten, LabelPair::AnxStr);
  EXPECT_EQ(t10.counts[1][1], 3);
  EXPECT_DOUBLE_EQ(t10.percent[1][1], 30.0);
  EXPECT_EQ(t10.counts[0][0], 7);
}

TEST(CrossTabulate, PairOrientation) {
  // depressed only: StrDep puts it at (stress=no, depression=yes).
  auto t = cross_tabulate({{true, false, false}}, LabelPair::StrDep);
  EXPECT_EQ(t.counts[0][1], 1);
  auto a = cross_tabulate({{true, false, false}}, LabelPair::AnxDep);
  EXPECT_EQ(a.counts[0][1], 1);
}

TEST(CrossTabulate, EmptyInput) {
  try {
    cross_tabulate({}, LabelPair::AnxDep);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyInput);
  }
}

TEST(CrossTabulate, CountsAndPercentagesSum) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<EmotionLabels> labels(1 + uniform_index(rng, 200));
    for (auto& l : labels) l = {uniform_index(rng, 2) == 1, uniform_index(rng, 2) == 1, uniform_index(rng, 2) == 1};
    for (LabelPair p : kAllPairs) {
      auto t = cross_tabulate(labels, p);
      EXPECT_EQ(t.total(), static_cast<long>(labels.size()));
      double sum = t.percent[0][0] + t.percent[0][1] + t.percent[1][0] + t.percent[1][1];
      EXPECT_NEAR(sum, 100.0, 0.01);
    }
  }
}

TEST(ChiSquare, Independence) {
  auto r = chi_square_2x2({{{25, 25}, {25, 25}}});
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(ChiSquare, ClosedFormAndQuadratureOracle) {
  auto r = chi_square_2x2({{{30, 10}, {10, 30}}});
  // 80 * (900 - 100)^2 / (40^4) = 20 exactly.
  EXPECT_EQ(r.statistic, 20.0);
  const double oracle = testkit::chi_square_1df_sf_quadrature(20.0);
  EXPECT_NEAR(r.p_value, 7.7e-6, 0.05e-6);
  EXPECT_LT(std::fabs(r.p_value - oracle) / oracle, 0.05);
  EXPECT_LT(std::fabs(r.p_value - oracle) / oracle, 1e-6);
}

TEST(ChiSquare, DegenerateMarginal) {
  try {
    chi_square_2x2({{{10, 0}, {10, 0}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateMarginal);
  }
  EXPECT_THROW(chi_square_2x2({{{0, 0}, {3, 4}}}), Error);
}

TEST(ChiSquare, SwapInvarianceAndBounds) {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    std::array<std::array<long, 2>, 2> t;
    for (auto& row : t)
      for (auto& c : row) c = 1 + static_cast<long>(uniform_index(rng, 60));
    const auto r = chi_square_2x2(t);
    const auto swapped = chi_square_2x2({{{t[1][1], t[1][0]}, {t[0][1], t[0][0]}}});
    EXPECT_NEAR(r.statistic, swapped.statistic, 1e-9 * (1 + r.statistic));
    EXPECT_GE(r.statistic, 0.0);
    EXPECT_GT(r.p_value, 0.0);
    EXPECT_LE(r.p_value, 1.0);
  }
}

TEST(ChiSquare, SurvivalFunctionMatchesQuadrature) {
  for (double x : {0.1, 1.0, 3.841458820694124, 6.634896601021214, 12.0}) {
    EXPECT_NEAR(chi_square_1df_sf(x), testkit::chi_square_1df_sf_quadrature(x), 1e-7);
  }
  // Textbook critical values: P(X > 3.8415) = 0.05, P(X > 6.6349) = 0.01.
  EXPECT_NEAR(chi_square_1df_sf(3.841458820694124), 0.05, 1e-9);
  EXPECT_NEAR(chi_square_1df_sf(6.634896601021214), 0.01, 1e-9);
}
