// Copyright 2026 The Smoothctl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "smoothctl/metrics.h"

namespace smoothctl {
namespace {

const AttributeRange kRange{"Anger", 1000, 2000};

std::vector<ControlLevelStats> Levels(
    const std::vector<std::vector<Rating>>& per_level) {
  std::vector<ControlLevelStats> out;
  for (size_t c = 0; c < per_level.size(); ++c) {
    out.push_back(
        ControlLevelStats::FromRatings(static_cast<int>(c), per_level[c]));
  }
  return out;
}

TEST(TargetRatingTest, Endpoints) {
  EXPECT_EQ(TargetRating(0, 10, kRange), 1000);
  EXPECT_EQ(TargetRating(9, 10, kRange), 2000);
  EXPECT_NEAR(TargetRating(3, 10, kRange), 1000 + 1000.0 / 3, 1e-9);
}

TEST(TargetRatingTest, BadArguments) {
  EXPECT_THROW(TargetRating(0, 1, kRange), Error);
  EXPECT_THROW(TargetRating(10, 10, kRange), Error);
  EXPECT_THROW(TargetRating(-1, 10, kRange), Error);
  EXPECT_THROW(TargetRating(0, 10, AttributeRange{"x", 5, 5}), Error);
}

TEST(MeanMaeTest, HandExamples) {
  std::vector<std::vector<Rating>> on_line;
  for (int c = 0; c < 10; ++c) on_line.push_back({TargetRating(c, 10, kRange)});
  EXPECT_NEAR(MeanMae(Levels(on_line), kRange), 0, 1e-9);
  EXPECT_EQ(MeanMae(Levels({{1100}, {1900}}), kRange), 200);
  EXPECT_EQ(MeanMae(Levels({{1000}, {1500}, {2000}}), kRange), 0);
  EXPECT_EQ(MeanMaePerLevel(Levels({{1100}, {1900}}), kRange), 100);
}

TEST(MeanMaeTest, LevelsMustCoverEachValueOnce) {
  auto stats = Levels({{1000}, {1500}, {2000}});
  stats[2].control_value = 1;
  EXPECT_THROW(MeanMae(stats, kRange), Error);
  stats[2].control_value = 5;
  EXPECT_THROW(MeanMae(stats, kRange), Error);
  // Order does not matter.
  auto shuffled = Levels({{1000}, {1500}, {2000}});
  std::swap(shuffled[0], shuffled[2]);
  EXPECT_EQ(MeanMae(shuffled, kRange), 0);
}

TEST(MeanStdTest, HandExamples) {
  EXPECT_EQ(MeanStd(Levels({{1500, 1500}, {1700, 1700}})), 0);
  EXPECT_EQ(MeanStd(Levels({{1400, 1600}, {1500, 1500}})), 50);
  EXPECT_EQ(MeanStd(Levels({{1500}})), 0);
  EXPECT_THROW(ControlLevelStats::FromRatings(0, {}), Error);
}

TEST(RelevanceScoreTest, HandExamples) {
  EXPECT_EQ(RelevanceScore(std::vector<int>{1, 1, 1}), 1.0);
  EXPECT_EQ(RelevanceScore(std::vector<int>{1, 0, 1, 0}), 0.5);
  EXPECT_EQ(RelevanceScore(std::vector<int>{1, 1, 0, 1}), 0.75);
  EXPECT_THROW(RelevanceScore(std::vector<int>{}), Error);
  EXPECT_THROW(RelevanceScore(std::vector<int>{2}), Error);
  std::vector<RelevanceVerdict> v(4);
  v[0].score = 1;
  EXPECT_EQ(RelevanceScore(v), 0.25);
}

TEST(OverallMetricTest, HandExamples) {
  EXPECT_NEAR(ComputeOverallMetric(50, 30, kRange, 0.8).value, 0.1, 1e-12);
  EXPECT_EQ(ComputeOverallMetric(0, 0, kRange, 1).value, 0);
  const double full = ComputeOverallMetric(120, 40, kRange, 1).value;
  EXPECT_NEAR(ComputeOverallMetric(120, 40, kRange, 0.5).value, 2 * full,
              1e-12);
}

TEST(OverallMetricTest, AlphaHalfIsPlainSum) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> err(0, 500), rel(0.01, 1);
  for (int i = 0; i < 1000; ++i) {
    const double m = err(rng), s = err(rng), r = rel(rng);
    EXPECT_NEAR(ComputeOverallMetric(m, s, kRange, r, 0.5).value,
                (m + s) / (kRange.width() * r), 1e-12);
  }
}

TEST(OverallMetricTest, AlphaWeighting) {
  EXPECT_NEAR(ComputeOverallMetric(100, 300, kRange, 1, 1.0).value, 0.2,
              1e-12);
  EXPECT_NEAR(ComputeOverallMetric(100, 300, kRange, 1, 0.0).value, 0.6,
              1e-12);
  EXPECT_THROW(ComputeOverallMetric(1, 1, kRange, 1, 1.5), Error);
}

TEST(OverallMetricTest, ZeroRelevanceIsFlaggedSentinel) {
  const OverallMetric m = ComputeOverallMetric(10, 10, kRange, 0);
  EXPECT_TRUE(m.relevance_zero);
  EXPECT_EQ(m.value, kRelevanceZeroSentinel);
  EXPECT_THROW(ComputeOverallMetric(10, 10, kRange, -0.1), Error);
  EXPECT_THROW(ComputeOverallMetric(10, 10, kRange, 1.1), Error);
}

TEST(OverallMetricTest, MonotonePenalty) {
  const double base = ComputeOverallMetric(100, 50, kRange, 0.6).value;
  EXPECT_LT(ComputeOverallMetric(100, 50, kRange, 0.7).value, base);
  EXPECT_GT(ComputeOverallMetric(101, 50, kRange, 0.6).value, base);
  EXPECT_GT(ComputeOverallMetric(100, 51, kRange, 0.6).value, base);
}

TEST(MetricsReportTest, BuildAndJson) {
  const auto stats = Levels({{1100, 1100}, {1800, 2000}});
  const MetricsReport r = BuildMetricsReport(stats, kRange, 0.8);
  // Level errors 100 and 100; stds 0 and 100.
  EXPECT_EQ(r.mean_mae, 200);
  EXPECT_EQ(r.mean_std, 50);
  EXPECT_NEAR(r.overall, 250 / 800.0, 1e-12);
  const nlohmann::json j = r.ToJson();
  for (const char* key : {"mean_mae", "mean_std", "relevance", "overall",
                          "alpha", "relevance_zero"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(MetricsReport::FromJson(j), r);
}

// Shift everything by t, or scale by s: absolute errors follow the ratings
// while the normalized metric does not move.
TEST(MetricsPropertyTest, TranslationAndScaleInvariance) {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(u(rng) * 9);
    const double lo = 500 + 1000 * u(rng);
    const AttributeRange range{"x", lo, lo + 200 + 1500 * u(rng)};
    std::vector<std::vector<Rating>> levels(n);
    for (auto& l : levels) {
      const int k = 1 + static_cast<int>(u(rng) * 5);
      for (int i = 0; i < k; ++i) l.push_back(400 + 2000 * u(rng));
    }
    const double rel = 0.05 + 0.95 * u(rng);
    const MetricsReport base = BuildMetricsReport(Levels(levels), range, rel);

    const double t = -1000 + 2000 * u(rng);
    auto shifted = levels;
    for (auto& l : shifted) for (Rating& r : l) r += t;
    const MetricsReport ts = BuildMetricsReport(
        Levels(shifted), AttributeRange{"x", range.r_min + t, range.r_max + t},
        rel);
    EXPECT_NEAR(ts.mean_mae, base.mean_mae, 1e-6);
    EXPECT_NEAR(ts.mean_std, base.mean_std, 1e-6);
    EXPECT_NEAR(ts.overall, base.overall, 1e-9);

    const double s = 0.1 + 5 * u(rng);
    auto scaled = levels;
    for (auto& l : scaled) for (Rating& r : l) r *= s;
    const MetricsReport sc = BuildMetricsReport(
        Levels(scaled), AttributeRange{"x", range.r_min * s, range.r_max * s},
        rel);
    EXPECT_NEAR(sc.mean_mae, s * base.mean_mae, 1e-6 * s);
    EXPECT_NEAR(sc.mean_std, s * base.mean_std, 1e-6 * s);
    EXPECT_NEAR(sc.overall, base.overall, 1e-9);
  }
}

}  // namespace
}  // namespace smoothctl
