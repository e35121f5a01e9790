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
#include <set>

#include "gtest/gtest.h"
#include "smoothctl/sim.h"

namespace smoothctl {
namespace {

ConvergenceExperimentConfig Small() {
  ConvergenceExperimentConfig c;
  c.n_items = 120;
  c.library_size = 40;
  c.library_duels_per_member = 20;
  c.budgets = {5, 10, 20};
  c.replicates = 2;
  c.rng_seed = 3;
  c.threads = 2;
  return c;
}

ErrorKind ThrownKind(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::kIo;
}

TEST(ConvergenceConfigTest, Validation) {
  ConvergenceExperimentConfig c = Small();
  EXPECT_NO_THROW(c.Validate());
  c.budgets = {0, 5};
  EXPECT_EQ(ThrownKind([&] { c.Validate(); }), ErrorKind::kConfig);
  c = Small();
  c.budgets = {10, 5};
  EXPECT_EQ(ThrownKind([&] { c.Validate(); }), ErrorKind::kConfig);
  c = Small();
  c.library_size = 120;
  EXPECT_EQ(ThrownKind([&] { c.Validate(); }), ErrorKind::kConfig);
  // Without a library strategy the library size is irrelevant.
  c.strategies = {Strategy::kRandomNoLib};
  EXPECT_NO_THROW(c.Validate());
  c = Small();
  c.rating_hi = c.rating_lo;
  EXPECT_EQ(ThrownKind([&] { c.Validate(); }), ErrorKind::kConfig);
}

TEST(ConvergenceConfigTest, JsonRoundTrip) {
  ConvergenceExperimentConfig c = Small();
  c.oracle_mode = OracleMode::kNoisy;
  c.flip_prob = 0.2;
  c.strategies = {Strategy::kClosestLib, Strategy::kRandomNoLib};
  const ConvergenceExperimentConfig back =
      ConvergenceExperimentConfig::FromJson(c.ToJson());
  EXPECT_EQ(back.ToJson(), c.ToJson());
  EXPECT_EQ(back.budgets, c.budgets);
  EXPECT_EQ(back.strategies, c.strategies);
}

TEST(ErrorMeasuresTest, AlignedMaeIgnoresTranslation) {
  const std::vector<double> truth = {1000, 1200, 1800};
  const std::vector<double> shifted = {1300, 1500, 2100};
  EXPECT_NEAR(AlignedMae(shifted, truth), 0, 1e-9);
  const std::vector<double> est = {1010, 1190, 1800};
  // Mean offset 0: residuals 10, -10, 0.
  EXPECT_NEAR(AlignedMae(est, truth), 20.0 / 3, 1e-9);
}

TEST(ErrorMeasuresTest, InversionRate) {
  const std::vector<double> truth = {1, 2, 3, 4};
  EXPECT_EQ(InversionRate(std::vector<double>{10, 20, 30, 40}, truth), 0);
  EXPECT_EQ(InversionRate(std::vector<double>{40, 30, 20, 10}, truth), 1);
  EXPECT_NEAR(InversionRate(std::vector<double>{20, 10, 30, 40}, truth),
              1.0 / 6, 1e-12);
  EXPECT_NEAR(InversionRate(std::vector<double>{10, 10, 30, 40}, truth),
              0.5 / 6, 1e-12);
}

TEST(BudgetToReachTest, Interpolates) {
  ConvergenceCurve c{Strategy::kClosestLib,
                     {{3, 300, 0, 1}, {6, 200, 0, 1}, {9, 150, 0, 1}}};
  EXPECT_EQ(BudgetToReach(c, 400), 3);
  EXPECT_NEAR(BudgetToReach(c, 250), 4.5, 1e-12);
  EXPECT_EQ(BudgetToReach(c, 150), 9);
  EXPECT_LT(BudgetToReach(c, 100), 0);
}

TEST(ConvergenceTest, LibraryItemsNeverEnterTheError) {
  const ConvergenceExperimentConfig c = Small();
  for (Strategy s : kAllStrategies) {
    const ReplicateResult r = RunConvergenceReplicate(c, s, 5, 0);
    EXPECT_EQ(r.library_members.size(), 40u);
    EXPECT_EQ(r.evaluated.size(), 80u);
    const std::set<ItemId> lib(r.library_members.begin(),
                               r.library_members.end());
    for (const ItemId& id : r.evaluated) {
      EXPECT_FALSE(lib.count(id)) << id << " under " << StrategyName(s);
    }
  }
}

TEST(ConvergenceTest, DeterministicOracleInversionShrinks) {
  ConvergenceExperimentConfig c = Small();
  c.oracle_mode = OracleMode::kDeterministic;
  c.budgets = {5, 10, 20, 40, 60};
  const auto curves = RunConvergence(c);
  ASSERT_EQ(curves.size(), 4u);
  for (const ConvergenceCurve& curve : curves) {
    for (size_t i = 1; i < curve.points.size(); ++i) {
      EXPECT_LE(curve.points[i].inversion,
                curve.points[i - 1].inversion + 0.01)
          << StrategyName(curve.strategy) << " at "
          << curve.points[i].budget;
    }
    EXPECT_LT(curve.points.back().inversion, curve.points.front().inversion)
        << StrategyName(curve.strategy);
    EXPECT_LT(curve.points.back().inversion, 0.1)
        << StrategyName(curve.strategy);
  }
}

TEST(ConvergenceTest, CsvIsByteIdenticalAcrossThreadCounts) {
  ConvergenceExperimentConfig c = Small();
  c.threads = 1;
  const std::string serial = ConvergenceCsv(RunConvergence(c));
  c.threads = 4;
  const std::string parallel = ConvergenceCsv(RunConvergence(c));
  EXPECT_EQ(serial, parallel);
  EXPECT_EQ(serial.rfind("strategy,budget,mae,inversion,replicates\n", 0), 0u);
  c.rng_seed = 4;
  EXPECT_NE(ConvergenceCsv(RunConvergence(c)), serial);
}

TEST(ConvergenceTest, BundleCarriesConfig) {
  const ConvergenceExperimentConfig c = Small();
  const auto curves = RunConvergence(c);
  const nlohmann::json b = ConvergenceBundle(c, curves);
  EXPECT_EQ(b.at("config"), c.ToJson());
  EXPECT_EQ(b.at("curves").size(), 4u);
}

std::vector<RatedItem> Pool(int n, double lo, double hi) {
  std::vector<RatedItem> pool;
  for (int i = 0; i < n; ++i) {
    pool.push_back({"p" + std::to_string(i), lo + (hi - lo) * i / (n - 1)});
  }
  return pool;
}

SyntheticOracle PoolOracle(std::span<const RatedItem> pool, OracleMode mode,
                           double flip = 0) {
  std::unordered_map<ItemId, Rating> truth;
  for (const RatedItem& it : pool) truth[it.id] = it.rating;
  return SyntheticOracle({truth, mode, flip, 99});
}

TEST(CalibrationTest, ProbabilisticJudgeTracksTheoryWithinThreeSigma) {
  const auto pool = Pool(200, 800, 1600);
  auto judge = PoolOracle(pool, OracleMode::kProbabilistic);
  const auto points = RunCalibration(judge, pool, {100, 2000, 5});
  ASSERT_GE(points.size(), 7u);
  for (const CalibrationPoint& p : points) {
    if (p.sample_count == 0) continue;
    const double sigma = std::sqrt(p.theoretical * (1 - p.theoretical) /
                                   static_cast<double>(p.sample_count));
    // The midpoint stands in for the whole bucket, which adds a small bias.
    EXPECT_NEAR(p.empirical, p.theoretical, 3 * sigma + 0.005)
        << "bucket " << p.bucket;
    EXPECT_NEAR(p.theoretical, ExpectedScore(p.bucket + 50, 0), 1e-12);
  }
}

TEST(CalibrationTest, DeterministicJudgeIsAlwaysRight) {
  const auto pool = Pool(60, 1000, 1600);
  auto judge = PoolOracle(pool, OracleMode::kDeterministic);
  for (const CalibrationPoint& p : RunCalibration(judge, pool, {100, 300, 1})) {
    EXPECT_EQ(p.empirical, 1.0) << "bucket " << p.bucket;
  }
}

TEST(CalibrationTest, NoisyJudgeFallsBelowTheory) {
  const auto pool = Pool(200, 800, 1600);
  auto judge = PoolOracle(pool, OracleMode::kNoisy, 0.15);
  for (const CalibrationPoint& p : RunCalibration(judge, pool, {100, 3000, 2})) {
    if (p.theoretical > 0.55 && p.sample_count > 0) {
      EXPECT_LT(p.empirical, p.theoretical) << "bucket " << p.bucket;
    }
  }
}

TEST(CalibrationTest, SparseBucketsAndNarrowPools) {
  const auto narrow = Pool(10, 1500, 1600);
  auto judge = PoolOracle(narrow, OracleMode::kDeterministic);
  EXPECT_EQ(ThrownKind([&] { RunCalibration(judge, narrow, {100, 10, 0}); }),
            ErrorKind::kPrecondition);

  // Two clusters far apart leave the middle buckets empty.
  std::vector<RatedItem> gappy = {{"a", 1000}, {"b", 1010}, {"c", 1500},
                                  {"d", 1510}};
  auto g = PoolOracle(gappy, OracleMode::kDeterministic);
  const auto points = RunCalibration(g, gappy, {100, 50, 0});
  bool saw_empty = false;
  for (const CalibrationPoint& p : points) {
    EXPECT_TRUE(p.sparse) << p.bucket;
    if (p.sample_count == 0) {
      saw_empty = true;
      EXPECT_TRUE(std::isnan(p.empirical));
    }
  }
  EXPECT_TRUE(saw_empty);
  EXPECT_EQ(CalibrationCsv(points).rfind("bucket,empirical,theoretical,n\n", 0),
            0u);
}

TEST(CalibrationTest, SeedDeterminism) {
  const auto pool = Pool(80, 900, 1700);
  auto j1 = PoolOracle(pool, OracleMode::kProbabilistic);
  auto j2 = PoolOracle(pool, OracleMode::kProbabilistic);
  EXPECT_EQ(CalibrationCsv(RunCalibration(j1, pool, {100, 200, 8})),
            CalibrationCsv(RunCalibration(j2, pool, {100, 200, 8})));
}

}  // namespace
}  // namespace smoothctl
