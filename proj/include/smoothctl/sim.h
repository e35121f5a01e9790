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

// Synthetic experiments driven by Elo oracles:
//
//  * convergence: draw true ratings, re-estimate them under each scheduling
//    strategy and comparison budget, and report the estimation error;
//  * calibration: bucket item pairs by true rating difference and compare
//    a judge's win fraction for the higher-rated side with the Elo curve.

#ifndef SMOOTHCTL_SIM_H_
#define SMOOTHCTL_SIM_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "smoothctl/judge.h"
#include "smoothctl/scheduler.h"

namespace smoothctl {

struct ConvergenceExperimentConfig {
  int n_items = 1000;
  Rating rating_lo = 800.0;
  Rating rating_hi = 2200.0;
  size_t library_size = kDefaultLibrarySize;
  // Library build budget: duels initiated per library member.
  int library_duels_per_member = 50;
  std::vector<int> budgets = {3, 6, 9, 12, 15, 18, 21, 24, 27, 30};
  std::vector<Strategy> strategies = {std::begin(kAllStrategies),
                                      std::end(kAllStrategies)};
  int replicates = 10;
  uint64_t rng_seed = 1;
  OracleMode oracle_mode = OracleMode::kProbabilistic;
  double flip_prob = 0.0;
  KSchedule k_schedule = KSchedule::Default();
  Rating anchor_mean = kDefaultAnchorMean;
  // 0 picks std::thread::hardware_concurrency().
  int threads = 0;

  // Throws a config error on an invalid combination.
  void Validate() const;

  nlohmann::json ToJson() const;
  static ConvergenceExperimentConfig FromJson(const nlohmann::json& j);
};

struct CurvePoint {
  int budget = 0;
  // Mean |estimate - truth| after removing the common translation between
  // estimates and truth (the Elo scale has no absolute origin).
  double mae = 0.0;
  // Fraction of evaluated item pairs ordered differently from the truth.
  double inversion = 0.0;
  int replicates = 0;
};

struct ConvergenceCurve {
  Strategy strategy = Strategy::kClosestLib;
  std::vector<CurvePoint> points;
};

// Library members never contribute to either error, for any strategy.
std::vector<ConvergenceCurve> RunConvergence(
    const ConvergenceExperimentConfig& config);

// One replicate of one strategy at one budget; exposed for tests.
struct ReplicateResult {
  double mae = 0.0;
  double inversion = 0.0;
  std::vector<ItemId> evaluated;
  std::vector<ItemId> library_members;
};
ReplicateResult RunConvergenceReplicate(
    const ConvergenceExperimentConfig& config, Strategy strategy, int budget,
    int replicate);

// strategy,budget,mae,inversion,replicates
std::string ConvergenceCsv(std::span<const ConvergenceCurve> curves);
nlohmann::json ConvergenceBundle(const ConvergenceExperimentConfig& config,
                                 std::span<const ConvergenceCurve> curves);

// Smallest budget at which `curve` reaches `target_mae`, interpolating
// linearly between grid points. Returns a negative value if never reached.
double BudgetToReach(const ConvergenceCurve& curve, double target_mae);

// MAE after translation alignment, and pairwise inversion rate.
double AlignedMae(std::span<const double> estimates,
                  std::span<const double> truth);
double InversionRate(std::span<const double> estimates,
                     std::span<const double> truth);

struct CalibrationOptions {
  double granularity = 100.0;
  int pairs_per_bucket = 1000;
  uint64_t rng_seed = 0;
};

struct CalibrationPoint {
  int bucket = 0;  // lower edge of the rating-difference bucket, in points
  double empirical = 0.0;  // win fraction of the higher-rated side
  double theoretical = 0.0;  // ExpectedScore at the bucket midpoint
  int64_t sample_count = 0;
  // Fewer distinct eligible pairs than requested samples.
  bool sparse = false;
};

// Samples pairs uniformly among those whose rating difference falls into
// each bucket [k g, (k+1) g) and asks `judge` which side is more intense.
// Ties count half. The pool must span at least 3 buckets.
std::vector<CalibrationPoint> RunCalibration(
    PairwiseJudge& judge, std::span<const RatedItem> pool,
    const CalibrationOptions& options);

// bucket,empirical,theoretical,n
std::string CalibrationCsv(std::span<const CalibrationPoint> points);

}  // namespace smoothctl

#endif  // SMOOTHCTL_SIM_H_
