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

// Smooth-control metrics.
//
// For n control values c = 0..n-1 the ideal mean rating is the linear
// interpolation
//
//   target_c = R_min + c / (n - 1) * (R_max - R_min).
//
//   Mean-MAE  = sum_c |mean_c - target_c|
//   Mean-STD  = (1 / n) sum_c std_c          (population std per level)
//   Relevance = fraction of responses judged relevant
//   Overall   = 2 (a Mean-MAE + (1 - a) Mean-STD) / ((R_max - R_min) Relevance)
//
// At a = 0.5 the overall metric is (Mean-MAE + Mean-STD) / (width * Rel).
// Lower is better.

#ifndef SMOOTHCTL_METRICS_H_
#define SMOOTHCTL_METRICS_H_

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "smoothctl/judge.h"
#include "smoothctl/rating.h"

namespace smoothctl {

inline constexpr int kDefaultControlLevels = 10;
inline constexpr double kDefaultAlpha = 0.5;

// Reported for the overall metric when relevance is zero.
inline constexpr double kRelevanceZeroSentinel =
    std::numeric_limits<double>::max();

struct AttributeRange {
  std::string attribute;
  Rating r_min = 0.0;
  Rating r_max = 0.0;

  // Throws unless r_max > r_min and both are finite.
  void Validate() const;
  double width() const { return r_max - r_min; }
};

struct ControlLevelStats {
  int control_value = 0;
  std::vector<Rating> ratings;
  Rating mean = 0.0;
  double std = 0.0;

  // Computes mean and population std. Throws on an empty rating list.
  static ControlLevelStats FromRatings(int control_value,
                                       std::vector<Rating> ratings);
};

struct MetricsReport {
  double mean_mae = 0.0;
  double mean_std = 0.0;
  double relevance = 0.0;
  double overall = 0.0;
  double alpha = kDefaultAlpha;
  bool relevance_zero = false;

  nlohmann::json ToJson() const;
  static MetricsReport FromJson(const nlohmann::json& j);
  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

Rating TargetRating(int control_value, int levels, const AttributeRange& range);

// Sum over levels of |mean - target|. `stats` must cover 0..n-1 exactly once
// (in any order); n is stats.size().
double MeanMae(std::span<const ControlLevelStats> stats,
               const AttributeRange& range);

// MeanMae divided by the number of levels. Exposed for analysis only.
double MeanMaePerLevel(std::span<const ControlLevelStats> stats,
                       const AttributeRange& range);

double MeanStd(std::span<const ControlLevelStats> stats);

double RelevanceScore(std::span<const RelevanceVerdict> verdicts);
double RelevanceScore(std::span<const int> scores);

struct OverallMetric {
  double value = 0.0;
  bool relevance_zero = false;
};

// relevance == 0 yields {kRelevanceZeroSentinel, true}.
OverallMetric ComputeOverallMetric(double mean_mae, double mean_std,
                                   const AttributeRange& range,
                                   double relevance,
                                   double alpha = kDefaultAlpha);

MetricsReport BuildMetricsReport(std::span<const ControlLevelStats> stats,
                                 const AttributeRange& range,
                                 double relevance,
                                 double alpha = kDefaultAlpha);

}  // namespace smoothctl

#endif  // SMOOTHCTL_METRICS_H_
