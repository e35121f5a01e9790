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

#include "smoothctl/metrics.h"

#include <cmath>
#include <numeric>
#include <string>

namespace smoothctl {

void AttributeRange::Validate() const {
  if (!std::isfinite(r_min) || !std::isfinite(r_max) || !(r_max > r_min)) {
    throw InvalidArgument("attribute range for '" + attribute +
                          "' needs finite r_max > r_min");
  }
}

ControlLevelStats ControlLevelStats::FromRatings(int control_value,
                                                 std::vector<Rating> ratings) {
  if (ratings.empty()) {
    throw InvalidArgument("control value " + std::to_string(control_value) +
                          " has no ratings");
  }
  ControlLevelStats s;
  s.control_value = control_value;
  const double n = static_cast<double>(ratings.size());
  s.mean = std::accumulate(ratings.begin(), ratings.end(), 0.0) / n;
  double ss = 0.0;
  for (Rating r : ratings) ss += (r - s.mean) * (r - s.mean);
  s.std = std::sqrt(ss / n);
  s.ratings = std::move(ratings);
  return s;
}

nlohmann::json MetricsReport::ToJson() const {
  return nlohmann::json{{"mean_mae", mean_mae},   {"mean_std", mean_std},
                        {"relevance", relevance}, {"overall", overall},
                        {"alpha", alpha},         {"relevance_zero", relevance_zero}};
}

MetricsReport MetricsReport::FromJson(const nlohmann::json& j) {
  MetricsReport r;
  r.mean_mae = j.at("mean_mae").get<double>();
  r.mean_std = j.at("mean_std").get<double>();
  r.relevance = j.at("relevance").get<double>();
  r.overall = j.at("overall").get<double>();
  r.alpha = j.at("alpha").get<double>();
  r.relevance_zero = j.at("relevance_zero").get<bool>();
  return r;
}

Rating TargetRating(int control_value, int levels,
                    const AttributeRange& range) {
  if (levels < 2) throw InvalidArgument("need at least 2 control levels");
  if (control_value < 0 || control_value >= levels) {
    throw InvalidArgument("control value " + std::to_string(control_value) +
                          " outside 0.." + std::to_string(levels - 1));
  }
  range.Validate();
  return range.r_min + static_cast<double>(control_value) /
                           static_cast<double>(levels - 1) * range.width();
}

double MeanMae(std::span<const ControlLevelStats> stats,
               const AttributeRange& range) {
  const int n = static_cast<int>(stats.size());
  std::vector<bool> seen(n, false);
  double total = 0.0;
  for (const ControlLevelStats& s : stats) {
    if (s.control_value < 0 || s.control_value >= n) {
      throw InvalidArgument("control value " +
                            std::to_string(s.control_value) +
                            " outside 0.." + std::to_string(n - 1));
    }
    if (seen[s.control_value]) {
      throw InvalidArgument("duplicate control value " +
                            std::to_string(s.control_value));
    }
    seen[s.control_value] = true;
    total += std::abs(s.mean - TargetRating(s.control_value, n, range));
  }
  return total;
}

double MeanMaePerLevel(std::span<const ControlLevelStats> stats,
                       const AttributeRange& range) {
  return MeanMae(stats, range) / static_cast<double>(stats.size());
}

double MeanStd(std::span<const ControlLevelStats> stats) {
  if (stats.empty()) throw InvalidArgument("no control levels");
  double total = 0.0;
  for (const ControlLevelStats& s : stats) {
    if (s.ratings.empty()) {
      throw InvalidArgument("control value " +
                            std::to_string(s.control_value) +
                            " has no ratings");
    }
    total += s.std;
  }
  return total / static_cast<double>(stats.size());
}

double RelevanceScore(std::span<const int> scores) {
  if (scores.empty()) throw InvalidArgument("no relevance verdicts");
  double sum = 0.0;
  for (int s : scores) {
    if (s != 0 && s != 1) throw InvalidArgument("relevance must be 0 or 1");
    sum += s;
  }
  return sum / static_cast<double>(scores.size());
}

double RelevanceScore(std::span<const RelevanceVerdict> verdicts) {
  std::vector<int> scores;
  scores.reserve(verdicts.size());
  for (const RelevanceVerdict& v : verdicts) scores.push_back(v.score);
  return RelevanceScore(scores);
}

OverallMetric ComputeOverallMetric(double mean_mae, double mean_std,
                                   const AttributeRange& range,
                                   double relevance, double alpha) {
  range.Validate();
  if (!(relevance >= 0.0 && relevance <= 1.0)) {
    throw InvalidArgument("relevance must lie in [0, 1]");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw InvalidArgument("alpha must lie in [0, 1]");
  }
  if (relevance == 0.0) return {kRelevanceZeroSentinel, true};
  const double numerator = 2.0 * (alpha * mean_mae + (1.0 - alpha) * mean_std);
  return {numerator / (range.width() * relevance), false};
}

MetricsReport BuildMetricsReport(std::span<const ControlLevelStats> stats,
                                 const AttributeRange& range,
                                 double relevance, double alpha) {
  MetricsReport report;
  report.mean_mae = MeanMae(stats, range);
  report.mean_std = MeanStd(stats);
  report.relevance = relevance;
  report.alpha = alpha;
  const OverallMetric overall = ComputeOverallMetric(
      report.mean_mae, report.mean_std, range, relevance, alpha);
  report.overall = overall.value;
  report.relevance_zero = overall.relevance_zero;
  return report;
}

}  // namespace smoothctl
