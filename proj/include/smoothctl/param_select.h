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

// Calibration of intensity descriptors. Each candidate parameter (a degree
// description for prompting, or an opaque strength label) has been used to
// answer a held-out query set; its responses were rated and judged for
// relevance. Selection picks the n candidates, in candidate-list order, whose
// use as control values 0..n-1 minimizes the overall smooth-control metric.

#ifndef SMOOTHCTL_PARAM_SELECT_H_
#define SMOOTHCTL_PARAM_SELECT_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "smoothctl/metrics.h"

namespace smoothctl {

struct CandidateParameter {
  std::string label;
  int index = 0;  // position in the nominal intensity order
  std::vector<Rating> per_query_ratings;
  std::vector<int> relevance_verdicts;  // aligned with per_query_ratings
};

struct CandidateStats {
  Rating mean = 0.0;
  double std = 0.0;
  double relevance = 0.0;
};

CandidateStats EvaluateCandidate(const CandidateParameter& candidate);

enum class SequenceOrder {
  // Strictly increasing candidate indices.
  kMonotone,
  // Any ordering of a chosen subset. Only feasible for small instances.
  kAnyOrder,
};

// Scores the candidates at positions `chosen` as control values 0..n-1.
// Throws unless chosen.size() == n and, for kMonotone, indices increase.
MetricsReport ScoreSequence(std::span<const CandidateStats> candidates,
                            std::span<const int> chosen, int n,
                            const AttributeRange& range,
                            double alpha = kDefaultAlpha,
                            SequenceOrder order = SequenceOrder::kMonotone);

struct SelectionOptions {
  int n = kDefaultControlLevels;
  double alpha = kDefaultAlpha;
  SequenceOrder order = SequenceOrder::kMonotone;
  // 0 picks std::thread::hardware_concurrency().
  int threads = 0;
};

struct ParameterSequence {
  std::vector<int> chosen;  // positions in index order
  std::vector<std::string> chosen_labels;
  double metric = 0.0;
  MetricsReport report;
  int64_t enumerated = 0;
};

// Exhaustive search. Ties go to the lexicographically smallest position
// sequence. Candidates are ordered by their `index` field first.
ParameterSequence SelectBestSequence(
    std::span<const CandidateParameter> candidates,
    const AttributeRange& range, const SelectionOptions& options = {});

// Binomial coefficient, exact for the sizes used here.
int64_t Choose(int n, int k);

// Fixed descriptor set for the universal-shifter baseline, weakest first.
inline constexpr std::array<std::string_view, 10> kUniversalShifters = {
    "extremely not", "very not", "moderately not", "somewhat not",
    "a little bit not", "a little bit", "somewhat", "moderately",
    "very", "extremely"};

// {"label": str, "index": int, "ratings": [..], "relevance": [0/1, ..]}
std::vector<CandidateParameter> ReadCandidates(
    const std::filesystem::path& path);
nlohmann::json CandidateToJson(const CandidateParameter& c);

}  // namespace smoothctl

#endif  // SMOOTHCTL_PARAM_SELECT_H_
