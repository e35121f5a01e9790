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

// Benchmark records, ingestion and the evaluation pipeline:
//   responses (read or generated) -> library -> ratings -> relevance ->
//   metrics, with every artifact written to the run's output directory.

#ifndef SMOOTHCTL_BENCH_H_
#define SMOOTHCTL_BENCH_H_

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "smoothctl/judge.h"
#include "smoothctl/metrics.h"
#include "smoothctl/scheduler.h"

namespace smoothctl {

enum class Attribute {
  kAnger,
  kHappiness,
  kFormality,
  kUnderstandability,
  kConciseness,
};

std::string_view AttributeName(Attribute a);
// Case-insensitive. Unknown names raise a schema error.
Attribute ParseAttribute(std::string_view name);

enum class Method { kPrompting, kExternal };

std::string_view MethodName(Method m);
Method ParseMethod(std::string_view name);

struct QueryRecord {
  std::string id;
  Attribute attribute = Attribute::kAnger;
  std::string text;

  nlohmann::json ToJson() const;
  static QueryRecord FromJson(const nlohmann::json& j);
  friend bool operator==(const QueryRecord&, const QueryRecord&) = default;
};

struct ResponseRecord {
  std::string id;
  std::string query_id;
  Attribute attribute = Attribute::kAnger;
  int control_value = 0;  // 0..9
  Method method = Method::kPrompting;
  // Degree description, or an opaque label for externally steered output.
  std::string parameter_label;
  std::string text;
  std::string model;

  nlohmann::json ToJson() const;
  static ResponseRecord FromJson(const nlohmann::json& j);
  friend bool operator==(const ResponseRecord&, const ResponseRecord&) = default;
};

inline constexpr int kMaxControlValue = 9;

struct QueryIngest {
  std::vector<QueryRecord> records;
  std::map<Attribute, int> counts;
  std::vector<std::string> warnings;
};

// Reads one JSONL file. Duplicate ids and empty texts raise schema errors
// naming the line; an empty file yields no records and a warning.
QueryIngest IngestQueries(const std::filesystem::path& path);

// Same checks for responses; when `queries` is given every query_id must
// resolve against it.
std::vector<ResponseRecord> IngestResponses(
    const std::filesystem::path& path,
    const std::vector<QueryRecord>* queries = nullptr);

void WriteQueries(const std::filesystem::path& path,
                  std::span<const QueryRecord> records);
void WriteResponses(const std::filesystem::path& path,
                    std::span<const ResponseRecord> records);

// Number of maximal runs of non-whitespace characters.
int ConcisenessIntensity(std::string_view text);

// Places a word count on the rating axis. Inverted (the default) reflects
// counts through the range so that fewer words score higher.
Rating ConcisenessRating(int word_count, const AttributeRange& range,
                         bool inverted = true);

// {"Anger": {"r_min": .., "r_max": ..}, ...}
AttributeRange ReadRangeConfig(const std::filesystem::path& path,
                               std::string_view attribute);

// Linear-interpolated percentile (0..100) of `values`.
double Percentile(std::vector<double> values, double pct);

// Where the pairwise verdicts come from.
struct JudgeSpec {
  enum class Kind { kRemote, kOracle };
  Kind kind = Kind::kOracle;
  OracleMode oracle_mode = OracleMode::kProbabilistic;
  double flip_prob = 0.0;
  std::filesystem::path true_ratings;  // kOracle: JSONL {id, rating}
};

struct RelevanceSpec {
  enum class Kind { kRemote, kConstant };
  Kind kind = Kind::kConstant;
  int constant_score = 1;
};

struct LibrarySpec {
  // Load a frozen library instead of building one.
  std::filesystem::path load;
  // Build from these items (JSONL {id, text}); empty means sample the
  // responses themselves.
  std::filesystem::path texts;
  size_t size = kDefaultLibrarySize;
  int64_t duels = 0;  // 0 means 50 per member
};

struct RunManifest {
  Attribute attribute = Attribute::kAnger;
  std::string model;
  Method method = Method::kPrompting;
  // Either fixed bounds or percentiles of the library ratings.
  std::optional<AttributeRange> range;
  std::optional<std::pair<double, double>> range_percentiles;
  int levels = kDefaultControlLevels;
  double alpha = kDefaultAlpha;
  bool conciseness_inverted = true;

  std::filesystem::path queries;
  std::filesystem::path responses;  // empty means generate
  std::vector<std::string> degree_descriptions;  // one per control value

  LibrarySpec library;
  JudgeSpec judge;
  RelevanceSpec relevance;
  // Judge config file shared by every remote component.
  std::filesystem::path remote_config;
  ScheduleConfig schedule;
  Rating anchor_mean = kDefaultAnchorMean;
  int parallelism = 8;
  uint64_t seed = 0;
  std::filesystem::path output_dir;

  // Checks values and that every referenced input exists.
  void Validate() const;
  // Relative paths resolve against `base_dir`.
  static RunManifest FromJson(const nlohmann::json& j,
                              const std::filesystem::path& base_dir = {});
  static RunManifest Load(const std::filesystem::path& path);
};

struct ResponseRating {
  std::string id;
  std::string query_id;
  int control_value = 0;
  Rating rating = 0.0;
  int duels = 0;
  int relevance = 0;

  nlohmann::json ToJson() const;
  static ResponseRating FromJson(const nlohmann::json& j);
};

// Judges and generator supplied by the caller. make_judge receives the text
// of every item that may be compared.
struct EvaluationComponents {
  std::function<std::unique_ptr<PairwiseJudge>(
      const std::unordered_map<ItemId, std::string>& texts)>
      make_judge;
  RelevanceJudge* relevance = nullptr;
  Generator* generator = nullptr;
};

struct EvaluationResult {
  MetricsReport report;
  AttributeRange range;
  std::vector<ResponseRating> ratings;
  std::vector<ControlLevelStats> levels;
  std::vector<ComparisonRecord> comparisons;
  std::optional<Library> library;
  // Pairwise verdicts requested, cached or not.
  int64_t comparisons_requested = 0;
};

// Runs the pipeline and writes responses.jsonl (when generated),
// library.json, comparisons.jsonl, ratings.jsonl and metrics.json into the
// manifest's output directory. Stage failures propagate; verdicts already
// cached by remote components survive for the next attempt.
EvaluationResult RunEvaluation(const RunManifest& manifest,
                               EvaluationComponents& components);

// Builds the components described by the manifest itself.
EvaluationResult RunEvaluation(const RunManifest& manifest);

}  // namespace smoothctl

#endif  // SMOOTHCTL_BENCH_H_
