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

// Judge and generator interfaces plus the offline implementations:
// synthetic Elo oracles, replay judges and a scripted generator. The
// HTTP-backed implementations live in remote_judge.h.

#ifndef SMOOTHCTL_JUDGE_H_
#define SMOOTHCTL_JUDGE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "smoothctl/error.h"
#include "smoothctl/rating.h"

namespace smoothctl {

struct JudgeVerdict {
  Outcome outcome = Outcome::kTie;
  std::string raw_reply;  // empty for synthetic judges
  bool cached = false;
};

struct RelevanceVerdict {
  int score = 0;  // 0 or 1
  std::string raw_reply;
  bool cached = false;
};

// kJudgeProtocol for unparseable or missing verdicts, kTransport for
// network failures that survived the retry budget.
class JudgeError : public Error {
 public:
  using Error::Error;
};

class PairwiseJudge {
 public:
  virtual ~PairwiseJudge() = default;

  // Which of the two items shows the attribute more intensely.
  virtual JudgeVerdict Compare(const ItemId& a, const ItemId& b) = 0;

  // Recorded as judge_id in comparison logs.
  virtual std::string Name() const = 0;
};

// Checks a != b before delegating to the judge.
JudgeVerdict JudgePair(PairwiseJudge& judge, const ItemId& a,
                       const ItemId& b);

enum class OracleMode { kProbabilistic, kDeterministic, kNoisy };

std::string_view OracleModeName(OracleMode mode);
OracleMode ParseOracleMode(std::string_view name);

struct SyntheticOracleConfig {
  std::unordered_map<ItemId, Rating> true_ratings;
  OracleMode mode = OracleMode::kProbabilistic;
  // Only used by kNoisy; must lie in [0, 0.5).
  double flip_prob = 0.0;
  uint64_t rng_seed = 0;
};

// Realizes duels consistent with known true ratings.
//   kProbabilistic: A wins with probability ExpectedScore(true_a, true_b).
//   kDeterministic: the higher true rating wins; equal ratings tie.
//   kNoisy:         a probabilistic draw, flipped with probability flip_prob.
// Not thread-safe; one instance per random stream.
class SyntheticOracle : public PairwiseJudge {
 public:
  explicit SyntheticOracle(SyntheticOracleConfig config);

  JudgeVerdict Compare(const ItemId& a, const ItemId& b) override;
  std::string Name() const override;

  Rating TrueRating(const ItemId& id) const;
  const SyntheticOracleConfig& config() const { return config_; }

 private:
  SyntheticOracleConfig config_;
  std::mt19937_64 rng_;
};

// Replays verdicts from a comparison log. Repeated duels of the same pair
// are served in log order; a request for (b, a) is answered from (a, b)
// records with the outcome mirrored.
class ReplayJudge : public PairwiseJudge {
 public:
  explicit ReplayJudge(std::span<const ComparisonRecord> log);

  JudgeVerdict Compare(const ItemId& a, const ItemId& b) override;
  std::string Name() const override { return "replay"; }

 private:
  std::map<std::pair<ItemId, ItemId>, std::vector<Outcome>> verdicts_;
  std::map<std::pair<ItemId, ItemId>, size_t> cursor_;
};

// Wraps another judge and counts how often it is consulted.
class CountingJudge : public PairwiseJudge {
 public:
  explicit CountingJudge(PairwiseJudge& inner) : inner_(inner) {}

  JudgeVerdict Compare(const ItemId& a, const ItemId& b) override {
    ++calls_;
    return inner_.Compare(a, b);
  }
  std::string Name() const override { return inner_.Name(); }
  int64_t calls() const { return calls_; }

 private:
  PairwiseJudge& inner_;
  int64_t calls_ = 0;
};

class RelevanceJudge {
 public:
  virtual ~RelevanceJudge() = default;
  virtual RelevanceVerdict Judge(std::string_view query,
                                 std::string_view response) = 0;
};

// Checks that query and response are non-empty before delegating.
RelevanceVerdict JudgeRelevance(RelevanceJudge& judge, std::string_view query,
                                std::string_view response);

// Answers the same score for every pair.
class ConstantRelevanceJudge : public RelevanceJudge {
 public:
  explicit ConstantRelevanceJudge(int score);
  RelevanceVerdict Judge(std::string_view query,
                         std::string_view response) override;

 private:
  int score_;
};

// Content key used by relevance replay tables.
std::string RelevanceKey(std::string_view query, std::string_view response);

// Serves scores from a table keyed by RelevanceKey().
class ReplayRelevanceJudge : public RelevanceJudge {
 public:
  explicit ReplayRelevanceJudge(std::map<std::string, int> scores);
  RelevanceVerdict Judge(std::string_view query,
                         std::string_view response) override;

 private:
  std::map<std::string, int> scores_;
};

// A controlled-generation client: produces a response to `query` using one
// of a fixed list of degree descriptions.
class Generator {
 public:
  explicit Generator(std::vector<std::string> candidates)
      : candidates_(std::move(candidates)) {}
  virtual ~Generator() = default;

  // Throws a precondition error for an empty query or a description outside
  // the candidate list, and a generation error for an empty result.
  std::string Generate(std::string_view query,
                       std::string_view degree_description);

  const std::vector<std::string>& candidates() const { return candidates_; }

 protected:
  virtual std::string DoGenerate(std::string_view query,
                                 std::string_view degree_description) = 0;

 private:
  std::vector<std::string> candidates_;
};

// Offline generator whose output is a pure function of (query, description).
class ScriptedGenerator : public Generator {
 public:
  using Script =
      std::function<std::string(std::string_view, std::string_view)>;

  // Table lookup; the candidate list is the set of descriptions in the table.
  explicit ScriptedGenerator(
      std::map<std::pair<std::string, std::string>, std::string> table);
  ScriptedGenerator(std::vector<std::string> candidates, Script script);

 protected:
  std::string DoGenerate(std::string_view query,
                         std::string_view degree_description) override;

 private:
  Script script_;
};

}  // namespace smoothctl

#endif  // SMOOTHCTL_JUDGE_H_
