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

#include "smoothctl/judge.h"

#include <algorithm>
#include <set>

#include "smoothctl/hashing.h"
#include "smoothctl/random.h"

namespace smoothctl {

JudgeVerdict JudgePair(PairwiseJudge& judge, const ItemId& a,
                       const ItemId& b) {
  if (a == b) {
    throw PreconditionError("cannot judge item '" + a + "' against itself");
  }
  return judge.Compare(a, b);
}

std::string_view OracleModeName(OracleMode mode) {
  switch (mode) {
    case OracleMode::kProbabilistic:
      return "PROBABILISTIC";
    case OracleMode::kDeterministic:
      return "DETERMINISTIC";
    case OracleMode::kNoisy:
      return "NOISY";
  }
  return "?";
}

OracleMode ParseOracleMode(std::string_view name) {
  if (name == "PROBABILISTIC") return OracleMode::kProbabilistic;
  if (name == "DETERMINISTIC") return OracleMode::kDeterministic;
  if (name == "NOISY") return OracleMode::kNoisy;
  throw Error(ErrorKind::kConfig,
              "unknown oracle mode '" + std::string(name) + "'");
}

SyntheticOracle::SyntheticOracle(SyntheticOracleConfig config)
    : config_(std::move(config)), rng_(config_.rng_seed) {
  if (config_.mode == OracleMode::kNoisy &&
      !(config_.flip_prob >= 0.0 && config_.flip_prob < 0.5)) {
    throw InvalidArgument("flip probability must lie in [0, 0.5)");
  }
}

Rating SyntheticOracle::TrueRating(const ItemId& id) const {
  auto it = config_.true_ratings.find(id);
  if (it == config_.true_ratings.end()) {
    throw JudgeError(ErrorKind::kJudgeProtocol,
                     "oracle has no true rating for '" + id + "'");
  }
  return it->second;
}

JudgeVerdict SyntheticOracle::Compare(const ItemId& a, const ItemId& b) {
  const Rating ra = TrueRating(a);
  const Rating rb = TrueRating(b);
  JudgeVerdict v;
  if (config_.mode == OracleMode::kDeterministic) {
    v.outcome = ra > rb   ? Outcome::kAWins
                : ra < rb ? Outcome::kBWins
                          : Outcome::kTie;
    return v;
  }
  const bool a_wins = UnitInterval(rng_) < ExpectedScore(ra, rb);
  v.outcome = a_wins ? Outcome::kAWins : Outcome::kBWins;
  if (config_.mode == OracleMode::kNoisy &&
      UnitInterval(rng_) < config_.flip_prob) {
    v.outcome = Mirror(v.outcome);
  }
  return v;
}

std::string SyntheticOracle::Name() const {
  return "oracle:" + std::string(OracleModeName(config_.mode));
}

ReplayJudge::ReplayJudge(std::span<const ComparisonRecord> log) {
  for (const ComparisonRecord& r : log) {
    verdicts_[{r.item_a, r.item_b}].push_back(r.outcome);
  }
}

JudgeVerdict ReplayJudge::Compare(const ItemId& a, const ItemId& b) {
  auto serve = [&](const ItemId& x, const ItemId& y,
                   Outcome* out) -> bool {
    auto it = verdicts_.find({x, y});
    if (it == verdicts_.end()) return false;
    size_t& pos = cursor_[{x, y}];
    if (pos >= it->second.size()) return false;
    *out = it->second[pos++];
    return true;
  };
  JudgeVerdict v;
  v.cached = true;
  Outcome o;
  if (serve(a, b, &o)) {
    v.outcome = o;
    return v;
  }
  if (serve(b, a, &o)) {
    v.outcome = Mirror(o);
    return v;
  }
  throw JudgeError(ErrorKind::kJudgeProtocol,
                   "no recorded verdict for ('" + a + "', '" + b + "')");
}

RelevanceVerdict JudgeRelevance(RelevanceJudge& judge, std::string_view query,
                                std::string_view response) {
  if (query.empty() || response.empty()) {
    throw PreconditionError("relevance judging needs a query and a response");
  }
  return judge.Judge(query, response);
}

ConstantRelevanceJudge::ConstantRelevanceJudge(int score) : score_(score) {
  if (score != 0 && score != 1) {
    throw InvalidArgument("relevance score must be 0 or 1");
  }
}

RelevanceVerdict ConstantRelevanceJudge::Judge(std::string_view,
                                               std::string_view) {
  return RelevanceVerdict{score_, "", false};
}

std::string RelevanceKey(std::string_view query, std::string_view response) {
  return ContentHash({"relevance", query, response});
}

ReplayRelevanceJudge::ReplayRelevanceJudge(std::map<std::string, int> scores)
    : scores_(std::move(scores)) {
  for (const auto& [key, score] : scores_) {
    if (score != 0 && score != 1) {
      throw InvalidArgument("relevance score must be 0 or 1");
    }
  }
}

RelevanceVerdict ReplayRelevanceJudge::Judge(std::string_view query,
                                             std::string_view response) {
  auto it = scores_.find(RelevanceKey(query, response));
  if (it == scores_.end()) {
    throw JudgeError(ErrorKind::kJudgeProtocol,
                     "no recorded relevance verdict for this pair");
  }
  return RelevanceVerdict{it->second, "", true};
}

std::string Generator::Generate(std::string_view query,
                                std::string_view degree_description) {
  if (query.empty()) throw PreconditionError("generation needs a query");
  if (std::find(candidates_.begin(), candidates_.end(), degree_description) ==
      candidates_.end()) {
    throw PreconditionError("degree description '" +
                            std::string(degree_description) +
                            "' is not in the candidate list");
  }
  std::string text = DoGenerate(query, degree_description);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorKind::kGeneration, "generator returned an empty response");
  }
  return text;
}

ScriptedGenerator::ScriptedGenerator(
    std::map<std::pair<std::string, std::string>, std::string> table)
    : Generator([&] {
        std::set<std::string> descs;
        for (const auto& [key, text] : table) descs.insert(key.second);
        return std::vector<std::string>(descs.begin(), descs.end());
      }()),
      script_([table = std::move(table)](std::string_view q,
                                         std::string_view d) -> std::string {
        auto it = table.find({std::string(q), std::string(d)});
        if (it == table.end()) {
          throw Error(ErrorKind::kGeneration,
                      "script has no response for this query/description");
        }
        return it->second;
      }) {}

ScriptedGenerator::ScriptedGenerator(std::vector<std::string> candidates,
                                     Script script)
    : Generator(std::move(candidates)), script_(std::move(script)) {}

std::string ScriptedGenerator::DoGenerate(std::string_view query,
                                          std::string_view degree_description) {
  return script_(query, degree_description);
}

}  // namespace smoothctl
