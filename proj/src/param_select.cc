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

#include "smoothctl/param_select.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <thread>

#include "smoothctl/json_io.h"

namespace smoothctl {
namespace {

// Shared arithmetic for ScoreSequence and the enumeration, so both produce
// bit-identical metrics.
class SequenceScorer {
 public:
  SequenceScorer(std::span<const CandidateStats> candidates, int n,
                 const AttributeRange& range, double alpha)
      : candidates_(candidates), range_(range), alpha_(alpha) {
    range.Validate();
    if (n < 2) throw InvalidArgument("sequence length must be at least 2");
    targets_.reserve(n);
    for (int c = 0; c < n; ++c) targets_.push_back(TargetRating(c, n, range));
    // Surface a bad alpha before any enumeration starts.
    ComputeOverallMetric(0.0, 0.0, range, 1.0, alpha);
  }

  MetricsReport Score(std::span<const int> chosen) const {
    double mae = 0.0, std_sum = 0.0, rel_sum = 0.0;
    for (size_t c = 0; c < chosen.size(); ++c) {
      const CandidateStats& s = candidates_[chosen[c]];
      mae += std::abs(s.mean - targets_[c]);
      std_sum += s.std;
      rel_sum += s.relevance;
    }
    const double n = static_cast<double>(chosen.size());
    MetricsReport r;
    r.mean_mae = mae;
    r.mean_std = std_sum / n;
    r.relevance = rel_sum / n;
    r.alpha = alpha_;
    const OverallMetric o =
        ComputeOverallMetric(r.mean_mae, r.mean_std, range_, r.relevance, alpha_);
    r.overall = o.value;
    r.relevance_zero = o.relevance_zero;
    return r;
  }

 private:
  std::span<const CandidateStats> candidates_;
  AttributeRange range_;
  double alpha_;
  std::vector<double> targets_;
};

struct Best {
  std::vector<int> chosen;
  MetricsReport report;
  int64_t enumerated = 0;

  void Offer(const std::vector<int>& seq, const MetricsReport& r) {
    ++enumerated;
    if (chosen.empty() || r.overall < report.overall ||
        (r.overall == report.overall && seq < chosen)) {
      chosen = seq;
      report = r;
    }
  }

  void Merge(const Best& other) {
    enumerated += other.enumerated;
    if (other.chosen.empty()) return;
    if (chosen.empty() || other.report.overall < report.overall ||
        (other.report.overall == report.overall && other.chosen < chosen)) {
      chosen = other.chosen;
      report = other.report;
    }
  }
};

// All increasing sequences of length n over [0, m) starting with `first`.
void EnumerateFrom(int first, int m, int n, const SequenceScorer& scorer,
                   SequenceOrder order, Best& best) {
  std::vector<int> seq(n);
  std::iota(seq.begin(), seq.end(), first);
  std::vector<int> perm(n);
  while (true) {
    if (order == SequenceOrder::kMonotone) {
      best.Offer(seq, scorer.Score(seq));
    } else {
      perm = seq;
      do {
        best.Offer(perm, scorer.Score(perm));
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    // Advance positions 1..n-1, keeping seq[0] fixed.
    int i = n - 1;
    while (i >= 1 && seq[i] == m - n + i) --i;
    if (i < 1) break;
    ++seq[i];
    for (int j = i + 1; j < n; ++j) seq[j] = seq[j - 1] + 1;
  }
}

}  // namespace

CandidateStats EvaluateCandidate(const CandidateParameter& candidate) {
  if (candidate.per_query_ratings.empty()) {
    throw InvalidArgument("candidate '" + candidate.label + "' has no ratings");
  }
  if (candidate.relevance_verdicts.size() !=
      candidate.per_query_ratings.size()) {
    throw InvalidArgument("candidate '" + candidate.label +
                          "': ratings and relevance verdicts differ in length");
  }
  const ControlLevelStats level =
      ControlLevelStats::FromRatings(0, candidate.per_query_ratings);
  return CandidateStats{level.mean, level.std,
                        RelevanceScore(candidate.relevance_verdicts)};
}

MetricsReport ScoreSequence(std::span<const CandidateStats> candidates,
                            std::span<const int> chosen, int n,
                            const AttributeRange& range, double alpha,
                            SequenceOrder order) {
  if (static_cast<int>(chosen.size()) != n) {
    throw InvalidArgument("sequence has length " +
                          std::to_string(chosen.size()) + ", expected " +
                          std::to_string(n));
  }
  std::set<int> distinct;
  for (size_t i = 0; i < chosen.size(); ++i) {
    if (chosen[i] < 0 || chosen[i] >= static_cast<int>(candidates.size())) {
      throw InvalidArgument("candidate position out of range");
    }
    if (order == SequenceOrder::kMonotone && i > 0 &&
        chosen[i] <= chosen[i - 1]) {
      throw InvalidArgument("sequence is not strictly increasing");
    }
    if (!distinct.insert(chosen[i]).second) {
      throw InvalidArgument("sequence repeats a candidate");
    }
  }
  return SequenceScorer(candidates, n, range, alpha).Score(chosen);
}

int64_t Choose(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  int64_t result = 1;
  for (int i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return result;
}

ParameterSequence SelectBestSequence(
    std::span<const CandidateParameter> candidates,
    const AttributeRange& range, const SelectionOptions& options) {
  const int m = static_cast<int>(candidates.size());
  const int n = options.n;
  if (n < 2) throw InvalidArgument("sequence length must be at least 2");
  if (m < n) {
    throw InvalidArgument("need at least " + std::to_string(n) +
                          " candidates, got " + std::to_string(m));
  }
  std::vector<const CandidateParameter*> sorted;
  for (const CandidateParameter& c : candidates) sorted.push_back(&c);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto* x, const auto* y) { return x->index < y->index; });
  for (int i = 1; i < m; ++i) {
    if (sorted[i]->index == sorted[i - 1]->index) {
      throw InvalidArgument("duplicate candidate index " +
                            std::to_string(sorted[i]->index));
    }
  }
  std::vector<CandidateStats> stats;
  stats.reserve(m);
  for (const CandidateParameter* c : sorted) {
    stats.push_back(EvaluateCandidate(*c));
  }
  const SequenceScorer scorer(stats, n, range, options.alpha);

  // One chunk per first position; chunks merge in order.
  const int chunks = options.order == SequenceOrder::kMonotone ? m - n + 1 : m;
  std::vector<Best> partial(chunks);
  auto run_chunk = [&](int first) {
    if (options.order == SequenceOrder::kMonotone) {
      EnumerateFrom(first, m, n, scorer, options.order, partial[first]);
    } else if (first == 0) {
      // Permutations of every subset; a single chunk keeps this simple.
      for (int f = 0; f <= m - n; ++f) {
        EnumerateFrom(f, m, n, scorer, options.order, partial[0]);
      }
    }
  };
  int threads = options.threads > 0
                    ? options.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, chunks);
  if (threads == 1) {
    for (int f = 0; f < chunks; ++f) run_chunk(f);
  } else {
    std::vector<std::jthread> workers;
    for (int t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        for (int f = t; f < chunks; f += threads) run_chunk(f);
      });
    }
  }
  Best best;
  for (const Best& b : partial) best.Merge(b);

  ParameterSequence out;
  out.chosen = best.chosen;
  for (int pos : out.chosen) out.chosen_labels.push_back(sorted[pos]->label);
  out.metric = best.report.overall;
  out.report = best.report;
  out.enumerated = best.enumerated;
  return out;
}

std::vector<CandidateParameter> ReadCandidates(
    const std::filesystem::path& path) {
  std::vector<CandidateParameter> out;
  ReadJsonl(path, [&](int, const Json& j) {
    CandidateParameter c;
    c.label = j.at("label").get<std::string>();
    c.index = j.at("index").get<int>();
    c.per_query_ratings = j.at("ratings").get<std::vector<double>>();
    c.relevance_verdicts = j.at("relevance").get<std::vector<int>>();
    out.push_back(std::move(c));
  });
  return out;
}

nlohmann::json CandidateToJson(const CandidateParameter& c) {
  return Json{{"label", c.label},
              {"index", c.index},
              {"ratings", c.per_query_ratings},
              {"relevance", c.relevance_verdicts}};
}

}  // namespace smoothctl
