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

#include "smoothctl/rating.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace smoothctl {
namespace {

void CheckFinite(Rating r, const char* what) {
  if (!std::isfinite(r)) {
    std::ostringstream msg;
    msg << what << " must be finite, got " << r;
    throw InvalidArgument(msg.str());
  }
}

// Aggregated duel counts between item i < j.
struct PairCounts {
  int i = 0;
  int j = 0;
  double wins_i = 0.0;  // wins of i over j, ties counted as 0.5
  double wins_j = 0.0;
};

int FindRoot(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

// Every node reachable from node 0 along `adj`.
std::vector<bool> Reachable(const std::vector<std::vector<int>>& adj) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<int> stack = {0};
  seen[0] = true;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

// The MLE exists iff the "beats" digraph is strongly connected.
bool StronglyConnected(int n, const std::vector<PairCounts>& pairs) {
  std::vector<std::vector<int>> fwd(n), rev(n);
  for (const PairCounts& p : pairs) {
    if (p.wins_i > 0) {
      fwd[p.i].push_back(p.j);
      rev[p.j].push_back(p.i);
    }
    if (p.wins_j > 0) {
      fwd[p.j].push_back(p.i);
      rev[p.i].push_back(p.j);
    }
  }
  auto all = [](const std::vector<bool>& v) {
    return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
  };
  return all(Reachable(fwd)) && all(Reachable(rev));
}

}  // namespace

double ScoreForA(Outcome outcome) {
  switch (outcome) {
    case Outcome::kAWins:
      return 1.0;
    case Outcome::kBWins:
      return 0.0;
    case Outcome::kTie:
      return 0.5;
  }
  throw InvalidArgument("invalid outcome");
}

Outcome Mirror(Outcome outcome) {
  switch (outcome) {
    case Outcome::kAWins:
      return Outcome::kBWins;
    case Outcome::kBWins:
      return Outcome::kAWins;
    case Outcome::kTie:
      return Outcome::kTie;
  }
  return outcome;
}

std::string_view OutcomeName(Outcome outcome) {
  switch (outcome) {
    case Outcome::kAWins:
      return "A";
    case Outcome::kBWins:
      return "B";
    case Outcome::kTie:
      return "TIE";
  }
  return "?";
}

Outcome ParseOutcome(std::string_view name) {
  if (name == "A") return Outcome::kAWins;
  if (name == "B") return Outcome::kBWins;
  if (name == "TIE") return Outcome::kTie;
  throw Error(ErrorKind::kSchema,
              "unknown outcome '" + std::string(name) + "'");
}

double ExpectedScore(Rating r_a, Rating r_b) {
  CheckFinite(r_a, "rating a");
  CheckFinite(r_b, "rating b");
  return 1.0 / (1.0 + std::pow(10.0, (r_b - r_a) / kEloScale));
}

double EloDelta(Rating r_a, Rating r_b, Outcome outcome, double k) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw InvalidArgument("Elo k factor must be positive and finite");
  }
  return k * (ScoreForA(outcome) - ExpectedScore(r_a, r_b));
}

std::pair<Rating, Rating> EloUpdate(Rating r_a, Rating r_b, Outcome outcome,
                                    double k) {
  const double delta = EloDelta(r_a, r_b, outcome, k);
  return {r_a + delta, r_b - delta};
}

BradleyTerryFit FitBradleyTerry(std::span<const ComparisonRecord> records,
                                const BradleyTerryOptions& options) {
  if (records.empty()) {
    throw InvalidArgument("Bradley-Terry fit needs at least one record");
  }
  CheckFinite(options.anchor_mean, "anchor mean");

  // Stable item indexing: sorted ids.
  std::vector<ItemId> ids;
  for (const ComparisonRecord& r : records) {
    if (r.item_a == r.item_b) {
      throw InvalidArgument("comparison of item '" + r.item_a +
                            "' with itself");
    }
    ids.push_back(r.item_a);
    ids.push_back(r.item_b);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  const int n = static_cast<int>(ids.size());
  std::unordered_map<ItemId, int> index;
  for (int i = 0; i < n; ++i) index.emplace(ids[i], i);

  std::map<std::pair<int, int>, PairCounts> by_pair;
  for (const ComparisonRecord& r : records) {
    int a = index.at(r.item_a);
    int b = index.at(r.item_b);
    double s = ScoreForA(r.outcome);
    if (a > b) {
      std::swap(a, b);
      s = 1.0 - s;
    }
    PairCounts& pc = by_pair[{a, b}];
    pc.i = a;
    pc.j = b;
    pc.wins_i += s;
    pc.wins_j += 1.0 - s;
  }
  std::vector<PairCounts> pairs;
  pairs.reserve(by_pair.size());
  for (auto& [key, pc] : by_pair) pairs.push_back(pc);

  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (const PairCounts& p : pairs) {
    parent[FindRoot(parent, p.i)] = FindRoot(parent, p.j);
  }
  std::map<int, std::vector<ItemId>> groups;
  for (int i = 0; i < n; ++i) groups[FindRoot(parent, i)].push_back(ids[i]);
  if (groups.size() > 1) {
    std::vector<std::vector<ItemId>> components;
    std::ostringstream msg;
    msg << "comparison graph is disconnected (" << groups.size()
        << " components):";
    for (auto& [root, members] : groups) {
      msg << " {";
      for (size_t m = 0; m < members.size(); ++m) {
        msg << (m ? ", " : "") << members[m];
      }
      msg << "}";
      components.push_back(std::move(members));
    }
    throw EstimationError(msg.str(), std::move(components));
  }

  BradleyTerryFit fit;
  if (!StronglyConnected(n, pairs)) {
    fit.regularized = true;
    for (PairCounts& p : pairs) {
      p.wins_i += options.pseudo_wins;
      p.wins_j += options.pseudo_wins;
    }
  }

  std::vector<double> total_wins(n, 0.0);
  std::vector<std::vector<std::pair<int, double>>> games(n);
  for (const PairCounts& p : pairs) {
    total_wins[p.i] += p.wins_i;
    total_wins[p.j] += p.wins_j;
    const double games_ij = p.wins_i + p.wins_j;
    games[p.i].emplace_back(p.j, games_ij);
    games[p.j].emplace_back(p.i, games_ij);
  }

  // Strengths gamma = 10^(r / 400), kept at unit geometric mean.
  std::vector<double> gamma(n, 1.0);
  std::vector<double> rating(n, 0.0);
  const double to_points = kEloScale / std::log(10.0);
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    for (int i = 0; i < n; ++i) {
      double denom = 0.0;
      for (const auto& [j, g] : games[i]) denom += g / (gamma[i] + gamma[j]);
      gamma[i] = total_wins[i] / denom;
    }
    double log_mean = 0.0;
    for (double g : gamma) log_mean += std::log(g);
    log_mean /= n;
    double max_change = 0.0;
    for (int i = 0; i < n; ++i) {
      const double log_g = std::log(gamma[i]) - log_mean;
      gamma[i] = std::exp(log_g);
      const double r = log_g * to_points;
      max_change = std::max(max_change, std::abs(r - rating[i]));
      rating[i] = r;
    }
    if (max_change < options.tolerance) {
      ++iter;
      break;
    }
  }
  if (iter >= options.max_iterations) {
    throw Error(ErrorKind::kEstimation,
                "Bradley-Terry fit did not converge within " +
                    std::to_string(options.max_iterations) + " sweeps");
  }
  fit.iterations = iter;

  const double mean = std::accumulate(rating.begin(), rating.end(), 0.0) / n;
  for (int i = 0; i < n; ++i) {
    fit.ratings.emplace(ids[i], rating[i] - mean + options.anchor_mean);
  }
  return fit;
}

std::vector<RatingBin> BinByRating(std::span<const RatedItem> items,
                                   double width,
                                   std::optional<Rating> origin) {
  if (!(width > 0.0) || !std::isfinite(width)) {
    throw InvalidArgument("bin width must be positive");
  }
  if (items.empty()) {
    throw InvalidArgument("cannot bin an empty item list");
  }
  for (const RatedItem& item : items) CheckFinite(item.rating, "rating");
  const Rating lo =
      origin.value_or(std::min_element(items.begin(), items.end(),
                                       [](const auto& x, const auto& y) {
                                         return x.rating < y.rating;
                                       })
                          ->rating);

  std::map<int, RatingBin> bins;
  std::map<int, double> sums;
  for (const RatedItem& item : items) {
    if (item.rating < lo) {
      std::ostringstream msg;
      msg << "rating " << item.rating << " of '" << item.id
          << "' lies below the bin origin " << lo;
      throw InvalidArgument(msg.str());
    }
    const int idx = static_cast<int>(std::floor((item.rating - lo) / width));
    RatingBin& bin = bins[idx];
    bin.bin_index = idx;
    bin.width = width;
    bin.members.push_back(item.id);
    sums[idx] += item.rating;
  }
  std::vector<RatingBin> out;
  out.reserve(bins.size());
  for (auto& [idx, bin] : bins) {
    bin.mean_rating = sums[idx] / static_cast<double>(bin.members.size());
    out.push_back(std::move(bin));
  }
  return out;
}

}  // namespace smoothctl
