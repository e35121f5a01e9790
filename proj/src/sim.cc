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

#include "smoothctl/sim.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <optional>
#include <thread>
#include <unordered_set>

#include "smoothctl/json_io.h"

namespace smoothctl {
namespace {

Error ConfigError(const std::string& message) {
  return Error(ErrorKind::kConfig, message);
}

std::string ItemName(int i, int n) {
  const int width = std::max(4, static_cast<int>(std::to_string(n - 1).size()));
  std::string digits = std::to_string(i);
  return "item-" + std::string(width - digits.size(), '0') + digits;
}

// Everything a replicate shares across strategies and budgets.
struct World {
  std::vector<ItemId> ids;
  std::unordered_map<ItemId, Rating> truth;
  std::vector<ItemId> library_members;
  std::vector<ItemId> evaluated;
  std::optional<Library> library;
};

World MakeWorld(const ConvergenceExperimentConfig& config, int replicate,
                bool need_library) {
  World w;
  Rng rng(DeriveSeed({config.rng_seed, static_cast<uint64_t>(replicate), 1}));
  for (int i = 0; i < config.n_items; ++i) {
    ItemId id = ItemName(i, config.n_items);
    w.truth[id] = UniformReal(rng, config.rating_lo, config.rating_hi);
    w.ids.push_back(std::move(id));
  }
  // The same subset is held out for every strategy so their errors cover
  // identical items. Without room for a library nothing is held out.
  if (config.library_size < static_cast<size_t>(config.n_items)) {
    w.library_members = SampleLibraryMembers(
        w.ids, config.library_size,
        DeriveSeed({config.rng_seed, static_cast<uint64_t>(replicate), 2}));
  }
  const std::unordered_set<ItemId> in_library(w.library_members.begin(),
                                              w.library_members.end());
  for (const ItemId& id : w.ids) {
    if (!in_library.count(id)) w.evaluated.push_back(id);
  }
  if (need_library) {
    // The library itself is rated by a probabilistic judge regardless of
    // the mode under study; only new-item duels see the configured mode.
    SyntheticOracle oracle({w.truth, OracleMode::kProbabilistic, 0.0,
                            DeriveSeed({config.rng_seed,
                                        static_cast<uint64_t>(replicate), 3})});
    LibraryBuildOptions options;
    options.duels_total = static_cast<int64_t>(w.library_members.size()) *
                          config.library_duels_per_member;
    options.anchor_mean = config.anchor_mean;
    options.rng_seed =
        DeriveSeed({config.rng_seed, static_cast<uint64_t>(replicate), 4});
    w.library = BuildLibrary(w.library_members, oracle, options).library;
  }
  return w;
}

std::pair<double, double> Evaluate(const World& w,
                                   const ConvergenceExperimentConfig& config,
                                   Strategy strategy, int budget,
                                   int replicate) {
  const uint64_t tag[] = {config.rng_seed, static_cast<uint64_t>(replicate),
                          static_cast<uint64_t>(strategy),
                          static_cast<uint64_t>(budget)};
  SyntheticOracle oracle(
      {w.truth, config.oracle_mode, config.flip_prob,
       DeriveSeed({tag[0], tag[1], tag[2], tag[3], 5})});
  ScheduleConfig schedule;
  schedule.strategy = strategy;
  schedule.comparisons_per_item = budget;
  schedule.k_schedule = config.k_schedule;
  schedule.rng_seed = DeriveSeed({tag[0], tag[1], tag[2], tag[3], 6});

  std::vector<RatingEstimate> estimates;
  if (UsesLibrary(strategy)) {
    estimates = RateGroup(w.evaluated, &*w.library, oracle, schedule,
                          config.anchor_mean);
  } else {
    estimates =
        RateGroup(w.ids, nullptr, oracle, schedule, config.anchor_mean);
  }
  std::unordered_map<ItemId, Rating> by_id;
  for (const RatingEstimate& e : estimates) by_id[e.id] = e.current;
  std::vector<double> est, truth;
  est.reserve(w.evaluated.size());
  truth.reserve(w.evaluated.size());
  for (const ItemId& id : w.evaluated) {
    est.push_back(by_id.at(id));
    truth.push_back(w.truth.at(id));
  }
  return {AlignedMae(est, truth), InversionRate(est, truth)};
}

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

void ConvergenceExperimentConfig::Validate() const {
  if (n_items < 3) throw ConfigError("n_items must be at least 3");
  if (!(rating_hi > rating_lo)) {
    throw ConfigError("rating_hi must exceed rating_lo");
  }
  const bool any_library = std::any_of(strategies.begin(), strategies.end(),
                                       [](Strategy s) { return UsesLibrary(s); });
  if (any_library &&
      (library_size < 2 || library_size >= static_cast<size_t>(n_items))) {
    throw ConfigError("library_size must lie in [2, n_items) for *_LIB strategies");
  }
  if (library_duels_per_member < 1) {
    throw ConfigError("library_duels_per_member must be positive");
  }
  if (budgets.empty()) throw ConfigError("no budgets");
  for (size_t i = 0; i < budgets.size(); ++i) {
    if (budgets[i] < 1) throw ConfigError("budgets must be positive");
    if (i > 0 && budgets[i] <= budgets[i - 1]) {
      throw ConfigError("budgets must be strictly increasing");
    }
  }
  if (strategies.empty()) throw ConfigError("no strategies");
  if (replicates < 1) throw ConfigError("replicates must be positive");
  if (oracle_mode == OracleMode::kNoisy &&
      !(flip_prob >= 0.0 && flip_prob < 0.5)) {
    throw ConfigError("flip_prob must lie in [0, 0.5)");
  }
}

nlohmann::json ConvergenceExperimentConfig::ToJson() const {
  Json strategy_names = Json::array();
  for (Strategy s : strategies) strategy_names.push_back(StrategyName(s));
  return Json{{"n_items", n_items},
              {"rating_lo", rating_lo},
              {"rating_hi", rating_hi},
              {"library_size", library_size},
              {"library_duels_per_member", library_duels_per_member},
              {"budgets", budgets},
              {"strategies", strategy_names},
              {"replicates", replicates},
              {"seed", rng_seed},
              {"oracle", OracleModeName(oracle_mode)},
              {"flip_prob", flip_prob},
              {"k_schedule", k_schedule.values()},
              {"anchor_mean", anchor_mean}};
}

ConvergenceExperimentConfig ConvergenceExperimentConfig::FromJson(
    const nlohmann::json& j) {
  ConvergenceExperimentConfig c;
  try {
    c.n_items = j.value("n_items", c.n_items);
    c.rating_lo = j.value("rating_lo", c.rating_lo);
    c.rating_hi = j.value("rating_hi", c.rating_hi);
    c.library_size = j.value("library_size", c.library_size);
    c.library_duels_per_member =
        j.value("library_duels_per_member", c.library_duels_per_member);
    c.budgets = j.value("budgets", c.budgets);
    if (j.contains("strategies")) {
      c.strategies.clear();
      for (const auto& s : j.at("strategies")) {
        c.strategies.push_back(ParseStrategy(s.get<std::string>()));
      }
    }
    c.replicates = j.value("replicates", c.replicates);
    c.rng_seed = j.value("seed", c.rng_seed);
    if (j.contains("oracle")) {
      c.oracle_mode = ParseOracleMode(j.at("oracle").get<std::string>());
    }
    c.flip_prob = j.value("flip_prob", c.flip_prob);
    if (j.contains("k_schedule")) {
      c.k_schedule = KSchedule(j.at("k_schedule").get<std::vector<double>>());
    }
    c.anchor_mean = j.value("anchor_mean", c.anchor_mean);
    c.threads = j.value("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  c.Validate();
  return c;
}

double AlignedMae(std::span<const double> estimates,
                  std::span<const double> truth) {
  if (estimates.size() != truth.size() || estimates.empty()) {
    throw InvalidArgument("estimates and truth must be equal, non-empty");
  }
  const double n = static_cast<double>(truth.size());
  const double shift =
      (std::accumulate(truth.begin(), truth.end(), 0.0) -
       std::accumulate(estimates.begin(), estimates.end(), 0.0)) / n;
  double total = 0.0;
  for (size_t i = 0; i < truth.size(); ++i) {
    total += std::abs(estimates[i] + shift - truth[i]);
  }
  return total / n;
}

double InversionRate(std::span<const double> estimates,
                     std::span<const double> truth) {
  if (estimates.size() != truth.size() || estimates.size() < 2) {
    throw InvalidArgument("need at least two aligned estimates");
  }
  double bad = 0.0;
  int64_t pairs = 0;
  for (size_t i = 0; i < truth.size(); ++i) {
    for (size_t j = i + 1; j < truth.size(); ++j) {
      const double dt = truth[i] - truth[j];
      if (dt == 0.0) continue;
      const double de = estimates[i] - estimates[j];
      ++pairs;
      if (de == 0.0) {
        bad += 0.5;
      } else if ((de > 0) != (dt > 0)) {
        bad += 1.0;
      }
    }
  }
  return pairs == 0 ? 0.0 : bad / static_cast<double>(pairs);
}

ReplicateResult RunConvergenceReplicate(
    const ConvergenceExperimentConfig& config, Strategy strategy, int budget,
    int replicate) {
  config.Validate();
  const World w = MakeWorld(config, replicate, UsesLibrary(strategy));
  const auto [mae, inversion] =
      Evaluate(w, config, strategy, budget, replicate);
  return {mae, inversion, w.evaluated, w.library_members};
}

std::vector<ConvergenceCurve> RunConvergence(
    const ConvergenceExperimentConfig& config) {
  config.Validate();
  const size_t ns = config.strategies.size();
  const size_t nb = config.budgets.size();
  const bool need_library =
      std::any_of(config.strategies.begin(), config.strategies.end(),
                  [](Strategy s) { return UsesLibrary(s); });
  // results[rep][s][b] = {mae, inversion}
  std::vector<std::vector<std::vector<std::pair<double, double>>>> results(
      config.replicates,
      std::vector<std::vector<std::pair<double, double>>>(
          ns, std::vector<std::pair<double, double>>(nb)));

  std::atomic<int> next{0};
  auto work = [&] {
    for (int rep = next++; rep < config.replicates; rep = next++) {
      const World w = MakeWorld(config, rep, need_library);
      for (size_t s = 0; s < ns; ++s) {
        for (size_t b = 0; b < nb; ++b) {
          results[rep][s][b] = Evaluate(w, config, config.strategies[s],
                                        config.budgets[b], rep);
        }
      }
    }
  };
  int threads = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, config.replicates);
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> workers;
    for (int t = 0; t < threads; ++t) workers.emplace_back(work);
  }

  std::vector<ConvergenceCurve> curves;
  for (size_t s = 0; s < ns; ++s) {
    ConvergenceCurve curve{config.strategies[s], {}};
    for (size_t b = 0; b < nb; ++b) {
      CurvePoint p;
      p.budget = config.budgets[b];
      p.replicates = config.replicates;
      for (int rep = 0; rep < config.replicates; ++rep) {
        p.mae += results[rep][s][b].first;
        p.inversion += results[rep][s][b].second;
      }
      p.mae /= config.replicates;
      p.inversion /= config.replicates;
      curve.points.push_back(p);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::string ConvergenceCsv(std::span<const ConvergenceCurve> curves) {
  std::string out = "strategy,budget,mae,inversion,replicates\n";
  for (const ConvergenceCurve& c : curves) {
    for (const CurvePoint& p : c.points) {
      out += std::string(StrategyName(c.strategy)) + "," +
             std::to_string(p.budget) + "," + FormatDouble(p.mae) + "," +
             FormatDouble(p.inversion) + "," + std::to_string(p.replicates) +
             "\n";
    }
  }
  return out;
}

nlohmann::json ConvergenceBundle(const ConvergenceExperimentConfig& config,
                                 std::span<const ConvergenceCurve> curves) {
  Json out{{"config", config.ToJson()}, {"curves", Json::array()}};
  for (const ConvergenceCurve& c : curves) {
    Json points = Json::array();
    for (const CurvePoint& p : c.points) {
      points.push_back({{"budget", p.budget},
                        {"mae", RoundPoints(p.mae)},
                        {"inversion", RoundPoints(p.inversion)},
                        {"replicates", p.replicates}});
    }
    out["curves"].push_back(
        {{"strategy", StrategyName(c.strategy)}, {"points", points}});
  }
  return out;
}

double BudgetToReach(const ConvergenceCurve& curve, double target_mae) {
  for (size_t i = 0; i < curve.points.size(); ++i) {
    const CurvePoint& p = curve.points[i];
    if (p.mae > target_mae) continue;
    if (i == 0) return p.budget;
    const CurvePoint& q = curve.points[i - 1];
    const double t = (q.mae - target_mae) / (q.mae - p.mae);
    return q.budget + t * (p.budget - q.budget);
  }
  return -1.0;
}

std::vector<CalibrationPoint> RunCalibration(
    PairwiseJudge& judge, std::span<const RatedItem> pool,
    const CalibrationOptions& options) {
  if (!(options.granularity > 0.0)) {
    throw InvalidArgument("granularity must be positive");
  }
  if (options.pairs_per_bucket < 1) {
    throw InvalidArgument("pairs_per_bucket must be positive");
  }
  std::vector<RatedItem> items(pool.begin(), pool.end());
  std::sort(items.begin(), items.end(), [](const auto& x, const auto& y) {
    return x.rating != y.rating ? x.rating < y.rating : x.id < y.id;
  });
  if (items.size() < 2) throw PreconditionError("calibration pool too small");
  const double g = options.granularity;
  const double spread = items.back().rating - items.front().rating;
  if (spread < 2.0 * g) {
    throw PreconditionError(
        "calibration pool spans fewer than 3 difference buckets");
  }
  std::vector<double> ratings;
  for (const RatedItem& it : items) ratings.push_back(it.rating);

  const int buckets = static_cast<int>(std::floor(spread / g)) + 1;
  Rng rng(options.rng_seed);
  std::vector<CalibrationPoint> out;
  for (int k = 0; k < buckets; ++k) {
    // For each lower item i, partners j > i with difference in bucket k
    // occupy the contiguous range [lo_i, hi_i).
    std::vector<size_t> lo(items.size()), hi(items.size());
    std::vector<int64_t> cumulative(items.size() + 1, 0);
    for (size_t i = 0; i < items.size(); ++i) {
      auto first = std::lower_bound(ratings.begin() + i + 1, ratings.end(),
                                    ratings[i] + k * g);
      auto last = std::lower_bound(first, ratings.end(),
                                   ratings[i] + (k + 1) * g);
      lo[i] = first - ratings.begin();
      hi[i] = last - ratings.begin();
      cumulative[i + 1] = cumulative[i] + static_cast<int64_t>(hi[i] - lo[i]);
    }
    const int64_t eligible = cumulative.back();
    CalibrationPoint p;
    p.bucket = static_cast<int>(std::lround(k * g));
    p.theoretical = ExpectedScore((k + 0.5) * g, 0.0);
    p.sparse = eligible < options.pairs_per_bucket;
    if (eligible == 0) {
      p.empirical = std::numeric_limits<double>::quiet_NaN();
      out.push_back(p);
      continue;
    }
    double higher_score = 0.0;
    for (int s = 0; s < options.pairs_per_bucket; ++s) {
      const int64_t r = static_cast<int64_t>(UniformIndex(rng, eligible));
      const size_t i =
          std::upper_bound(cumulative.begin(), cumulative.end(), r) -
          cumulative.begin() - 1;
      const size_t j = lo[i] + static_cast<size_t>(r - cumulative[i]);
      const ItemId& low = items[i].id;
      const ItemId& high = items[j].id;
      if (UnitInterval(rng) < 0.5) {
        higher_score += ScoreForA(JudgePair(judge, high, low).outcome);
      } else {
        higher_score += 1.0 - ScoreForA(JudgePair(judge, low, high).outcome);
      }
    }
    p.sample_count = options.pairs_per_bucket;
    p.empirical = higher_score / options.pairs_per_bucket;
    out.push_back(p);
  }
  return out;
}

std::string CalibrationCsv(std::span<const CalibrationPoint> points) {
  std::string out = "bucket,empirical,theoretical,n\n";
  for (const CalibrationPoint& p : points) {
    out += std::to_string(p.bucket) + "," + FormatDouble(p.empirical) + "," +
           FormatDouble(p.theoretical) + "," + std::to_string(p.sample_count) + "\n";
  }
  return out;
}

}  // namespace smoothctl
