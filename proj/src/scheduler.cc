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

#include "smoothctl/scheduler.h"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "smoothctl/hashing.h"
#include "smoothctl/json_io.h"

namespace smoothctl {
namespace {

Error SchedulingError(const std::string& message) {
  return Error(ErrorKind::kScheduling, message);
}

uint64_t ItemStream(uint64_t seed, const ItemId& id) {
  return DeriveSeed({seed, HashPrefix64(Sha256Hex(id))});
}

}  // namespace

std::string_view StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kRandomNoLib:
      return "RANDOM_NO_LIB";
    case Strategy::kClosestNoLib:
      return "CLOSEST_NO_LIB";
    case Strategy::kRandomLib:
      return "RANDOM_LIB";
    case Strategy::kClosestLib:
      return "CLOSEST_LIB";
  }
  return "?";
}

Strategy ParseStrategy(std::string_view name) {
  for (Strategy s : kAllStrategies) {
    if (StrategyName(s) == name) return s;
  }
  throw Error(ErrorKind::kConfig,
              "unknown strategy '" + std::string(name) + "'");
}

bool UsesLibrary(Strategy s) {
  return s == Strategy::kRandomLib || s == Strategy::kClosestLib;
}

bool IsClosestMatch(Strategy s) {
  return s == Strategy::kClosestNoLib || s == Strategy::kClosestLib;
}

KSchedule KSchedule::Default() {
  std::vector<double> k(15, 96.0);
  std::fill(k.begin(), k.begin() + 5, 192.0);
  k.push_back(48.0);
  return KSchedule(std::move(k));
}

KSchedule::KSchedule(std::vector<double> per_duel)
    : per_duel_(std::move(per_duel)) {
  if (per_duel_.empty()) throw InvalidArgument("K schedule must be non-empty");
  for (double k : per_duel_) {
    if (!(k > 0.0) || !std::isfinite(k)) {
      throw InvalidArgument("K schedule entries must be positive");
    }
  }
}

double KSchedule::KForDuel(int duels_played) const {
  const size_t i = std::min<size_t>(std::max(duels_played, 0),
                                    per_duel_.size() - 1);
  return per_duel_[i];
}

void ScheduleConfig::Validate() const {
  if (comparisons_per_item < 1) {
    throw PreconditionError("comparisons_per_item must be at least 1");
  }
}

void RatingPool::Add(const ItemId& id, Rating rating) {
  if (!std::isfinite(rating)) throw InvalidArgument("rating must be finite");
  if (!ratings_.emplace(id, rating).second) {
    throw InvalidArgument("duplicate pool member '" + id + "'");
  }
  by_rating_.emplace(rating, id);
  position_[id] = ids_.size();
  ids_.push_back(id);
}

void RatingPool::Remove(const ItemId& id) {
  auto it = ratings_.find(id);
  if (it == ratings_.end()) return;
  by_rating_.erase({it->second, id});
  ratings_.erase(it);
  const size_t pos = position_.at(id);
  position_.erase(id);
  if (pos + 1 != ids_.size()) {
    ids_[pos] = std::move(ids_.back());
    position_[ids_[pos]] = pos;
  }
  ids_.pop_back();
}

void RatingPool::SetRating(const ItemId& id, Rating rating) {
  auto it = ratings_.find(id);
  if (it == ratings_.end()) {
    throw InvalidArgument("'" + id + "' is not in the pool");
  }
  by_rating_.erase({it->second, id});
  it->second = rating;
  by_rating_.emplace(rating, id);
}

Rating RatingPool::RatingOf(const ItemId& id) const {
  auto it = ratings_.find(id);
  if (it == ratings_.end()) {
    throw InvalidArgument("'" + id + "' is not in the pool");
  }
  return it->second;
}

std::optional<ItemId> RatingPool::Closest(Rating target,
                                          const ItemId& exclude) const {
  // Entries are ordered by (rating, id), so the first non-excluded entry of
  // a rating group carries the smallest id of that group.
  auto first_of_group = [&](auto it) -> std::optional<ItemId> {
    const Rating r = it->first;
    for (; it != by_rating_.end() && it->first == r; ++it) {
      if (it->second != exclude) return it->second;
    }
    return std::nullopt;
  };

  std::optional<ItemId> right, left;
  Rating right_dist = 0, left_dist = 0;
  for (auto it = by_rating_.lower_bound({target, ItemId()});
       it != by_rating_.end();) {
    if (auto id = first_of_group(it)) {
      right = id;
      right_dist = it->first - target;
      break;
    }
    const Rating r = it->first;
    while (it != by_rating_.end() && it->first == r) ++it;
  }
  auto it = by_rating_.lower_bound({target, ItemId()});
  while (it != by_rating_.begin()) {
    --it;
    const Rating r = it->first;
    // Walk to the start of this rating group.
    auto start = it;
    while (start != by_rating_.begin() && std::prev(start)->first == r) {
      --start;
    }
    if (auto id = first_of_group(start)) {
      left = id;
      left_dist = target - r;
      break;
    }
    it = start;
  }
  if (!left) return right;
  if (!right) return left;
  if (right_dist < left_dist) return right;
  if (left_dist < right_dist) return left;
  return std::min(*left, *right);
}

std::optional<ItemId> RatingPool::Random(Rng& rng,
                                         const ItemId& exclude) const {
  auto ex = position_.find(exclude);
  const size_t n = ids_.size() - (ex != position_.end() ? 1 : 0);
  if (n == 0) return std::nullopt;
  size_t i = UniformIndex(rng, n);
  if (ex != position_.end() && i >= ex->second) ++i;
  return ids_[i];
}

Library::Library(std::vector<LibraryMember> members, Rating anchor_mean)
    : members_(std::move(members)), anchor_mean_(anchor_mean) {
  std::sort(members_.begin(), members_.end(),
            [](const auto& x, const auto& y) { return x.id < y.id; });
  for (const LibraryMember& m : members_) pool_.Add(m.id, m.rating);
}

nlohmann::json Library::ToJson() const {
  Json members = Json::array();
  for (const LibraryMember& m : members_) {
    // Full precision: a frozen library must reload bit for bit.
    members.push_back({{"id", m.id}, {"rating", m.rating}});
  }
  return Json{{"anchor_mean", anchor_mean_},
              {"frozen", true},
              {"size", members_.size()},
              {"members", members}};
}

Library Library::FromJson(const nlohmann::json& j) {
  std::vector<LibraryMember> members;
  for (const Json& m : j.at("members")) {
    members.push_back({m.at("id").get<std::string>(),
                       m.at("rating").get<double>()});
  }
  if (j.contains("size") && j.at("size").get<size_t>() != members.size()) {
    throw Error(ErrorKind::kSchema, "library size does not match members");
  }
  return Library(std::move(members),
                 j.value("anchor_mean", kDefaultAnchorMean));
}

std::vector<ItemId> SampleLibraryMembers(std::span<const ItemId> items,
                                         size_t size, uint64_t seed) {
  std::vector<ItemId> pool(items.begin(), items.end());
  if (size < pool.size()) {
    Rng rng(seed);
    // Partial Fisher-Yates.
    for (size_t i = 0; i < size; ++i) {
      std::swap(pool[i], pool[i + UniformIndex(rng, pool.size() - i)]);
    }
    pool.resize(size);
  }
  std::sort(pool.begin(), pool.end());
  return pool;
}

void ComparisonSink::Record(const ItemId& a, const ItemId& b, Outcome outcome,
                            const std::string& judge_id) {
  if (log_) log_->push_back({a, b, outcome, judge_id, next_seq_});
  ++next_seq_;
}

LibraryBuild BuildLibrary(std::span<const ItemId> items, PairwiseJudge& judge,
                          const LibraryBuildOptions& options) {
  if (items.size() < 2) {
    throw PreconditionError("a library needs at least 2 items");
  }
  std::vector<ItemId> order(items.begin(), items.end());
  std::sort(order.begin(), order.end());
  if (std::adjacent_find(order.begin(), order.end()) != order.end()) {
    throw InvalidArgument("library items must be distinct");
  }
  const int64_t chain = static_cast<int64_t>(order.size()) - 1;
  if (options.duels_total < chain) {
    throw PreconditionError("duels_total must be at least " +
                            std::to_string(chain) +
                            " to connect the comparison graph");
  }
  Rng rng(options.rng_seed);
  Shuffle(order, rng);

  std::vector<ComparisonRecord> log;
  log.reserve(options.duels_total);
  ComparisonSink sink(&log);
  const std::string judge_id = judge.Name();
  auto duel = [&](const ItemId& a, const ItemId& b) {
    try {
      sink.Record(a, b, JudgePair(judge, a, b).outcome, judge_id);
    } catch (const JudgeError& e) {
      throw LibraryBuildError(std::string("library build aborted: ") + e.what(),
                              log, e.kind());
    }
  };
  for (int64_t i = 0; i < chain; ++i) {
    if (UniformIndex(rng, 2) == 0) {
      duel(order[i], order[i + 1]);
    } else {
      duel(order[i + 1], order[i]);
    }
  }
  const size_t n = order.size();
  for (int64_t d = chain; d < options.duels_total; ++d) {
    const size_t a = UniformIndex(rng, n);
    size_t b = UniformIndex(rng, n - 1);
    if (b >= a) ++b;
    duel(order[a], order[b]);
  }

  BradleyTerryOptions bt = options.bt;
  bt.anchor_mean = options.anchor_mean;
  BradleyTerryFit fit = FitBradleyTerry(log, bt);
  std::vector<LibraryMember> members;
  members.reserve(fit.ratings.size());
  for (const auto& [id, r] : fit.ratings) members.push_back({id, r});
  return LibraryBuild{Library(std::move(members), options.anchor_mean),
                      std::move(log), std::move(fit)};
}

ItemId NextOpponent(const RatingEstimate& estimate, const RatingPool& pool,
                    const ScheduleConfig& config, Rng& rng) {
  std::optional<ItemId> pick =
      IsClosestMatch(config.strategy)
          ? pool.Closest(estimate.current, estimate.id)
          : pool.Random(rng, estimate.id);
  if (!pick) {
    throw SchedulingError("no opponent available for '" + estimate.id + "'");
  }
  return *pick;
}

RatingEstimate RateItem(const ItemId& item, const Library& library,
                        PairwiseJudge& judge, const ScheduleConfig& config,
                        Rating initial, ComparisonSink* sink) {
  config.Validate();
  if (!UsesLibrary(config.strategy)) {
    throw InvalidArgument("strategy " +
                          std::string(StrategyName(config.strategy)) +
                          " does not rate against a library");
  }
  Rng rng(ItemStream(config.rng_seed, item));
  RatingEstimate est{item, initial, 0, false, ""};
  const std::string judge_id = judge.Name();
  while (est.duels_played < config.comparisons_per_item) {
    const ItemId opponent = NextOpponent(est, library.pool(), config, rng);
    Outcome outcome;
    try {
      outcome = JudgePair(judge, item, opponent).outcome;
    } catch (const JudgeError& e) {
      est.failed = true;
      est.error = e.what();
      est.error_kind = e.kind();
      return est;
    }
    if (sink) sink->Record(item, opponent, outcome, judge_id);
    est.current += EloDelta(est.current, library.RatingOf(opponent), outcome,
                            config.k_schedule.KForDuel(est.duels_played));
    ++est.duels_played;
  }
  return est;
}

void LiveEstimates::Add(const ItemId& id, Rating initial) {
  pool_.Add(id, initial);
  duels_[id] = 0;
}

RatingEstimate LiveEstimates::Get(const ItemId& id) const {
  return RatingEstimate{id, pool_.RatingOf(id), duels_.at(id), false, ""};
}

double LiveEstimates::Update(const ItemId& id, Rating opponent_rating,
                             Outcome outcome, const KSchedule& k) {
  const Rating r = pool_.RatingOf(id);
  int& duels = duels_.at(id);
  const Rating updated =
      r + EloDelta(r, opponent_rating, outcome, k.KForDuel(duels));
  pool_.SetRating(id, updated);
  ++duels;
  return updated;
}

void LiveEstimates::ApplyDuel(const ItemId& a, const ItemId& b,
                              Outcome outcome, const KSchedule& k,
                              bool update_b) {
  const Rating ra = pool_.RatingOf(a);
  const Rating rb = pool_.RatingOf(b);
  Update(a, rb, outcome, k);
  if (update_b) Update(b, ra, Mirror(outcome), k);
}

RatingEstimate RateItem(const ItemId& item, LiveEstimates& others,
                        PairwiseJudge& judge, const ScheduleConfig& config,
                        Rating initial, ComparisonSink* sink) {
  config.Validate();
  if (UsesLibrary(config.strategy)) {
    throw InvalidArgument("strategy " +
                          std::string(StrategyName(config.strategy)) +
                          " rates against a library");
  }
  if (others.pool().Contains(item)) {
    throw PreconditionError("the opponent pool must exclude '" + item + "'");
  }
  Rng rng(ItemStream(config.rng_seed, item));
  RatingEstimate est{item, initial, 0, false, ""};
  const std::string judge_id = judge.Name();
  while (est.duels_played < config.comparisons_per_item) {
    const ItemId opponent = NextOpponent(est, others.pool(), config, rng);
    Outcome outcome;
    try {
      outcome = JudgePair(judge, item, opponent).outcome;
    } catch (const JudgeError& e) {
      est.failed = true;
      est.error = e.what();
      est.error_kind = e.kind();
      return est;
    }
    if (sink) sink->Record(item, opponent, outcome, judge_id);
    const Rating r_opp = others.pool().RatingOf(opponent);
    others.Update(opponent, est.current, Mirror(outcome), config.k_schedule);
    est.current += EloDelta(est.current, r_opp, outcome,
                            config.k_schedule.KForDuel(est.duels_played));
    ++est.duels_played;
  }
  return est;
}

std::vector<RatingEstimate> RateGroup(std::span<const ItemId> items,
                                      const Library* library,
                                      PairwiseJudge& judge,
                                      const ScheduleConfig& config,
                                      Rating initial, ComparisonSink* sink) {
  config.Validate();
  std::vector<RatingEstimate> out;
  out.reserve(items.size());
  if (UsesLibrary(config.strategy)) {
    if (library == nullptr || library->size() == 0) {
      throw SchedulingError("library strategies need a non-empty library");
    }
    for (const ItemId& id : items) {
      if (library->Contains(id)) {
        out.push_back({id, library->RatingOf(id), 0, false, ""});
      } else {
        out.push_back(RateItem(id, *library, judge, config, initial, sink));
      }
    }
    return out;
  }

  if (items.size() < 2) {
    throw SchedulingError("no-library strategies need at least 2 items");
  }
  LiveEstimates live;
  for (const ItemId& id : items) live.Add(id, initial);
  Rng rng(DeriveSeed({config.rng_seed, 0x6e6f6c6962ULL}));
  const std::string judge_id = judge.Name();
  std::vector<ItemId> order(items.begin(), items.end());
  std::unordered_map<ItemId, std::pair<std::string, ErrorKind>> failures;

  for (int round = 0; round < config.comparisons_per_item; ++round) {
    Shuffle(order, rng);
    RatingPool available;
    for (const ItemId& id : order) {
      if (!failures.count(id)) available.Add(id, live.pool().RatingOf(id));
    }
    for (const ItemId& focal : order) {
      if (!available.Contains(focal)) continue;
      available.Remove(focal);
      const bool leftover = available.empty();
      const RatingEstimate est = live.Get(focal);
      const ItemId opponent =
          NextOpponent(est, leftover ? live.pool() : available, config, rng);
      available.Remove(opponent);
      Outcome outcome;
      try {
        outcome = JudgePair(judge, focal, opponent).outcome;
      } catch (const JudgeError& e) {
        failures[focal] = {e.what(), e.kind()};
        continue;
      }
      if (sink) sink->Record(focal, opponent, outcome, judge_id);
      live.ApplyDuel(focal, opponent, outcome, config.k_schedule, !leftover);
    }
  }
  for (const ItemId& id : items) {
    RatingEstimate est = live.Get(id);
    if (auto it = failures.find(id); it != failures.end()) {
      est.failed = true;
      est.error = it->second.first;
      est.error_kind = it->second.second;
    }
    out.push_back(std::move(est));
  }
  return out;
}

}  // namespace smoothctl
