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

// Opponent selection and comparison budgets for incremental Elo rating.
//
// Four strategies are supported: {no library, library} x {random match,
// closest match}. With a library, new items duel a frozen, heavily rated
// anchor set and only the new item's rating moves. Without one, items duel
// each other's live estimates and both sides update.

#ifndef SMOOTHCTL_SCHEDULER_H_
#define SMOOTHCTL_SCHEDULER_H_

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "smoothctl/judge.h"
#include "smoothctl/random.h"
#include "smoothctl/rating.h"

namespace smoothctl {

enum class Strategy { kRandomNoLib, kClosestNoLib, kRandomLib, kClosestLib };

inline constexpr Strategy kAllStrategies[] = {
    Strategy::kRandomNoLib, Strategy::kClosestNoLib, Strategy::kRandomLib,
    Strategy::kClosestLib};

std::string_view StrategyName(Strategy s);
Strategy ParseStrategy(std::string_view name);
bool UsesLibrary(Strategy s);
bool IsClosestMatch(Strategy s);

// Elo K factor as a function of how many duels an item has already played.
// Entry i applies to duel i; the last entry repeats forever.
class KSchedule {
 public:
  static KSchedule Constant(double k) { return KSchedule({k}); }
  // 192 for the first 5 duels, 96 up to 15 duels, 48 afterwards. New items
  // start at the anchor mean and must be able to travel to either end of a
  // ~1400 point wide library within a 20 duel budget.
  static KSchedule Default();

  explicit KSchedule(std::vector<double> per_duel);

  double KForDuel(int duels_played) const;
  const std::vector<double>& values() const { return per_duel_; }

 private:
  std::vector<double> per_duel_;
};

struct ScheduleConfig {
  Strategy strategy = Strategy::kClosestLib;
  int comparisons_per_item = 20;
  KSchedule k_schedule = KSchedule::Default();
  uint64_t rng_seed = 0;

  // Throws unless comparisons_per_item >= 1.
  void Validate() const;
};

struct RatingEstimate {
  ItemId id;
  Rating current = kDefaultAnchorMean;
  int duels_played = 0;
  // Set when the judge failed; duels_played is then below the budget.
  bool failed = false;
  std::string error;
  ErrorKind error_kind = ErrorKind::kJudgeProtocol;
};

// Items with ratings, indexed for closest-rating and uniform lookups.
class RatingPool {
 public:
  RatingPool() = default;

  void Add(const ItemId& id, Rating rating);
  void Remove(const ItemId& id);
  void SetRating(const ItemId& id, Rating rating);

  bool Contains(const ItemId& id) const { return ratings_.count(id) > 0; }
  Rating RatingOf(const ItemId& id) const;
  size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

  // argmin |rating - target| over members other than `exclude`; ties go to
  // the lexicographically smallest id.
  std::optional<ItemId> Closest(Rating target, const ItemId& exclude) const;

  // Uniform draw over members other than `exclude`.
  std::optional<ItemId> Random(Rng& rng, const ItemId& exclude) const;

 private:
  std::unordered_map<ItemId, Rating> ratings_;
  std::set<std::pair<Rating, ItemId>> by_rating_;
  std::vector<ItemId> ids_;
  std::unordered_map<ItemId, size_t> position_;
};

inline constexpr size_t kDefaultLibrarySize = 300;

struct LibraryMember {
  ItemId id;
  Rating rating = 0.0;
};

// A frozen anchor set. Member ratings never change once constructed.
class Library {
 public:
  Library() = default;
  Library(std::vector<LibraryMember> members, Rating anchor_mean);

  const std::vector<LibraryMember>& members() const { return members_; }
  size_t size() const { return members_.size(); }
  bool frozen() const { return true; }
  Rating anchor_mean() const { return anchor_mean_; }
  bool Contains(const ItemId& id) const { return pool_.Contains(id); }
  Rating RatingOf(const ItemId& id) const { return pool_.RatingOf(id); }
  const RatingPool& pool() const { return pool_; }

  nlohmann::json ToJson() const;
  static Library FromJson(const nlohmann::json& j);

 private:
  std::vector<LibraryMember> members_;  // sorted by id
  Rating anchor_mean_ = kDefaultAnchorMean;
  RatingPool pool_;
};

struct LibraryBuildOptions {
  // Total duels including the spanning chain (at least items - 1).
  int64_t duels_total = 0;
  Rating anchor_mean = kDefaultAnchorMean;
  uint64_t rng_seed = 0;
  BradleyTerryOptions bt;
};

struct LibraryBuild {
  Library library;
  std::vector<ComparisonRecord> log;
  BradleyTerryFit fit;
};

// Raised when the judge fails during a library build; carries the duels
// collected so far and the kind of the judge error that stopped it.
class LibraryBuildError : public Error {
 public:
  LibraryBuildError(const std::string& message,
                    std::vector<ComparisonRecord> partial_log,
                    ErrorKind cause = ErrorKind::kJudgeProtocol)
      : Error(ErrorKind::kLibraryBuild, message),
        partial_log_(std::move(partial_log)),
        cause_(cause) {}

  ErrorKind cause() const { return cause_; }

  const std::vector<ComparisonRecord>& partial_log() const {
    return partial_log_;
  }

 private:
  std::vector<ComparisonRecord> partial_log_;
  ErrorKind cause_;
};

// Uniform sample of `size` ids (sorted), or all ids if there are fewer.
std::vector<ItemId> SampleLibraryMembers(std::span<const ItemId> items,
                                         size_t size, uint64_t seed);

// Duels a random Hamiltonian chain first so the comparison graph is
// connected, spends the rest of the budget on uniform random pairs, then
// fits Bradley-Terry over every record.
LibraryBuild BuildLibrary(std::span<const ItemId> items, PairwiseJudge& judge,
                          const LibraryBuildOptions& options);

// Chooses the next opponent for `estimate` from `pool` according to the
// strategy's matching rule. The caller supplies the library pool for *_LIB
// strategies and the live estimates for *_NO_LIB ones.
ItemId NextOpponent(const RatingEstimate& estimate, const RatingPool& pool,
                    const ScheduleConfig& config, Rng& rng);

// Appends duels to a comparison log with increasing sequence numbers.
class ComparisonSink {
 public:
  explicit ComparisonSink(std::vector<ComparisonRecord>* log = nullptr,
                          int64_t next_seq = 0)
      : log_(log), next_seq_(next_seq) {}

  void Record(const ItemId& a, const ItemId& b, Outcome outcome,
              const std::string& judge_id);
  int64_t next_seq() const { return next_seq_; }

 private:
  std::vector<ComparisonRecord>* log_;
  int64_t next_seq_;
};

// Rates one item against a frozen library: exactly comparisons_per_item
// duels, only the item's rating moves. The random stream is derived from
// (config.rng_seed, item) so items can be rated in any order.
RatingEstimate RateItem(const ItemId& item, const Library& library,
                        PairwiseJudge& judge, const ScheduleConfig& config,
                        Rating initial = kDefaultAnchorMean,
                        ComparisonSink* sink = nullptr);

// Live estimates for the no-library strategies. Both duel sides update.
class LiveEstimates {
 public:
  void Add(const ItemId& id, Rating initial);
  const RatingPool& pool() const { return pool_; }
  RatingEstimate Get(const ItemId& id) const;
  int DuelsOf(const ItemId& id) const { return duels_.at(id); }

  // Moves `id` alone against a fixed opponent rating; returns the new
  // rating.
  double Update(const ItemId& id, Rating opponent_rating, Outcome outcome,
                const KSchedule& k);

  void ApplyDuel(const ItemId& a, const ItemId& b, Outcome outcome,
                 const KSchedule& k, bool update_b);

 private:
  RatingPool pool_;
  std::unordered_map<ItemId, int> duels_;
};

// Rates one item against other items' live estimates, updating both sides.
// The item must not be in `others`.
RatingEstimate RateItem(const ItemId& item, LiveEstimates& others,
                        PairwiseJudge& judge, const ScheduleConfig& config,
                        Rating initial = kDefaultAnchorMean,
                        ComparisonSink* sink = nullptr);

// Rates a whole group under the configured strategy.
//   *_LIB:    RateItem against `library` for every item (library members
//             among `items` keep their library rating).
//   *_NO_LIB: comparisons_per_item rounds; in each round every item plays
//             exactly one duel against an opponent not yet matched in that
//             round. With an odd count the unmatched item plays the full
//             pool and only its own rating moves.
std::vector<RatingEstimate> RateGroup(std::span<const ItemId> items,
                                      const Library* library,
                                      PairwiseJudge& judge,
                                      const ScheduleConfig& config,
                                      Rating initial = kDefaultAnchorMean,
                                      ComparisonSink* sink = nullptr);

}  // namespace smoothctl

#endif  // SMOOTHCTL_SCHEDULER_H_
