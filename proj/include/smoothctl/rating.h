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

// Elo mathematics on the base-10 / 400-point logistic scale, batch
// Bradley-Terry fitting and rating binning.
//
// A rating difference d maps to a preference probability
//
//   P(a preferred over b) = 1 / (1 + 10^((r_b - r_a) / 400)),
//
// so that a 100 point gap corresponds to a preference of ~0.64.

#ifndef SMOOTHCTL_RATING_H_
#define SMOOTHCTL_RATING_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smoothctl/error.h"

namespace smoothctl {

using ItemId = std::string;

// Elo points. No floor or ceiling is imposed.
using Rating = double;

inline constexpr double kEloScale = 400.0;
inline constexpr Rating kDefaultAnchorMean = 1500.0;

enum class Outcome { kAWins, kBWins, kTie };

// Score of side A for a given outcome: 1, 0 or 0.5.
double ScoreForA(Outcome outcome);

// The same duel seen from B's side.
Outcome Mirror(Outcome outcome);

// "A", "B" or "TIE"; the comparison-log spelling.
std::string_view OutcomeName(Outcome outcome);
Outcome ParseOutcome(std::string_view name);

// One judged duel.
struct ComparisonRecord {
  ItemId item_a;
  ItemId item_b;
  Outcome outcome = Outcome::kTie;
  std::string judge_id;
  int64_t sequence_no = 0;

  friend bool operator==(const ComparisonRecord&,
                         const ComparisonRecord&) = default;
};

// Probability that A is preferred over B. Throws on non-finite input.
double ExpectedScore(Rating r_a, Rating r_b);

// Standard sequential update r' = r + k (S - E). Zero-sum for a shared k.
std::pair<Rating, Rating> EloUpdate(Rating r_a, Rating r_b, Outcome outcome,
                                    double k);

// The change k (S - E) applied to side A alone.
double EloDelta(Rating r_a, Rating r_b, Outcome outcome, double k);

struct BradleyTerryOptions {
  Rating anchor_mean = kDefaultAnchorMean;
  // Sweep stops once no rating moves by more than this many points.
  double tolerance = 1e-6;
  int max_iterations = 200000;
  // Pseudo-wins added to both directions of every observed pair when the
  // maximum-likelihood estimate would otherwise diverge.
  double pseudo_wins = 0.5;
};

struct BradleyTerryFit {
  std::map<ItemId, Rating> ratings;
  int iterations = 0;
  bool regularized = false;
};

// Raised when the comparison graph is not connected. components() lists the
// item ids of each connected component.
class EstimationError : public Error {
 public:
  EstimationError(const std::string& message,
                  std::vector<std::vector<ItemId>> components)
      : Error(ErrorKind::kEstimation, message),
        components_(std::move(components)) {}

  const std::vector<std::vector<ItemId>>& components() const {
    return components_;
  }

 private:
  std::vector<std::vector<ItemId>> components_;
};

// Maximum-likelihood Bradley-Terry ratings on the Elo scale, via
// minorization-maximization. Ties count as half a win for each side. The
// mean of the returned ratings equals options.anchor_mean.
BradleyTerryFit FitBradleyTerry(std::span<const ComparisonRecord> records,
                                const BradleyTerryOptions& options = {});

struct RatedItem {
  ItemId id;
  Rating rating = 0.0;
};

struct RatingBin {
  int bin_index = 0;
  double width = 0.0;
  std::vector<ItemId> members;
  Rating mean_rating = 0.0;
};

// Partitions items into bins [origin + i*width, origin + (i+1)*width).
// The origin defaults to the smallest rating. Empty bins are omitted.
std::vector<RatingBin> BinByRating(std::span<const RatedItem> items,
                                   double width,
                                   std::optional<Rating> origin = std::nullopt);

}  // namespace smoothctl

#endif  // SMOOTHCTL_RATING_H_
