// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "herocluster/error.hpp"

namespace herocluster {

/// Kill counts (or predictions of them) for Radiant and Dire.
struct KillPair {
  double radiant = 0.0;
  double dire = 0.0;

  friend bool operator==(const KillPair&, const KillPair&) = default;
};

struct AucResult {
  double auc = 0.5;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t excluded_ties = 0;  // matches whose actual kills were level
};

/// Area under the ROC curve for "Radiant out-kills Dire", scored by the
/// predicted kill difference. Matches with level actual kills are excluded;
/// tied scores count one half (Mann-Whitney with mid-ranks).
inline AucResult auc_kill_race_detailed(std::span<const KillPair> predictions, std::span<const KillPair> actuals) {
  if (predictions.size() != actuals.size())
    fail(ErrorCode::DimensionMismatch, "predictions and actuals differ in length");
  if (predictions.empty()) fail(ErrorCode::DegenerateLabels, "no matches to score");
  struct Scored {
    double score;
    bool positive;
  };
  std::vector<Scored> scored;
  scored.reserve(predictions.size());
  AucResult result;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (actuals[i].radiant == actuals[i].dire) {
      ++result.excluded_ties;
      continue;
    }
    const bool positive = actuals[i].radiant > actuals[i].dire;
    scored.push_back({predictions[i].radiant - predictions[i].dire, positive});
    positive ? ++result.positives : ++result.negatives;
  }
  if (result.positives == 0 || result.negatives == 0)
    fail(ErrorCode::DegenerateLabels, "kill-race labels are all one class after excluding level matches");
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) { return a.score < b.score; });
  double positive_rank_sum = 0.0;
  for (std::size_t i = 0; i < scored.size();) {
    std::size_t j = i;
    while (j < scored.size() && scored[j].score == scored[i].score) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1..j
    for (std::size_t t = i; t < j; ++t)
      if (scored[t].positive) positive_rank_sum += mid_rank;
    i = j;
  }
  const double p = static_cast<double>(result.positives);
  const double n = static_cast<double>(result.negatives);
  result.auc = (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
  return result;
}

inline double auc_kill_race(std::span<const KillPair> predictions, std::span<const KillPair> actuals) {
  return auc_kill_race_detailed(predictions, actuals).auc;
}

/// Nearest integer with halves rounded up (19.5 -> 20).
inline double round_half_up(double x) { return std::floor(x + 0.5); }

struct TieRate {
  std::size_t count = 0;
  double fraction = 0.0;
};

/// Matches whose rounded predictions give both teams the same kill count.
inline TieRate tie_rate(std::span<const KillPair> predictions) {
  if (predictions.empty()) fail(ErrorCode::InvalidArgument, "no predictions");
  TieRate out;
  for (const auto& p : predictions)
    if (round_half_up(p.radiant) == round_half_up(p.dire)) ++out.count;
  out.fraction = static_cast<double>(out.count) / static_cast<double>(predictions.size());
  return out;
}

}  // namespace herocluster
