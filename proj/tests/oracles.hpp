// SPDX-License-Identifier: Apache-2.0
// Independent reference implementations used to check the library. Nothing
// here calls into the code under test except for plain data types.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

using Rows = std::vector<std::vector<double>>;

// Per-column z-scoring with population variance; constant columns map to 0.
inline Rows zscore(const Rows& x) {
  if (x.empty()) return x;
  const std::size_t n = x.size(), d = x[0].size();
  Rows out(n, std::vector<double>(d));
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0;
    for (const auto& r : x) mean += r[c];
    mean /= n;
    double var = 0;
    for (const auto& r : x) var += (r[c] - mean) * (r[c] - mean);
    var /= n;
    const double sd = var > 0 ? std::sqrt(var) : 1.0;
    for (std::size_t i = 0; i < n; ++i) out[i][c] = (x[i][c] - mean) / sd;
  }
  return out;
}

// Sum of squared distances to cluster means, for one labelling.
inline double partition_sse(const Rows& x, const std::vector<std::size_t>& labels, std::size_t k) {
  const std::size_t d = x[0].size();
  std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
  std::vector<double> counts(k, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    counts[labels[i]] += 1;
    for (std::size_t c = 0; c < d; ++c) sums[labels[i]][c] += x[i][c];
  }
  double sse = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t c = 0; c < d; ++c) {
      const double m = sums[labels[i]][c] / counts[labels[i]];
      sse += (x[i][c] - m) * (x[i][c] - m);
    }
  return sse;
}

// Minimum SSE over every assignment of n points to k labels (k^n of them).
inline double exhaustive_min_sse(const Rows& x, std::size_t k) {
  const std::size_t n = x.size();
  std::vector<std::size_t> labels(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    best = std::min(best, partition_sse(x, labels, k));
    std::size_t i = 0;
    while (i < n && ++labels[i] == k) labels[i++] = 0;
    if (i == n) break;
  }
  return best;
}

inline double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Textbook silhouette, every distance recomputed on demand.
inline double silhouette(const Rows& x, const std::vector<std::size_t>& labels) {
  const std::size_t n = x.size();
  std::size_t k = 0;
  for (auto l : labels) k = std::max(k, l + 1);
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> sum(k, 0.0), cnt(k, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sum[labels[j]] += euclid(x[i], x[j]);
      cnt[labels[j]] += 1;
    }
    if (cnt[labels[i]] == 0) continue;  // singleton
    const double a = sum[labels[i]] / cnt[labels[i]];
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c)
      if (c != labels[i] && cnt[c] > 0) b = std::min(b, sum[c] / cnt[c]);
    const double m = std::max(a, b);
    if (m > 0) total += (b - a) / m;
  }
  return total / n;
}

// AUC as the fraction of (positive, negative) pairs ordered correctly; ties 1/2.
inline double pairwise_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!positive[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (positive[j]) continue;
      pairs += 1;
      wins += scores[i] > scores[j] ? 1.0 : (scores[i] == scores[j] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

// Central difference of f around *param.
inline double central_difference(double* param, double h, const std::function<double()>& f) {
  const double saved = *param;
  *param = saved + h;
  const double up = f();
  *param = saved - h;
  const double down = f();
  *param = saved;
  return (up - down) / (2 * h);
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace oracle
