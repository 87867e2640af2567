// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "herocluster/csv.hpp"
#include "herocluster/error.hpp"
#include "herocluster/matrix.hpp"

namespace herocluster {

using Labels = std::vector<std::size_t>;

/// K centroids in z-scored feature space together with the scaling that maps
/// raw feature rows into that space. Immutable once fitted.
struct ClusterModel {
  std::size_t k = 0;
  Matrix centroids;  // k x D, standardized space
  std::vector<double> column_means;
  std::vector<double> column_stds;  // 1 for excluded columns
  std::vector<bool> excluded;       // zero-variance columns, ignored by the distance
  std::vector<std::string> columns;
  std::vector<std::string> fit_patches;
  std::uint64_t seed = 0;
  std::size_t restarts = 0;
  double training_sse = 0.0;

  std::size_t dimension() const noexcept { return column_means.size(); }

  std::vector<std::string> excluded_columns() const {
    std::vector<std::string> out;
    for (std::size_t c = 0; c < excluded.size(); ++c)
      if (excluded[c]) out.push_back(c < columns.size() ? columns[c] : std::to_string(c));
    return out;
  }
};

struct KMeansDefaults {
  static constexpr std::size_t kRestarts = 10;
  static constexpr std::size_t kMaxIterations = 300;
  static constexpr double kTolerance = 1e-6;
};

namespace detail {

inline void require_finite(const Matrix& matrix) {
  for (double v : matrix.data())
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteInput, "feature matrix contains a non-finite value");
}

inline void require_columns(const ClusterModel& model, const Matrix& matrix) {
  if (matrix.cols() != model.dimension())
    fail(ErrorCode::DimensionMismatch,
         "matrix has " + std::to_string(matrix.cols()) + " columns, model expects " +
             std::to_string(model.dimension()));
}

inline std::pair<std::size_t, double> nearest(const Matrix& centroids, std::span<const double> point) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows(); ++c) {
    const double d = squared_distance(point, centroids.row(c));
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return {best, best_d};
}

}  // namespace detail

/// Maps raw rows into the model's standardized space.
inline Matrix standardize(const ClusterModel& model, const Matrix& matrix) {
  detail::require_columns(model, matrix);
  Matrix out(matrix.rows(), matrix.cols());
  for (std::size_t r = 0; r < matrix.rows(); ++r)
    for (std::size_t c = 0; c < matrix.cols(); ++c)
      out(r, c) = model.excluded[c] ? 0.0 : (matrix(r, c) - model.column_means[c]) / model.column_stds[c];
  return out;
}

struct KMeansRun {
  ClusterModel model;
  Labels labels;                 // final nearest-centroid assignment of the fit rows
  std::vector<double> sse_trace;  // SSE after each assignment step of the winning restart
};

namespace detail {

struct LloydResult {
  Matrix centroids;
  Labels labels;
  double sse = 0.0;
  std::vector<double> trace;
};

inline Matrix kmeanspp_init(const Matrix& points, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = points.rows();
  Matrix centroids(k, points.cols());
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  std::size_t pick = first(rng);
  std::copy_n(points.row(pick).begin(), points.cols(), centroids.row(0).begin());
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) dist[i] = squared_distance(points.row(i), centroids.row(0));
  for (std::size_t c = 1; c < k; ++c) {
    std::discrete_distribution<std::size_t> weighted(dist.begin(), dist.end());
    pick = weighted(rng);
    std::copy_n(points.row(pick).begin(), points.cols(), centroids.row(c).begin());
    for (std::size_t i = 0; i < n; ++i)
      dist[i] = std::min(dist[i], squared_distance(points.row(i), centroids.row(c)));
  }
  return centroids;
}

inline double assign_all(const Matrix& points, const Matrix& centroids, Labels& labels) {
  double sse = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    auto [label, d] = nearest(centroids, points.row(i));
    labels[i] = label;
    sse += d;
  }
  return sse;
}

inline LloydResult lloyd(const Matrix& points, Matrix centroids) {
  const std::size_t n = points.rows();
  const std::size_t k = centroids.rows();
  const std::size_t dim = points.cols();
  LloydResult result;
  Labels labels(n);
  for (std::size_t iter = 0; iter < KMeansDefaults::kMaxIterations; ++iter) {
    result.trace.push_back(assign_all(points, centroids, labels));

    // Empty clusters take the point farthest from its centroid, drawn from a
    // cluster that keeps at least one member.
    std::vector<std::size_t> sizes(k, 0);
    for (auto l : labels) ++sizes[l];
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[labels[i]] < 2) continue;
        const double d = squared_distance(points.row(i), centroids.row(labels[i]));
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far == n) break;
      --sizes[labels[far]];
      labels[far] = c;
      sizes[c] = 1;
      std::copy_n(points.row(far).begin(), dim, centroids.row(c).begin());
    }

    Matrix updated(k, dim);
    for (std::size_t i = 0; i < n; ++i) {
      auto dst = updated.row(labels[i]);
      auto src = points.row(i);
      for (std::size_t d = 0; d < dim; ++d) dst[d] += src[d];
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0) {
        std::copy_n(centroids.row(c).begin(), dim, updated.row(c).begin());
        continue;
      }
      for (auto& v : updated.row(c)) v /= static_cast<double>(sizes[c]);
      shift = std::max(shift, std::sqrt(squared_distance(updated.row(c), centroids.row(c))));
    }
    centroids = std::move(updated);
    if (shift < KMeansDefaults::kTolerance) break;
  }
  result.sse = assign_all(points, centroids, labels);
  result.trace.push_back(result.sse);
  result.centroids = std::move(centroids);
  result.labels = std::move(labels);
  return result;
}

inline std::size_t distinct_rows(const Matrix& m) {
  std::set<std::vector<double>> rows;
  for (std::size_t r = 0; r < m.rows(); ++r) rows.emplace(m.row(r).begin(), m.row(r).end());
  return rows.size();
}

}  // namespace detail

/// Lloyd's algorithm from `restarts` k-means++ seedings; the lowest-SSE run
/// wins. Deterministic in (matrix, k, seed, restarts).
inline KMeansRun fit_kmeans_run(const Matrix& matrix, std::size_t k, std::uint64_t seed,
                                std::size_t restarts = KMeansDefaults::kRestarts) {
  if (k == 0) fail(ErrorCode::InvalidArgument, "k must be positive");
  if (restarts == 0) fail(ErrorCode::InvalidArgument, "restarts must be positive");
  if (matrix.rows() < k)
    fail(ErrorCode::TooFewRows, std::to_string(matrix.rows()) + " rows for k=" + std::to_string(k));
  detail::require_finite(matrix);

  const std::size_t n = matrix.rows();
  const std::size_t dim = matrix.cols();
  ClusterModel model;
  model.k = k;
  model.seed = seed;
  model.restarts = restarts;
  model.column_means.assign(dim, 0.0);
  model.column_stds.assign(dim, 1.0);
  model.excluded.assign(dim, false);
  for (std::size_t c = 0; c < dim; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += matrix(r, c);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) var += (matrix(r, c) - mean) * (matrix(r, c) - mean);
    var /= static_cast<double>(n);
    model.column_means[c] = mean;
    if (var <= 1e-24 * std::max(1.0, mean * mean)) {
      model.excluded[c] = true;
    } else {
      model.column_stds[c] = std::sqrt(var);
    }
  }
  const Matrix points = standardize(model, matrix);
  if (detail::distinct_rows(points) < k)
    fail(ErrorCode::TooFewRows, "fewer than k=" + std::to_string(k) + " distinct rows");

  std::mt19937_64 rng(seed);
  std::optional<detail::LloydResult> best;
  for (std::size_t r = 0; r < restarts; ++r) {
    auto run = detail::lloyd(points, detail::kmeanspp_init(points, k, rng));
    if (!best || run.sse < best->sse) best = std::move(run);
  }
  model.centroids = std::move(best->centroids);
  model.training_sse = best->sse;
  return {std::move(model), std::move(best->labels), std::move(best->trace)};
}

inline ClusterModel fit_kmeans(const Matrix& matrix, std::size_t k, std::uint64_t seed,
                               std::size_t restarts = KMeansDefaults::kRestarts) {
  return fit_kmeans_run(matrix, k, seed, restarts).model;
}

/// Labels each raw row with its nearest centroid. Never mutates the model.
inline Labels assign(const ClusterModel& model, const Matrix& matrix) {
  detail::require_finite(matrix);
  const Matrix points = standardize(model, matrix);
  Labels labels(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) labels[i] = detail::nearest(model.centroids, points.row(i)).first;
  return labels;
}

inline double compute_sse(const ClusterModel& model, const Matrix& matrix) {
  const Matrix points = standardize(model, matrix);
  double sse = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) sse += detail::nearest(model.centroids, points.row(i)).second;
  return sse;
}

/// Mean silhouette over all points, Euclidean distance. Points in singleton
/// clusters score 0.
inline double compute_silhouette(const Matrix& matrix, const Labels& labels) {
  if (labels.size() != matrix.rows())
    fail(ErrorCode::DimensionMismatch, "labels and rows differ in length");
  std::map<std::size_t, std::size_t> slot;
  for (auto l : labels) slot.emplace(l, slot.size());
  if (slot.size() < 2) fail(ErrorCode::SingleCluster, "silhouette needs at least two clusters");
  const std::size_t n = matrix.rows();
  const std::size_t clusters = slot.size();
  std::vector<std::size_t> dense(n), sizes(clusters, 0);
  for (std::size_t i = 0; i < n; ++i) {
    dense[i] = slot[labels[i]];
    ++sizes[dense[i]];
  }
  // sums(i, c) = total distance from point i to the members of cluster c
  Matrix sums(n, clusters);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::sqrt(squared_distance(matrix.row(i), matrix.row(j)));
      sums(i, dense[j]) += d;
      sums(j, dense[i]) += d;
    }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t own = dense[i];
    if (sizes[own] < 2) continue;
    const double a = sums(i, own) / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < clusters; ++c)
      if (c != own) b = std::min(b, sums(i, c) / static_cast<double>(sizes[c]));
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

struct KSelectionReport {
  std::map<std::size_t, double> sse_by_k;
  std::map<std::size_t, double> silhouette_by_k;
  std::pair<std::size_t, std::size_t> elbow_range{0, 0};
  std::size_t chosen_k = 0;
};

/// Scans K over [k_min, k_max], scoring SSE and silhouette for each; the
/// chosen K has the highest silhouette (smaller K on ties). `sse_grid` adds
/// SSE-only points for a wider elbow curve.
inline KSelectionReport select_k(const Matrix& matrix, std::size_t k_min, std::size_t k_max, std::uint64_t seed,
                                 std::size_t restarts = KMeansDefaults::kRestarts,
                                 const std::vector<std::size_t>& sse_grid = {}) {
  if (k_min < 2) fail(ErrorCode::InvalidArgument, "k_min must be at least 2 for silhouette scoring");
  if (k_min > k_max) fail(ErrorCode::InvalidArgument, "k_min exceeds k_max");
  if (k_max > matrix.rows())
    fail(ErrorCode::TooFewRows, "k_max=" + std::to_string(k_max) + " exceeds " + std::to_string(matrix.rows()) + " rows");
  KSelectionReport report;
  report.elbow_range = {k_min, k_max};
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = k_min; k <= k_max; ++k) {
    auto run = fit_kmeans_run(matrix, k, seed, restarts);
    report.sse_by_k[k] = run.model.training_sse;
    const Matrix points = standardize(run.model, matrix);
    double score = std::numeric_limits<double>::quiet_NaN();
    if (std::set<std::size_t>(run.labels.begin(), run.labels.end()).size() >= 2)
      score = compute_silhouette(points, run.labels);
    report.silhouette_by_k[k] = score;
    if (score > best) {
      best = score;
      report.chosen_k = k;
    }
  }
  if (report.chosen_k == 0) report.chosen_k = k_min;
  for (auto k : sse_grid) {
    if (report.sse_by_k.count(k) || k == 0 || k > matrix.rows()) continue;
    report.sse_by_k[k] = fit_kmeans_run(matrix, k, seed, restarts).model.training_sse;
  }
  return report;
}

inline void write_selection_report(const KSelectionReport& report, const std::filesystem::path& path) {
  std::vector<csv::Row> rows{{"k", "sse", "silhouette"}};
  for (const auto& [k, sse] : report.sse_by_k) {
    auto sil = report.silhouette_by_k.find(k);
    std::string sil_text;
    if (sil != report.silhouette_by_k.end() && std::isfinite(sil->second)) sil_text = csv::format_number(sil->second);
    rows.push_back({std::to_string(k), csv::format_number(sse), sil_text});
  }
  csv::write(path, rows);
}

// ---------------------------------------------------------------------------
// Drift
// ---------------------------------------------------------------------------

struct DriftReport {
  std::vector<double> reference_histogram;
  std::vector<double> new_histogram;
  double divergence = 0.0;
  double threshold = 0.05;
  bool flagged = false;
};

inline constexpr double kDefaultDriftThreshold = 0.05;

/// Jensen-Shannon divergence (natural log) between add-one-smoothed cluster
/// histograms of two label sets.
inline DriftReport drift_divergence(const Labels& reference, const Labels& fresh, std::size_t k,
                                    double threshold = kDefaultDriftThreshold) {
  if (reference.empty() || fresh.empty()) fail(ErrorCode::EmptyLabelSet, "drift needs non-empty label sets");
  if (k == 0) fail(ErrorCode::InvalidArgument, "k must be positive");
  auto histogram = [k](const Labels& labels) {
    std::vector<double> h(k, 1.0);
    for (auto l : labels) {
      if (l >= k) fail(ErrorCode::LabelOutOfRange, "label " + std::to_string(l) + " outside [0, " + std::to_string(k) + ")");
      h[l] += 1.0;
    }
    const double total = static_cast<double>(labels.size() + k);
    for (auto& v : h) v /= total;
    return h;
  };
  DriftReport report;
  report.reference_histogram = histogram(reference);
  report.new_histogram = histogram(fresh);
  double js = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double p = report.reference_histogram[i];
    const double q = report.new_histogram[i];
    const double m = 0.5 * (p + q);
    js += 0.5 * p * std::log(p / m) + 0.5 * q * std::log(q / m);
  }
  report.divergence = std::max(0.0, js);
  report.threshold = threshold;
  report.flagged = report.divergence > threshold;
  return report;
}

// ---------------------------------------------------------------------------
// Serialization: centroid CSV plus a JSON sidecar at "<path>.meta.json".
// ---------------------------------------------------------------------------

inline std::filesystem::path model_sidecar_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".meta.json");
}

inline void save_model(const ClusterModel& model, const std::filesystem::path& path) {
  if (model.columns.size() != model.dimension())
    fail(ErrorCode::InvalidArgument, "model column names do not match its dimension");
  std::vector<csv::Row> rows;
  rows.push_back(model.columns);
  for (std::size_t c = 0; c < model.k; ++c) {
    csv::Row row;
    for (double v : model.centroids.row(c)) row.push_back(csv::format_number(v));
    rows.push_back(std::move(row));
  }
  csv::write(path, rows);

  nlohmann::ordered_json meta;
  meta["k"] = model.k;
  meta["seed"] = model.seed;
  meta["restarts"] = model.restarts;
  meta["fit_patches"] = model.fit_patches;
  meta["columns"] = model.columns;
  meta["column_means"] = model.column_means;
  meta["column_stds"] = model.column_stds;
  meta["excluded_columns"] = model.excluded_columns();
  meta["training_sse"] = model.training_sse;
  csv::write_file(model_sidecar_path(path), meta.dump(2) + "\n");
}

inline ClusterModel load_model(const std::filesystem::path& path) {
  const auto sidecar = model_sidecar_path(path);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(csv::read_file(sidecar));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MalformedDocument, sidecar.string() + ": " + e.what());
  }
  ClusterModel model;
  try {
    model.k = meta.at("k").get<std::size_t>();
    model.seed = meta.at("seed").get<std::uint64_t>();
    model.restarts = meta.at("restarts").get<std::size_t>();
    model.fit_patches = meta.at("fit_patches").get<std::vector<std::string>>();
    model.columns = meta.at("columns").get<std::vector<std::string>>();
    model.column_means = meta.at("column_means").get<std::vector<double>>();
    model.column_stds = meta.at("column_stds").get<std::vector<double>>();
    model.training_sse = meta.at("training_sse").get<double>();
    const auto excluded = meta.at("excluded_columns").get<std::vector<std::string>>();
    model.excluded.assign(model.columns.size(), false);
    for (const auto& name : excluded) {
      auto it = std::find(model.columns.begin(), model.columns.end(), name);
      if (it == model.columns.end())
        fail(ErrorCode::MalformedDocument, sidecar.string() + ": unknown excluded column '" + name + "'");
      model.excluded[static_cast<std::size_t>(it - model.columns.begin())] = true;
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MalformedDocument, sidecar.string() + ": " + e.what());
  }
  const std::size_t dim = model.columns.size();
  if (model.column_means.size() != dim || model.column_stds.size() != dim)
    fail(ErrorCode::MalformedDocument, sidecar.string() + ": scaling vectors disagree with column count");
  for (double s : model.column_stds)
    if (!(s > 0.0)) fail(ErrorCode::MalformedDocument, sidecar.string() + ": non-positive column std");

  auto rows = csv::read(path);
  if (rows.empty() || rows[0] != model.columns)
    fail(ErrorCode::SchemaMismatch, path.string() + ": centroid header disagrees with sidecar columns");
  if (rows.size() != model.k + 1)
    fail(ErrorCode::MalformedDocument, path.string() + ": expected " + std::to_string(model.k) + " centroids");
  model.centroids = Matrix(model.k, dim);
  for (std::size_t c = 0; c < model.k; ++c) {
    if (rows[c + 1].size() != dim) fail(ErrorCode::MalformedDocument, path.string() + ": ragged centroid row");
    for (std::size_t d = 0; d < dim; ++d)
      if (!csv::parse_number(rows[c + 1][d], model.centroids(c, d)))
        fail(ErrorCode::MalformedDocument, path.string() + ": non-numeric centroid value");
  }
  return model;
}

}  // namespace herocluster
