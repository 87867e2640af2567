// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "herocluster/csv.hpp"
#include "herocluster/features.hpp"
#include "herocluster/match_data.hpp"
#include "herocluster/metrics.hpp"

namespace herocluster {

struct DatasetEval {
  std::string dataset;
  std::optional<double> auc;  // empty when the set has no usable kill-race labels
  double mse = 0.0;           // in kills, both teams
  std::size_t tie_count = 0;
  double tie_fraction = 0.0;
  std::size_t n_matches = 0;
  std::size_t excluded_tied_actuals = 0;
};

struct EvalReport {
  Variant variant = Variant::NN1;
  std::vector<DatasetEval> datasets;
};

struct Predictions {
  std::vector<KillPair> predicted;
  std::vector<KillPair> actual;
};

inline Predictions predict_records(const TrainedModel& model, const std::vector<MatchRecord>& records,
                                   const FeatureContext& context = {}) {
  Predictions out;
  out.predicted.reserve(records.size());
  out.actual.reserve(records.size());
  for (const auto& m : records) {
    out.predicted.push_back(predict_kills(model.network, model.spec, build_features(model.spec, m, context)));
    out.actual.push_back({static_cast<double>(m.kills_radiant), static_cast<double>(m.kills_dire)});
  }
  return out;
}

inline DatasetEval evaluate_records(const TrainedModel& model, const std::string& name,
                                    const std::vector<MatchRecord>& records, const FeatureContext& context = {}) {
  DatasetEval eval;
  eval.dataset = name;
  eval.n_matches = records.size();
  if (records.empty()) return eval;
  const auto p = predict_records(model, records, context);
  double sq = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double dr = p.predicted[i].radiant - p.actual[i].radiant;
    const double dd = p.predicted[i].dire - p.actual[i].dire;
    sq += 0.5 * (dr * dr + dd * dd);
  }
  eval.mse = sq / static_cast<double>(records.size());
  const auto ties = tie_rate(p.predicted);
  eval.tie_count = ties.count;
  eval.tie_fraction = ties.fraction;
  for (const auto& a : p.actual)
    if (a.radiant == a.dire) ++eval.excluded_tied_actuals;
  try {
    eval.auc = auc_kill_race(p.predicted, p.actual);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateLabels) throw;
  }
  return eval;
}

inline const std::vector<std::string>& report_dataset_names() {
  static const std::vector<std::string> names = {"test", "test732", "test733"};
  return names;
}

inline EvalReport evaluate_model(const TrainedModel& model, const DatasetSplit& split, const FeatureContext& context = {}) {
  EvalReport report;
  report.variant = model.spec.variant;
  report.datasets.push_back(evaluate_records(model, "test", split.test, context));
  report.datasets.push_back(evaluate_records(model, "test732", split.holdout_732, context));
  report.datasets.push_back(evaluate_records(model, "test733", split.holdout_733, context));
  return report;
}

inline std::string format_optional(const std::optional<double>& v) {
  return v ? csv::format_number(*v) : std::string();
}

inline void write_curves(const TrainHistory& history, const std::filesystem::path& path) {
  std::vector<csv::Row> rows{{"epoch", "train_loss", "val_loss", "train_auc", "val_auc"}};
  for (std::size_t e = 0; e < history.train_loss.size(); ++e)
    rows.push_back({std::to_string(e + 1), csv::format_number(history.train_loss[e]),
                    csv::format_number(history.validation_loss[e]), format_optional(history.train_auc[e]),
                    format_optional(history.validation_auc[e])});
  csv::write(path, rows);
}

inline void write_auc_table(const std::vector<EvalReport>& reports, const std::filesystem::path& path) {
  std::vector<csv::Row> rows{{"model", "test_auc", "test732_auc", "test733_auc"}};
  for (const auto& r : reports) {
    csv::Row row{to_string(r.variant)};
    for (auto& c : row[0]) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (const auto& name : report_dataset_names()) {
      auto it = std::find_if(r.datasets.begin(), r.datasets.end(), [&](const DatasetEval& d) { return d.dataset == name; });
      row.push_back(it == r.datasets.end() ? std::string() : format_optional(it->auc));
    }
    rows.push_back(std::move(row));
  }
  csv::write(path, rows);
}

inline void write_tie_table(const std::vector<EvalReport>& reports, const std::filesystem::path& path) {
  std::vector<csv::Row> rows{
      {"model", "dataset", "n_matches", "tie_count", "tie_fraction", "excluded_tied_actuals", "mse", "auc"}};
  for (const auto& r : reports)
    for (const auto& d : r.datasets)
      rows.push_back({to_string(r.variant), d.dataset, std::to_string(d.n_matches), std::to_string(d.tie_count),
                      csv::format_number(d.tie_fraction), std::to_string(d.excluded_tied_actuals),
                      csv::format_number(d.mse), format_optional(d.auc)});
  csv::write(path, rows);
}

struct ReportInput {
  TrainedModel model;
  TrainHistory history;
};

/// Evaluates every model on the same split and writes auc_table.csv,
/// ties.csv and curves_<variant>.csv under `out_dir`.
inline std::vector<EvalReport> build_report(const std::vector<ReportInput>& models, const DatasetSplit& split,
                                            const FeatureContext& context, const std::filesystem::path& out_dir) {
  std::vector<EvalReport> reports;
  for (const auto& m : models) {
    reports.push_back(evaluate_model(m.model, split, context));
    if (!m.history.train_loss.empty())
      write_curves(m.history, out_dir / ("curves_" + to_string(m.model.spec.variant) + ".csv"));
  }
  write_auc_table(reports, out_dir / "auc_table.csv");
  write_tie_table(reports, out_dir / "ties.csv");
  return reports;
}

}  // namespace herocluster
