// SPDX-License-Identifier: Apache-2.0
//
// herocluster: command-line driver for the ingest -> cluster -> encode ->
// train -> eval pipeline. Every run writes manifest.json next to its outputs.
//
// Exit codes: 0 success, 2 usage, 3 data error, 4 network.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "herocluster/herocluster.hpp"
#include "herocluster/manifest.hpp"

namespace fs = std::filesystem;
using namespace herocluster;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNetwork = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "7.27-7.31" expands over the minor number; commas separate items.
std::vector<std::string> expand_patches(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream items(text);
  for (std::string item; std::getline(items, item, ',');) {
    if (item.empty()) continue;
    auto dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(item);
      continue;
    }
    const std::string lo = item.substr(0, dash), hi = item.substr(dash + 1);
    const auto dot_lo = lo.find('.'), dot_hi = hi.find('.');
    std::int64_t a = 0, b = 0;
    if (dot_lo == std::string::npos || dot_hi == std::string::npos || lo.substr(0, dot_lo) != hi.substr(0, dot_hi) ||
        !csv::parse_integer(lo.substr(dot_lo + 1), a) || !csv::parse_integer(hi.substr(dot_hi + 1), b) || a > b)
      throw UsageError("bad patch range '" + item + "'");
    const std::size_t width = lo.size() - dot_lo - 1;
    for (auto m = a; m <= b; ++m) {
      std::string minor = std::to_string(m);
      if (minor.size() < width) minor.insert(0, width - minor.size(), '0');
      out.push_back(lo.substr(0, dot_lo + 1) + minor);
    }
  }
  if (out.empty()) throw UsageError("empty patch list");
  return out;
}

std::string join(const std::vector<std::string>& items, const char* sep = ",") {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : sep) + s;
  return out;
}

void print_warnings(const Warnings& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

// Every option of the subcommand, given or defaulted.
void record_flags(const CLI::App& sub, RunManifest& manifest) {
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string key = opt->get_lnames().front();
    if (key == "help" || key == "config") continue;
    std::string value;
    if (opt->count() > 0) {
      value = join(opt->results());
      if (opt->get_type_size() == 0 && value.empty()) value = "true";
    } else {
      value = opt->get_default_str();
    }
    manifest.flags[key] = value;
  }
}

fs::path features_file(const fs::path& dir, const std::string& patch) { return dir / ("features_" + patch + ".csv"); }

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string constants, patches, aliases = "data/alias_map.csv";
};

void run_ingest(const IngestArgs& a, const fs::path& out, RunManifest& manifest) {
  const auto aliases = AliasMap::load(a.aliases);
  manifest.add_input(a.aliases);
  std::map<int, std::string> ids;
  for (const auto& patch : expand_patches(a.patches)) {
    const fs::path dir = fs::path(a.constants) / patch;
    const fs::path files[] = {dir / "hero_abilities.json", dir / "abilities.json", dir / "heroes.json"};
    Warnings warnings;
    auto constants = parse_patch_constants(files[0], files[1], files[2], patch, &warnings);
    for (const auto& f : files) manifest.add_input(f);
    auto table = attach_hero_attributes(normalize_properties(constants.abilities, aliases, &warnings), constants.heroes);
    print_warnings(warnings);
    persist_feature_table(table, features_file(out, patch));
    manifest.add_output(features_file(out, patch));
    for (const auto& h : constants.heroes) ids[h.id] = h.character;
    std::cout << patch << ": " << table.rows.size() << " abilities, " << table.columns.size() << " columns\n";
  }
  persist_hero_ids(ids, out / "hero_ids.csv");
  manifest.add_output(out / "hero_ids.csv");
}

// ---------------------------------------------------------------------------

struct ClusterArgs {
  std::string features, patches = "7.27-7.31";
  std::size_t k_min = 40, k_max = 75, restarts = KMeansDefaults::kRestarts, k = 0;
  std::uint64_t seed = 7;
};

void run_cluster(const ClusterArgs& a, const fs::path& out, RunManifest& manifest) {
  const auto patches = expand_patches(a.patches);
  std::vector<StandardizedAbilityTable> tables;
  for (const auto& patch : patches) {
    tables.push_back(load_feature_table(features_file(a.features, patch)));
    manifest.add_input(features_file(a.features, patch));
  }
  const auto columns = union_columns(tables);
  Matrix matrix(0, columns.size());
  for (const auto& t : tables) {
    auto projected = project(t, columns);
    for (std::size_t r = 0; r < projected.matrix.rows(); ++r) matrix.append_row(projected.matrix.row(r));
  }
  manifest.seeds["seed"] = a.seed;

  std::size_t k = a.k;
  if (k == 0) {
    auto report = select_k(matrix, a.k_min, a.k_max, a.seed, a.restarts);
    write_selection_report(report, out / "selection.csv");
    manifest.add_output(out / "selection.csv");
    k = report.chosen_k;
  }
  auto model = fit_kmeans(matrix, k, a.seed, a.restarts);
  model.columns = columns;
  model.fit_patches = patches;
  save_model(model, out / "model.csv");
  manifest.add_output(out / "model.csv");
  manifest.add_output(model_sidecar_path(out / "model.csv"));
  std::cout << "rows " << matrix.rows() << ", columns " << columns.size() << ", chosen k " << k << ", sse "
            << model.training_sse << "\n";
  if (!model.excluded_columns().empty())
    std::cerr << "note: " << model.excluded_columns().size() << " zero-variance columns excluded from distance\n";
}

// ---------------------------------------------------------------------------

struct EncodeArgs {
  std::string model, features, patches, patch;
  bool strict = false;
};

void run_encode(const EncodeArgs& a, const fs::path& out, RunManifest& manifest) {
  const auto model = load_model(a.model);
  manifest.add_input(a.model);
  manifest.add_input(model_sidecar_path(a.model));
  std::vector<std::string> patches;
  if (!a.patches.empty()) patches = expand_patches(a.patches);
  if (!a.patch.empty()) patches.push_back(a.patch);
  if (patches.empty()) throw UsageError("encode needs --patch or --patches");

  std::vector<CharacterVector> characters;
  std::vector<AbilityLabel> labels;
  for (const auto& patch : patches) {
    const auto table = load_feature_table(features_file(a.features, patch));
    manifest.add_input(features_file(a.features, patch));
    auto encoded = encode_patch(model, table, a.strict);
    for (const auto& c : encoded.dropped_columns)
      std::cerr << "warning: " << patch << ": column '" << c << "' unseen at fit time, ignored\n";
    characters.insert(characters.end(), encoded.characters.begin(), encoded.characters.end());
    labels.insert(labels.end(), encoded.labels.begin(), encoded.labels.end());
    std::cout << patch << ": " << encoded.characters.size() << " characters, vector length " << model.k << "\n";
  }
  write_character_vectors(characters, model.k, out / "characters.csv");
  write_ability_labels(labels, out / "ability_labels.csv");
  manifest.add_output(out / "characters.csv");
  manifest.add_output(out / "ability_labels.csv");
}

// ---------------------------------------------------------------------------

struct FetchArgs {
  std::string patches = "7.27-7.33", base_url = "https://api.opendota.com", api_key;
  double rate_limit = 1.0;
  std::size_t page_size = 1000, max_retries = 5, backoff_ms = 1000, timeout_s = 60;
};

void run_fetch(const FetchArgs& a, const fs::path& out, RunManifest& manifest) {
  opendota::FetchOptions options;
  options.base_url = a.base_url;
  if (!a.api_key.empty()) options.api_key = a.api_key;
  options.page_size = a.page_size;
  options.max_retries = a.max_retries;
  options.initial_backoff = std::chrono::milliseconds(a.backoff_ms);
  options.rate_limit = a.rate_limit;
  options.timeout = std::chrono::seconds(a.timeout_s);
  manifest.flags.erase("api-key");  // never persist credentials
  Warnings warnings;
  auto records = opendota::fetch_matches(options, expand_patches(a.patches), &warnings);
  print_warnings(warnings);
  const auto valid = filter_valid(records);
  if (valid.size() != records.size())
    std::cerr << "warning: " << records.size() - valid.size() << " invalid or duplicate matches removed\n";
  write_matches(valid, out / "matches.csv");
  manifest.add_output(out / "matches.csv");
  std::cout << valid.size() << " matches\n";
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  SyntheticConfig config;
};

void run_synth(const SynthArgs& a, const fs::path& out, RunManifest& manifest) {
  manifest.seeds["seed"] = a.config.seed;
  const auto corpus = generate_synthetic(a.config);
  write_matches(corpus.records, out / "matches.csv");
  write_character_vectors(corpus.characters.all(), corpus.config.k, out / "characters.csv");
  persist_hero_ids(corpus.hero_names, out / "hero_ids.csv");
  std::vector<csv::Row> coef{{"cluster", "coefficient"}};
  for (std::size_t i = 0; i < corpus.config.coefficients.size(); ++i)
    coef.push_back({std::to_string(i), csv::format_number(corpus.config.coefficients[i])});
  csv::write(out / "coefficients.csv", coef);
  for (const char* name : {"matches.csv", "characters.csv", "hero_ids.csv", "coefficients.csv"})
    manifest.add_output(out / name);
  std::cout << corpus.records.size() << " matches, new character id " << corpus.new_character_id << "\n";
}

// ---------------------------------------------------------------------------

struct ModelInputs {
  std::string matches, characters, hero_ids;
  std::uint64_t split_seed = 7;
};

struct LoadedInputs {
  DatasetSplit split;
  std::optional<CharacterTable> characters;
  std::optional<std::map<int, std::string>> hero_names;

  FeatureContext context() const {
    return {characters ? &*characters : nullptr, hero_names ? &*hero_names : nullptr};
  }
};

LoadedInputs load_inputs(const ModelInputs& in, std::uint64_t split_seed, bool need_lineups, RunManifest& manifest) {
  LoadedInputs out;
  auto records = read_matches(in.matches);
  manifest.add_input(in.matches);
  const auto valid = filter_valid(records);
  if (valid.size() != records.size())
    std::cerr << "warning: " << records.size() - valid.size() << " invalid or duplicate matches removed\n";
  out.split = split_dataset(valid, split_seed);
  if (need_lineups) {
    if (in.characters.empty() || in.hero_ids.empty())
      throw UsageError("nn3 needs --characters and --hero-ids");
    out.characters = load_character_vectors(in.characters);
    out.hero_names = load_hero_ids(in.hero_ids);
    manifest.add_input(in.characters);
    manifest.add_input(in.hero_ids);
  }
  return out;
}

struct TrainArgs {
  ModelInputs inputs;
  std::string variant;
  std::uint64_t init_seed = 7, train_seed = 7;
  std::size_t epochs = 100, width_divisor = 1;
  std::optional<int> max_id;
  int extra_ids = 0;
  double learning_rate = 1e-4;
};

void run_train(const TrainArgs& a, const fs::path& out, RunManifest& manifest) {
  auto variant = parse_variant(a.variant);
  if (!variant) throw UsageError("unknown variant '" + a.variant + "'");
  const auto inputs = load_inputs(a.inputs, a.inputs.split_seed, *variant == Variant::NN3, manifest);
  manifest.seeds = {{"split_seed", a.inputs.split_seed}, {"init_seed", a.init_seed}, {"train_seed", a.train_seed}};

  VariantOptions options;
  options.variant = *variant;
  options.init_seed = a.init_seed;
  options.train_seed = a.train_seed;
  options.split_seed = a.inputs.split_seed;
  options.epochs = a.epochs;
  options.hidden = a.width_divisor == 1 ? default_hidden_widths() : scaled_hidden_widths(a.width_divisor);
  options.adam.learning_rate = a.learning_rate;
  options.max_id = a.max_id;
  options.extra_ids = a.extra_ids;
  if (inputs.characters) options.k = inputs.characters->k();

  std::cout << "train " << inputs.split.train.size() << ", validation " << inputs.split.validation.size() << ", test "
            << inputs.split.test.size() << ", 7.32 " << inputs.split.holdout_732.size() << ", 7.33 "
            << inputs.split.holdout_733.size() << "\n";
  auto trained = train_variant(inputs.split, inputs.context(), options, [&](std::size_t epoch, const TrainHistory& h) {
    if ((epoch + 1) % 10 == 0 || epoch == 0)
      std::cerr << "epoch " << epoch + 1 << " train_loss " << h.train_loss.back() << " val_loss "
                << h.validation_loss.back() << "\n";
  });
  const std::string name = to_string(*variant);
  save_trained_model(trained.model, out / ("model_" + name + ".txt"));
  write_curves(trained.history, out / ("curves_" + name + ".csv"));
  manifest.add_output(out / ("model_" + name + ".txt"));
  manifest.add_output(out / ("curves_" + name + ".csv"));
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  ModelInputs inputs;
  std::vector<std::string> models;
};

void run_eval(const EvalArgs& a, const fs::path& out, RunManifest& manifest) {
  std::vector<ReportInput> models;
  bool need_lineups = false;
  for (const auto& path : a.models) {
    models.push_back({load_trained_model(path), {}});
    manifest.add_input(path);
    need_lineups = need_lineups || models.back().model.spec.variant == Variant::NN3;
  }
  const std::uint64_t split_seed = models.front().model.split_seed;
  for (const auto& m : models)
    if (m.model.split_seed != split_seed)
      fail(ErrorCode::InvalidArgument, "models were trained on different splits");
  manifest.seeds["split_seed"] = split_seed;
  const auto inputs = load_inputs(a.inputs, split_seed, need_lineups, manifest);
  auto reports = build_report(models, inputs.split, inputs.context(), out);
  manifest.add_output(out / "auc_table.csv");
  manifest.add_output(out / "ties.csv");
  for (const auto& r : reports)
    for (const auto& d : r.datasets)
      std::cout << to_string(r.variant) << " " << d.dataset << " auc "
                << (d.auc ? csv::format_number(*d.auc) : std::string("n/a")) << " ties " << d.tie_fraction << "\n";
}

// ---------------------------------------------------------------------------

struct DriftArgs {
  std::string labels, reference = "7.27-7.31", patch, model;
  std::size_t k = 0;
  double threshold = kDefaultDriftThreshold;
};

void run_drift(const DriftArgs& a, const fs::path& out, RunManifest& manifest) {
  const auto labels = load_ability_labels(a.labels);
  manifest.add_input(a.labels);
  std::size_t k = a.k;
  if (!a.model.empty()) {
    k = load_model(a.model).k;
    manifest.add_input(a.model);
    manifest.add_input(model_sidecar_path(a.model));
  }
  if (k == 0) throw UsageError("drift needs --k or --model");
  const auto reference_patches = expand_patches(a.reference);
  Labels reference, fresh;
  for (const auto& l : labels) {
    if (std::find(reference_patches.begin(), reference_patches.end(), l.patch) != reference_patches.end())
      reference.push_back(l.label);
    if (l.patch == a.patch) fresh.push_back(l.label);
  }
  const auto report = drift_divergence(reference, fresh, k, a.threshold);
  nlohmann::ordered_json json;
  json["reference_patches"] = reference_patches;
  json["patch"] = a.patch;
  json["k"] = k;
  json["reference_histogram"] = report.reference_histogram;
  json["new_histogram"] = report.new_histogram;
  json["divergence"] = report.divergence;
  json["threshold"] = report.threshold;
  json["flagged"] = report.flagged;
  csv::write_file(out / "drift.json", json.dump(2) + "\n");
  manifest.add_output(out / "drift.json");
  std::cout << "js divergence " << report.divergence << (report.flagged ? " (flagged)" : "") << "\n";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NetworkError:
    case ErrorCode::RateLimited:
    case ErrorCode::MalformedResponse:
      return kExitNetwork;
    default:
      return kExitData;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patch-aware cluster encoding of characters and lineups"};
  app.set_config("--config", "", "key=value configuration file; flags on the command line take precedence");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_dir;
  app.add_option("--out", out_dir, "Output directory")->required();

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Constants files to feature CSVs");
  ingest_cmd->add_option("--constants", ingest.constants, "Directory with one constants folder per patch")->required();
  ingest_cmd->add_option("--patches", ingest.patches, "Patches, e.g. 7.27-7.33")->required();
  ingest_cmd->add_option("--aliases", ingest.aliases, "Alias map CSV");

  ClusterArgs cluster;
  auto* cluster_cmd = app.add_subcommand("cluster", "Fit K-Means and select K");
  cluster_cmd->add_option("--features", cluster.features, "Directory of feature CSVs from ingest")->required();
  cluster_cmd->add_option("--patches", cluster.patches, "Patches to fit on");
  cluster_cmd->add_option("--k-min", cluster.k_min)->check(CLI::PositiveNumber);
  cluster_cmd->add_option("--k-max", cluster.k_max)->check(CLI::PositiveNumber);
  cluster_cmd->add_option("--k", cluster.k, "Fixed K; skips the scan");
  cluster_cmd->add_option("--restarts", cluster.restarts)->check(CLI::PositiveNumber);
  cluster_cmd->add_option("--seed", cluster.seed);

  EncodeArgs encode;
  auto* encode_cmd = app.add_subcommand("encode", "Label abilities with a frozen model, emit character vectors");
  encode_cmd->add_option("--model", encode.model, "Centroid CSV from cluster")->required();
  encode_cmd->add_option("--features", encode.features, "Directory of feature CSVs")->required();
  encode_cmd->add_option("--patches", encode.patches);
  encode_cmd->add_option("--patch", encode.patch);
  encode_cmd->add_flag("--strict", encode.strict, "Fail on feature columns unseen at fit time");

  FetchArgs fetch;
  auto* fetch_cmd = app.add_subcommand("fetch", "Download matches through the explorer endpoint");
  fetch_cmd->add_option("--patches", fetch.patches);
  fetch_cmd->add_option("--base-url", fetch.base_url);
  fetch_cmd->add_option("--api-key", fetch.api_key);
  fetch_cmd->add_option("--rate-limit", fetch.rate_limit, "Requests per second")->check(CLI::NonNegativeNumber);
  fetch_cmd->add_option("--page-size", fetch.page_size)->check(CLI::PositiveNumber);
  fetch_cmd->add_option("--max-retries", fetch.max_retries);
  fetch_cmd->add_option("--backoff-ms", fetch.backoff_ms);
  fetch_cmd->add_option("--timeout", fetch.timeout_s)->check(CLI::PositiveNumber);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic match corpus");
  synth_cmd->add_option("--matches", synth.config.n_matches, "Matches across the fit-era patches");
  synth_cmd->add_option("--holdout-matches", synth.config.holdout_matches, "Matches per holdout patch");
  synth_cmd->add_option("--characters", synth.config.n_characters);
  synth_cmd->add_option("--k", synth.config.k)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--noise", synth.config.noise_std);
  synth_cmd->add_option("--signal", synth.config.signal);
  synth_cmd->add_option("--rework", synth.config.rework_probability);
  synth_cmd->add_option("--seed", synth.config.seed);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train one network variant");
  train_cmd->add_option("--variant", train_args.variant, "nn1, nn2 or nn3")->required();
  train_cmd->add_option("--matches", train_args.inputs.matches, "Match CSV")->required();
  train_cmd->add_option("--characters", train_args.inputs.characters, "Character vectors CSV (nn3)");
  train_cmd->add_option("--hero-ids", train_args.inputs.hero_ids, "id,character CSV (nn3)");
  train_cmd->add_option("--seed", train_args.inputs.split_seed, "Split seed");
  train_cmd->add_option("--init-seed", train_args.init_seed);
  train_cmd->add_option("--train-seed", train_args.train_seed);
  train_cmd->add_option("--epochs", train_args.epochs)->check(CLI::PositiveNumber);
  train_cmd->add_option("--width-divisor", train_args.width_divisor, "Shrink hidden widths for fast profiles")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--max-id", train_args.max_id, "Character id space for nn2");
  train_cmd->add_option("--extra-ids", train_args.extra_ids, "Widen the derived nn2 id space")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--lr", train_args.learning_rate)->check(CLI::PositiveNumber);

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "AUC and tie tables for trained models");
  eval_cmd->add_option("--models", eval_args.models, "Model files from train")->required();
  eval_cmd->add_option("--matches", eval_args.inputs.matches, "Match CSV")->required();
  eval_cmd->add_option("--characters", eval_args.inputs.characters);
  eval_cmd->add_option("--hero-ids", eval_args.inputs.hero_ids);

  DriftArgs drift;
  auto* drift_cmd = app.add_subcommand("drift", "Cluster-histogram drift between patches");
  drift_cmd->add_option("--labels", drift.labels, "ability_labels.csv from encode")->required();
  drift_cmd->add_option("--reference", drift.reference, "Reference patches");
  drift_cmd->add_option("--patch", drift.patch, "Patch to compare")->required();
  drift_cmd->add_option("--model", drift.model, "Model file; supplies K");
  drift_cmd->add_option("--k", drift.k);
  drift_cmd->add_option("--threshold", drift.threshold)->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const fs::path out(out_dir);
  CLI::App* sub = app.get_subcommands().front();
  RunManifest manifest;
  manifest.subcommand = sub->get_name();
  record_flags(*sub, manifest);
  manifest.flags["out"] = out_dir;
  try {
    if (sub == ingest_cmd) run_ingest(ingest, out, manifest);
    if (sub == cluster_cmd) run_cluster(cluster, out, manifest);
    if (sub == encode_cmd) run_encode(encode, out, manifest);
    if (sub == fetch_cmd) run_fetch(fetch, out, manifest);
    if (sub == synth_cmd) run_synth(synth, out, manifest);
    if (sub == train_cmd) run_train(train_args, out, manifest);
    if (sub == eval_cmd) run_eval(eval_args, out, manifest);
    if (sub == drift_cmd) run_drift(drift, out, manifest);
    manifest.write(out / "manifest.json");
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}
