// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "herocluster/csv.hpp"
#include "herocluster/encoding.hpp"
#include "herocluster/error.hpp"
#include "herocluster/match_data.hpp"
#include "herocluster/mlp.hpp"

namespace herocluster {

/// NN1: duration only. NN2: duration and per-team character-id multi-hot.
/// NN3: duration and per-team cluster-count lineup vectors.
enum class Variant { NN1, NN2, NN3 };

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::NN1: return "nn1";
    case Variant::NN2: return "nn2";
    case Variant::NN3: return "nn3";
  }
  return "?";
}

inline std::optional<Variant> parse_variant(std::string_view text) {
  if (text == "nn1" || text == "NN1") return Variant::NN1;
  if (text == "nn2" || text == "NN2") return Variant::NN2;
  if (text == "nn3" || text == "NN3") return Variant::NN3;
  return std::nullopt;
}

inline constexpr double kDefaultTargetScale = 100.0;

struct FeatureSpec {
  Variant variant = Variant::NN1;
  std::size_t input_dim = 1;
  double duration_mean = 0.0;
  double duration_std = 1.0;
  int max_id = 0;     // NN2
  std::size_t k = 0;  // NN3
  double target_scale = kDefaultTargetScale;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

inline std::size_t input_dim_for(Variant variant, int max_id, std::size_t k) {
  switch (variant) {
    case Variant::NN1: return 1;
    case Variant::NN2: return 1 + 2 * (static_cast<std::size_t>(max_id) + 1);
    case Variant::NN3: return 1 + 2 * k;
  }
  return 1;
}

/// Freezes duration statistics from the training records.
inline FeatureSpec fit_feature_spec(Variant variant, const std::vector<MatchRecord>& train, int max_id = 0,
                                    std::size_t k = 0) {
  if (train.empty()) fail(ErrorCode::EmptyDataset, "cannot fit feature scaling on an empty training set");
  if (variant == Variant::NN2 && max_id < 0) fail(ErrorCode::InvalidArgument, "max_id must be non-negative");
  if (variant == Variant::NN3 && k == 0) fail(ErrorCode::InvalidArgument, "NN3 needs the cluster count");
  FeatureSpec spec;
  spec.variant = variant;
  spec.max_id = variant == Variant::NN2 ? max_id : 0;
  spec.k = variant == Variant::NN3 ? k : 0;
  spec.input_dim = input_dim_for(variant, spec.max_id, spec.k);
  double mean = 0.0;
  for (const auto& m : train) mean += static_cast<double>(m.duration);
  mean /= static_cast<double>(train.size());
  double var = 0.0;
  for (const auto& m : train) var += (static_cast<double>(m.duration) - mean) * (static_cast<double>(m.duration) - mean);
  var /= static_cast<double>(train.size());
  spec.duration_mean = mean;
  spec.duration_std = var > 0 ? std::sqrt(var) : 1.0;
  return spec;
}

/// Lookups the lineup variants need: NN3 resolves hero ids to names and names
/// to per-patch character vectors.
struct FeatureContext {
  const CharacterTable* characters = nullptr;
  const std::map<int, std::string>* hero_names = nullptr;
};

inline std::vector<double> build_features(const FeatureSpec& spec, const MatchRecord& match,
                                          const FeatureContext& context = {}) {
  std::vector<double> out;
  out.reserve(spec.input_dim);
  out.push_back((static_cast<double>(match.duration) - spec.duration_mean) / spec.duration_std);
  switch (spec.variant) {
    case Variant::NN1:
      break;
    case Variant::NN2:
      for (auto team : {match.radiant(), match.dire()}) {
        auto bits = encode_character_ids(team, spec.max_id);
        out.insert(out.end(), bits.bits.begin(), bits.bits.end());
      }
      break;
    case Variant::NN3: {
      if (!context.characters || !context.hero_names)
        fail(ErrorCode::InvalidArgument, "NN3 features need a character table and hero names");
      if (context.characters->k() != spec.k)
        fail(ErrorCode::MixedDimensions, "character table has " + std::to_string(context.characters->k()) +
                                             " clusters, feature spec expects " + std::to_string(spec.k));
      for (auto [team, side] : {std::pair{match.radiant(), Team::Radiant}, std::pair{match.dire(), Team::Dire}}) {
        std::vector<CharacterVector> members;
        for (int id : team) {
          auto name = context.hero_names->find(id);
          if (name == context.hero_names->end())
            fail(ErrorCode::UnknownCharacter, "no character name for id " + std::to_string(id));
          members.push_back(context.characters->at(match.patch, name->second));
        }
        auto lineup = encode_lineup(members, side);
        for (auto c : lineup.counts) out.push_back(static_cast<double>(c));
      }
      break;
    }
  }
  if (out.size() != spec.input_dim)
    fail(ErrorCode::DimensionMismatch, "assembled " + std::to_string(out.size()) + " features, feature layout expects " +
                                           std::to_string(spec.input_dim));
  return out;
}

inline Dataset build_dataset(const FeatureSpec& spec, const std::vector<MatchRecord>& records,
                             const FeatureContext& context = {}) {
  Dataset data{Matrix(0, spec.input_dim), Matrix(0, kOutputs)};
  for (const auto& m : records) {
    data.features.append_row(build_features(spec, m, context));
    const std::array<double, kOutputs> target{static_cast<double>(m.kills_radiant) / spec.target_scale,
                                              static_cast<double>(m.kills_dire) / spec.target_scale};
    data.targets.append_row(target);
  }
  return data;
}

/// Network outputs mapped back to kill counts, clamped at zero. Not rounded.
inline KillPair unscale_prediction(const FeatureSpec& spec, std::span<const double> outputs) {
  return {std::max(0.0, outputs[0] * spec.target_scale), std::max(0.0, outputs[1] * spec.target_scale)};
}

inline KillPair predict_kills(const MlpModel& model, const FeatureSpec& spec, std::span<const double> features) {
  if (features.size() != spec.input_dim)
    fail(ErrorCode::DimensionMismatch, "feature vector of length " + std::to_string(features.size()) +
                                           ", spec expects " + std::to_string(spec.input_dim));
  return unscale_prediction(spec, forward(model, features));
}

// ---------------------------------------------------------------------------
// Trained model file: "key value" header lines, then one line per weight row
// and one line of biases per layer.
// ---------------------------------------------------------------------------

struct TrainedModel {
  FeatureSpec spec;
  MlpModel network;
  std::uint64_t train_seed = 0;
  std::uint64_t split_seed = 0;
  std::size_t epochs = 0;

  friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

inline constexpr std::string_view kModelMagic = "herocluster-mlp";

inline void save_trained_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ostringstream out;
  out << kModelMagic << " 1\n";
  out << "variant " << to_string(model.spec.variant) << "\n";
  out << "input_dim " << model.spec.input_dim << "\n";
  out << "hidden";
  for (auto w : model.network.hidden_widths()) out << ' ' << w;
  out << "\n";
  out << "outputs " << model.network.output_dim() << "\n";
  out << "init_seed " << model.network.seed << "\n";
  out << "train_seed " << model.train_seed << "\n";
  out << "split_seed " << model.split_seed << "\n";
  out << "epochs " << model.epochs << "\n";
  out << "duration_mean " << csv::format_number(model.spec.duration_mean) << "\n";
  out << "duration_std " << csv::format_number(model.spec.duration_std) << "\n";
  out << "target_scale " << csv::format_number(model.spec.target_scale) << "\n";
  out << "max_id " << model.spec.max_id << "\n";
  out << "k " << model.spec.k << "\n";
  for (std::size_t l = 0; l < model.network.layers.size(); ++l) {
    const auto& layer = model.network.layers[l];
    out << "layer " << l << ' ' << layer.inputs << ' ' << layer.outputs << "\n";
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      for (std::size_t i = 0; i < layer.inputs; ++i)
        out << (i ? " " : "") << csv::format_number(layer.weights[o * layer.inputs + i]);
      out << "\n";
    }
    for (std::size_t o = 0; o < layer.outputs; ++o) out << (o ? " " : "") << csv::format_number(layer.biases[o]);
    out << "\n";
  }
  csv::write_file(path, out.str());
}

inline TrainedModel load_trained_model(const std::filesystem::path& path) {
  std::istringstream in(csv::read_file(path));
  const std::string origin = path.string();
  auto bad = [&](const std::string& why) -> void { fail(ErrorCode::MalformedDocument, origin + ": " + why); };
  std::string line;
  auto next_line = [&]() -> std::string {
    if (!std::getline(in, line)) bad("unexpected end of file");
    return line;
  };
  auto expect_key = [&](std::string_view key) -> std::istringstream {
    std::istringstream fields(next_line());
    std::string name;
    fields >> name;
    if (name != key) bad("expected '" + std::string(key) + "', found '" + name + "'");
    return fields;
  };
  auto number = [&](std::istringstream& fields) {
    std::string token;
    double v = 0.0;
    if (!(fields >> token) || !csv::parse_number(token, v)) bad("bad number '" + token + "'");
    return v;
  };

  TrainedModel model;
  {
    auto fields = expect_key(kModelMagic);
    int version = 0;
    if (!(fields >> version) || version != 1) bad("unsupported version");
  }
  {
    auto fields = expect_key("variant");
    std::string name;
    fields >> name;
    auto v = parse_variant(name);
    if (!v) bad("unknown variant '" + name + "'");
    model.spec.variant = *v;
  }
  expect_key("input_dim") >> model.spec.input_dim;
  std::vector<std::size_t> hidden;
  {
    auto fields = expect_key("hidden");
    for (std::size_t w; fields >> w;) hidden.push_back(w);
  }
  std::size_t outputs = 0;
  expect_key("outputs") >> outputs;
  expect_key("init_seed") >> model.network.seed;
  expect_key("train_seed") >> model.train_seed;
  expect_key("split_seed") >> model.split_seed;
  expect_key("epochs") >> model.epochs;
  {
    auto f = expect_key("duration_mean");
    model.spec.duration_mean = number(f);
  }
  {
    auto f = expect_key("duration_std");
    model.spec.duration_std = number(f);
  }
  {
    auto f = expect_key("target_scale");
    model.spec.target_scale = number(f);
  }
  expect_key("max_id") >> model.spec.max_id;
  expect_key("k") >> model.spec.k;
  if (model.spec.input_dim != input_dim_for(model.spec.variant, model.spec.max_id, model.spec.k))
    bad("input_dim disagrees with variant dimensions");

  std::size_t fan_in = model.spec.input_dim;
  hidden.push_back(outputs);
  for (std::size_t l = 0; l < hidden.size(); ++l) {
    auto fields = expect_key("layer");
    std::size_t index = 0, inputs = 0, outs = 0;
    fields >> index >> inputs >> outs;
    if (index != l || inputs != fan_in || outs != hidden[l]) bad("layer " + std::to_string(l) + " shape mismatch");
    DenseLayer layer{inputs, outs, {}, {}};
    layer.weights.reserve(inputs * outs);
    for (std::size_t o = 0; o < outs; ++o) {
      std::istringstream row(next_line());
      for (std::size_t i = 0; i < inputs; ++i) layer.weights.push_back(number(row));
    }
    std::istringstream biases(next_line());
    for (std::size_t o = 0; o < outs; ++o) layer.biases.push_back(number(biases));
    model.network.layers.push_back(std::move(layer));
    fan_in = outs;
  }
  return model;
}

}  // namespace herocluster
