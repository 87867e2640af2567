// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <vector>

#include "herocluster/features.hpp"
#include "herocluster/match_data.hpp"
#include "herocluster/mlp.hpp"

namespace herocluster {

struct VariantOptions {
  Variant variant = Variant::NN3;
  std::uint64_t init_seed = 7;
  std::uint64_t train_seed = 7;
  std::uint64_t split_seed = 7;
  std::size_t epochs = 100;
  std::vector<std::size_t> hidden = default_hidden_widths();
  AdamConfig adam;
  std::optional<int> max_id;  // NN2 id space; derived from the fit-era records when empty
  int extra_ids = 0;          // widens a derived NN2 id space for characters released later
  std::size_t k = 0;          // NN3
};

/// Largest character id in the train/validation/test splits.
inline int fit_era_max_id(const DatasetSplit& split) {
  int max_id = 0;
  for (const auto* part : {&split.train, &split.validation, &split.test})
    for (const auto& m : *part)
      for (int h : m.heroes) max_id = std::max(max_id, h);
  return max_id;
}

struct TrainedVariant {
  TrainedModel model;
  TrainHistory history;
};

/// Fits feature scaling on the training split, checks that every split
/// (holdouts included) can be encoded, then trains one network.
inline TrainedVariant train_variant(const DatasetSplit& split, const FeatureContext& context, const VariantOptions& options,
                                    const std::function<void(std::size_t, const TrainHistory&)>& on_epoch = {}) {
  const int max_id = options.max_id.value_or(fit_era_max_id(split) + options.extra_ids);
  // Encodability first, so a breaking change surfaces before any training.
  if (options.variant == Variant::NN2)
    for (const auto* part : {&split.train, &split.validation, &split.test, &split.holdout_732, &split.holdout_733})
      for (const auto& m : *part) encode_character_ids(m.heroes, max_id);
  if (split.train.empty()) fail(ErrorCode::EmptyDataset, "no training matches outside the holdout patches");

  TrainedVariant out;
  out.model.spec = fit_feature_spec(options.variant, split.train, max_id, options.k);
  out.model.train_seed = options.train_seed;
  out.model.split_seed = options.split_seed;
  out.model.epochs = options.epochs;
  if (options.variant == Variant::NN3)
    for (const auto* part : {&split.validation, &split.test, &split.holdout_732, &split.holdout_733})
      for (const auto& m : *part) build_features(out.model.spec, m, context);

  const Dataset train_set = build_dataset(out.model.spec, split.train, context);
  const Dataset validation_set = build_dataset(out.model.spec, split.validation, context);
  TrainConfig config{options.epochs, options.adam, options.train_seed};
  auto [network, history] =
      train(init_mlp(out.model.spec.input_dim, options.init_seed, options.hidden), train_set, validation_set, config,
            on_epoch);
  out.model.network = std::move(network);
  out.history = std::move(history);
  return out;
}

}  // namespace herocluster
