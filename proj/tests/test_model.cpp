// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "herocluster/features.hpp"
#include "herocluster/training.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace herocluster;

namespace {

MatchRecord match(std::int64_t id, std::int64_t duration, std::array<int, kSlots> heroes, std::string patch = "7.31") {
  MatchRecord m;
  m.match_id = id;
  m.patch = std::move(patch);
  m.duration = duration;
  m.kills_radiant = 20;
  m.kills_dire = 30;
  m.heroes = heroes;
  return m;
}

constexpr std::array<int, kSlots> kLineup{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

// Loss over a batch of samples with plain forward passes.
double batch_loss(const MlpModel& model, const Matrix& x, const Matrix& t) {
  double sum = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) sum += sample_loss(forward(model, x.row(i)), t.row(i));
  return sum;
}

}  // namespace

TEST(Mlp, LayerShapes) {
  auto nn1 = init_mlp(1, 3);
  ASSERT_EQ(nn1.layers.size(), 7u);
  EXPECT_EQ(nn1.layers[0].inputs, 1u);
  EXPECT_EQ(nn1.layers[0].outputs, 1024u);
  EXPECT_EQ(nn1.layers[0].weights.size(), 1024u);
  EXPECT_EQ(nn1.hidden_widths(), (std::vector<std::size_t>{1024, 512, 128, 64, 32, 8}));
  EXPECT_EQ(nn1.output_dim(), 2u);
  auto wide = init_mlp(137, 3);
  EXPECT_EQ(wide.layers[0].weights.size(), 137u * 1024u);
  EXPECT_EQ(wide.layers.back().inputs, 8u);
  EXPECT_EQ(wide.layers.back().outputs, 2u);
  EXPECT_EQ(scaled_hidden_widths(8), (std::vector<std::size_t>{128, 64, 16, 8, 8, 8}));
  EXPECT_THROW(init_mlp(0, 1), Error);
}

TEST(Mlp, SeededInitIsReproducibleAndBounded) {
  EXPECT_EQ(init_mlp(5, 11, {7, 3}), init_mlp(5, 11, {7, 3}));
  EXPECT_NE(init_mlp(5, 11, {7, 3}), init_mlp(5, 12, {7, 3}));
  auto m = init_mlp(5, 11, {7, 3});
  for (const auto& layer : m.layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.inputs + layer.outputs));
    for (double w : layer.weights) EXPECT_LE(std::abs(w), limit);
    for (double b : layer.biases) EXPECT_EQ(b, 0.0);
  }
}

TEST(Mlp, ZeroOutputLayerGivesZero) {
  auto m = init_mlp(4, 1, {6, 5});
  std::fill(m.layers.back().weights.begin(), m.layers.back().weights.end(), 0.0);
  auto y = forward(m, std::vector<double>{1, -2, 3, 0.5});
  EXPECT_EQ(y, (std::vector<double>{0.0, 0.0}));
}

TEST(Mlp, HandComputedForward) {
  MlpModel m;
  m.layers.push_back({2, 2, {0.5, -1.0, 1.0, 2.0}, {0.1, -0.2}});
  m.layers.push_back({2, 2, {1.0, -1.0, 0.5, 0.25}, {0.3, 0.0}});
  const double h0 = oracle::sigmoid(0.5 * 1 - 1.0 * 2 + 0.1);
  const double h1 = oracle::sigmoid(1.0 * 1 + 2.0 * 2 - 0.2);
  auto y = forward(m, std::vector<double>{1, 2});
  EXPECT_NEAR(y[0], h0 - h1 + 0.3, 1e-12);
  EXPECT_NEAR(y[1], 0.5 * h0 + 0.25 * h1, 1e-12);
  EXPECT_THROW(forward(m, std::vector<double>{1}), Error);
}

TEST(Mlp, BackpropMatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0, 1);
  auto model = init_mlp(3, 9, {4, 3});
  for (auto& layer : model.layers)
    for (auto& b : layer.biases) b = 0.3 * normal(rng);
  Matrix x(0, 3), t(0, 2);
  for (int i = 0; i < 5; ++i) {
    x.append_row(std::vector<double>{normal(rng), normal(rng), normal(rng)});
    t.append_row(std::vector<double>{normal(rng), normal(rng)});
  }
  // Analytic gradient of the summed loss.
  Backprop bp(model);
  std::vector<std::vector<double>> gw(model.layers.size()), gb(model.layers.size());
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    gw[l].assign(model.layers[l].weights.size(), 0);
    gb[l].assign(model.layers[l].biases.size(), 0);
  }
  for (std::size_t i = 0; i < x.rows(); ++i) {
    bp.run(model, x.row(i), t.row(i));
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      for (std::size_t p = 0; p < gw[l].size(); ++p) gw[l][p] += bp.gradients().weights[l][p];
      for (std::size_t p = 0; p < gb[l].size(); ++p) gb[l][p] += bp.gradients().biases[l][p];
    }
  }
  auto check = [](double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max(1e-6, std::abs(analytic) + std::abs(numeric));
  };
  auto f = [&] { return batch_loss(model, x, t); };
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    for (std::size_t p = 0; p < gw[l].size(); ++p)
      EXPECT_LT(check(gw[l][p], oracle::central_difference(&model.layers[l].weights[p], 1e-5, f)), 1e-4) << l << "," << p;
    for (std::size_t p = 0; p < gb[l].size(); ++p)
      EXPECT_LT(check(gb[l][p], oracle::central_difference(&model.layers[l].biases[p], 1e-5, f)), 1e-4) << l << "," << p;
  }
}

TEST(Mlp, TrainingReducesLossAndIsDeterministic) {
  Dataset data{Matrix(0, 2), Matrix(0, 2)};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 40; ++i) {
    data.features.append_row(std::vector<double>{u(rng), u(rng)});
    data.targets.append_row(std::vector<double>{0.25, 0.3});
  }
  TrainConfig config{30, {}, 4};
  config.adam.learning_rate = 1e-2;
  auto model = init_mlp(2, 2, {8, 4});
  const double before = evaluate_dataset(model, data).loss;
  auto [a, history] = train(model, data, data, config);
  EXPECT_LT(history.train_loss.back(), 0.1 * before);
  EXPECT_EQ(history.train_loss.size(), 30u);
  auto [b, history_b] = train(model, data, data, config);
  EXPECT_EQ(a, b);
  EXPECT_EQ(history.train_loss, history_b.train_loss);
  EXPECT_THROW(train(model, Dataset{Matrix(0, 2), Matrix(0, 2)}, data, config), Error);
}

TEST(Features, PredictKillsScalesAndClamps) {
  FeatureSpec spec;
  MlpModel m;
  m.layers.push_back({1, 2, {0.0, 0.0}, {0.2, 0.2}});
  auto k = predict_kills(m, spec, std::vector<double>{0.7});
  EXPECT_DOUBLE_EQ(k.radiant, 20.0);
  EXPECT_DOUBLE_EQ(k.dire, 20.0);
  m.layers[0].biases = {-0.1, 0.355};
  k = predict_kills(m, spec, std::vector<double>{0.7});
  EXPECT_EQ(k.radiant, 0.0);
  EXPECT_NEAR(k.dire, 35.5, 1e-12);
  EXPECT_THROW(predict_kills(m, spec, std::vector<double>{1, 2}), Error);
}

TEST(Features, DimensionsPerVariant) {
  std::vector<MatchRecord> train{match(1, 1000, kLineup), match(2, 3000, kLineup)};
  auto nn1 = fit_feature_spec(Variant::NN1, train);
  EXPECT_EQ(nn1.input_dim, 1u);
  EXPECT_DOUBLE_EQ(nn1.duration_mean, 2000.0);
  EXPECT_DOUBLE_EQ(nn1.duration_std, 1000.0);
  EXPECT_EQ(build_features(nn1, train[1]), (std::vector<double>{1.0}));
  auto nn2 = fit_feature_spec(Variant::NN2, train, 136);
  EXPECT_EQ(nn2.input_dim, 1u + 2u * 137u);
  auto f = build_features(nn2, train[0]);
  ASSERT_EQ(f.size(), nn2.input_dim);
  EXPECT_EQ(f[1 + 3], 1.0);
  EXPECT_EQ(f[1 + 137 + 8], 1.0);
  EXPECT_EQ(std::accumulate(f.begin() + 1, f.end(), 0.0), 10.0);
  EXPECT_EQ(fit_feature_spec(Variant::NN3, train, 0, 12).input_dim, 25u);
  EXPECT_THROW(fit_feature_spec(Variant::NN1, {}), Error);
}

TEST(Features, Nn1EqualDurationsPredictEqually) {
  auto spec = fit_feature_spec(Variant::NN1, {match(1, 1000, kLineup), match(2, 2000, kLineup)});
  auto model = init_mlp(1, 3, {8, 4});
  std::array<int, kSlots> other{11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
  auto a = predict_kills(model, spec, build_features(spec, match(3, 1500, kLineup)));
  auto b = predict_kills(model, spec, build_features(spec, match(4, 1500, other, "7.32")));
  EXPECT_EQ(a.radiant, b.radiant);
  EXPECT_EQ(a.dire, b.dire);
}

TEST(Features, Nn2RejectsUnseenIdNn3Encodes) {
  std::vector<MatchRecord> train{match(1, 1000, kLineup), match(2, 3000, kLineup)};
  auto newcomer = match(3, 2000, {1, 2, 3, 4, 41, 6, 7, 8, 9, 10}, "7.32");
  auto nn2 = fit_feature_spec(Variant::NN2, train, 40);
  try {
    build_features(nn2, newcomer);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IdOutOfRange);
    EXPECT_NE(std::string(e.what()).find("41"), std::string::npos);
  }
  EXPECT_EQ(build_features(fit_feature_spec(Variant::NN2, train, 41), newcomer).size(), 1u + 2u * 42u);

  CharacterTable table(3);
  std::map<int, std::string> names;
  for (int id = 1; id <= 41; ++id) {
    names[id] = "c" + std::to_string(id);
    table.add({names[id], "7.32", {static_cast<std::uint32_t>(id % 2), 1, 0}});
  }
  FeatureContext ctx{&table, &names};
  auto nn3 = fit_feature_spec(Variant::NN3, train, 0, 3);
  auto f = build_features(nn3, newcomer, ctx);
  ASSERT_EQ(f.size(), 7u);
  // Radiant ids 1,2,3,4,41 hold three odd ids; Dire 6..10 holds two.
  EXPECT_EQ(f[1], 3.0);
  EXPECT_EQ(f[2], 5.0);
  EXPECT_EQ(f[3], 0.0);
  EXPECT_EQ(f[4], 2.0);
  auto unknown = newcomer;
  unknown.heroes[0] = 99;
  try {
    build_features(nn3, unknown, ctx);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownCharacter);
  }
  EXPECT_THROW(build_features(nn3, match(4, 1000, kLineup, "7.20"), ctx), Error);
}

TEST(Features, TrainedModelFileRoundTrip) {
  hc_test::TempDir dir;
  TrainedModel model;
  model.spec = fit_feature_spec(Variant::NN2, {match(1, 1234, kLineup), match(2, 2345, kLineup)}, 20);
  model.network = init_mlp(model.spec.input_dim, 8, {5, 4});
  model.network.layers[0].biases[2] = 1.0 / 3.0;
  model.train_seed = 3;
  model.split_seed = 4;
  model.epochs = 17;
  save_trained_model(model, dir / "m.txt");
  auto loaded = load_trained_model(dir / "m.txt");
  EXPECT_EQ(loaded.spec, model.spec);
  EXPECT_EQ(loaded.train_seed, 3u);
  EXPECT_EQ(loaded.split_seed, 4u);
  EXPECT_EQ(loaded.epochs, 17u);
  ASSERT_EQ(loaded.network.layers.size(), model.network.layers.size());
  for (std::size_t l = 0; l < model.network.layers.size(); ++l) {
    EXPECT_EQ(loaded.network.layers[l].weights, model.network.layers[l].weights);
    EXPECT_EQ(loaded.network.layers[l].biases, model.network.layers[l].biases);
  }
  hc_test::write_text(dir / "bad.txt", "not-a-model 1\n");
  EXPECT_THROW(load_trained_model(dir / "bad.txt"), Error);
}

TEST(Training, AllHoldoutLeavesNothingToTrainOn) {
  std::vector<MatchRecord> records;
  for (int i = 0; i < 10; ++i) records.push_back(match(i + 1, 1000 + 100 * i, kLineup, "7.32"));
  auto split = split_dataset(records, 1);
  VariantOptions options;
  options.variant = Variant::NN1;
  options.epochs = 1;
  options.hidden = {4};
  try {
    train_variant(split, {}, options);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyDataset);
  }
}

TEST(Training, Nn2BreaksOnHoldoutNewcomerBeforeTraining) {
  std::vector<MatchRecord> records;
  for (int i = 0; i < 20; ++i) records.push_back(match(i + 1, 1000 + 50 * i, kLineup));
  records.push_back(match(100, 2000, {1, 2, 3, 4, 41, 6, 7, 8, 9, 10}, "7.32"));
  auto split = split_dataset(records, 2);
  VariantOptions options;
  options.variant = Variant::NN2;
  options.epochs = 1;
  options.hidden = {4};
  int epochs_run = 0;
  EXPECT_THROW(train_variant(split, {}, options, [&](std::size_t, const TrainHistory&) { ++epochs_run; }), Error);
  EXPECT_EQ(epochs_run, 0);
  options.extra_ids = 31;
  auto trained = train_variant(split, {}, options);
  EXPECT_EQ(trained.model.spec.max_id, 41);
}
