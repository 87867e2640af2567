// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "herocluster/error.hpp"
#include "herocluster/matrix.hpp"
#include "herocluster/metrics.hpp"

namespace herocluster {

inline constexpr std::size_t kOutputs = 2;

/// Hidden widths of the kill-count network.
inline const std::vector<std::size_t>& default_hidden_widths() {
  static const std::vector<std::size_t> widths = {1024, 512, 128, 64, 32, 8};
  return widths;
}

/// Default widths divided by `divisor`, used by fast test profiles. No layer
/// drops below the narrowest default width, so the final bottleneck keeps room
/// for duration and both lineups.
inline std::vector<std::size_t> scaled_hidden_widths(std::size_t divisor) {
  if (divisor == 0) fail(ErrorCode::InvalidArgument, "width divisor must be positive");
  const auto& widths = default_hidden_widths();
  const std::size_t floor = *std::min_element(widths.begin(), widths.end());
  std::vector<std::size_t> out;
  for (auto w : widths) out.push_back(std::max(floor, w / divisor));
  return out;
}

struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;  // outputs x inputs, row-major
  std::vector<double> biases;

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Fully connected network: sigmoid hidden layers, identity output layer.
struct MlpModel {
  std::vector<DenseLayer> layers;
  std::uint64_t seed = 0;

  std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().inputs; }
  std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().outputs; }

  std::vector<std::size_t> hidden_widths() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i + 1 < layers.size(); ++i) out.push_back(layers[i].outputs);
    return out;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.biases.size();
    return n;
  }

  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

/// Glorot-uniform weights, zero biases.
inline MlpModel init_mlp(std::size_t input_dim, std::uint64_t seed,
                         const std::vector<std::size_t>& hidden = default_hidden_widths(),
                         std::size_t outputs = kOutputs) {
  if (input_dim == 0) fail(ErrorCode::InvalidArgument, "input_dim must be at least 1");
  MlpModel model;
  model.seed = seed;
  std::mt19937_64 rng(seed);
  std::size_t fan_in = input_dim;
  auto add_layer = [&](std::size_t fan_out) {
    DenseLayer layer{fan_in, fan_out, std::vector<double>(fan_in * fan_out), std::vector<double>(fan_out, 0.0)};
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (auto& w : layer.weights) w = dist(rng);
    model.layers.push_back(std::move(layer));
    fan_in = fan_out;
  };
  for (auto w : hidden) add_layer(w);
  add_layer(outputs);
  return model;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

namespace detail {

inline void require_input(const MlpModel& model, std::span<const double> features) {
  if (features.size() != model.input_dim())
    fail(ErrorCode::DimensionMismatch, "feature vector of length " + std::to_string(features.size()) +
                                           ", network expects " + std::to_string(model.input_dim()));
}

// activations[0] = input, activations[l+1] = output of layer l.
inline void forward_cached(const MlpModel& model, std::span<const double> features,
                           std::vector<std::vector<double>>& activations) {
  activations.resize(model.layers.size() + 1);
  activations[0].assign(features.begin(), features.end());
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    const auto& in = activations[l];
    auto& out = activations[l + 1];
    out.resize(layer.outputs);
    const bool hidden = l + 1 < model.layers.size();
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      const double* w = layer.weights.data() + o * layer.inputs;
      double z = layer.biases[o];
      for (std::size_t i = 0; i < layer.inputs; ++i) z += w[i] * in[i];
      out[o] = hidden ? sigmoid(z) : z;
    }
  }
}

}  // namespace detail

inline std::vector<double> forward(const MlpModel& model, std::span<const double> features) {
  detail::require_input(model, features);
  std::vector<std::vector<double>> activations;
  detail::forward_cached(model, features, activations);
  return std::move(activations.back());
}

/// Same shapes as the model's layers.
struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

/// Squared error averaged over the outputs.
inline double sample_loss(std::span<const double> predicted, std::span<const double> target) {
  double sum = 0.0;
  for (std::size_t j = 0; j < predicted.size(); ++j) sum += (predicted[j] - target[j]) * (predicted[j] - target[j]);
  return sum / static_cast<double>(predicted.size());
}

/// Loss of one sample and its gradient with respect to every parameter.
class Backprop {
 public:
  explicit Backprop(const MlpModel& model) {
    grads_.weights.resize(model.layers.size());
    grads_.biases.resize(model.layers.size());
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      grads_.weights[l].assign(model.layers[l].weights.size(), 0.0);
      grads_.biases[l].assign(model.layers[l].biases.size(), 0.0);
    }
  }

  double run(const MlpModel& model, std::span<const double> features, std::span<const double> target) {
    detail::require_input(model, features);
    if (target.size() != model.output_dim()) fail(ErrorCode::DimensionMismatch, "target width differs from outputs");
    detail::forward_cached(model, features, activations_);
    const auto& out = activations_.back();
    const double loss = sample_loss(out, target);

    delta_.resize(out.size());
    const double scale = 2.0 / static_cast<double>(out.size());
    for (std::size_t j = 0; j < out.size(); ++j) delta_[j] = scale * (out[j] - target[j]);

    for (std::size_t l = model.layers.size(); l-- > 0;) {
      const auto& layer = model.layers[l];
      const auto& in = activations_[l];
      auto& gw = grads_.weights[l];
      auto& gb = grads_.biases[l];
      for (std::size_t o = 0; o < layer.outputs; ++o) {
        gb[o] = delta_[o];
        double* g = gw.data() + o * layer.inputs;
        for (std::size_t i = 0; i < layer.inputs; ++i) g[i] = delta_[o] * in[i];
      }
      if (l == 0) break;
      prev_.assign(layer.inputs, 0.0);
      for (std::size_t o = 0; o < layer.outputs; ++o) {
        const double* w = layer.weights.data() + o * layer.inputs;
        for (std::size_t i = 0; i < layer.inputs; ++i) prev_[i] += w[i] * delta_[o];
      }
      for (std::size_t i = 0; i < layer.inputs; ++i) prev_[i] *= in[i] * (1.0 - in[i]);  // sigmoid'
      std::swap(delta_, prev_);
    }
    return loss;
  }

  const Gradients& gradients() const noexcept { return grads_; }

 private:
  Gradients grads_;
  std::vector<std::vector<double>> activations_;
  std::vector<double> delta_;
  std::vector<double> prev_;
};

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias correction.
class AdamOptimizer {
 public:
  AdamOptimizer(const MlpModel& model, AdamConfig config) : config_(config) {
    for (const auto& layer : model.layers) {
      m_w_.emplace_back(layer.weights.size(), 0.0);
      v_w_.emplace_back(layer.weights.size(), 0.0);
      m_b_.emplace_back(layer.biases.size(), 0.0);
      v_b_.emplace_back(layer.biases.size(), 0.0);
    }
  }

  void step(MlpModel& model, const Gradients& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    auto update = [&](std::vector<double>& params, const std::vector<double>& g, std::vector<double>& m,
                      std::vector<double>& v) {
      for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
        v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
        params[i] -= config_.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + config_.epsilon);
      }
    };
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      update(model.layers[l].weights, grads.weights[l], m_w_[l], v_w_[l]);
      update(model.layers[l].biases, grads.biases[l], m_b_[l], v_b_[l]);
    }
  }

 private:
  AdamConfig config_;
  std::uint64_t t_ = 0;
  std::vector<std::vector<double>> m_w_, v_w_, m_b_, v_b_;
};

struct TrainConfig {
  std::size_t epochs = 100;
  AdamConfig adam;
  std::uint64_t seed = 0;  // drives the per-epoch shuffle
};

/// Per-epoch curves. AUC entries are empty when the kill-race labels of a set
/// are all one class.
struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
  std::vector<std::optional<double>> train_auc;
  std::vector<std::optional<double>> validation_auc;
};

/// Features and targets for supervised training; targets are already scaled.
struct Dataset {
  Matrix features;
  Matrix targets;  // n x 2

  std::size_t size() const noexcept { return features.rows(); }
};

struct EpochMetrics {
  double loss = 0.0;
  std::optional<double> auc;
};

/// Mean loss over a dataset plus kill-race AUC of the clamped predictions.
inline EpochMetrics evaluate_dataset(const MlpModel& model, const Dataset& data) {
  EpochMetrics out;
  if (data.size() == 0) return out;
  std::vector<KillPair> predicted(data.size()), actual(data.size());
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto y = forward(model, data.features.row(i));
    total += sample_loss(y, data.targets.row(i));
    predicted[i] = {std::max(0.0, y[0]), std::max(0.0, y[1])};
    actual[i] = {data.targets(i, 0), data.targets(i, 1)};
  }
  out.loss = total / static_cast<double>(data.size());
  try {
    out.auc = auc_kill_race(predicted, actual);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateLabels) throw;
  }
  return out;
}

/// One Adam step per sample (batch size 1), samples visited in an order
/// shuffled from (seed, epoch). No early stopping or regularization.
inline std::pair<MlpModel, TrainHistory> train(
    MlpModel model, const Dataset& train_set, const Dataset& validation_set, const TrainConfig& config,
    const std::function<void(std::size_t, const TrainHistory&)>& on_epoch = {}) {
  if (train_set.size() == 0) fail(ErrorCode::EmptyDataset, "training set is empty");
  if (config.epochs == 0) fail(ErrorCode::InvalidArgument, "epochs must be positive");
  if (!(config.adam.learning_rate > 0)) fail(ErrorCode::InvalidArgument, "learning rate must be positive");
  if (train_set.features.cols() != model.input_dim() ||
      (validation_set.size() && validation_set.features.cols() != model.input_dim()))
    fail(ErrorCode::DimensionMismatch, "feature width differs from network input");

  Backprop backprop(model);
  AdamOptimizer adam(model, config.adam);
  TrainHistory history;
  std::vector<std::size_t> order(train_set.size());
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(epoch)};
    std::mt19937_64 rng(seq);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t idx : order) {
      const double loss = backprop.run(model, train_set.features.row(idx), train_set.targets.row(idx));
      if (!std::isfinite(loss))
        fail(ErrorCode::NonFiniteLoss, "loss became non-finite at epoch " + std::to_string(epoch + 1) + ", sample " +
                                           std::to_string(idx));
      adam.step(model, backprop.gradients());
    }
    auto tr = evaluate_dataset(model, train_set);
    auto va = evaluate_dataset(model, validation_set);
    if (!std::isfinite(tr.loss) || !std::isfinite(va.loss))
      fail(ErrorCode::NonFiniteLoss, "epoch " + std::to_string(epoch + 1) + " ended with a non-finite loss");
    history.train_loss.push_back(tr.loss);
    history.validation_loss.push_back(va.loss);
    history.train_auc.push_back(tr.auc);
    history.validation_auc.push_back(va.auc);
    if (on_epoch) on_epoch(epoch, history);
  }
  return {std::move(model), std::move(history)};
}

}  // namespace herocluster
