// Copyright 2026 The qshield Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file nn.hpp
 * Dense layers, the classical and hybrid classifier heads, softmax
 * cross-entropy, Adam, the training loop, and QHM1 checkpoints.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qshield/data.hpp"
#include "qshield/vqc.hpp"

namespace qshield::nn {

/// Elementwise clamp to [0, 6].
template <typename Derived>
auto relu6(const Eigen::MatrixBase<Derived> &x) {
    using Scalar = typename Derived::Scalar;
    return x.cwiseMax(Scalar(0)).cwiseMin(Scalar(6));
}

/// Subgradient of relu6: 1 strictly inside (0, 6), else 0.
template <typename Derived>
typename Derived::PlainObject relu6_grad(const Eigen::MatrixBase<Derived> &x) {
    using Scalar = typename Derived::Scalar;
    return ((x.array() > Scalar(0)) && (x.array() < Scalar(6))).template cast<Scalar>().matrix();
}

struct LossAndGrad {
    double loss = 0.0;
    Eigen::VectorXd grad;
};

/// -log softmax(logits)[label] and its gradient softmax - onehot.
LossAndGrad softmax_cross_entropy(const Eigen::VectorXd &logits, std::size_t label);

struct DenseLayer {
    Eigen::MatrixXd weights; ///< out_dim x in_dim
    Eigen::VectorXd bias;

    [[nodiscard]] std::size_t in_dim() const { return static_cast<std::size_t>(weights.cols()); }
    [[nodiscard]] std::size_t out_dim() const { return static_cast<std::size_t>(weights.rows()); }
    [[nodiscard]] Eigen::VectorXd operator()(const Eigen::VectorXd &x) const { return weights * x + bias; }

    static DenseLayer zeros(std::size_t in_dim, std::size_t out_dim);
    /// Fan-in uniform(-1/sqrt(in_dim), 1/sqrt(in_dim)) for weights and bias.
    static DenseLayer random(std::size_t in_dim, std::size_t out_dim, std::mt19937_64 &rng);
};

enum class HeadKind : std::uint8_t { classical = 0, hybrid1 = 1, hybrid2 = 2 };

std::string_view to_string(HeadKind kind);
HeadKind head_kind_from_string(std::string_view name);

struct ModelConfig {
    HeadKind kind = HeadKind::classical;
    std::size_t feature_dim = 0;
    std::size_t width = 4; ///< hidden units, or qubit count for hybrid heads
    std::size_t n_classes = 2;
    std::size_t n_layers = 6; ///< variational repetitions (hybrid only)
    vqc::Entanglement entanglement = vqc::Entanglement::chain;
};

/**
 * dense_in -> (relu6 | quantum layer) -> dense_out. The hybrid heads have no
 * classical activation; the Z readout bounds the hidden values to [-1, 1].
 */
struct HybridModel {
    HeadKind kind = HeadKind::classical;
    DenseLayer dense_in;
    std::optional<vqc::QuantumLayer> quantum;
    DenseLayer dense_out;

    [[nodiscard]] std::size_t feature_dim() const { return dense_in.in_dim(); }
    [[nodiscard]] std::size_t width() const { return dense_in.out_dim(); }
    [[nodiscard]] std::size_t n_classes() const { return dense_out.out_dim(); }
    [[nodiscard]] std::size_t n_layers() const;

    /// Throws ArgumentError if the layers do not chain.
    void validate() const;
};

/// Randomly initialized model; dense layers fan-in uniform, circuit angles
/// uniform(-pi, pi), all from one generator seeded with `seed`.
HybridModel make_model(const ModelConfig &config, std::uint64_t seed);

/// Trainable parameters in checkpoint order: dense_in weights (row-major),
/// dense_in bias, circuit params, dense_out weights (row-major), dense_out bias.
Eigen::VectorXd flatten_parameters(const HybridModel &model);
void assign_parameters(HybridModel &model, const Eigen::VectorXd &flat);
std::size_t parameter_count(const HybridModel &model);

Eigen::VectorXd model_forward(const HybridModel &model, const Eigen::VectorXd &x);
std::size_t predict(const HybridModel &model, const Eigen::VectorXd &x);
double accuracy(const HybridModel &model, const data::FeatureSet &set);

struct ModelGradients {
    double loss = 0.0;
    Eigen::MatrixXd dense_in_weights;
    Eigen::VectorXd dense_in_bias;
    Eigen::VectorXd quantum;
    Eigen::MatrixXd dense_out_weights;
    Eigen::VectorXd dense_out_bias;
    Eigen::VectorXd d_input;

    /// Same ordering as flatten_parameters.
    [[nodiscard]] Eigen::VectorXd flat() const;
};

/// Loss, every parameter gradient, and d_loss/d_x.
ModelGradients model_backward(const HybridModel &model, const Eigen::VectorXd &x, std::size_t label);

/// Loss and d_loss/d_x only; skips the circuit-parameter shifts.
LossAndGrad model_input_gradient(const HybridModel &model, const Eigen::VectorXd &x, std::size_t label);

/// Loss only.
double model_loss(const HybridModel &model, const Eigen::VectorXd &x, std::size_t label);

struct AdamConfig {
    double learning_rate = 0.004;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    AdamConfig config;
    Eigen::VectorXd first_moment;
    Eigen::VectorXd second_moment;
    std::size_t step = 0;

    AdamState(std::size_t n_params, AdamConfig cfg = {});
};

/// Bias-corrected Adam update; returns the new parameter vector.
Eigen::VectorXd adam_step(AdamState &state, const Eigen::VectorXd &params, const Eigen::VectorXd &grads);

struct TrainConfig {
    std::size_t epochs = 30;
    std::size_t batch_size = 4;
    std::uint64_t seed = 0;
    AdamConfig adam;
};

struct EpochStats {
    double mean_loss = 0.0; ///< over the training set after the epoch's updates
    double accuracy = 0.0;
};

using EpochCallback = std::function<void(std::size_t epoch, const EpochStats &)>;

struct TrainResult {
    HybridModel model;
    std::vector<EpochStats> trace;
};

/**
 * Mini-batch Adam on softmax cross-entropy. Each epoch reshuffles the sample
 * order with a generator seeded from `config.seed`; batch gradients are
 * averaged in sample order. Throws NumericError on a non-finite loss.
 */
TrainResult train(HybridModel model, const data::FeatureSet &train_set, const TrainConfig &config,
                  const EpochCallback &on_epoch = {});

struct CheckpointHeader {
    HeadKind kind = HeadKind::classical;
    std::uint32_t feature_dim = 0;
    std::uint32_t width = 0;
    std::uint32_t n_classes = 0;
    std::uint32_t n_qubits = 0;
    std::uint32_t n_layers = 0;
};

/// QHM1: "QHM1", u8 head kind, five u32 dims, then f64 parameters, LE.
std::vector<std::uint8_t> encode_checkpoint(const HybridModel &model);
HybridModel decode_checkpoint(std::span<const std::uint8_t> bytes);
CheckpointHeader decode_checkpoint_header(std::span<const std::uint8_t> bytes);

void save_checkpoint(const HybridModel &model, const std::filesystem::path &path);
HybridModel load_checkpoint(const std::filesystem::path &path);
CheckpointHeader read_checkpoint_header(const std::filesystem::path &path);

} // namespace qshield::nn
