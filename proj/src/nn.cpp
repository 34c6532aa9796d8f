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
#include "qshield/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qshield/binary_io.hpp"
#include "qshield/errors.hpp"

namespace qshield::nn {

namespace {

constexpr std::string_view kCheckpointMagic = "QHM1";
constexpr std::size_t kCheckpointHeaderBytes = 4 + 1 + 5 * 4;

vqc::CircuitSpec circuit_for(HeadKind kind, std::size_t n_qubits, std::size_t n_layers,
                             vqc::Entanglement entanglement) {
    return kind == HeadKind::hybrid1 ? vqc::build_hybrid1(n_qubits, n_layers, entanglement)
                                     : vqc::build_hybrid2(n_qubits, n_layers, entanglement);
}

void check_label(std::size_t label, std::size_t n_classes) {
    if (label >= n_classes) {
        throw ArgumentError("label " + std::to_string(label) + " out of range for " +
                            std::to_string(n_classes) + " classes");
    }
}

void check_input(const HybridModel &model, const Eigen::VectorXd &x) {
    if (static_cast<std::size_t>(x.size()) != model.feature_dim()) {
        throw ArgumentError("model expects " + std::to_string(model.feature_dim()) +
                            " features, got " + std::to_string(x.size()));
    }
}

// Row-major copy of a column-major Eigen matrix into `out` at `pos`.
void put_row_major(const Eigen::MatrixXd &m, Eigen::VectorXd &out, Eigen::Index &pos) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out[pos++] = m(r, c);
        }
    }
}

void get_row_major(Eigen::MatrixXd &m, const Eigen::VectorXd &in, Eigen::Index &pos) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(r, c) = in[pos++];
        }
    }
}

void put(const Eigen::VectorXd &v, Eigen::VectorXd &out, Eigen::Index &pos) {
    out.segment(pos, v.size()) = v;
    pos += v.size();
}

void get(Eigen::VectorXd &v, const Eigen::VectorXd &in, Eigen::Index &pos) {
    v = in.segment(pos, v.size());
    pos += v.size();
}

// Hidden pre-activation and activation shared by the forward and backward paths.
struct HiddenPass {
    Eigen::VectorXd pre;
    Eigen::VectorXd post;
};

HiddenPass hidden(const HybridModel &model, const Eigen::VectorXd &x) {
    HiddenPass pass;
    pass.pre = model.dense_in(x);
    if (model.quantum) {
        pass.post = vqc::forward(*model.quantum, pass.pre);
    } else {
        pass.post = relu6(pass.pre);
    }
    return pass;
}

} // namespace

LossAndGrad softmax_cross_entropy(const Eigen::VectorXd &logits, std::size_t label) {
    if (logits.size() < 2) {
        throw ArgumentError("softmax cross-entropy needs at least 2 logits");
    }
    check_label(label, static_cast<std::size_t>(logits.size()));
    const double top = logits.maxCoeff();
    const Eigen::ArrayXd shifted = logits.array() - top;
    const double log_norm = std::log(shifted.exp().sum());
    LossAndGrad out;
    out.loss = log_norm - shifted[static_cast<Eigen::Index>(label)];
    out.grad = (shifted - log_norm).exp().matrix();
    out.grad[static_cast<Eigen::Index>(label)] -= 1.0;
    return out;
}

DenseLayer DenseLayer::zeros(std::size_t in_dim, std::size_t out_dim) {
    return {Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(out_dim), static_cast<Eigen::Index>(in_dim)),
            Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out_dim))};
}

DenseLayer DenseLayer::random(std::size_t in_dim, std::size_t out_dim, std::mt19937_64 &rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
    std::uniform_real_distribution<double> dist(-bound, bound);
    DenseLayer layer = zeros(in_dim, out_dim);
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
        for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
            layer.weights(r, c) = dist(rng);
        }
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) {
        layer.bias[r] = dist(rng);
    }
    return layer;
}

std::string_view to_string(HeadKind kind) {
    switch (kind) {
    case HeadKind::classical:
        return "classical";
    case HeadKind::hybrid1:
        return "hybrid1";
    case HeadKind::hybrid2:
        return "hybrid2";
    }
    return "unknown";
}

HeadKind head_kind_from_string(std::string_view name) {
    for (HeadKind kind : {HeadKind::classical, HeadKind::hybrid1, HeadKind::hybrid2}) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    throw ArgumentError("unknown model kind '" + std::string(name) +
                        "' (valid: classical, hybrid1, hybrid2)");
}

std::size_t HybridModel::n_layers() const {
    if (!quantum) {
        return 0;
    }
    return quantum->spec.n_params() / (2 * quantum->spec.n_qubits());
}

void HybridModel::validate() const {
    if (dense_in.bias.size() != dense_in.weights.rows() || dense_out.bias.size() != dense_out.weights.rows()) {
        throw ArgumentError("dense layer bias does not match its weight rows");
    }
    if (dense_out.in_dim() != width()) {
        throw ArgumentError("dense_out expects " + std::to_string(dense_out.in_dim()) +
                            " hidden units, dense_in produces " + std::to_string(width()));
    }
    if ((kind == HeadKind::classical) == quantum.has_value()) {
        throw ArgumentError(std::string(to_string(kind)) + " head has the wrong quantum layer presence");
    }
    if (quantum && (quantum->spec.n_qubits() != width() || quantum->spec.n_inputs() != width())) {
        throw ArgumentError("quantum layer width does not match the dense layers");
    }
}

HybridModel make_model(const ModelConfig &config, std::uint64_t seed) {
    if (config.feature_dim == 0 || config.width == 0) {
        throw ArgumentError("model dimensions must be positive");
    }
    if (config.n_classes < 2) {
        throw ArgumentError("model needs at least 2 classes");
    }
    std::mt19937_64 rng(seed);
    HybridModel model;
    model.kind = config.kind;
    model.dense_in = DenseLayer::random(config.feature_dim, config.width, rng);
    if (config.kind != HeadKind::classical) {
        model.quantum = vqc::QuantumLayer::random(
            circuit_for(config.kind, config.width, config.n_layers, config.entanglement), rng);
    }
    model.dense_out = DenseLayer::random(config.width, config.n_classes, rng);
    return model;
}

std::size_t parameter_count(const HybridModel &model) {
    return static_cast<std::size_t>(model.dense_in.weights.size() + model.dense_in.bias.size() +
                                    (model.quantum ? model.quantum->params.size() : 0) +
                                    model.dense_out.weights.size() + model.dense_out.bias.size());
}

Eigen::VectorXd flatten_parameters(const HybridModel &model) {
    Eigen::VectorXd flat(static_cast<Eigen::Index>(parameter_count(model)));
    Eigen::Index pos = 0;
    put_row_major(model.dense_in.weights, flat, pos);
    put(model.dense_in.bias, flat, pos);
    if (model.quantum) {
        put(model.quantum->params, flat, pos);
    }
    put_row_major(model.dense_out.weights, flat, pos);
    put(model.dense_out.bias, flat, pos);
    return flat;
}

void assign_parameters(HybridModel &model, const Eigen::VectorXd &flat) {
    if (static_cast<std::size_t>(flat.size()) != parameter_count(model)) {
        throw ArgumentError("model has " + std::to_string(parameter_count(model)) +
                            " parameters, got " + std::to_string(flat.size()));
    }
    Eigen::Index pos = 0;
    get_row_major(model.dense_in.weights, flat, pos);
    get(model.dense_in.bias, flat, pos);
    if (model.quantum) {
        get(model.quantum->params, flat, pos);
    }
    get_row_major(model.dense_out.weights, flat, pos);
    get(model.dense_out.bias, flat, pos);
}

Eigen::VectorXd model_forward(const HybridModel &model, const Eigen::VectorXd &x) {
    check_input(model, x);
    return model.dense_out(hidden(model, x).post);
}

std::size_t predict(const HybridModel &model, const Eigen::VectorXd &x) {
    Eigen::Index best = 0;
    model_forward(model, x).maxCoeff(&best);
    return static_cast<std::size_t>(best);
}

double accuracy(const HybridModel &model, const data::FeatureSet &set) {
    if (set.n_samples() == 0) {
        throw ArgumentError("accuracy of an empty set");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < set.n_samples(); ++i) {
        correct += predict(model, set.sample(i)) == set.labels[i];
    }
    return static_cast<double>(correct) / static_cast<double>(set.n_samples());
}

Eigen::VectorXd ModelGradients::flat() const {
    Eigen::VectorXd out(dense_in_weights.size() + dense_in_bias.size() + quantum.size() +
                        dense_out_weights.size() + dense_out_bias.size());
    Eigen::Index pos = 0;
    put_row_major(dense_in_weights, out, pos);
    put(dense_in_bias, out, pos);
    put(quantum, out, pos);
    put_row_major(dense_out_weights, out, pos);
    put(dense_out_bias, out, pos);
    return out;
}

ModelGradients model_backward(const HybridModel &model, const Eigen::VectorXd &x, std::size_t label) {
    check_input(model, x);
    const HiddenPass pass = hidden(model, x);
    const LossAndGrad ce = softmax_cross_entropy(model.dense_out(pass.post), label);

    ModelGradients g;
    g.loss = ce.loss;
    g.dense_out_weights = ce.grad * pass.post.transpose();
    g.dense_out_bias = ce.grad;
    const Eigen::VectorXd d_post = model.dense_out.weights.transpose() * ce.grad;

    Eigen::VectorXd d_pre;
    if (model.quantum) {
        const vqc::Jacobian jac = vqc::jacobian(*model.quantum, pass.pre);
        g.quantum = jac.d_params.transpose() * d_post;
        d_pre = jac.d_inputs.transpose() * d_post;
    } else {
        g.quantum.resize(0);
        d_pre = d_post.cwiseProduct(relu6_grad(pass.pre));
    }
    g.dense_in_weights = d_pre * x.transpose();
    g.dense_in_bias = d_pre;
    g.d_input = model.dense_in.weights.transpose() * d_pre;
    return g;
}

LossAndGrad model_input_gradient(const HybridModel &model, const Eigen::VectorXd &x, std::size_t label) {
    check_input(model, x);
    const HiddenPass pass = hidden(model, x);
    const LossAndGrad ce = softmax_cross_entropy(model.dense_out(pass.post), label);
    const Eigen::VectorXd d_post = model.dense_out.weights.transpose() * ce.grad;
    const Eigen::VectorXd d_pre = model.quantum
                                      ? Eigen::VectorXd(vqc::input_jacobian(*model.quantum, pass.pre).transpose() * d_post)
                                      : Eigen::VectorXd(d_post.cwiseProduct(relu6_grad(pass.pre)));
    return {ce.loss, model.dense_in.weights.transpose() * d_pre};
}

double model_loss(const HybridModel &model, const Eigen::VectorXd &x, std::size_t label) {
    return softmax_cross_entropy(model_forward(model, x), label).loss;
}

AdamState::AdamState(std::size_t n_params, AdamConfig cfg)
    : config(cfg), first_moment(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_params))),
      second_moment(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_params))) {}

Eigen::VectorXd adam_step(AdamState &state, const Eigen::VectorXd &params, const Eigen::VectorXd &grads) {
    if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
        throw ArgumentError("Adam shape mismatch: " + std::to_string(params.size()) + " params, " +
                            std::to_string(grads.size()) + " grads, " +
                            std::to_string(state.first_moment.size()) + " accumulators");
    }
    if (!grads.allFinite()) {
        throw NumericError("non-finite gradient passed to Adam");
    }
    const AdamConfig &c = state.config;
    ++state.step;
    state.first_moment = c.beta1 * state.first_moment + (1 - c.beta1) * grads;
    state.second_moment = c.beta2 * state.second_moment + (1 - c.beta2) * grads.cwiseAbs2();
    const double t = static_cast<double>(state.step);
    const double correction1 = 1 - std::pow(c.beta1, t);
    const double correction2 = 1 - std::pow(c.beta2, t);
    const Eigen::ArrayXd m_hat = state.first_moment.array() / correction1;
    const Eigen::ArrayXd v_hat = state.second_moment.array() / correction2;
    return params.array() - c.learning_rate * m_hat / (v_hat.sqrt() + c.epsilon);
}

TrainResult train(HybridModel model, const data::FeatureSet &train_set, const TrainConfig &config,
                  const EpochCallback &on_epoch) {
    if (train_set.n_samples() == 0) {
        throw ArgumentError("training set is empty");
    }
    train_set.validate();
    if (train_set.feature_dim() != model.feature_dim()) {
        throw ArgumentError("training features have dimension " + std::to_string(train_set.feature_dim()) +
                            ", model expects " + std::to_string(model.feature_dim()));
    }
    for (std::uint32_t label : train_set.labels) {
        check_label(label, model.n_classes());
    }
    if (config.batch_size == 0) {
        throw ArgumentError("batch size must be positive");
    }

    std::mt19937_64 rng(config.seed);
    AdamState adam(parameter_count(model), config.adam);
    Eigen::VectorXd params = flatten_parameters(model);
    std::vector<std::size_t> order(train_set.n_samples());
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainResult result{std::move(model), {}};
    HybridModel &m = result.model;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            Eigen::VectorXd grad = Eigen::VectorXd::Zero(params.size());
            for (std::size_t b = start; b < stop; ++b) {
                const std::size_t i = order[b];
                const ModelGradients g = model_backward(m, train_set.sample(i), train_set.labels[i]);
                if (!std::isfinite(g.loss)) {
                    throw NumericError("non-finite loss at epoch " + std::to_string(epoch + 1));
                }
                grad += g.flat();
            }
            grad /= static_cast<double>(stop - start);
            params = adam_step(adam, params, grad);
            assign_parameters(m, params);
        }

        EpochStats stats;
        std::size_t correct = 0;
        for (std::size_t i = 0; i < train_set.n_samples(); ++i) {
            const Eigen::VectorXd logits = model_forward(m, train_set.sample(i));
            stats.mean_loss += softmax_cross_entropy(logits, train_set.labels[i]).loss;
            Eigen::Index best = 0;
            logits.maxCoeff(&best);
            correct += static_cast<std::size_t>(best) == train_set.labels[i];
        }
        stats.mean_loss /= static_cast<double>(train_set.n_samples());
        stats.accuracy = static_cast<double>(correct) / static_cast<double>(train_set.n_samples());
        if (!std::isfinite(stats.mean_loss)) {
            throw NumericError("non-finite loss at epoch " + std::to_string(epoch + 1));
        }
        result.trace.push_back(stats);
        if (on_epoch) {
            on_epoch(epoch + 1, stats);
        }
    }
    return result;
}

std::vector<std::uint8_t> encode_checkpoint(const HybridModel &model) {
    model.validate();
    if (model.quantum &&
        vqc::to_listing(model.quantum->spec) !=
            vqc::to_listing(circuit_for(model.kind, model.width(), model.n_layers(), vqc::Entanglement::chain))) {
        throw ArgumentError("only the standard chain-entangled hybrid circuits can be checkpointed");
    }
    detail::ByteWriter w;
    w.raw(kCheckpointMagic);
    w.u8(static_cast<std::uint8_t>(model.kind));
    w.u32(static_cast<std::uint32_t>(model.feature_dim()));
    w.u32(static_cast<std::uint32_t>(model.width()));
    w.u32(static_cast<std::uint32_t>(model.n_classes()));
    w.u32(static_cast<std::uint32_t>(model.quantum ? model.width() : 0));
    w.u32(static_cast<std::uint32_t>(model.n_layers()));
    const Eigen::VectorXd flat = flatten_parameters(model);
    for (Eigen::Index i = 0; i < flat.size(); ++i) {
        w.f64(flat[i]);
    }
    return w.take();
}

CheckpointHeader decode_checkpoint_header(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kCheckpointHeaderBytes) {
        throw FormatError("truncated checkpoint header: expected " +
                          std::to_string(kCheckpointHeaderBytes) + " bytes, got " +
                          std::to_string(bytes.size()));
    }
    detail::ByteReader r(bytes);
    if (r.raw(4) != kCheckpointMagic) {
        throw FormatError("bad checkpoint magic, expected 'QHM1'");
    }
    const std::uint8_t kind = r.u8();
    if (kind > 2) {
        throw FormatError("unknown head kind byte " + std::to_string(kind));
    }
    CheckpointHeader h;
    h.kind = static_cast<HeadKind>(kind);
    h.feature_dim = r.u32();
    h.width = r.u32();
    h.n_classes = r.u32();
    h.n_qubits = r.u32();
    h.n_layers = r.u32();
    if (h.feature_dim == 0 || h.width == 0 || h.n_classes < 2) {
        throw FormatError("checkpoint declares degenerate dimensions");
    }
    if (h.kind == HeadKind::classical ? (h.n_qubits != 0 || h.n_layers != 0)
                                      : (h.n_qubits != h.width || h.n_qubits < 2 || h.n_qubits > qsim::kMaxQubits)) {
        throw FormatError("checkpoint qubit/layer fields inconsistent with head kind " +
                          std::string(to_string(h.kind)));
    }
    return h;
}

HybridModel decode_checkpoint(std::span<const std::uint8_t> bytes) {
    const CheckpointHeader h = decode_checkpoint_header(bytes);
    ModelConfig cfg{h.kind, h.feature_dim, h.width, h.n_classes, h.n_layers, vqc::Entanglement::chain};
    HybridModel model;
    model.kind = h.kind;
    model.dense_in = DenseLayer::zeros(cfg.feature_dim, cfg.width);
    if (h.kind != HeadKind::classical) {
        vqc::CircuitSpec spec = circuit_for(h.kind, h.n_qubits, h.n_layers, vqc::Entanglement::chain);
        const auto n = static_cast<Eigen::Index>(spec.n_params());
        model.quantum.emplace(std::move(spec), Eigen::VectorXd::Zero(n));
    }
    model.dense_out = DenseLayer::zeros(cfg.width, cfg.n_classes);
    const std::size_t n_params = parameter_count(model);
    const std::size_t expected = kCheckpointHeaderBytes + 8 * n_params;
    if (bytes.size() != expected) {
        throw FormatError("checkpoint length mismatch: expected " + std::to_string(expected) +
                          " bytes, got " + std::to_string(bytes.size()));
    }
    detail::ByteReader r(bytes.subspan(kCheckpointHeaderBytes));
    Eigen::VectorXd flat(static_cast<Eigen::Index>(n_params));
    for (Eigen::Index i = 0; i < flat.size(); ++i) {
        flat[i] = r.f64();
    }
    if (!flat.allFinite()) {
        throw FormatError("checkpoint contains non-finite parameters");
    }
    assign_parameters(model, flat);
    return model;
}

void save_checkpoint(const HybridModel &model, const std::filesystem::path &path) {
    detail::write_file(path, encode_checkpoint(model));
}

HybridModel load_checkpoint(const std::filesystem::path &path) {
    try {
        return decode_checkpoint(detail::read_file(path));
    } catch (const FormatError &e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

CheckpointHeader read_checkpoint_header(const std::filesystem::path &path) {
    try {
        return decode_checkpoint_header(detail::read_file(path));
    } catch (const FormatError &e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

} // namespace qshield::nn
