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
#include "qshield/attacks.hpp"

#include <array>
#include <cmath>

#include "qshield/errors.hpp"

namespace qshield::attacks {

namespace {

struct MethodInfo {
    Method method;
    std::string_view name;
    std::string_view display;
};

constexpr std::array<MethodInfo, 6> kMethods{{
    {Method::none, "none", "Without attack"},
    {Method::gradient, "gradient", "Gradient Attack"},
    {Method::fgsm, "fgsm", "Gradient Sign Attack"},
    {Method::pgd_l2, "pgd_l2", "L2 PGD Attack"},
    {Method::sparse_l1, "sparse_l1", "Sparse L1 Descent Attack"},
    {Method::spsa, "spsa", "SPSA Attack"},
}};

constexpr double kTinyNorm = 1e-12;

void check_eps(double eps) {
    if (!(eps >= 0.0) || !std::isfinite(eps)) {
        throw ArgumentError("attack budget eps must be finite and non-negative, got " + std::to_string(eps));
    }
}

Eigen::VectorXd checked_gradient(const GradOracle &oracle, const Eigen::VectorXd &x, std::size_t label) {
    nn::LossAndGrad lg = oracle(x, label);
    if (!lg.grad.allFinite()) {
        throw NumericError("attack oracle returned a non-finite gradient");
    }
    return std::move(lg.grad);
}

double checked_loss(const LossOracle &oracle, const Eigen::VectorXd &x, std::size_t label) {
    const double loss = oracle(x, label);
    if (!std::isfinite(loss)) {
        throw NumericError("attack oracle returned a non-finite loss");
    }
    return loss;
}

} // namespace

std::string_view to_string(Method method) { return kMethods[static_cast<std::size_t>(method)].name; }

std::string_view display_name(Method method) { return kMethods[static_cast<std::size_t>(method)].display; }

std::string method_names() {
    std::string out;
    for (const auto &info : kMethods) {
        out += (out.empty() ? "" : ", ") + std::string(info.name);
    }
    return out;
}

Method method_from_string(std::string_view name) {
    for (const auto &info : kMethods) {
        if (info.name == name) {
            return info.method;
        }
    }
    throw ArgumentError("unknown attack method '" + std::string(name) + "' (valid: " + method_names() + ")");
}

AttackConfig AttackConfig::defaults(Method method, double eps, std::uint64_t seed) {
    AttackConfig cfg;
    cfg.method = method;
    cfg.eps = eps;
    cfg.seed = seed;
    switch (method) {
    case Method::pgd_l2:
    case Method::sparse_l1:
        cfg.n_iter = 10;
        cfg.step_size = eps / 4;
        break;
    case Method::spsa:
        cfg.n_iter = 20;
        cfg.step_size = eps / 10;
        break;
    default:
        cfg.n_iter = 1;
        cfg.step_size = eps;
        break;
    }
    return cfg;
}

void AttackConfig::validate() const {
    check_eps(eps);
    if (!(step_size >= 0.0) || !std::isfinite(step_size)) {
        throw ArgumentError("attack step size must be finite and non-negative");
    }
    const bool iterative = method == Method::pgd_l2 || method == Method::sparse_l1 || method == Method::spsa;
    if (iterative && n_iter == 0) {
        throw ArgumentError(std::string(to_string(method)) + " needs at least one iteration");
    }
    if (method == Method::spsa && (spsa_samples == 0 || !(spsa_delta > 0.0))) {
        throw ArgumentError("spsa needs spsa_samples >= 1 and spsa_delta > 0");
    }
    if (method == Method::sparse_l1 && !(sparsity_quantile >= 0.0 && sparsity_quantile < 1.0)) {
        throw ArgumentError("sparsity quantile must lie in [0, 1)");
    }
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw ArgumentError("quantile of an empty sample");
    }
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

Eigen::VectorXd gradient_attack(const GradOracle &oracle, const Eigen::VectorXd &x, std::size_t label,
                                double eps) {
    check_eps(eps);
    if (eps == 0.0) {
        return x;
    }
    const Eigen::VectorXd g = checked_gradient(oracle, x, label);
    const double norm = g.norm();
    if (norm < kTinyNorm) {
        return x;
    }
    return x + (eps / norm) * g;
}

Eigen::VectorXd fgsm(const GradOracle &oracle, const Eigen::VectorXd &x, std::size_t label, double eps) {
    check_eps(eps);
    if (eps == 0.0) {
        return x;
    }
    const Eigen::VectorXd g = checked_gradient(oracle, x, label);
    return x + eps * g.cwiseSign();
}

Eigen::VectorXd pgd_l2(const GradOracle &oracle, const Eigen::VectorXd &x, std::size_t label, double eps,
                       double step_size, std::size_t n_iter, std::uint64_t seed, bool random_init) {
    check_eps(eps);
    if (eps == 0.0) {
        return x;
    }
    Eigen::VectorXd current = x;
    if (random_init) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        Eigen::VectorXd direction(x.size());
        for (Eigen::Index i = 0; i < direction.size(); ++i) {
            direction[i] = normal(rng);
        }
        const double radius = eps * std::pow(unit(rng), 1.0 / static_cast<double>(x.size()));
        const double norm = direction.norm();
        if (norm > kTinyNorm) {
            current += (radius / norm) * direction;
        }
    }
    for (std::size_t it = 0; it < n_iter; ++it) {
        const Eigen::VectorXd g = checked_gradient(oracle, current, label);
        const double norm = g.norm();
        if (norm >= kTinyNorm) {
            current += (step_size / norm) * g;
        }
        current = x + project_l2_ball(current - x, eps);
    }
    return current;
}

Eigen::VectorXd sparse_l1_descent(const GradOracle &oracle, const Eigen::VectorXd &x, std::size_t label,
                                  double eps, double step_size, std::size_t n_iter, double sparsity_quantile) {
    check_eps(eps);
    if (!(sparsity_quantile >= 0.0 && sparsity_quantile < 1.0)) {
        throw ArgumentError("sparsity quantile must lie in [0, 1)");
    }
    if (eps == 0.0) {
        return x;
    }
    Eigen::VectorXd current = x;
    for (std::size_t it = 0; it < n_iter; ++it) {
        const Eigen::VectorXd g = checked_gradient(oracle, current, label);
        const Eigen::VectorXd magnitude = g.cwiseAbs();
        const double threshold =
            quantile(std::vector<double>(magnitude.data(), magnitude.data() + magnitude.size()), sparsity_quantile);
        const Eigen::ArrayXd keep = (magnitude.array() >= threshold).cast<double>();
        const double kept = keep.sum();
        current += (step_size / kept) * (keep * g.cwiseSign().array()).matrix();
        current = x + project_l1_ball(current - x, eps);
    }
    return current;
}

Eigen::VectorXd spsa_gradient(const LossOracle &oracle, const Eigen::VectorXd &x, std::size_t label,
                              std::size_t samples, double delta, std::mt19937_64 &rng) {
    std::bernoulli_distribution coin(0.5);
    Eigen::VectorXd estimate = Eigen::VectorXd::Zero(x.size());
    Eigen::VectorXd r(x.size());
    for (std::size_t s = 0; s < samples; ++s) {
        for (Eigen::Index i = 0; i < r.size(); ++i) {
            r[i] = coin(rng) ? 1.0 : -1.0;
        }
        const double plus = checked_loss(oracle, x + delta * r, label);
        const double minus = checked_loss(oracle, x - delta * r, label);
        // r is +-1, so dividing elementwise by r equals multiplying by it.
        estimate += ((plus - minus) / (2 * delta)) * r;
    }
    return estimate / static_cast<double>(samples);
}

Eigen::VectorXd spsa(const LossOracle &oracle, const Eigen::VectorXd &x, std::size_t label, double eps,
                     std::size_t n_iter, std::size_t spsa_samples, double spsa_delta, double step_size,
                     std::uint64_t seed) {
    check_eps(eps);
    if (spsa_samples == 0 || !(spsa_delta > 0.0)) {
        throw ArgumentError("spsa needs spsa_samples >= 1 and spsa_delta > 0");
    }
    if (eps == 0.0) {
        return x;
    }
    std::mt19937_64 rng(seed);
    Eigen::VectorXd current = x;
    for (std::size_t it = 0; it < n_iter; ++it) {
        const Eigen::VectorXd g = spsa_gradient(oracle, current, label, spsa_samples, spsa_delta, rng);
        current += step_size * g.cwiseSign();
        current = x + project_linf_ball(current - x, eps);
    }
    return current;
}

Eigen::VectorXd craft(const AttackConfig &config, const GradOracle &grad_oracle, const LossOracle &loss_oracle,
                      const Eigen::VectorXd &x, std::size_t label, std::size_t sample_index) {
    config.validate();
    const std::uint64_t seed = config.seed ^ static_cast<std::uint64_t>(sample_index);
    switch (config.method) {
    case Method::none:
        return x;
    case Method::gradient:
        return gradient_attack(grad_oracle, x, label, config.eps);
    case Method::fgsm:
        return fgsm(grad_oracle, x, label, config.eps);
    case Method::pgd_l2:
        return pgd_l2(grad_oracle, x, label, config.eps, config.step_size, config.n_iter, seed, config.random_init);
    case Method::sparse_l1:
        return sparse_l1_descent(grad_oracle, x, label, config.eps, config.step_size, config.n_iter,
                                 config.sparsity_quantile);
    case Method::spsa:
        return spsa(loss_oracle, x, label, config.eps, config.n_iter, config.spsa_samples, config.spsa_delta,
                    config.step_size, seed);
    }
    return x;
}

GradOracle grad_oracle_for(const nn::HybridModel &model) {
    return [&model](const Eigen::VectorXd &x, std::size_t label) {
        return nn::model_input_gradient(model, x, label);
    };
}

LossOracle loss_oracle_for(const nn::HybridModel &model) {
    return [&model](const Eigen::VectorXd &x, std::size_t label) { return nn::model_loss(model, x, label); };
}

double evaluate_under_attack(const nn::HybridModel &model, const data::FeatureSet &test_set,
                             const AttackConfig &config) {
    if (test_set.n_samples() == 0) {
        throw ArgumentError("cannot evaluate on an empty test set");
    }
    if (test_set.feature_dim() != model.feature_dim()) {
        throw ArgumentError("test features have dimension " + std::to_string(test_set.feature_dim()) +
                            ", model expects " + std::to_string(model.feature_dim()));
    }
    config.validate();
    const GradOracle grad = grad_oracle_for(model);
    const LossOracle loss = loss_oracle_for(model);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test_set.n_samples(); ++i) {
        const Eigen::VectorXd adv = craft(config, grad, loss, test_set.sample(i), test_set.labels[i], i);
        correct += nn::predict(model, adv) == test_set.labels[i];
    }
    return static_cast<double>(correct) / static_cast<double>(test_set.n_samples());
}

} // namespace qshield::attacks
