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
 * @file attacks.hpp
 * Non-targeted evasion attacks on feature vectors: normalized gradient step,
 * FGSM, L2 PGD, sparse L1 descent (white-box) and SPSA (black-box), plus the
 * norm-ball projections they rely on.
 */
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qshield/data.hpp"
#include "qshield/nn.hpp"

namespace qshield::attacks {

enum class Method { none, gradient, fgsm, pgd_l2, sparse_l1, spsa };

std::string_view to_string(Method method);
/// Row label in the report tables, e.g. "Gradient Sign Attack" for fgsm.
std::string_view display_name(Method method);
/// Accepts the short names listed by `method_names()`.
Method method_from_string(std::string_view name);
std::string method_names();

/// White-box access: loss and its gradient with respect to the input.
using GradOracle = std::function<nn::LossAndGrad(const Eigen::VectorXd &, std::size_t)>;
/// Black-box access: loss only.
using LossOracle = std::function<double(const Eigen::VectorXd &, std::size_t)>;

struct AttackConfig {
    Method method = Method::none;
    double eps = 0.0;
    std::size_t n_iter = 10;
    double step_size = 0.0;
    std::size_t spsa_samples = 32;
    double spsa_delta = 0.01;
    double sparsity_quantile = 0.8;
    bool random_init = true; ///< PGD starts from a random point in the ball
    std::uint64_t seed = 0;

    /// Per-method defaults: PGD 10 iterations at eps/4; sparse L1 10
    /// iterations at eps/4 with q = 0.8; SPSA 20 iterations at eps/10 with
    /// 32 samples and delta 0.01.
    static AttackConfig defaults(Method method, double eps, std::uint64_t seed = 0);

    void validate() const;
};

template <typename Derived>
typename Derived::PlainObject project_l2_ball(const Eigen::MatrixBase<Derived> &v,
                                              typename Derived::Scalar radius) {
    const auto norm = v.norm();
    if (norm <= radius) {
        return v;
    }
    return v * (radius / norm);
}

template <typename Derived>
typename Derived::PlainObject project_linf_ball(const Eigen::MatrixBase<Derived> &v,
                                                typename Derived::Scalar radius) {
    return v.cwiseMax(-radius).cwiseMin(radius);
}

/**
 * Euclidean projection of `v` onto {u : ||u||_1 <= radius}. Sorts |v| in
 * decreasing order, finds the largest rho with
 * mu_rho - (sum_{j<=rho} mu_j - radius) / rho > 0, and soft-thresholds at the
 * resulting theta.
 */
template <typename Derived>
typename Derived::PlainObject project_l1_ball(const Eigen::MatrixBase<Derived> &v,
                                              typename Derived::Scalar radius) {
    using Scalar = typename Derived::Scalar;
    typename Derived::PlainObject out = v;
    if (v.template lpNorm<1>() <= radius) {
        return out;
    }
    if (radius <= Scalar(0)) {
        out.setZero();
        return out;
    }
    std::vector<Scalar> mu(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        mu[static_cast<std::size_t>(i)] = std::abs(v(i));
    }
    std::sort(mu.begin(), mu.end(), std::greater<Scalar>());
    Scalar cumulative(0), theta(0);
    for (std::size_t j = 0; j < mu.size(); ++j) {
        cumulative += mu[j];
        const Scalar candidate = (cumulative - radius) / static_cast<Scalar>(j + 1);
        if (mu[j] - candidate > Scalar(0)) {
            theta = candidate;
        }
    }
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const Scalar shrunk = std::max(std::abs(v(i)) - theta, Scalar(0));
        out(i) = v(i) < Scalar(0) ? -shrunk : shrunk;
    }
    return out;
}

/// q-quantile of `values` with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

Eigen::VectorXd gradient_attack(const GradOracle &oracle, const Eigen::VectorXd &x, std::size_t label,
                                double eps);

Eigen::VectorXd fgsm(const GradOracle &oracle, const Eigen::VectorXd &x, std::size_t label, double eps);

Eigen::VectorXd pgd_l2(const GradOracle &oracle, const Eigen::VectorXd &x, std::size_t label, double eps,
                       double step_size, std::size_t n_iter, std::uint64_t seed, bool random_init = true);

Eigen::VectorXd sparse_l1_descent(const GradOracle &oracle, const Eigen::VectorXd &x, std::size_t label,
                                  double eps, double step_size, std::size_t n_iter, double sparsity_quantile);

/// Rademacher two-point estimate averaged over `samples` draws from `rng`.
Eigen::VectorXd spsa_gradient(const LossOracle &oracle, const Eigen::VectorXd &x, std::size_t label,
                              std::size_t samples, double delta, std::mt19937_64 &rng);

Eigen::VectorXd spsa(const LossOracle &oracle, const Eigen::VectorXd &x, std::size_t label, double eps,
                     std::size_t n_iter, std::size_t spsa_samples, double spsa_delta, double step_size,
                     std::uint64_t seed);

/**
 * Dispatches on `config.method`. `sample_index` is XOR-ed into the seed so
 * every sample gets its own stream independent of evaluation order. SPSA is
 * only ever handed `loss_oracle`.
 */
Eigen::VectorXd craft(const AttackConfig &config, const GradOracle &grad_oracle,
                      const LossOracle &loss_oracle, const Eigen::VectorXd &x, std::size_t label,
                      std::size_t sample_index);

GradOracle grad_oracle_for(const nn::HybridModel &model);
LossOracle loss_oracle_for(const nn::HybridModel &model);

/// Fraction of `test_set` still classified correctly after the attack.
double evaluate_under_attack(const nn::HybridModel &model, const data::FeatureSet &test_set,
                             const AttackConfig &config);

} // namespace qshield::attacks
