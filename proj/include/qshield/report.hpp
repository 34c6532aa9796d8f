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
 * @file report.hpp
 * Accuracy grids over (attack, eps, model), their CSV and text renderings,
 * and the end-to-end reproduction pipeline behind `qshield repro`.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qshield/attacks.hpp"
#include "qshield/data.hpp"
#include "qshield/nn.hpp"

namespace qshield::report {

struct NamedModel {
    std::string name;
    nn::HybridModel model;
};

struct MetricsRow {
    attacks::Method method = attacks::Method::none;
    double eps = 0.0;
    std::string model;
    double accuracy_percent = 0.0;
    std::size_t n_test = 0;
    std::uint64_t seed = 0;
};

struct MetricsTable {
    std::vector<MetricsRow> rows; ///< method-major, then eps, then model
    std::vector<std::string> model_names;
    std::vector<attacks::Method> methods;
    std::vector<double> eps_values;

    std::uint64_t seed = 0;
    std::string data_source;
    double train_fraction = 0.0;
    std::string timestamp; ///< left empty unless the caller stamps it

    [[nodiscard]] double accuracy(attacks::Method method, double eps, const std::string &model) const;
};

/// Optional replacements for the per-method attack defaults.
struct AttackOverrides {
    std::optional<std::size_t> n_iter;
    std::optional<double> step_size;
    std::optional<std::size_t> spsa_samples;
    std::optional<double> spsa_delta;
    std::optional<double> sparsity_quantile;
    std::optional<bool> random_init;

    [[nodiscard]] attacks::AttackConfig resolve(attacks::Method method, double eps, std::uint64_t seed) const;
};

/// Report row order: none, gradient, fgsm, sparse_l1, spsa, pgd_l2.
std::vector<attacks::Method> table_methods();

/**
 * Evaluates every (method, eps, model) cell. The "none" method is clean
 * accuracy and is computed once per model.
 */
MetricsTable evaluate_grid(const std::vector<NamedModel> &models, const data::FeatureSet &test_set,
                           const std::vector<attacks::Method> &methods, const std::vector<double> &eps_values,
                           const AttackOverrides &overrides, std::uint64_t seed);

/// Header `method,eps,model,accuracy_percent,n_test,seed`, one line per cell.
void write_csv(const MetricsTable &table, std::ostream &out);

/// Aligned plain-text table, one row per (method, eps), one column per
/// model; the best accuracy of each row is marked with '*'.
std::string render_table(const MetricsTable &table, const std::string &title);

/// "sep=3,dim=8,classes=2,n=200" style synthetic data description.
struct SynthSpec {
    double separation = 3.0;
    std::size_t feature_dim = 8;
    std::size_t n_classes = 2;
    std::size_t n_samples = 200; ///< total; split evenly across classes

    static SynthSpec parse(const std::string &text);
    [[nodiscard]] std::string to_string() const;
    [[nodiscard]] data::FeatureSet generate(std::uint64_t seed) const;
};

struct DataSource {
    std::optional<std::filesystem::path> path; ///< QFV1 file; synth otherwise
    SynthSpec synth;

    [[nodiscard]] data::FeatureSet load(std::uint64_t seed) const;
    [[nodiscard]] std::string describe() const;
};

struct ModelSettings {
    std::size_t qubits = 4;
    std::size_t layers = 6;
    std::size_t classical_width = 4;
    nn::TrainConfig train;
};

/// Trains `kind` on an already standardized training split.
nn::HybridModel train_head(nn::HeadKind kind, const data::FeatureSet &train_set, const ModelSettings &settings,
                           std::uint64_t seed);

struct ReproConfig {
    DataSource source;
    std::optional<DataSource> multiclass_source; ///< runs the classical vs hybrid2 grid when set
    std::size_t multiclass_qubits = 6;
    std::uint64_t seed = 7;
    std::vector<double> train_fractions{0.8, 0.4};
    std::vector<double> eps_values{0.05, 1.0};
    ModelSettings models;
    AttackOverrides attack;
    std::size_t trend_seeds = 5;
};

/// Hybrid-vs-classical comparison over the attacked cells of one grid.
struct TrendCounts {
    std::uint64_t seed = 0;
    std::size_t hybrid_better = 0;
    std::size_t tied = 0;
    std::size_t classical_better = 0;
};

struct ReproResult {
    std::vector<MetricsTable> binary; ///< one per train fraction
    std::optional<MetricsTable> multiclass;
    std::vector<TrendCounts> trend;
};

/// `on_progress` receives one-line status messages for stderr.
ReproResult run_repro(const ReproConfig &config,
                      const std::function<void(const std::string &)> &on_progress = {});

TrendCounts count_trend(const MetricsTable &table);
std::string render_trend(const std::vector<TrendCounts> &trend);

} // namespace qshield::report
