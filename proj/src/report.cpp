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
#include "qshield/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "qshield/errors.hpp"

namespace qshield::report {

using attacks::Method;

namespace {

std::string format_number(const char *fmt, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, value);
    return buf;
}

// Table form: whole numbers keep one decimal, e.g. "1.0".
std::string format_eps(double eps) {
    return format_number(eps == std::floor(eps) && std::abs(eps) < 1e15 ? "%.1f" : "%g", eps);
}

std::size_t parse_count(const std::string &key, const std::string &value) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(value, &used);
    } catch (const std::exception &) {
        used = 0;
    }
    if (used != value.size() || value.empty() || value[0] == '-') {
        throw ArgumentError("synth field '" + key + "' expects a non-negative integer, got '" + value + "'");
    }
    return static_cast<std::size_t>(v);
}

} // namespace

double MetricsTable::accuracy(Method method, double eps, const std::string &model) const {
    for (const MetricsRow &row : rows) {
        if (row.method == method && row.eps == eps && row.model == model) {
            return row.accuracy_percent;
        }
    }
    throw ArgumentError("no cell for (" + std::string(attacks::to_string(method)) + ", " +
                        format_number("%g", eps) + ", " + model + ")");
}

attacks::AttackConfig AttackOverrides::resolve(Method method, double eps, std::uint64_t seed) const {
    attacks::AttackConfig cfg = attacks::AttackConfig::defaults(method, eps, seed);
    if (n_iter) {
        cfg.n_iter = *n_iter;
    }
    if (step_size) {
        cfg.step_size = *step_size;
    }
    if (spsa_samples) {
        cfg.spsa_samples = *spsa_samples;
    }
    if (spsa_delta) {
        cfg.spsa_delta = *spsa_delta;
    }
    if (sparsity_quantile) {
        cfg.sparsity_quantile = *sparsity_quantile;
    }
    if (random_init) {
        cfg.random_init = *random_init;
    }
    return cfg;
}

std::vector<Method> table_methods() {
    return {Method::none, Method::gradient, Method::fgsm, Method::sparse_l1, Method::spsa, Method::pgd_l2};
}

MetricsTable evaluate_grid(const std::vector<NamedModel> &models, const data::FeatureSet &test_set,
                           const std::vector<Method> &methods, const std::vector<double> &eps_values,
                           const AttackOverrides &overrides, std::uint64_t seed) {
    if (models.empty() || methods.empty() || eps_values.empty()) {
        throw ArgumentError("grid needs at least one model, method and eps value");
    }
    MetricsTable table;
    table.methods = methods;
    table.eps_values = eps_values;
    table.seed = seed;
    for (const NamedModel &m : models) {
        table.model_names.push_back(m.name);
    }

    std::vector<double> clean(models.size());
    for (std::size_t k = 0; k < models.size(); ++k) {
        clean[k] = nn::accuracy(models[k].model, test_set);
    }
    for (Method method : methods) {
        for (double eps : eps_values) {
            const attacks::AttackConfig cfg = overrides.resolve(method, eps, seed);
            for (std::size_t k = 0; k < models.size(); ++k) {
                const double acc = method == Method::none
                                       ? clean[k]
                                       : attacks::evaluate_under_attack(models[k].model, test_set, cfg);
                table.rows.push_back({method, eps, models[k].name, 100.0 * acc, test_set.n_samples(), seed});
            }
        }
    }
    return table;
}

void write_csv(const MetricsTable &table, std::ostream &out) {
    out << "method,eps,model,accuracy_percent,n_test,seed\n";
    for (const MetricsRow &row : table.rows) {
        out << attacks::to_string(row.method) << ',' << format_number("%g", row.eps) << ',' << row.model << ','
            << format_number("%.4f", row.accuracy_percent) << ',' << row.n_test << ',' << row.seed << '\n';
    }
}

std::string render_table(const MetricsTable &table, const std::string &title) {
    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> header{"Attack Model", "Perturbation Coefficient"};
    header.insert(header.end(), table.model_names.begin(), table.model_names.end());
    cells.push_back(header);
    for (Method method : table.methods) {
        bool first = true;
        for (double eps : table.eps_values) {
            std::vector<std::string> line{first ? std::string(attacks::display_name(method)) : "",
                                          format_eps(eps)};
            first = false;
            double best = -1.0;
            for (const auto &name : table.model_names) {
                best = std::max(best, table.accuracy(method, eps, name));
            }
            for (const auto &name : table.model_names) {
                const double acc = table.accuracy(method, eps, name);
                line.push_back(format_number("%.2f", acc) + (acc == best ? "*" : " "));
            }
            cells.push_back(std::move(line));
        }
    }
    std::vector<std::size_t> widths(header.size(), 0);
    for (const auto &line : cells) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            widths[c] = std::max(widths[c], line[c].size());
        }
    }

    std::ostringstream out;
    out << title << '\n';
    out << "seed " << table.seed << ", data " << table.data_source << ", train fraction "
        << format_number("%g", table.train_fraction);
    if (!table.timestamp.empty()) {
        out << ", " << table.timestamp;
    }
    out << '\n';
    for (std::size_t r = 0; r < cells.size(); ++r) {
        for (std::size_t c = 0; c < cells[r].size(); ++c) {
            out << (c ? "  " : "");
            if (c < 2) {
                out << std::left << std::setw(static_cast<int>(widths[c])) << cells[r][c];
            } else {
                out << std::right << std::setw(static_cast<int>(widths[c])) << cells[r][c];
            }
        }
        out << '\n';
        if (r == 0) {
            std::size_t total = 0;
            for (std::size_t w : widths) {
                total += w;
            }
            out << std::string(total + 2 * (widths.size() - 1), '-') << '\n';
        }
    }
    out << "* best accuracy in the row\n";
    return out.str();
}

SynthSpec SynthSpec::parse(const std::string &text) {
    SynthSpec spec;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) {
            continue;
        }
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw ArgumentError("synth field '" + item + "' is not key=value");
        }
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        if (key == "sep") {
            std::size_t used = 0;
            try {
                spec.separation = std::stod(value, &used);
            } catch (const std::exception &) {
                used = 0;
            }
            if (used != value.size() || value.empty() || !(spec.separation >= 0)) {
                throw ArgumentError("synth field 'sep' expects a non-negative number, got '" + value + "'");
            }
        } else if (key == "dim") {
            spec.feature_dim = parse_count(key, value);
        } else if (key == "classes") {
            spec.n_classes = parse_count(key, value);
        } else if (key == "n") {
            spec.n_samples = parse_count(key, value);
        } else {
            throw ArgumentError("unknown synth field '" + key + "' (valid: sep, dim, classes, n)");
        }
    }
    if (spec.n_classes < 2 || spec.feature_dim == 0 || spec.n_samples < spec.n_classes) {
        throw ArgumentError("synth spec needs classes >= 2, dim >= 1 and n >= classes");
    }
    return spec;
}

std::string SynthSpec::to_string() const {
    return "sep=" + format_number("%g", separation) + ",dim=" + std::to_string(feature_dim) +
           ",classes=" + std::to_string(n_classes) + ",n=" + std::to_string(n_samples);
}

data::FeatureSet SynthSpec::generate(std::uint64_t seed) const {
    return data::synth_gaussian(n_samples / n_classes, feature_dim, n_classes, separation, seed);
}

data::FeatureSet DataSource::load(std::uint64_t seed) const {
    return path ? data::load_features(*path) : synth.generate(seed);
}

std::string DataSource::describe() const { return path ? path->string() : "synth:" + synth.to_string(); }

nn::HybridModel train_head(nn::HeadKind kind, const data::FeatureSet &train_set, const ModelSettings &settings,
                           std::uint64_t seed) {
    nn::ModelConfig cfg;
    cfg.kind = kind;
    cfg.feature_dim = train_set.feature_dim();
    cfg.width = kind == nn::HeadKind::classical ? settings.classical_width : settings.qubits;
    cfg.n_classes = train_set.n_classes;
    cfg.n_layers = settings.layers;
    nn::TrainConfig tc = settings.train;
    tc.seed = seed;
    return nn::train(nn::make_model(cfg, seed), train_set, tc).model;
}

namespace {

MetricsTable run_split(const DataSource &source, const std::vector<nn::HeadKind> &kinds,
                       const ModelSettings &settings, double fraction, const std::vector<double> &eps_values,
                       const AttackOverrides &overrides, std::uint64_t seed,
                       const std::function<void(const std::string &)> &progress) {
    const data::FeatureSet all = source.load(seed);
    const auto [raw_train, raw_test] = data::split(all, {fraction, seed, true});
    const data::StandardizedSplit prepared = data::standardize(raw_train, raw_test);
    std::vector<NamedModel> models;
    for (nn::HeadKind kind : kinds) {
        if (progress) {
            progress("training " + std::string(nn::to_string(kind)) + " (seed " + std::to_string(seed) +
                     ", train fraction " + format_number("%g", fraction) + ")");
        }
        models.push_back({std::string(nn::to_string(kind)), train_head(kind, prepared.train, settings, seed)});
    }
    if (progress) {
        progress("evaluating attack grid on " + std::to_string(prepared.test.n_samples()) + " test samples");
    }
    MetricsTable table = evaluate_grid(models, prepared.test, table_methods(), eps_values, overrides, seed);
    table.data_source = source.describe();
    table.train_fraction = fraction;
    return table;
}

const std::vector<nn::HeadKind> kBinaryHeads{nn::HeadKind::classical, nn::HeadKind::hybrid1,
                                             nn::HeadKind::hybrid2};

} // namespace

ReproResult run_repro(const ReproConfig &config, const std::function<void(const std::string &)> &on_progress) {
    if (config.train_fractions.empty()) {
        throw ArgumentError("repro needs at least one train fraction");
    }
    ReproResult result;
    for (double fraction : config.train_fractions) {
        result.binary.push_back(run_split(config.source, kBinaryHeads, config.models, fraction, config.eps_values,
                                          config.attack, config.seed, on_progress));
    }
    if (config.multiclass_source) {
        ModelSettings settings = config.models;
        settings.qubits = config.multiclass_qubits;
        settings.classical_width = config.multiclass_qubits;
        result.multiclass = run_split(*config.multiclass_source, {nn::HeadKind::classical, nn::HeadKind::hybrid2},
                                      settings, config.train_fractions.front(), config.eps_values, config.attack,
                                      config.seed, on_progress);
    }
    for (std::size_t s = 0; s < config.trend_seeds; ++s) {
        if (s == 0) {
            result.trend.push_back(count_trend(result.binary.front()));
            continue;
        }
        const std::uint64_t seed = config.seed + s;
        result.trend.push_back(count_trend(run_split(config.source, kBinaryHeads, config.models,
                                                     config.train_fractions.front(), config.eps_values,
                                                     config.attack, seed, on_progress)));
    }
    return result;
}

TrendCounts count_trend(const MetricsTable &table) {
    TrendCounts counts;
    counts.seed = table.seed;
    const std::string classical(nn::to_string(nn::HeadKind::classical));
    for (Method method : table.methods) {
        if (method == Method::none) {
            continue;
        }
        for (double eps : table.eps_values) {
            const double base = table.accuracy(method, eps, classical);
            double best_hybrid = -1.0;
            for (const auto &name : table.model_names) {
                if (name != classical) {
                    best_hybrid = std::max(best_hybrid, table.accuracy(method, eps, name));
                }
            }
            if (best_hybrid > base) {
                ++counts.hybrid_better;
            } else if (best_hybrid == base) {
                ++counts.tied;
            } else {
                ++counts.classical_better;
            }
        }
    }
    return counts;
}

std::string render_trend(const std::vector<TrendCounts> &trend) {
    std::ostringstream out;
    out << "Hybrid vs classical under attack (best hybrid column vs classical, attacked cells only)\n";
    std::size_t better = 0, tied = 0, worse = 0;
    for (const TrendCounts &t : trend) {
        out << "  seed " << t.seed << ": hybrid better " << t.hybrid_better << ", tied " << t.tied
            << ", classical better " << t.classical_better << '\n';
        better += t.hybrid_better;
        tied += t.tied;
        worse += t.classical_better;
    }
    out << "  total: hybrid better " << better << ", tied " << tied << ", classical better " << worse << '\n';
    out << "  (informational; not a pass/fail criterion)\n";
    return out.str();
}

} // namespace qshield::report
