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
#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "qshield/attacks.hpp"
#include "qshield/data.hpp"
#include "qshield/errors.hpp"
#include "qshield/nn.hpp"
#include "qshield/report.hpp"

namespace qshield::cli {

namespace {

struct DataOptions {
    std::string data_path;
    std::string synth = "sep=3,dim=8,classes=2,n=200";
    double split = 0.8;
    bool no_stratify = false;
    std::uint64_t seed = 0;
    CLI::Option *seed_opt = nullptr;

    void attach(CLI::App &cmd) {
        auto *data = cmd.add_option("--data", data_path, "QFV1 feature file");
        auto *synth_opt = cmd.add_option("--synth", synth, "synthetic data, e.g. sep=3,dim=8,classes=2,n=200")
                              ->capture_default_str();
        data->excludes(synth_opt);
        cmd.add_option("--split", split, "train fraction")->capture_default_str();
        cmd.add_flag("--no-stratify", no_stratify, "split without per-class stratification");
        seed_opt = cmd.add_option("--seed", seed,
                                  "seed for data, split, init, shuffling and attacks (fallback: $QSHIELD_SEED)")
                       ->capture_default_str();
    }

    // Runs after the config file so the environment only fills a seed nobody set.
    void apply_seed_env() const {
        const char *env = std::getenv("QSHIELD_SEED");
        if (seed_opt->count() == 0 && env != nullptr && *env != '\0') {
            seed_opt->add_result(std::string(env));
            seed_opt->run_callback();
        }
    }

    [[nodiscard]] report::DataSource source() const {
        report::DataSource src;
        if (!data_path.empty()) {
            src.path = data_path;
        } else {
            src.synth = report::SynthSpec::parse(synth);
        }
        return src;
    }

    [[nodiscard]] data::StandardizedSplit prepare() const {
        const data::FeatureSet all = source().load(seed);
        const auto [train, test] = data::split(all, {split, seed, !no_stratify});
        return data::standardize(train, test);
    }
};

struct AttackOptions {
    std::optional<std::size_t> n_iter;
    std::optional<double> step_size;
    std::optional<std::size_t> spsa_samples;
    std::optional<double> spsa_delta;
    std::optional<double> sparsity_quantile;
    bool no_random_init = false;

    void attach(CLI::App &cmd) {
        cmd.add_option("--n-iter", n_iter, "iterations for pgd_l2, sparse_l1 and spsa");
        cmd.add_option("--step-size", step_size, "absolute step size (default: a fraction of eps)");
        cmd.add_option("--spsa-samples", spsa_samples, "Rademacher draws per SPSA iteration");
        cmd.add_option("--spsa-delta", spsa_delta, "SPSA finite-difference radius");
        cmd.add_option("--sparsity-quantile", sparsity_quantile, "sparse_l1 gradient quantile in [0, 1)");
        cmd.add_flag("--no-random-init", no_random_init, "start PGD at the clean input");
    }

    [[nodiscard]] report::AttackOverrides overrides() const {
        report::AttackOverrides o;
        o.n_iter = n_iter;
        o.step_size = step_size;
        o.spsa_samples = spsa_samples;
        o.spsa_delta = spsa_delta;
        o.sparsity_quantile = sparsity_quantile;
        if (no_random_init) {
            o.random_init = false;
        }
        return o;
    }
};

struct ModelOptions {
    std::size_t qubits = 4;
    std::size_t layers = 6;
    std::optional<std::size_t> width;
    double lr = 0.004;
    std::size_t epochs = 30;
    std::size_t batch = 4;

    void attach(CLI::App &cmd) {
        cmd.add_option("--qubits", qubits, "qubits in the hybrid circuits")->capture_default_str();
        cmd.add_option("--layers", layers, "variational repetitions")->capture_default_str();
        cmd.add_option("--width", width, "classical hidden width (default: --qubits)");
        cmd.add_option("--lr", lr, "Adam learning rate")->capture_default_str();
        cmd.add_option("--epochs", epochs, "passes over the training split")->capture_default_str();
        cmd.add_option("--batch", batch, "mini-batch size")->capture_default_str();
    }

    [[nodiscard]] report::ModelSettings settings() const {
        if (qubits > qsim::kMaxQubits) {
            throw ArgumentError("--qubits " + std::to_string(qubits) + " exceeds the " +
                                std::to_string(qsim::kMaxQubits) + "-qubit limit");
        }
        if (batch == 0) {
            throw ArgumentError("--batch must be positive");
        }
        if (!(lr > 0)) {
            throw ArgumentError("--lr must be positive");
        }
        report::ModelSettings s;
        s.qubits = qubits;
        s.layers = layers;
        s.classical_width = width.value_or(qubits);
        s.train.epochs = epochs;
        s.train.batch_size = batch;
        s.train.adam.learning_rate = lr;
        return s;
    }
};

std::string now_stamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::string fraction_tag(double fraction, char sep = '_') {
    const int train = static_cast<int>(std::lround(fraction * 100));
    return std::to_string(train) + sep + std::to_string(100 - train);
}

std::string split_title(double fraction) { return fraction_tag(fraction, '/'); }

// CLI11 only reads config files attached to the top-level app, so subcommand
// files are applied here: each key fills its option unless a flag already did.
void apply_config_file(CLI::App &cmd) {
    CLI::Option *config = cmd.get_config_ptr();
    if (config == nullptr || config->count() == 0) {
        return;
    }
    const std::string path = config->as<std::string>();
    if (!std::filesystem::is_regular_file(path)) {
        throw CLI::FileError::Missing(path);
    }
    for (const CLI::ConfigItem &item : cmd.get_config_formatter_base()->from_file(path)) {
        if (item.name == "++" || item.name == "--") {
            continue;
        }
        if (!item.parents.empty() && item.parents != std::vector<std::string>{cmd.get_name()}) {
            continue;
        }
        CLI::Option *opt = cmd.get_option_no_throw("--" + item.name);
        if (opt == nullptr || opt == config) {
            throw CLI::ConfigError::Extras(item.fullname());
        }
        if (opt->count() == 0) {
            opt->add_result(item.inputs);
            opt->run_callback();
        }
    }
}

std::vector<report::NamedModel> load_models(const std::vector<std::string> &paths,
                                            const data::FeatureSet &test) {
    std::vector<report::NamedModel> models;
    for (const std::string &path : paths) {
        nn::HybridModel model = nn::load_checkpoint(path);
        if (model.feature_dim() != test.feature_dim() || model.n_classes() != test.n_classes) {
            throw FormatError("checkpoint " + path + " expects " + std::to_string(model.feature_dim()) +
                              " features / " + std::to_string(model.n_classes()) + " classes, data has " +
                              std::to_string(test.feature_dim()) + " / " + std::to_string(test.n_classes));
        }
        models.push_back({std::filesystem::path(path).stem().string(), std::move(model)});
    }
    return models;
}

void write_csv_file(const report::MetricsTable &table, const std::filesystem::path &path) {
    std::ofstream file(path, std::ios::trunc);
    if (!file) {
        throw FormatError("cannot write '" + path.string() + "'");
    }
    report::write_csv(table, file);
}

std::vector<std::string> split_list(const std::string &text) {
    std::vector<std::string> items;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) {
            items.push_back(item);
        }
    }
    return items;
}

std::vector<std::string> require_models(const std::string &list) {
    std::vector<std::string> paths = split_list(list);
    if (paths.empty()) {
        throw ArgumentError("--models is required");
    }
    return paths;
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"qshield: hybrid quantum-classical classifier heads under adversarial attack"};
    app.require_subcommand(1);

    // train
    auto *train_cmd = app.add_subcommand("train", "train one classifier head and write a QHM1 checkpoint");
    train_cmd->set_config("--config", "", "key = value configuration file");
    std::string model_kind = "classical";
    std::string checkpoint_out = "model.qhm";
    DataOptions train_data;
    ModelOptions train_model;
    train_cmd->add_option("--model", model_kind, "classical, hybrid1 or hybrid2")->capture_default_str();
    train_cmd->add_option("--out", checkpoint_out, "checkpoint path")->capture_default_str();
    train_data.attach(*train_cmd);
    train_model.attach(*train_cmd);

    // eval
    auto *eval_cmd = app.add_subcommand("eval", "clean test accuracy of checkpoints");
    eval_cmd->set_config("--config", "", "key = value configuration file");
    std::string eval_models;
    DataOptions eval_data;
    eval_cmd->add_option("--models", eval_models, "comma-separated checkpoint paths");
    eval_data.attach(*eval_cmd);

    // attack
    auto *attack_cmd = app.add_subcommand("attack", "accuracy grid over checkpoints x attacks x eps");
    attack_cmd->set_config("--config", "", "key = value configuration file");
    std::string attack_models;
    std::string attack_methods = "none,gradient,fgsm,sparse_l1,spsa,pgd_l2";
    std::vector<double> attack_eps{0.05, 1.0};
    std::string attack_csv;
    std::string attack_format = "text";
    bool attack_stamp = false;
    DataOptions attack_data;
    AttackOptions attack_opts;
    attack_cmd->add_option("--models", attack_models, "comma-separated checkpoint paths");
    attack_cmd->add_option("--methods", attack_methods, "comma-separated attack methods")->capture_default_str();
    attack_cmd->add_option("--eps", attack_eps, "perturbation budgets")->delimiter(',')->capture_default_str();
    attack_cmd->add_option("--csv", attack_csv, "also write the grid as CSV to this path");
    attack_cmd->add_option("--format", attack_format, "stdout format")
        ->check(CLI::IsMember({"text", "csv"}))
        ->capture_default_str();
    attack_cmd->add_flag("--stamp", attack_stamp, "add a timestamp to the text report");
    attack_data.attach(*attack_cmd);
    attack_opts.attach(*attack_cmd);

    // repro
    auto *repro_cmd = app.add_subcommand("repro", "train all heads on two splits and run the full attack grid");
    repro_cmd->set_config("--config", "", "key = value configuration file");
    DataOptions repro_data;
    ModelOptions repro_model;
    AttackOptions repro_attack;
    std::vector<double> repro_eps{0.05, 1.0};
    std::vector<double> repro_fractions{0.8, 0.4};
    std::string repro_out_dir = "repro_out";
    std::string multiclass_data;
    bool multiclass = false;
    std::size_t multiclass_qubits = 6;
    std::size_t trend_seeds = 5;
    bool repro_stamp = false;
    repro_data.attach(*repro_cmd);
    repro_model.attach(*repro_cmd);
    repro_attack.attach(*repro_cmd);
    repro_cmd->add_option("--eps", repro_eps, "perturbation budgets")->delimiter(',')->capture_default_str();
    repro_cmd->add_option("--fractions", repro_fractions, "train fractions, one grid each")->delimiter(',')->capture_default_str();
    repro_cmd->add_option("--out-dir", repro_out_dir, "directory for CSV outputs")->capture_default_str();
    auto *mc_flag = repro_cmd->add_flag("--multiclass", multiclass, "also run the 3-class synthetic grid");
    repro_cmd->add_option("--multiclass-data", multiclass_data, "QFV1 file for the multiclass grid")
        ->excludes(mc_flag);
    repro_cmd->add_option("--multiclass-qubits", multiclass_qubits, "qubits and classical width for the multiclass grid")->capture_default_str();
    repro_cmd->add_option("--trend-seeds", trend_seeds, "seeds for the hybrid-vs-classical note")
        ->capture_default_str();
    repro_cmd->add_flag("--stamp", repro_stamp, "add a timestamp to the text report");

    // inspect
    auto *inspect_cmd = app.add_subcommand("inspect", "print checkpoint headers");
    std::vector<std::string> inspect_paths;
    inspect_cmd->add_option("checkpoints", inspect_paths)->required();

    std::vector<const char *> argv{"qshield"};
    for (const std::string &a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        const std::pair<CLI::App *, DataOptions *> with_data[] = {
            {train_cmd, &train_data}, {eval_cmd, &eval_data}, {attack_cmd, &attack_data}, {repro_cmd, &repro_data}};
        for (const auto &[cmd, opts] : with_data) {
            if (*cmd) {
                apply_config_file(*cmd);
                opts->apply_seed_env();
            }
        }
    } catch (const CLI::CallForHelp &e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::CallForAllHelp &e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        return kBadArguments;
    }

    try {
        if (*train_cmd) {
            const nn::HeadKind kind = nn::head_kind_from_string(model_kind);
            if (kind != nn::HeadKind::classical && train_model.qubits < 2) {
                throw ArgumentError("--qubits must be at least 2 for hybrid heads");
            }
            const report::ModelSettings settings = train_model.settings();
            const data::StandardizedSplit prepared = train_data.prepare();
            nn::ModelConfig cfg;
            cfg.kind = kind;
            cfg.feature_dim = prepared.train.feature_dim();
            cfg.width = kind == nn::HeadKind::classical ? settings.classical_width : settings.qubits;
            cfg.n_classes = prepared.train.n_classes;
            cfg.n_layers = settings.layers;
            nn::TrainConfig tc = settings.train;
            tc.seed = train_data.seed;
            char line[128];
            const nn::TrainResult result =
                nn::train(nn::make_model(cfg, train_data.seed), prepared.train, tc,
                          [&](std::size_t epoch, const nn::EpochStats &stats) {
                              std::snprintf(line, sizeof line, "epoch %zu loss %.6g accuracy %.2f\n", epoch,
                                            stats.mean_loss, 100.0 * stats.accuracy);
                              out << line;
                          });
            nn::save_checkpoint(result.model, checkpoint_out);
            std::snprintf(line, sizeof line, "%.2f", 100.0 * nn::accuracy(result.model, prepared.test));
            err << "wrote " << checkpoint_out << " (test accuracy " << line << "% on "
                << prepared.test.n_samples() << " samples)\n";
        } else if (*eval_cmd) {
            const data::StandardizedSplit prepared = eval_data.prepare();
            out << "model,accuracy_percent,n_test\n";
            for (const auto &m : load_models(require_models(eval_models), prepared.test)) {
                char line[64];
                std::snprintf(line, sizeof line, "%.4f", 100.0 * nn::accuracy(m.model, prepared.test));
                out << m.name << ',' << line << ',' << prepared.test.n_samples() << '\n';
            }
        } else if (*attack_cmd) {
            std::vector<attacks::Method> methods{attacks::Method::none};
            for (const std::string &name : split_list(attack_methods)) {
                const attacks::Method m = attacks::method_from_string(name);
                if (m != attacks::Method::none) {
                    methods.push_back(m);
                }
            }
            for (double eps : attack_eps) {
                if (!(eps >= 0)) {
                    throw ArgumentError("--eps values must be non-negative");
                }
            }
            const data::StandardizedSplit prepared = attack_data.prepare();
            const auto models = load_models(require_models(attack_models), prepared.test);
            report::MetricsTable table = report::evaluate_grid(models, prepared.test, methods, attack_eps,
                                                               attack_opts.overrides(), attack_data.seed);
            table.data_source = attack_data.source().describe();
            table.train_fraction = attack_data.split;
            if (attack_stamp) {
                table.timestamp = now_stamp();
            }
            if (attack_format == "csv") {
                report::write_csv(table, out);
            } else {
                out << report::render_table(table, "Accuracy (%) under attack");
            }
            if (!attack_csv.empty()) {
                write_csv_file(table, attack_csv);
            }
        } else if (*repro_cmd) {
            report::ReproConfig cfg;
            cfg.source = repro_data.source();
            if (!multiclass_data.empty()) {
                report::DataSource mc;
                mc.path = multiclass_data;
                cfg.multiclass_source = mc;
            } else if (multiclass) {
                report::DataSource mc = cfg.source;
                if (mc.path) {
                    throw ArgumentError("--multiclass with --data needs --multiclass-data");
                }
                mc.synth.n_classes = 3;
                cfg.multiclass_source = mc;
            }
            cfg.multiclass_qubits = multiclass_qubits;
            cfg.seed = repro_data.seed;
            cfg.train_fractions = repro_fractions;
            cfg.eps_values = repro_eps;
            cfg.models = repro_model.settings();
            cfg.attack = repro_attack.overrides();
            cfg.trend_seeds = trend_seeds;
            const report::ReproResult result =
                report::run_repro(cfg, [&err](const std::string &msg) { err << msg << '\n'; });

            std::filesystem::create_directories(repro_out_dir);
            const std::string stamp = repro_stamp ? now_stamp() : "";
            for (report::MetricsTable table : result.binary) {
                table.timestamp = stamp;
                const std::string tag = fraction_tag(table.train_fraction);
                out << report::render_table(table, "Accuracy (%) of binary classification models (" +
                                                       split_title(table.train_fraction) + " split)")
                    << '\n';
                write_csv_file(table, std::filesystem::path(repro_out_dir) / ("binary_" + tag + ".csv"));
            }
            if (result.multiclass) {
                report::MetricsTable table = *result.multiclass;
                table.timestamp = stamp;
                const std::string tag = fraction_tag(table.train_fraction);
                out << report::render_table(table, "Accuracy (%) of multiclass classification models (" +
                                                       split_title(table.train_fraction) + " split)")
                    << '\n';
                write_csv_file(table, std::filesystem::path(repro_out_dir) / ("multiclass_" + tag + ".csv"));
            }
            if (!result.trend.empty()) {
                out << report::render_trend(result.trend);
            }
            err << "wrote CSV reports to " << repro_out_dir << '\n';
        } else if (*inspect_cmd) {
            for (const std::string &path : inspect_paths) {
                const nn::CheckpointHeader h = nn::read_checkpoint_header(path);
                out << path << ": kind " << nn::to_string(h.kind) << ", feature_dim " << h.feature_dim
                    << ", width " << h.width << ", n_classes " << h.n_classes << ", n_qubits " << h.n_qubits
                    << ", n_layers " << h.n_layers << '\n';
            }
        }
    } catch (const FormatError &e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const NumericError &e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumericFailure;
    } catch (const ArgumentError &e) {
        err << "argument error: " << e.what() << '\n';
        return kBadArguments;
    } catch (const CapacityError &e) {
        err << "argument error: " << e.what() << '\n';
        return kBadArguments;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kInternal;
    }
    return kOk;
}

} // namespace qshield::cli
