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
// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "../tools/cli.hpp"
#include "oracles.hpp"
#include "qshield/attacks.hpp"
#include "qshield/nn.hpp"
#include "qshield/report.hpp"
#include "qshield/vqc.hpp"

namespace {

namespace fs = std::filesystem;
using namespace qshield;
using attacks::Method;
using Clock = std::chrono::steady_clock;

// Tolerances and budgets.
constexpr double kFdStep = 1e-5;
constexpr double kGradRelTol = 1e-5;
constexpr double kSimTol = 1e-12;
constexpr double kBallTol = 1e-9;
constexpr double kSingleStepSlackPp = 2.0;
constexpr double kHybridTrainAcc = 0.95;
constexpr std::size_t kGradConfigs = 120;
constexpr std::size_t kSimPrograms = 1000;
constexpr std::size_t kNormSequences = 100;
constexpr std::size_t kAttackCases = 1000;
constexpr std::size_t kTrendSeeds = 5;

int failures = 0;

void verdict(bool ok, const std::string &name, const std::string &detail, double seconds, double limit_s) {
    const bool in_time = seconds < limit_s;
    std::printf("%s  %-28s %s (%.1fs, limit %.0fs)\n", ok && in_time ? "PASS" : "FAIL", name.c_str(), detail.c_str(),
                seconds, limit_s);
    std::fflush(stdout);
    failures += !(ok && in_time);
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char *f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// Relative error; the scale floor keeps near-zero derivatives from dividing by noise.
double rel_err(double analytic, double fd) { return std::abs(analytic - fd) / std::max(1e-3, std::abs(fd)); }

Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64 &rng, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = normal(rng);
    }
    return v;
}

bool bitwise_equal(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

void gradient_correctness() {
    const auto start = Clock::now();
    std::mt19937_64 rng(20260101);
    std::uniform_int_distribution<std::size_t> qubits(2, 4), layers(1, 3), dims(2, 16), classes(2, 3);
    double worst_circuit = 0, worst_model = 0;
    std::size_t checked = 0;
    for (std::size_t c = 0; c < kGradConfigs; ++c) {
        const std::size_t n = qubits(rng);
        const vqc::CircuitSpec spec = c % 2 ? vqc::build_hybrid2(n, layers(rng)) : vqc::build_hybrid1(n, layers(rng));
        const auto layer = vqc::QuantumLayer::random(spec, rng);
        const Eigen::VectorXd inputs = random_vector(static_cast<Eigen::Index>(spec.n_inputs()), rng);
        const vqc::Jacobian jac = vqc::jacobian(layer, inputs);
        for (std::size_t q = 0; q < n; ++q) {
            const auto qi = static_cast<Eigen::Index>(q);
            for (Eigen::Index j = 0; j < layer.params.size(); ++j) {
                const double fd = oracle::central_difference(
                    [&](const Eigen::VectorXd &p) { return vqc::forward({spec, p}, inputs)[qi]; }, layer.params, j,
                    kFdStep);
                worst_circuit = std::max(worst_circuit, rel_err(jac.d_params(qi, j), fd));
            }
            for (Eigen::Index i = 0; i < inputs.size(); ++i) {
                const double fd = oracle::central_difference(
                    [&](const Eigen::VectorXd &z) { return vqc::forward(layer, z)[qi]; }, inputs, i, kFdStep);
                worst_circuit = std::max(worst_circuit, rel_err(jac.d_inputs(qi, i), fd));
            }
        }

        nn::ModelConfig cfg;
        cfg.kind = static_cast<nn::HeadKind>(c % 3);
        cfg.feature_dim = dims(rng);
        cfg.width = n;
        cfg.n_classes = classes(rng);
        cfg.n_layers = layers(rng);
        const nn::HybridModel model = nn::make_model(cfg, rng());
        const Eigen::VectorXd x = random_vector(static_cast<Eigen::Index>(cfg.feature_dim), rng);
        const std::size_t label = c % cfg.n_classes;
        const nn::ModelGradients g = nn::model_backward(model, x, label);
        const Eigen::VectorXd params = nn::flatten_parameters(model);
        const Eigen::VectorXd flat = g.flat();
        for (Eigen::Index j = 0; j < params.size(); ++j) {
            const double fd = oracle::central_difference(
                [&](const Eigen::VectorXd &p) {
                    nn::HybridModel copy = model;
                    nn::assign_parameters(copy, p);
                    return nn::model_loss(copy, x, label);
                },
                params, j, kFdStep);
            worst_model = std::max(worst_model, rel_err(flat[j], fd));
        }
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double fd = oracle::central_difference(
                [&](const Eigen::VectorXd &z) { return nn::model_loss(model, z, label); }, x, i, kFdStep);
            worst_model = std::max(worst_model, rel_err(g.d_input[i], fd));
        }
        ++checked;
    }
    const bool ok = checked >= 100 && worst_circuit <= kGradRelTol && worst_model <= kGradRelTol;
    verdict(ok, "gradient correctness",
           fmt("%.0f configs, worst rel err circuit %.2e model %.2e", static_cast<double>(checked), worst_circuit,
               worst_model) +
               fmt(" (tol %.0e)", kGradRelTol),
           seconds_since(start), 60);
}

void simulator_correctness() {
    const auto start = Clock::now();
    std::mt19937_64 rng(20260102);
    std::uniform_int_distribution<std::size_t> qubits(1, 3), length(1, 30);
    double worst_amp = 0, worst_exp = 0;
    for (std::size_t p = 0; p < kSimPrograms; ++p) {
        const std::size_t n = qubits(rng);
        const Eigen::VectorXcd psi0 = oracle::random_state(n, rng);
        qsim::Statevector state = qsim::Statevector::from_amplitudes(psi0);
        Eigen::VectorXcd dense = psi0;
        const std::size_t len = length(rng);
        for (std::size_t k = 0; k < len; ++k) {
            const qsim::Gate g = oracle::random_gate(n, rng);
            state.apply(g);
            dense = oracle::dense_gate(g, n) * dense;
        }
        worst_amp = std::max(worst_amp, (state.amplitudes() - dense).cwiseAbs().maxCoeff());
        for (qsim::Pauli pauli : {qsim::Pauli::X, qsim::Pauli::Y, qsim::Pauli::Z}) {
            for (std::size_t q = 0; q < n; ++q) {
                worst_exp = std::max(worst_exp, std::abs(state.expectation(pauli, q) -
                                                         oracle::dense_expectation(dense, pauli, q, n)));
            }
        }
    }
    double worst_norm = 0;
    for (std::size_t s = 0; s < kNormSequences; ++s) {
        const std::size_t n = 1 + s % 6;
        qsim::Statevector state = qsim::Statevector::from_amplitudes(oracle::random_state(n, rng));
        for (int k = 0; k < 100; ++k) {
            state.apply(oracle::random_gate(n, rng));
        }
        worst_norm = std::max(worst_norm, std::abs(state.squared_norm() - 1.0));
    }
    const bool ok = worst_amp <= kSimTol && worst_exp <= kSimTol && worst_norm <= kSimTol;
    verdict(ok, "simulator correctness",
           fmt("1000 programs: max amp err %.1e, max <P> err %.1e; ", worst_amp, worst_exp) +
               fmt("100x100-gate norm drift %.1e", worst_norm),
           seconds_since(start), 60);
}

void circuit_shapes() {
    const auto start = Clock::now();
    const auto h1 = vqc::build_hybrid1(4, 6);
    const auto h2 = vqc::build_hybrid2(6, 6);
    const bool ok = h1.n_params() == 48 && h1.n_inputs() == 4 && h2.n_params() == 72 && h2.n_inputs() == 6;
    verdict(ok, "circuit shapes",
           fmt("hybrid1(4,6): %.0f params %.0f inputs; ", static_cast<double>(h1.n_params()),
               static_cast<double>(h1.n_inputs())) +
               fmt("hybrid2(6,6): %.0f params %.0f inputs", static_cast<double>(h2.n_params()),
                   static_cast<double>(h2.n_inputs())),
           seconds_since(start), 1);
}

void training_convergence() {
    const auto start = Clock::now();
    const data::FeatureSet raw = data::synth_gaussian(100, 8, 2, 10.0, 7);
    const data::FeatureSet set = data::standardize(raw, raw).train;
    std::string detail;
    bool ok = true;
    for (nn::HeadKind kind : {nn::HeadKind::classical, nn::HeadKind::hybrid1, nn::HeadKind::hybrid2}) {
        qshield::report::ModelSettings settings;
        settings.train.epochs = 100;
        settings.train.adam.learning_rate = 0.004;
        nn::ModelConfig cfg{kind, 8, kind == nn::HeadKind::classical ? settings.classical_width : settings.qubits, 2,
                            settings.layers};
        nn::TrainConfig tc = settings.train;
        tc.seed = 7;
        const auto result = nn::train(nn::make_model(cfg, 7), set, tc);
        const double target = kind == nn::HeadKind::classical ? 1.0 : kHybridTrainAcc;
        std::size_t first = 0;
        double best = 0;
        for (std::size_t e = 0; e < result.trace.size(); ++e) {
            best = std::max(best, result.trace[e].accuracy);
            if (first == 0 && result.trace[e].accuracy >= target) {
                first = e + 1;
            }
        }
        ok = ok && first != 0;
        detail += std::string(detail.empty() ? "" : "; ") + std::string(nn::to_string(kind)) +
                  fmt(" best %.1f%% first at epoch %.0f", 100 * best, static_cast<double>(first));
    }
    verdict(ok, "training convergence", detail, seconds_since(start), 300);
}

void attack_contracts() {
    const auto start = Clock::now();
    std::mt19937_64 rng(20260103);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Method methods[] = {Method::gradient, Method::fgsm, Method::pgd_l2, Method::sparse_l1, Method::spsa};
    std::vector<nn::HybridModel> models;
    for (std::size_t k = 0; k < 12; ++k) {
        nn::ModelConfig cfg{static_cast<nn::HeadKind>(k % 3), 2 + k % 7, 2 + k % 2, 2, 1 + k % 2};
        models.push_back(nn::make_model(cfg, 500 + k));
    }
    double worst_excess = -1.0;
    std::size_t cases = 0, grad_calls_in_spsa = 0, spsa_loss_calls = 0, noop_failures = 0, repro_failures = 0;
    for (Method m : methods) {
        for (std::size_t c = 0; c < kAttackCases; ++c) {
            const nn::HybridModel &model = models[c % models.size()];
            const Eigen::VectorXd x = random_vector(static_cast<Eigen::Index>(model.feature_dim()), rng);
            const std::size_t label = c % 2;
            std::size_t grad_calls = 0, loss_calls = 0;
            const attacks::GradOracle grad = [&](const Eigen::VectorXd &z, std::size_t l) {
                ++grad_calls;
                return nn::model_input_gradient(model, z, l);
            };
            const attacks::LossOracle loss = [&](const Eigen::VectorXd &z, std::size_t l) {
                ++loss_calls;
                return nn::model_loss(model, z, l);
            };
            auto cfg = attacks::AttackConfig::defaults(m, 0.01 + 2.0 * unit(rng), rng());
            if (m == Method::spsa) {
                cfg.n_iter = 5;
                cfg.spsa_samples = 8;
            }
            const Eigen::VectorXd adv = attacks::craft(cfg, grad, loss, x, label, c);
            const Eigen::VectorXd delta = adv - x;
            const double dist = m == Method::sparse_l1                          ? delta.lpNorm<1>()
                                : m == Method::gradient || m == Method::pgd_l2 ? delta.norm()
                                                                               : delta.lpNorm<Eigen::Infinity>();
            worst_excess = std::max(worst_excess, dist - cfg.eps);
            if (m == Method::spsa) {
                grad_calls_in_spsa += grad_calls;
                spsa_loss_calls += loss_calls;
            }
            if (!bitwise_equal(adv, attacks::craft(cfg, grad, loss, x, label, c))) {
                ++repro_failures;
            }
            auto zero = cfg;
            zero.eps = 0.0;
            zero.step_size = 0.0;
            if (!bitwise_equal(attacks::craft(zero, grad, loss, x, label, c), x)) {
                ++noop_failures;
            }
            ++cases;
        }
    }
    const bool ok = worst_excess <= kBallTol && grad_calls_in_spsa == 0 && spsa_loss_calls > 0 && noop_failures == 0 &&
                    repro_failures == 0;
    verdict(ok, "attack contracts",
           fmt("%.0f cases (1000 per attack), worst ball excess %.1e; ", static_cast<double>(cases), worst_excess) +
               fmt("spsa grad-oracle calls %.0f (loss calls %.0f); ", static_cast<double>(grad_calls_in_spsa),
                   static_cast<double>(spsa_loss_calls)) +
               fmt("eps=0 mismatches %.0f; rerun mismatches %.0f", static_cast<double>(noop_failures),
                   static_cast<double>(repro_failures)),
           seconds_since(start), 120);
}

using Grid = std::map<std::tuple<std::string, std::string, std::string>, double>;

Grid read_grid(const fs::path &csv, std::size_t &rows, std::string &header) {
    Grid grid;
    std::ifstream in(csv);
    std::getline(in, header);
    rows = 0;
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> f;
        std::stringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) {
            f.push_back(cell);
        }
        if (f.size() == 6) {
            grid[{f[0], f[1], f[2]}] = std::stod(f[3]);
        }
        ++rows;
    }
    return grid;
}

void repro_criteria() {
    const auto start = Clock::now();
    const fs::path dir = fs::temp_directory_path() / "qshield_acceptance";
    fs::remove_all(dir);
    std::ostringstream out, err;
    const int code = cli::run_cli({"repro", "--synth", "sep=3,dim=8,classes=2,n=200", "--seed", "7", "--out-dir",
                                   dir.string(), "--trend-seeds", std::to_string(kTrendSeeds)},
                                  out, err);
    const double elapsed = seconds_since(start);
    const std::string text = out.str();
    if (code != 0) {
        std::cerr << err.str();
    }

    const std::vector<std::string> models{"classical", "hybrid1", "hybrid2"};
    const std::vector<std::string> attacked{"gradient", "fgsm", "sparse_l1", "spsa", "pgd_l2"};
    std::size_t rows80 = 0, rows40 = 0;
    std::string header80, header40;
    const Grid g80 = read_grid(dir / "binary_80_20.csv", rows80, header80);
    const Grid g40 = read_grid(dir / "binary_40_60.csv", rows40, header40);

    // Effectiveness trend on the 80/20 grid.
    bool trend_ok = code == 0 && g80.size() == 36;
    std::string worst_cell;
    double min_drop = 1e9, max_single_rise = -1e9;
    for (const auto &m : models) {
        const double clean = g80.count({"none", "1", m}) ? g80.at({"none", "1", m}) : -1;
        for (const auto &a : attacked) {
            if (!g80.count({a, "1", m}) || !g80.count({a, "0.05", m})) {
                trend_ok = false;
                continue;
            }
            const double at1 = g80.at({a, "1", m});
            const double drop = clean - at1;
            if (drop < min_drop) {
                min_drop = drop;
                worst_cell = a + "/" + m;
            }
            trend_ok = trend_ok && at1 < clean;
            if (a == "gradient" || a == "fgsm") {
                const double rise = at1 - g80.at({a, "0.05", m});
                max_single_rise = std::max(max_single_rise, rise);
                trend_ok = trend_ok && rise <= kSingleStepSlackPp;
            }
        }
    }
    verdict(trend_ok, "attack effectiveness trend",
           fmt("smallest clean-minus-eps1 drop %.2fpp (", min_drop) + worst_cell +
               fmt("); single-step eps1 minus eps0.05 at most %+.2fpp (slack %.0fpp)", max_single_rise,
                   kSingleStepSlackPp),
           elapsed, 600);

    // Table structure of both split grids.
    const std::vector<std::string> display{"Without attack", "Gradient Attack", "Gradient Sign Attack",
                                           "Sparse L1 Descent Attack", "SPSA Attack", "L2 PGD Attack"};
    bool shape_ok = code == 0 && rows80 == 36 && rows40 == 36 && g40.size() == 36 &&
                    header80 == "method,eps,model,accuracy_percent,n_test,seed" && header40 == header80;
    for (const std::string title : {"(80/20 split)", "(40/60 split)"}) {
        const auto at = text.find(title);
        shape_ok = shape_ok && at != std::string::npos;
        if (at == std::string::npos) {
            continue;
        }
        const std::string table = text.substr(at, text.find("* best accuracy", at) - at);
        std::size_t pos = 0;
        for (const auto &name : display) {
            pos = table.find("\n" + name + " ", pos);
            shape_ok = shape_ok && pos != std::string::npos;
        }
        shape_ok = shape_ok && table.find("hybrid1") != std::string::npos &&
                   table.find("hybrid2") != std::string::npos && table.find("classical") != std::string::npos;
        std::size_t data_lines = 0;
        std::istringstream ls(table);
        for (std::string line; std::getline(ls, line);) {
            std::istringstream tokens(line);
            bool eps_token = false;
            for (std::string t; tokens >> t;) {
                eps_token = eps_token || t == "0.05" || t == "1.0";
            }
            data_lines += eps_token;
        }
        shape_ok = shape_ok && data_lines == 12;
    }
    verdict(shape_ok, "report shape",
           fmt("80/20 and 40/60 grids: %.0f and %.0f cells of 6 methods x 2 eps x 3 models", static_cast<double>(rows80),
               static_cast<double>(rows40)),
           0.0, 1);

    // Hybrid-vs-classical note: required in the output, never gated on its content.
    const auto note = text.find("Hybrid vs classical");
    std::size_t seed_lines = 0;
    std::string note_text;
    if (note != std::string::npos) {
        note_text = text.substr(note);
        std::istringstream ls(note_text);
        for (std::string line; std::getline(ls, line);) {
            seed_lines += line.rfind("  seed ", 0) == 0;
        }
    }
    verdict(note != std::string::npos && seed_lines == kTrendSeeds, "trend note (not gated)",
           fmt("reported for %.0f seeds", static_cast<double>(seed_lines)), 0.0, 1);
    std::istringstream ls(note_text);
    for (std::string line; std::getline(ls, line);) {
        std::printf("      | %s\n", line.c_str());
    }
    fs::remove_all(dir);
}

} // namespace

int main() {
    gradient_correctness();
    simulator_correctness();
    circuit_shapes();
    training_convergence();
    attack_contracts();
    repro_criteria();
    std::printf("%s: %d failing criteria\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
