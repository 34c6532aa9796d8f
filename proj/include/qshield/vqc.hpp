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
 * @file vqc.hpp
 * Parameterized circuit programs for the hybrid heads and their
 * parameter-shift derivatives.
 */
#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qshield/qsim.hpp"

namespace qshield::vqc {

/// Where a gate slot takes its rotation angle from.
struct AngleSource {
    enum class Kind { none, fixed, input, param };
    Kind kind = Kind::none;
    std::size_t index = 0;

    static AngleSource none() { return {Kind::none, 0}; }
    static AngleSource fixed() { return {Kind::fixed, 0}; }
    static AngleSource input(std::size_t i) { return {Kind::input, i}; }
    static AngleSource param(std::size_t j) { return {Kind::param, j}; }

    [[nodiscard]] bool bound() const { return kind == Kind::input || kind == Kind::param; }
};

/// One program step. For bound sources the gate's first angle is replaced at
/// run time; fixed slots use the gate's stored angles.
struct Slot {
    qsim::Gate gate;
    AngleSource source;
};

enum class Entanglement { chain, ring };

class CircuitSpec {
  public:
    /// Validates the program: every input and param index in 0..max is used,
    /// bound slots are single-angle rotations (RX, RY, RZ, CRX), and every
    /// qubit index is in range.
    CircuitSpec(std::size_t n_qubits, std::vector<Slot> program);

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t n_inputs() const noexcept { return n_inputs_; }
    [[nodiscard]] std::size_t n_params() const noexcept { return n_params_; }
    [[nodiscard]] const std::vector<Slot> &program() const noexcept { return program_; }

  private:
    std::size_t n_qubits_;
    std::vector<Slot> program_;
    std::size_t n_inputs_ = 0;
    std::size_t n_params_ = 0;
};

/// RY input embedding, then `n_layers` of {RY, RZ per qubit; CZ entangler}.
CircuitSpec build_hybrid1(std::size_t n_qubits, std::size_t n_layers,
                          Entanglement entanglement = Entanglement::chain);

/// H layer, RY input embedding, `n_layers` hybrid-1 variational blocks, RX
/// input re-upload, closing H layer.
CircuitSpec build_hybrid2(std::size_t n_qubits, std::size_t n_layers,
                          Entanglement entanglement = Entanglement::chain);

/// One gate per line: kind, targets, angle source.
std::string to_listing(const CircuitSpec &spec);

/// A circuit together with its trainable angles.
struct QuantumLayer {
    CircuitSpec spec;
    Eigen::VectorXd params;

    QuantumLayer(CircuitSpec circuit, Eigen::VectorXd values);

    /// Parameters drawn uniformly from [-pi, pi).
    static QuantumLayer random(CircuitSpec circuit, std::mt19937_64 &rng);
};

/// Z expectation of every qubit after running the program on |0...0>.
Eigen::VectorXd forward(const QuantumLayer &layer, const Eigen::VectorXd &inputs);

/// Per-slot derivatives: column k is d<Z_q>/d(angle of slot slot_index[k]).
struct SlotGradients {
    Eigen::MatrixXd d_outputs;
    std::vector<std::size_t> slot_index;
};

/// Parameter-shift derivative with respect to each bound slot whose source
/// kind is selected. RX/RY/RZ use two shifted runs; CRX uses four.
SlotGradients slot_gradients(const QuantumLayer &layer, const Eigen::VectorXd &inputs,
                             bool wrt_params = true, bool wrt_inputs = true);

struct Jacobian {
    Eigen::MatrixXd d_params; ///< n_qubits x n_params
    Eigen::MatrixXd d_inputs; ///< n_qubits x n_inputs
};

/// Full Jacobian; slot columns sharing an index are summed.
Jacobian jacobian(const QuantumLayer &layer, const Eigen::VectorXd &inputs);

/// Only the input block of the Jacobian (skips the parameter shifts).
Eigen::MatrixXd input_jacobian(const QuantumLayer &layer, const Eigen::VectorXd &inputs);

} // namespace qshield::vqc
