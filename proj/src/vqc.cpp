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
#include "qshield/vqc.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qshield/errors.hpp"

namespace qshield::vqc {

using qsim::GateKind;

namespace {

bool shiftable(GateKind kind) {
    return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ ||
           kind == GateKind::CRX;
}

void append_variational_block(std::vector<Slot> &program, std::size_t n_qubits,
                              std::size_t n_layers, Entanglement entanglement) {
    std::size_t next = 0;
    for (std::size_t layer = 0; layer < n_layers; ++layer) {
        for (std::size_t q = 0; q < n_qubits; ++q) {
            program.push_back({qsim::make_gate(GateKind::RY, {q}, {0.0}), AngleSource::param(next++)});
            program.push_back({qsim::make_gate(GateKind::RZ, {q}, {0.0}), AngleSource::param(next++)});
        }
        for (std::size_t q = 0; q + 1 < n_qubits; ++q) {
            program.push_back({qsim::make_gate(GateKind::CZ, {q, q + 1}), AngleSource::none()});
        }
        if (entanglement == Entanglement::ring && n_qubits > 2) {
            program.push_back({qsim::make_gate(GateKind::CZ, {n_qubits - 1, 0}), AngleSource::none()});
        }
    }
}

void append_rotations(std::vector<Slot> &program, GateKind kind, std::size_t n_qubits) {
    for (std::size_t q = 0; q < n_qubits; ++q) {
        program.push_back({qsim::make_gate(kind, {q}, {0.0}), AngleSource::input(q)});
    }
}

void append_hadamards(std::vector<Slot> &program, std::size_t n_qubits) {
    for (std::size_t q = 0; q < n_qubits; ++q) {
        program.push_back({qsim::make_gate(GateKind::H, {q}), AngleSource::none()});
    }
}

void check_width(std::size_t n_qubits) {
    if (n_qubits < 2) {
        throw ArgumentError("hybrid circuits need at least 2 qubits for entanglement, got " +
                            std::to_string(n_qubits));
    }
}

void check_finite(const Eigen::VectorXd &values, const char *what) {
    if (!values.allFinite()) {
        throw NumericError(std::string("non-finite ") + what + " angle");
    }
}

// Runs the program with every bound angle resolved, optionally adding `delta`
// to the angle of one slot.
Eigen::VectorXd run(const QuantumLayer &layer, const Eigen::VectorXd &inputs,
                    std::size_t shifted_slot = static_cast<std::size_t>(-1), double delta = 0.0) {
    const CircuitSpec &spec = layer.spec;
    qsim::Statevector state(spec.n_qubits());
    const auto &program = spec.program();
    for (std::size_t s = 0; s < program.size(); ++s) {
        qsim::Gate gate = program[s].gate;
        const AngleSource &src = program[s].source;
        if (src.kind == AngleSource::Kind::input) {
            gate.angles[0] = inputs[static_cast<Eigen::Index>(src.index)];
        } else if (src.kind == AngleSource::Kind::param) {
            gate.angles[0] = layer.params[static_cast<Eigen::Index>(src.index)];
        }
        if (s == shifted_slot) {
            gate.angles[0] += delta;
        }
        state.apply(gate);
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(spec.n_qubits()));
    for (std::size_t q = 0; q < spec.n_qubits(); ++q) {
        out[static_cast<Eigen::Index>(q)] = state.expectation(qsim::Pauli::Z, q);
    }
    return out;
}

void check_inputs(const QuantumLayer &layer, const Eigen::VectorXd &inputs) {
    if (static_cast<std::size_t>(inputs.size()) != layer.spec.n_inputs()) {
        throw ArgumentError("quantum layer expects " + std::to_string(layer.spec.n_inputs()) +
                            " inputs, got " + std::to_string(inputs.size()));
    }
    check_finite(inputs, "input");
    check_finite(layer.params, "parameter");
}

} // namespace

CircuitSpec::CircuitSpec(std::size_t n_qubits, std::vector<Slot> program)
    : n_qubits_(n_qubits), program_(std::move(program)) {
    if (n_qubits_ == 0 || n_qubits_ > qsim::kMaxQubits) {
        throw CapacityError("circuit width " + std::to_string(n_qubits_) + " out of range");
    }
    std::vector<bool> inputs_seen, params_seen;
    for (const Slot &slot : program_) {
        const std::size_t k = qsim::arity(slot.gate.kind);
        for (std::size_t t = 0; t < k; ++t) {
            if (slot.gate.qubits[t] >= n_qubits_) {
                throw ArgumentError("slot targets qubit " + std::to_string(slot.gate.qubits[t]) +
                                    " on a " + std::to_string(n_qubits_) + "-qubit circuit");
            }
        }
        if (k == 2 && slot.gate.qubits[0] == slot.gate.qubits[1]) {
            throw ArgumentError("two-qubit slot with duplicate targets");
        }
        if (!slot.source.bound()) {
            continue;
        }
        if (!shiftable(slot.gate.kind)) {
            throw ArgumentError(std::string(qsim::to_string(slot.gate.kind)) +
                                " cannot take an input or trainable angle");
        }
        auto &seen = slot.source.kind == AngleSource::Kind::input ? inputs_seen : params_seen;
        if (seen.size() <= slot.source.index) {
            seen.resize(slot.source.index + 1, false);
        }
        seen[slot.source.index] = true;
    }
    for (std::size_t i = 0; i < inputs_seen.size(); ++i) {
        if (!inputs_seen[i]) {
            throw ArgumentError("input index " + std::to_string(i) + " is never used");
        }
    }
    for (std::size_t j = 0; j < params_seen.size(); ++j) {
        if (!params_seen[j]) {
            throw ArgumentError("param index " + std::to_string(j) + " is never used");
        }
    }
    n_inputs_ = inputs_seen.size();
    n_params_ = params_seen.size();
}

CircuitSpec build_hybrid1(std::size_t n_qubits, std::size_t n_layers, Entanglement entanglement) {
    check_width(n_qubits);
    std::vector<Slot> program;
    append_rotations(program, GateKind::RY, n_qubits);
    append_variational_block(program, n_qubits, n_layers, entanglement);
    return CircuitSpec(n_qubits, std::move(program));
}

CircuitSpec build_hybrid2(std::size_t n_qubits, std::size_t n_layers, Entanglement entanglement) {
    check_width(n_qubits);
    std::vector<Slot> program;
    append_hadamards(program, n_qubits);
    append_rotations(program, GateKind::RY, n_qubits);
    append_variational_block(program, n_qubits, n_layers, entanglement);
    append_rotations(program, GateKind::RX, n_qubits);
    append_hadamards(program, n_qubits);
    return CircuitSpec(n_qubits, std::move(program));
}

std::string to_listing(const CircuitSpec &spec) {
    std::ostringstream out;
    out << "qubits " << spec.n_qubits() << " inputs " << spec.n_inputs() << " params "
        << spec.n_params() << '\n';
    out.precision(17);
    for (const Slot &slot : spec.program()) {
        out << qsim::to_string(slot.gate.kind);
        for (std::size_t t = 0; t < qsim::arity(slot.gate.kind); ++t) {
            out << ' ' << slot.gate.qubits[t];
        }
        switch (slot.source.kind) {
        case AngleSource::Kind::none:
            break;
        case AngleSource::Kind::fixed:
            out << " fixed(";
            for (std::size_t a = 0; a < qsim::angle_count(slot.gate.kind); ++a) {
                out << (a ? "," : "") << slot.gate.angles[a];
            }
            out << ')';
            break;
        case AngleSource::Kind::input:
            out << " input(" << slot.source.index << ')';
            break;
        case AngleSource::Kind::param:
            out << " param(" << slot.source.index << ')';
            break;
        }
        out << '\n';
    }
    return out.str();
}

QuantumLayer::QuantumLayer(CircuitSpec circuit, Eigen::VectorXd values)
    : spec(std::move(circuit)), params(std::move(values)) {
    if (static_cast<std::size_t>(params.size()) != spec.n_params()) {
        throw ArgumentError("circuit has " + std::to_string(spec.n_params()) +
                            " parameters, got " + std::to_string(params.size()));
    }
}

QuantumLayer QuantumLayer::random(CircuitSpec circuit, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    Eigen::VectorXd values(static_cast<Eigen::Index>(circuit.n_params()));
    for (Eigen::Index j = 0; j < values.size(); ++j) {
        values[j] = angle(rng);
    }
    return QuantumLayer(std::move(circuit), std::move(values));
}

Eigen::VectorXd forward(const QuantumLayer &layer, const Eigen::VectorXd &inputs) {
    check_inputs(layer, inputs);
    return run(layer, inputs);
}

SlotGradients slot_gradients(const QuantumLayer &layer, const Eigen::VectorXd &inputs,
                             bool wrt_params, bool wrt_inputs) {
    check_inputs(layer, inputs);
    const auto &program = layer.spec.program();
    SlotGradients grads;
    for (std::size_t s = 0; s < program.size(); ++s) {
        const auto kind = program[s].source.kind;
        if ((kind == AngleSource::Kind::param && wrt_params) ||
            (kind == AngleSource::Kind::input && wrt_inputs)) {
            grads.slot_index.push_back(s);
        }
    }
    grads.d_outputs.resize(static_cast<Eigen::Index>(layer.spec.n_qubits()),
                           static_cast<Eigen::Index>(grads.slot_index.size()));

    constexpr double half_pi = std::numbers::pi / 2;
    // Controlled rotations have generator spectrum {0, +-1/2}; the four-term
    // rule with these weights is exact for them.
    const double c_plus = (std::numbers::sqrt2 + 1) / (4 * std::numbers::sqrt2);
    const double c_minus = (std::numbers::sqrt2 - 1) / (4 * std::numbers::sqrt2);
    for (std::size_t k = 0; k < grads.slot_index.size(); ++k) {
        const std::size_t s = grads.slot_index[k];
        Eigen::VectorXd column;
        if (program[s].gate.kind == GateKind::CRX) {
            column = c_plus * (run(layer, inputs, s, half_pi) - run(layer, inputs, s, -half_pi)) -
                     c_minus * (run(layer, inputs, s, 3 * half_pi) - run(layer, inputs, s, -3 * half_pi));
        } else {
            column = 0.5 * (run(layer, inputs, s, half_pi) - run(layer, inputs, s, -half_pi));
        }
        grads.d_outputs.col(static_cast<Eigen::Index>(k)) = column;
    }
    return grads;
}

namespace {

Jacobian accumulate(const QuantumLayer &layer, const SlotGradients &grads) {
    const auto rows = static_cast<Eigen::Index>(layer.spec.n_qubits());
    Jacobian jac{Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(layer.spec.n_params())),
                 Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(layer.spec.n_inputs()))};
    const auto &program = layer.spec.program();
    for (std::size_t k = 0; k < grads.slot_index.size(); ++k) {
        const AngleSource &src = program[grads.slot_index[k]].source;
        auto &target = src.kind == AngleSource::Kind::param ? jac.d_params : jac.d_inputs;
        target.col(static_cast<Eigen::Index>(src.index)) += grads.d_outputs.col(static_cast<Eigen::Index>(k));
    }
    return jac;
}

} // namespace

Jacobian jacobian(const QuantumLayer &layer, const Eigen::VectorXd &inputs) {
    return accumulate(layer, slot_gradients(layer, inputs, true, true));
}

Eigen::MatrixXd input_jacobian(const QuantumLayer &layer, const Eigen::VectorXd &inputs) {
    return accumulate(layer, slot_gradients(layer, inputs, false, true)).d_inputs;
}

} // namespace qshield::vqc
