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
#include "qshield/qsim.hpp"

#include <algorithm>
#include <string>

#include "qshield/errors.hpp"

namespace qshield::qsim {

namespace {

constexpr std::array<std::string_view, 10> kGateNames{"H",  "RX",   "RY", "RZ", "U1",
                                                      "U2", "U3", "CNOT", "CZ", "CRX"};

void check_qubit(std::size_t qubit, std::size_t n_qubits) {
    if (qubit >= n_qubits) {
        throw ArgumentError("qubit index " + std::to_string(qubit) + " out of range for " +
                            std::to_string(n_qubits) + "-qubit register");
    }
}

} // namespace

std::string_view to_string(GateKind kind) { return kGateNames[static_cast<std::size_t>(kind)]; }

GateKind gate_kind_from_string(std::string_view name) {
    for (std::size_t k = 0; k < kGateNames.size(); ++k) {
        if (kGateNames[k] == name) {
            return static_cast<GateKind>(k);
        }
    }
    throw ArgumentError("unknown gate kind '" + std::string(name) + "'");
}

Gate make_gate(GateKind kind, std::initializer_list<std::size_t> qubits,
               std::initializer_list<double> angles) {
    if (qubits.size() != arity(kind)) {
        throw ArgumentError(std::string(to_string(kind)) + " takes " +
                            std::to_string(arity(kind)) + " target(s), got " +
                            std::to_string(qubits.size()));
    }
    if (angles.size() != angle_count(kind)) {
        throw ArgumentError(std::string(to_string(kind)) + " takes " +
                            std::to_string(angle_count(kind)) + " angle(s), got " +
                            std::to_string(angles.size()));
    }
    Gate gate;
    gate.kind = kind;
    std::copy(qubits.begin(), qubits.end(), gate.qubits.begin());
    std::copy(angles.begin(), angles.end(), gate.angles.begin());
    if (arity(kind) == 2 && gate.qubits[0] == gate.qubits[1]) {
        throw ArgumentError(std::string(to_string(kind)) + " needs two distinct qubits");
    }
    return gate;
}

Statevector::Statevector(std::size_t n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits == 0 || n_qubits > kMaxQubits) {
        throw CapacityError("register size " + std::to_string(n_qubits) +
                            " outside supported range [1, " + std::to_string(kMaxQubits) + "]");
    }
    amps_ = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim()));
    amps_[0] = 1.0;
}

Statevector Statevector::from_amplitudes(Eigen::VectorXcd amps) {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < static_cast<std::size_t>(amps.size())) {
        ++n;
    }
    if ((std::size_t{1} << n) != static_cast<std::size_t>(amps.size())) {
        throw ArgumentError("amplitude count " + std::to_string(amps.size()) +
                            " is not a power of two");
    }
    Statevector state(n);
    if (std::abs(amps.squaredNorm() - 1.0) > 1e-12) {
        throw ArgumentError("amplitudes are not normalized");
    }
    state.amps_ = std::move(amps);
    return state;
}

void Statevector::apply(const Gate &gate) {
    const std::size_t k = arity(gate.kind);
    check_qubit(gate.qubits[0], n_qubits_);
    if (k == 2) {
        check_qubit(gate.qubits[1], n_qubits_);
        if (gate.qubits[0] == gate.qubits[1]) {
            throw ArgumentError("two-qubit gate with duplicate targets");
        }
    }
    if (gate.kind == GateKind::CZ) {
        const std::size_t mask = (std::size_t{1} << gate.qubits[0]) | (std::size_t{1} << gate.qubits[1]);
        for (std::size_t i = 0; i < dim(); ++i) {
            if ((i & mask) == mask) {
                amps_[static_cast<Eigen::Index>(i)] = -amps_[static_cast<Eigen::Index>(i)];
            }
        }
        return;
    }
    const Matrix2c<double> u = local_matrix<double>(gate.kind, gate.angles);
    if (k == 1) {
        apply_local(u, gate.qubits[0]);
    } else {
        apply_controlled(u, gate.qubits[0], gate.qubits[1]);
    }
}

void Statevector::apply_local(const Matrix2c<double> &u, std::size_t qubit) {
    const std::size_t stride = std::size_t{1} << qubit;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (i & stride) {
            continue;
        }
        const auto i0 = static_cast<Eigen::Index>(i);
        const auto i1 = static_cast<Eigen::Index>(i | stride);
        const std::complex<double> a0 = amps_[i0];
        const std::complex<double> a1 = amps_[i1];
        amps_[i0] = u(0, 0) * a0 + u(0, 1) * a1;
        amps_[i1] = u(1, 0) * a0 + u(1, 1) * a1;
    }
}

void Statevector::apply_controlled(const Matrix2c<double> &u, std::size_t control,
                                   std::size_t target) {
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (!(i & cbit) || (i & tbit)) {
            continue;
        }
        const auto i0 = static_cast<Eigen::Index>(i);
        const auto i1 = static_cast<Eigen::Index>(i | tbit);
        const std::complex<double> a0 = amps_[i0];
        const std::complex<double> a1 = amps_[i1];
        amps_[i0] = u(0, 0) * a0 + u(0, 1) * a1;
        amps_[i1] = u(1, 0) * a0 + u(1, 1) * a1;
    }
}

double Statevector::expectation(Pauli basis, std::size_t qubit) const {
    check_qubit(qubit, n_qubits_);
    const std::size_t stride = std::size_t{1} << qubit;
    double acc = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (i & stride) {
            continue;
        }
        const std::complex<double> a0 = amps_[static_cast<Eigen::Index>(i)];
        const std::complex<double> a1 = amps_[static_cast<Eigen::Index>(i | stride)];
        switch (basis) {
        case Pauli::Z:
            acc += std::norm(a0) - std::norm(a1);
            break;
        case Pauli::X:
            acc += 2.0 * (std::conj(a0) * a1).real();
            break;
        case Pauli::Y:
            acc += 2.0 * (std::conj(a0) * a1).imag();
            break;
        }
    }
    return acc;
}

} // namespace qshield::qsim
