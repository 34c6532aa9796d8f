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
 * @file qsim.hpp
 * Statevector register, the gate set used by the quantum layers, and Pauli
 * expectation values.
 *
 * Amplitude indexing is little-endian: qubit 0 is the least-significant bit
 * of the amplitude index.
 */
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <string_view>

#include <Eigen/Dense>

namespace qshield::qsim {

inline constexpr std::size_t kMaxQubits = 12;

enum class GateKind { H, RX, RY, RZ, U1, U2, U3, CNOT, CZ, CRX };
enum class Pauli { X, Y, Z };

/// Number of qubits the gate acts on.
constexpr std::size_t arity(GateKind kind) {
    switch (kind) {
    case GateKind::CNOT:
    case GateKind::CZ:
    case GateKind::CRX:
        return 2;
    default:
        return 1;
    }
}

/// Number of real angles the gate takes.
constexpr std::size_t angle_count(GateKind kind) {
    switch (kind) {
    case GateKind::H:
    case GateKind::CNOT:
    case GateKind::CZ:
        return 0;
    case GateKind::U2:
        return 2;
    case GateKind::U3:
        return 3;
    default:
        return 1;
    }
}

std::string_view to_string(GateKind kind);
GateKind gate_kind_from_string(std::string_view name);

/**
 * A single gate instance. For two-qubit kinds `qubits[0]` is the control and
 * `qubits[1]` the target (CZ is symmetric). Unused slots of `qubits` and
 * `angles` are ignored.
 */
struct Gate {
    GateKind kind = GateKind::H;
    std::array<std::size_t, 2> qubits{};
    std::array<double, 3> angles{};
};

/// Builds a gate, checking target and angle counts and target distinctness.
Gate make_gate(GateKind kind, std::initializer_list<std::size_t> qubits,
               std::initializer_list<double> angles = {});

template <typename Real> using Matrix2c = Eigen::Matrix<std::complex<Real>, 2, 2>;
template <typename Real> using Matrix4c = Eigen::Matrix<std::complex<Real>, 4, 4>;

/**
 * 2x2 unitary of a single-qubit kind, or of the target operation of a
 * controlled kind (X for CNOT, Z for CZ, RX for CRX).
 */
template <typename Real>
Matrix2c<Real> local_matrix(GateKind kind, const std::array<Real, 3> &angles) {
    using C = std::complex<Real>;
    const C i1{0, 1};
    Matrix2c<Real> m;
    switch (kind) {
    case GateKind::H: {
        const Real s = Real(1) / std::sqrt(Real(2));
        m << s, s, s, -s;
        break;
    }
    case GateKind::RX:
    case GateKind::CRX: {
        const Real c = std::cos(angles[0] / 2), s = std::sin(angles[0] / 2);
        m << c, -i1 * s, -i1 * s, c;
        break;
    }
    case GateKind::RY: {
        const Real c = std::cos(angles[0] / 2), s = std::sin(angles[0] / 2);
        m << c, -s, s, c;
        break;
    }
    case GateKind::RZ:
        m << std::exp(-i1 * (angles[0] / 2)), 0, 0, std::exp(i1 * (angles[0] / 2));
        break;
    case GateKind::U1:
        m << 1, 0, 0, std::exp(i1 * angles[0]);
        break;
    case GateKind::U2:
    case GateKind::U3: {
        const Real theta = kind == GateKind::U2 ? std::numbers::pi_v<Real> / 2 : angles[0];
        const Real phi = kind == GateKind::U2 ? angles[0] : angles[1];
        const Real lambda = kind == GateKind::U2 ? angles[1] : angles[2];
        const Real c = std::cos(theta / 2), s = std::sin(theta / 2);
        m << c, -std::exp(i1 * lambda) * s, std::exp(i1 * phi) * s,
            std::exp(i1 * (phi + lambda)) * c;
        break;
    }
    case GateKind::CNOT:
        m << 0, 1, 1, 0;
        break;
    case GateKind::CZ:
        m << 1, 0, 0, -1;
        break;
    }
    return m;
}

/**
 * Full 4x4 unitary of a two-qubit kind in the local basis |q1 q0> with
 * q0 = control (least-significant), q1 = target.
 */
template <typename Real>
Matrix4c<Real> controlled_matrix(GateKind kind, const std::array<Real, 3> &angles) {
    const Matrix2c<Real> u = local_matrix<Real>(kind, angles);
    Matrix4c<Real> m = Matrix4c<Real>::Zero();
    // control bit 0 -> identity on indices 0 (00) and 2 (10)
    m(0, 0) = 1;
    m(2, 2) = 1;
    // control bit 1 -> u on indices 1 (01) and 3 (11)
    m(1, 1) = u(0, 0);
    m(1, 3) = u(0, 1);
    m(3, 1) = u(1, 0);
    m(3, 3) = u(1, 1);
    return m;
}

/// Pure state of up to kMaxQubits qubits, 2^n complex amplitudes.
class Statevector {
  public:
    /// |0...0> on `n_qubits` qubits; throws CapacityError outside [1, kMaxQubits].
    explicit Statevector(std::size_t n_qubits);

    /// Wraps explicit amplitudes. Length must be a power of two in range and
    /// the vector must be normalized within 1e-12.
    static Statevector from_amplitudes(Eigen::VectorXcd amps);

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t dim() const noexcept { return std::size_t{1} << n_qubits_; }
    [[nodiscard]] const Eigen::VectorXcd &amplitudes() const noexcept { return amps_; }
    [[nodiscard]] double squared_norm() const { return amps_.squaredNorm(); }

    /// In-place gate application.
    void apply(const Gate &gate);

    [[nodiscard]] double expectation(Pauli basis, std::size_t qubit) const;

  private:
    void apply_local(const Matrix2c<double> &u, std::size_t qubit);
    void apply_controlled(const Matrix2c<double> &u, std::size_t control, std::size_t target);

    std::size_t n_qubits_;
    Eigen::VectorXcd amps_;
};

inline Statevector new_state(std::size_t n_qubits) { return Statevector(n_qubits); }

inline Statevector apply_gate(Statevector state, const Gate &gate) {
    state.apply(gate);
    return state;
}

inline double expectation(const Statevector &state, Pauli basis, std::size_t qubit) {
    return state.expectation(basis, qubit);
}

} // namespace qshield::qsim
