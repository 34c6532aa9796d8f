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
#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "qshield/errors.hpp"
#include "qshield/qsim.hpp"

namespace {

using namespace qshield;
using qsim::GateKind;
using qsim::Pauli;
using oracle::Cd;

TEST(Statevector, NewStateIsAllZeros) {
    const auto one = qsim::new_state(1);
    ASSERT_EQ(one.amplitudes().size(), 2);
    EXPECT_EQ(one.amplitudes()[0], Cd(1, 0));
    EXPECT_EQ(one.amplitudes()[1], Cd(0, 0));

    const auto four = qsim::new_state(4);
    ASSERT_EQ(four.amplitudes().size(), 16);
    EXPECT_EQ(four.amplitudes()[0], Cd(1, 0));
    EXPECT_EQ(four.amplitudes().tail(15).norm(), 0.0);
}

TEST(Statevector, CapacityBounds) {
    EXPECT_THROW(qsim::new_state(13), CapacityError);
    EXPECT_THROW(qsim::new_state(0), CapacityError);
    EXPECT_NO_THROW(qsim::new_state(12));
}

TEST(Statevector, FromAmplitudesValidates) {
    Eigen::VectorXcd three(3);
    three << 1, 0, 0;
    EXPECT_THROW(qsim::Statevector::from_amplitudes(three), ArgumentError);
    Eigen::VectorXcd unnormalized(2);
    unnormalized << 1, 1;
    EXPECT_THROW(qsim::Statevector::from_amplitudes(unnormalized), ArgumentError);
}

TEST(ApplyGate, HadamardOnZero) {
    const auto s = qsim::apply_gate(qsim::new_state(1), qsim::make_gate(GateKind::H, {0}));
    EXPECT_NEAR(std::abs(s.amplitudes()[0] - Cd(M_SQRT1_2, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(s.amplitudes()[1] - Cd(M_SQRT1_2, 0)), 0.0, 1e-15);
}

TEST(ApplyGate, RyPiFlips) {
    const auto s = qsim::apply_gate(qsim::new_state(1), qsim::make_gate(GateKind::RY, {0}, {std::numbers::pi}));
    EXPECT_NEAR(std::abs(s.amplitudes()[0]), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(s.amplitudes()[1] - Cd(1, 0)), 0.0, 1e-15);
}

TEST(ApplyGate, CzOnOneOne) {
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(4);
    amps[3] = 1;
    const auto s = qsim::apply_gate(qsim::Statevector::from_amplitudes(amps), qsim::make_gate(GateKind::CZ, {0, 1}));
    EXPECT_EQ(s.amplitudes()[3], Cd(-1, 0));
}

TEST(ApplyGate, QubitZeroIsLeastSignificantBit) {
    const auto s = qsim::apply_gate(qsim::new_state(3), qsim::make_gate(GateKind::RY, {1}, {std::numbers::pi}));
    EXPECT_NEAR(std::abs(s.amplitudes()[2] - Cd(1, 0)), 0.0, 1e-15);
}

TEST(ApplyGate, CnotControlAndTarget) {
    // |q1 q0> = |01>: control q0 set, so target q1 flips -> index 3.
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(4);
    amps[1] = 1;
    const auto s = qsim::apply_gate(qsim::Statevector::from_amplitudes(amps), qsim::make_gate(GateKind::CNOT, {0, 1}));
    EXPECT_EQ(s.amplitudes()[3], Cd(1, 0));
}

TEST(ApplyGate, Errors) {
    qsim::Statevector s(2);
    EXPECT_THROW(s.apply(qsim::make_gate(GateKind::H, {2})), ArgumentError);
    EXPECT_THROW(qsim::make_gate(GateKind::CZ, {1, 1}), ArgumentError);
    EXPECT_THROW(qsim::make_gate(GateKind::CZ, {1}), ArgumentError);
    EXPECT_THROW(qsim::make_gate(GateKind::RX, {0}), ArgumentError);
    qsim::Gate dup;
    dup.kind = GateKind::CNOT;
    dup.qubits = {0, 0};
    EXPECT_THROW(s.apply(dup), ArgumentError);
}

TEST(Expectation, BasisStates) {
    const auto zero = qsim::new_state(1);
    EXPECT_DOUBLE_EQ(qsim::expectation(zero, Pauli::Z, 0), 1.0);
    const auto plus = qsim::apply_gate(zero, qsim::make_gate(GateKind::H, {0}));
    EXPECT_NEAR(qsim::expectation(plus, Pauli::Z, 0), 0.0, 1e-15);
    EXPECT_NEAR(qsim::expectation(plus, Pauli::X, 0), 1.0, 1e-15);
    EXPECT_NEAR(qsim::expectation(plus, Pauli::Y, 0), 0.0, 1e-15);
    EXPECT_THROW(qsim::expectation(zero, Pauli::Z, 1), ArgumentError);
}

TEST(GateMatrices, AllKindsUnitary) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> angle(-7, 7);
    for (int k = 0; k < 10; ++k) {
        const auto kind = static_cast<GateKind>(k);
        for (int rep = 0; rep < 20; ++rep) {
            const std::array<double, 3> a{angle(rng), angle(rng), angle(rng)};
            const Eigen::Matrix2cd u = qsim::local_matrix<double>(kind, a);
            EXPECT_LT((u * u.adjoint() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff(), 1e-12);
            if (qsim::arity(kind) == 2) {
                const Eigen::Matrix4cd c = qsim::controlled_matrix<double>(kind, a);
                EXPECT_LT((c * c.adjoint() - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff(), 1e-12);
            }
        }
    }
}

TEST(GateMatrices, U2IsU3AtHalfPi) {
    const std::array<double, 3> u2{0.3, -1.1, 0};
    const std::array<double, 3> u3{std::numbers::pi / 2, 0.3, -1.1};
    EXPECT_LT((qsim::local_matrix<double>(GateKind::U2, u2) - qsim::local_matrix<double>(GateKind::U3, u3))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-15);
}

TEST(GateMatrices, FloatInstantiation) {
    const auto m = qsim::local_matrix<float>(GateKind::RY, {1.0f, 0.0f, 0.0f});
    EXPECT_NEAR(m(1, 0).real(), std::sin(0.5f), 1e-7f);
}

TEST(GateMatrices, NamesRoundTrip) {
    for (int k = 0; k < 10; ++k) {
        const auto kind = static_cast<GateKind>(k);
        EXPECT_EQ(qsim::gate_kind_from_string(qsim::to_string(kind)), kind);
    }
    EXPECT_THROW(qsim::gate_kind_from_string("SWAP"), ArgumentError);
}

TEST(Properties, MatchesKroneckerOracle) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + trial % 3;
        Eigen::VectorXcd psi = oracle::random_state(n, rng);
        auto state = qsim::Statevector::from_amplitudes(psi);
        for (int g = 0; g < 8; ++g) {
            const qsim::Gate gate = oracle::random_gate(n, rng);
            state.apply(gate);
            psi = oracle::dense_gate(gate, n) * psi;
            ASSERT_LT((state.amplitudes() - psi).cwiseAbs().maxCoeff(), 1e-12)
                << "trial " << trial << " gate " << qsim::to_string(gate.kind);
        }
        for (std::size_t q = 0; q < n; ++q) {
            for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
                EXPECT_NEAR(state.expectation(p, q), oracle::dense_expectation(psi, p, q, n), 1e-12);
            }
        }
    }
}

TEST(Properties, NormPreservedOverLongSequences) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + trial % 6;
        qsim::Statevector state(n);
        for (int g = 0; g < 100; ++g) {
            state.apply(oracle::random_gate(n, rng));
            ASSERT_LT(std::abs(state.squared_norm() - 1.0), 1e-12);
        }
    }
}

TEST(Properties, Involutions) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> angle(-7, 7);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + trial % 3;
        const Eigen::VectorXcd psi = oracle::random_state(n, rng);
        auto s = qsim::Statevector::from_amplitudes(psi);
        s.apply(qsim::make_gate(GateKind::H, {0}));
        s.apply(qsim::make_gate(GateKind::H, {0}));
        EXPECT_LT((s.amplitudes() - psi).cwiseAbs().maxCoeff(), 1e-12);
        s.apply(qsim::make_gate(GateKind::CZ, {0, n - 1}));
        s.apply(qsim::make_gate(GateKind::CZ, {0, n - 1}));
        EXPECT_LT((s.amplitudes() - psi).cwiseAbs().maxCoeff(), 1e-12);
        const double theta = angle(rng);
        s.apply(qsim::make_gate(GateKind::RY, {1}, {theta}));
        s.apply(qsim::make_gate(GateKind::RY, {1}, {-theta}));
        EXPECT_LT((s.amplitudes() - psi).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Properties, ExpectationBounds) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 4;
        const auto s = qsim::Statevector::from_amplitudes(oracle::random_state(n, rng));
        for (std::size_t q = 0; q < n; ++q) {
            for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
                const double e = s.expectation(p, q);
                EXPECT_GE(e, -1 - 1e-12);
                EXPECT_LE(e, 1 + 1e-12);
            }
        }
    }
}

} // namespace
