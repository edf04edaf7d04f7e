// Copyright 2026 The gqe-pdpo Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <array>
#include <span>
#include <vector>

#include "statevec.hpp"

namespace gqe::pool {

using Token = int;

struct ExcitationLists {
    std::vector<std::array<int, 2>> singles;
    std::vector<std::array<int, 4>> doubles;

    bool operator==(const ExcitationLists &) const = default;
};

/// Spin-conserving excitations out of the Hartree-Fock reference, with spin
/// orbitals interleaved (even index = up, odd = down) and the lowest
/// `n_electrons` orbitals occupied. Singles are (occupied, virtual); doubles
/// are (occ_a < occ_b, virt_a < virt_b), both in lexicographic order.
ExcitationLists enumerate_excitations(int n_electrons, int n_qubits);

/// {+0.0125, -0.0125, +0.025, -0.025, +0.05, -0.05, +0.1, -0.1}
std::vector<double> default_angle_set();

class OperatorPool {
  public:
    /// Identity first, then every excitation (singles, then doubles) with all
    /// angles of one excitation contiguous.
    OperatorPool(int n_electrons, int n_qubits, std::vector<double> angle_set);

    std::size_t size() const { return gates_.size(); }
    int n_qubits() const { return n_qubits_; }
    int n_electrons() const { return n_electrons_; }
    const std::vector<double> &angle_set() const { return angles_; }
    const ExcitationLists &excitations() const { return excitations_; }
    const std::vector<sim::GateSpec> &gates() const { return gates_; }

    /// Throws InputError when the token is outside [0, size()).
    const sim::GateSpec &token_to_gate(Token token) const;

    /// Compares against an externally supplied excitation list; throws
    /// InputError on mismatch.
    void cross_check(const ExcitationLists &declared) const;

  private:
    int n_electrons_;
    int n_qubits_;
    std::vector<double> angles_;
    ExcitationLists excitations_;
    std::vector<sim::GateSpec> gates_;
};

OperatorPool build_pool(int n_electrons, int n_qubits, std::vector<double> angle_set);

/// Fixed-length token sequence selecting one circuit.
using CircuitSequence = std::vector<Token>;

/// Applies the sequence's gates to `initial` in order.
sim::StateVector run_circuit(const OperatorPool &pool, std::span<const Token> sequence,
                             sim::StateVector initial);

/// E(sequence): energy of the circuit applied to the Hartree-Fock state.
double evaluate_sequence(const OperatorPool &pool, std::span<const Token> sequence,
                         const sim::Hamiltonian &h);

/// Same, reusing a precompiled observable.
double evaluate_sequence(const OperatorPool &pool, std::span<const Token> sequence,
                         const sim::Hamiltonian &h, const sim::CompiledHamiltonian &compiled);

} // namespace gqe::pool
