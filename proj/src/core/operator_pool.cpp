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
#include "operator_pool.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"

namespace gqe::pool {

namespace {

int spin_of(int orbital) { return orbital % 2; }

} // namespace

ExcitationLists enumerate_excitations(int n_electrons, int n_qubits) {
    if (n_electrons < 1 || n_qubits < 1 || n_electrons >= n_qubits)
        throw InputError("need 0 < n_electrons < n_qubits, got " + std::to_string(n_electrons) +
                         " electrons in " + std::to_string(n_qubits) + " qubits");
    ExcitationLists out;
    for (int r = 0; r < n_electrons; ++r)
        for (int p = n_electrons; p < n_qubits; ++p)
            if (spin_of(r) == spin_of(p))
                out.singles.push_back({r, p});
    for (int r = 0; r < n_electrons; ++r)
        for (int s = r + 1; s < n_electrons; ++s)
            for (int p = n_electrons; p < n_qubits; ++p)
                for (int q = p + 1; q < n_qubits; ++q)
                    if (spin_of(r) + spin_of(s) == spin_of(p) + spin_of(q))
                        out.doubles.push_back({r, s, p, q});
    return out;
}

std::vector<double> default_angle_set() {
    std::vector<double> angles;
    for (int k = 1; k <= 4; ++k) {
        const double a = std::ldexp(1.0, k) / 160.0;
        angles.push_back(a);
        angles.push_back(-a);
    }
    return angles;
}

OperatorPool::OperatorPool(int n_electrons, int n_qubits, std::vector<double> angle_set)
    : n_electrons_(n_electrons), n_qubits_(n_qubits), angles_(std::move(angle_set)) {
    if (angles_.empty())
        throw InputError("angle set is empty");
    for (double a : angles_)
        if (!std::isfinite(a))
            throw InputError("angle set contains a non-finite value");
    excitations_ = enumerate_excitations(n_electrons, n_qubits);

    gates_.reserve(1 + (excitations_.singles.size() + excitations_.doubles.size()) * angles_.size());
    gates_.push_back({sim::GateKind::Identity, {}, 0.0});
    for (const auto &ex : excitations_.singles)
        for (double a : angles_)
            gates_.push_back({sim::GateKind::SingleExcitation, {ex.begin(), ex.end()}, a});
    for (const auto &ex : excitations_.doubles)
        for (double a : angles_)
            gates_.push_back({sim::GateKind::DoubleExcitation, {ex.begin(), ex.end()}, a});
}

const sim::GateSpec &OperatorPool::token_to_gate(Token token) const {
    if (token < 0 || static_cast<std::size_t>(token) >= gates_.size())
        throw InputError("token " + std::to_string(token) + " outside pool of size " +
                         std::to_string(gates_.size()));
    return gates_[token];
}

void OperatorPool::cross_check(const ExcitationLists &declared) const {
    if (declared.singles != excitations_.singles)
        throw InputError("declared single excitations (" + std::to_string(declared.singles.size()) +
                         ") differ from the enumerated ones (" +
                         std::to_string(excitations_.singles.size()) + ")");
    if (declared.doubles != excitations_.doubles)
        throw InputError("declared double excitations (" + std::to_string(declared.doubles.size()) +
                         ") differ from the enumerated ones (" +
                         std::to_string(excitations_.doubles.size()) + ")");
}

OperatorPool build_pool(int n_electrons, int n_qubits, std::vector<double> angle_set) {
    return OperatorPool(n_electrons, n_qubits, std::move(angle_set));
}

sim::StateVector run_circuit(const OperatorPool &pool, std::span<const Token> sequence,
                             sim::StateVector state) {
    for (Token t : sequence)
        sim::apply_gate_inplace(state, pool.token_to_gate(t));
    return state;
}

double evaluate_sequence(const OperatorPool &pool, std::span<const Token> sequence,
                         const sim::Hamiltonian &h, const sim::CompiledHamiltonian &compiled) {
    if (pool.n_qubits() != h.n_qubits)
        throw InputError("pool and hamiltonian qubit counts differ");
    auto state = run_circuit(pool, sequence, sim::hartree_fock_state(h.n_qubits, h.hf_occupation));
    return compiled.expectation(state);
}

double evaluate_sequence(const OperatorPool &pool, std::span<const Token> sequence,
                         const sim::Hamiltonian &h) {
    return evaluate_sequence(pool, sequence, h, sim::CompiledHamiltonian(h));
}

} // namespace gqe::pool
