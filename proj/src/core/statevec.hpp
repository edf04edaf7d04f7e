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

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gqe::sim {

using Complex = std::complex<double>;

/// Qubit 0 is the most significant bit of a basis index and the leftmost
/// character of a Pauli word.
inline constexpr std::uint64_t qubit_mask(int n_qubits, int qubit) {
    return std::uint64_t{1} << (n_qubits - 1 - qubit);
}

/// Largest register handled by the simulator and the exact oracle.
inline constexpr int kMaxQubits = 16;
/// Above this size the ground-state oracle switches from dense to Lanczos.
inline constexpr int kDenseOracleMaxQubits = 10;

struct PauliTerm {
    double coeff = 0.0;
    std::string word;
};

struct Hamiltonian {
    std::string name;
    int n_qubits = 0;
    std::vector<PauliTerm> terms;
    std::vector<int> hf_occupation;
    std::optional<double> ground_energy_hint;

    int particle_count() const;
    /// Throws InputError if any invariant is violated.
    void validate() const;
};

class StateVector {
  public:
    StateVector() = default;
    /// |0...0>
    explicit StateVector(int n_qubits);
    StateVector(int n_qubits, std::vector<Complex> amplitudes);

    int n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    std::span<const Complex> amplitudes() const { return amps_; }
    std::span<Complex> amplitudes() { return amps_; }
    Complex operator[](std::size_t i) const { return amps_[i]; }
    double norm_squared() const;

  private:
    int n_qubits_ = 0;
    std::vector<Complex> amps_;
};

enum class GateKind { Identity, SingleExcitation, DoubleExcitation };

const char *gate_kind_name(GateKind kind);

struct GateSpec {
    GateKind kind = GateKind::Identity;
    std::vector<int> wires;
    double angle = 0.0;

    bool operator==(const GateSpec &) const = default;
};

StateVector hartree_fock_state(int n_qubits, std::span<const int> occupation);

/// Two-level rotation. For SingleExcitation on (p,q) the pair is
/// |1_p 0_q> -> cos(t/2)|1_p 0_q> + sin(t/2)|0_p 1_q> and
/// |0_p 1_q> -> cos(t/2)|0_p 1_q> - sin(t/2)|1_p 0_q>. DoubleExcitation on
/// (p,q,r,s) does the same for |1100> and |0011> on those wires.
void apply_gate_inplace(StateVector &state, const GateSpec &gate);
StateVector apply_gate(StateVector state, const GateSpec &gate);

/// Pauli-string observable precompiled into bit masks.
class CompiledHamiltonian {
  public:
    explicit CompiledHamiltonian(const Hamiltonian &h);

    int n_qubits() const { return n_qubits_; }
    /// <psi|H|psi>; throws NumericError if the imaginary residue exceeds 1e-9.
    double expectation(const StateVector &state) const;
    /// out = H * in, with `in`/`out` of length 2^n.
    void apply(std::span<const Complex> in, std::span<Complex> out) const;

  private:
    struct Term {
        std::uint64_t z_mask;
        Complex coeff; // includes i^(number of Y)
    };
    struct Group {
        std::uint64_t x_mask;
        std::vector<Term> terms;
    };
    int n_qubits_;
    std::vector<Group> groups_;
};

double expectation(const StateVector &state, const Hamiltonian &h);

enum class OracleMethod { Auto, Dense, Lanczos };

/// Minimum eigenvalue of H. Dense up to kDenseOracleMaxQubits, Lanczos above
/// (unless forced); CapabilityError beyond kMaxQubits.
double exact_ground_energy(const Hamiltonian &h, OracleMethod method = OracleMethod::Auto);

} // namespace gqe::sim
