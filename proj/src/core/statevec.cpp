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
#include "statevec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "errors.hpp"

namespace gqe::sim {

namespace {

constexpr double kImagResidueTol = 1e-9;

void require_simulable(int n_qubits) {
    if (n_qubits < 1)
        throw InputError("n_qubits must be positive, got " + std::to_string(n_qubits));
    if (n_qubits > kMaxQubits)
        throw CapabilityError("register of " + std::to_string(n_qubits) +
                              " qubits exceeds the simulator limit of " +
                              std::to_string(kMaxQubits));
}

std::uint64_t wire_mask(const StateVector &state, std::span<const int> wires) {
    std::uint64_t mask = 0;
    for (int w : wires) {
        if (w < 0 || w >= state.n_qubits())
            throw InputError("wire " + std::to_string(w) + " out of range for " +
                             std::to_string(state.n_qubits()) + " qubits");
        const auto m = qubit_mask(state.n_qubits(), w);
        if (mask & m)
            throw InputError("wire " + std::to_string(w) + " listed twice");
        mask |= m;
    }
    return mask;
}

// Rotates every pair (b, b ^ flip) where b has all `ones` bits set and all
// `zeros` bits clear.
void rotate_pairs(std::span<Complex> amps, std::uint64_t ones, std::uint64_t zeros, double angle) {
    const double c = std::cos(angle / 2);
    const double s = std::sin(angle / 2);
    const std::uint64_t flip = ones | zeros;
    for (std::uint64_t b = 0; b < amps.size(); ++b) {
        if ((b & ones) != ones || (b & zeros) != 0)
            continue;
        const std::uint64_t partner = b ^ flip;
        const Complex first = amps[b];
        const Complex second = amps[partner];
        amps[b] = c * first - s * second;
        amps[partner] = s * first + c * second;
    }
}

double dense_ground_energy(const CompiledHamiltonian &ch) {
    const std::size_t dim = std::size_t{1} << ch.n_qubits();
    Eigen::MatrixXcd m(dim, dim);
    std::vector<Complex> unit(dim, 0.0), column(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        unit[j] = 1.0;
        ch.apply(unit, column);
        unit[j] = 0.0;
        for (std::size_t i = 0; i < dim; ++i)
            m(i, j) = column[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericError("dense eigensolver failed");
    return solver.eigenvalues()(0);
}

// Plain Lanczos without reorthogonalisation. Loss of orthogonality only
// produces spurious copies of converged Ritz values, so the extreme
// eigenvalue stays correct while memory stays at three vectors.
double lanczos_ground_energy(const CompiledHamiltonian &ch) {
    const std::size_t dim = std::size_t{1} << ch.n_qubits();
    std::vector<Complex> v(dim), v_prev(dim, 0.0), w(dim);
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> normal;
    double norm = 0.0;
    for (auto &x : v) {
        x = Complex(normal(rng), normal(rng));
        norm += std::norm(x);
    }
    norm = std::sqrt(norm);
    for (auto &x : v)
        x /= norm;

    std::vector<double> alphas, betas;
    double beta_prev = 0.0;
    double previous = std::numeric_limits<double>::infinity();
    int stable = 0;
    const std::size_t max_iter = std::min<std::size_t>(dim, 3000);
    double estimate = previous;
    for (std::size_t k = 0; k < max_iter; ++k) {
        ch.apply(v, w);
        Complex alpha_c = 0.0;
        for (std::size_t i = 0; i < dim; ++i)
            alpha_c += std::conj(v[i]) * w[i];
        const double alpha = alpha_c.real();
        double beta = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            w[i] -= alpha * v[i] + beta_prev * v_prev[i];
            beta += std::norm(w[i]);
        }
        beta = std::sqrt(beta);
        alphas.push_back(alpha);

        Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alphas.data(), alphas.size());
        Eigen::VectorXd sub = Eigen::Map<Eigen::VectorXd>(betas.data(), betas.size());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
        tri.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
        estimate = tri.eigenvalues()(0);

        if (beta < 1e-12)
            return estimate; // invariant subspace found
        stable = std::abs(estimate - previous) < 1e-12 ? stable + 1 : 0;
        if (stable >= 10)
            return estimate;
        previous = estimate;

        betas.push_back(beta);
        for (std::size_t i = 0; i < dim; ++i) {
            v_prev[i] = v[i];
            v[i] = w[i] / beta;
        }
        beta_prev = beta;
    }
    return estimate;
}

} // namespace

int Hamiltonian::particle_count() const {
    return static_cast<int>(std::count(hf_occupation.begin(), hf_occupation.end(), 1));
}

void Hamiltonian::validate() const {
    if (n_qubits < 1)
        throw InputError("hamiltonian n_qubits must be >= 1");
    if (n_qubits > 63)
        throw CapabilityError("hamiltonian n_qubits exceeds 63");
    if (static_cast<int>(hf_occupation.size()) != n_qubits)
        throw InputError("hf_occupation length " + std::to_string(hf_occupation.size()) +
                         " does not match n_qubits " + std::to_string(n_qubits));
    for (int bit : hf_occupation)
        if (bit != 0 && bit != 1)
            throw InputError("hf_occupation entries must be 0 or 1");
    for (std::size_t k = 0; k < terms.size(); ++k) {
        const auto &t = terms[k];
        if (!std::isfinite(t.coeff))
            throw InputError("term " + std::to_string(k) + " has a non-finite coefficient");
        if (static_cast<int>(t.word.size()) != n_qubits)
            throw InputError("term " + std::to_string(k) + " word '" + t.word +
                             "' length does not match n_qubits");
        if (t.word.find_first_not_of("IXYZ") != std::string::npos)
            throw InputError("term " + std::to_string(k) + " word '" + t.word +
                             "' contains a letter outside IXYZ");
    }
}

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
    require_simulable(n_qubits);
    amps_.assign(std::size_t{1} << n_qubits, 0.0);
    amps_[0] = 1.0;
}

StateVector::StateVector(int n_qubits, std::vector<Complex> amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
    require_simulable(n_qubits);
    if (amps_.size() != (std::size_t{1} << n_qubits))
        throw InputError("amplitude count does not match 2^n_qubits");
}

double StateVector::norm_squared() const {
    double s = 0.0;
    for (const auto &a : amps_)
        s += std::norm(a);
    return s;
}

const char *gate_kind_name(GateKind kind) {
    switch (kind) {
    case GateKind::Identity:
        return "Identity";
    case GateKind::SingleExcitation:
        return "SingleExcitation";
    case GateKind::DoubleExcitation:
        return "DoubleExcitation";
    }
    return "?";
}

StateVector hartree_fock_state(int n_qubits, std::span<const int> occupation) {
    require_simulable(n_qubits);
    if (static_cast<int>(occupation.size()) != n_qubits)
        throw InputError("occupation length " + std::to_string(occupation.size()) +
                         " does not match n_qubits " + std::to_string(n_qubits));
    std::uint64_t index = 0;
    for (int q = 0; q < n_qubits; ++q) {
        if (occupation[q] != 0 && occupation[q] != 1)
            throw InputError("occupation entries must be 0 or 1");
        if (occupation[q])
            index |= qubit_mask(n_qubits, q);
    }
    StateVector state(n_qubits);
    state.amplitudes()[0] = 0.0;
    state.amplitudes()[index] = 1.0;
    return state;
}

void apply_gate_inplace(StateVector &state, const GateSpec &gate) {
    std::span<const int> wires = gate.wires;
    switch (gate.kind) {
    case GateKind::Identity:
        if (!wires.empty())
            throw InputError("Identity takes no wires");
        return;
    case GateKind::SingleExcitation: {
        if (wires.size() != 2)
            throw InputError("SingleExcitation takes 2 wires");
        wire_mask(state, wires);
        if (gate.angle == 0.0)
            return;
        const int n = state.n_qubits();
        rotate_pairs(state.amplitudes(), qubit_mask(n, wires[0]), qubit_mask(n, wires[1]),
                     gate.angle);
        return;
    }
    case GateKind::DoubleExcitation: {
        if (wires.size() != 4)
            throw InputError("DoubleExcitation takes 4 wires");
        wire_mask(state, wires);
        if (gate.angle == 0.0)
            return;
        const int n = state.n_qubits();
        rotate_pairs(state.amplitudes(), qubit_mask(n, wires[0]) | qubit_mask(n, wires[1]),
                     qubit_mask(n, wires[2]) | qubit_mask(n, wires[3]), gate.angle);
        return;
    }
    }
    throw InputError("unknown gate kind");
}

StateVector apply_gate(StateVector state, const GateSpec &gate) {
    apply_gate_inplace(state, gate);
    return state;
}

CompiledHamiltonian::CompiledHamiltonian(const Hamiltonian &h) : n_qubits_(h.n_qubits) {
    h.validate();
    std::map<std::uint64_t, std::vector<Term>> by_x;
    static const Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (const auto &t : h.terms) {
        std::uint64_t x = 0, z = 0;
        int n_y = 0;
        for (int q = 0; q < h.n_qubits; ++q) {
            const auto m = qubit_mask(h.n_qubits, q);
            switch (t.word[q]) {
            case 'X':
                x |= m;
                break;
            case 'Y': // Y = i X Z
                x |= m;
                z |= m;
                ++n_y;
                break;
            case 'Z':
                z |= m;
                break;
            default:
                break;
            }
        }
        by_x[x].push_back({z, t.coeff * kIPow[n_y % 4]});
    }
    for (auto &[x, terms] : by_x)
        groups_.push_back({x, std::move(terms)});
}

void CompiledHamiltonian::apply(std::span<const Complex> in, std::span<Complex> out) const {
    const std::size_t dim = std::size_t{1} << n_qubits_;
    if (in.size() != dim || out.size() != dim)
        throw InputError("vector length does not match 2^n_qubits");
    std::fill(out.begin(), out.end(), Complex{0.0});
    for (const auto &g : groups_) {
        for (std::uint64_t b = 0; b < dim; ++b) {
            Complex phase = 0.0;
            for (const auto &t : g.terms)
                phase += (std::popcount(b & t.z_mask) & 1) ? -t.coeff : t.coeff;
            out[b ^ g.x_mask] += phase * in[b];
        }
    }
}

double CompiledHamiltonian::expectation(const StateVector &state) const {
    if (state.n_qubits() != n_qubits_)
        throw InputError("state has " + std::to_string(state.n_qubits()) +
                         " qubits but the hamiltonian has " + std::to_string(n_qubits_));
    const auto amps = state.amplitudes();
    Complex total = 0.0;
    for (const auto &g : groups_) {
        for (std::uint64_t b = 0; b < amps.size(); ++b) {
            if (amps[b] == Complex{0.0})
                continue;
            Complex phase = 0.0;
            for (const auto &t : g.terms)
                phase += (std::popcount(b & t.z_mask) & 1) ? -t.coeff : t.coeff;
            total += std::conj(amps[b ^ g.x_mask]) * phase * amps[b];
        }
    }
    if (std::abs(total.imag()) > kImagResidueTol)
        throw NumericError("expectation has imaginary residue " + std::to_string(total.imag()));
    return total.real();
}

double expectation(const StateVector &state, const Hamiltonian &h) {
    return CompiledHamiltonian(h).expectation(state);
}

double exact_ground_energy(const Hamiltonian &h, OracleMethod method) {
    h.validate();
    if (h.n_qubits > kMaxQubits)
        throw CapabilityError("exact ground energy supports at most " +
                              std::to_string(kMaxQubits) + " qubits, got " +
                              std::to_string(h.n_qubits));
    const CompiledHamiltonian ch(h);
    if (method == OracleMethod::Auto)
        method = h.n_qubits <= kDenseOracleMaxQubits ? OracleMethod::Dense : OracleMethod::Lanczos;
    return method == OracleMethod::Dense ? dense_ground_energy(ch) : lanczos_ground_energy(ch);
}

} // namespace gqe::sim
