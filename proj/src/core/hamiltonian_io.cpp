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
#include "hamiltonian_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "errors.hpp"

namespace gqe::io {

using nlohmann::json;

namespace {

template <std::size_t K>
std::vector<std::array<int, K>> parse_tuples(const json &arr, const char *what) {
    if (!arr.is_array())
        throw InputError(std::string("excitations.") + what + " must be an array");
    std::vector<std::array<int, K>> out;
    for (const auto &item : arr) {
        if (!item.is_array() || item.size() != K)
            throw InputError(std::string("excitations.") + what + " entries must have " +
                             std::to_string(K) + " indices");
        std::array<int, K> t{};
        for (std::size_t i = 0; i < K; ++i)
            t[i] = item[i].get<int>();
        out.push_back(t);
    }
    return out;
}

} // namespace

HamiltonianFile parse_hamiltonian_json(const std::string &text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw InputError(std::string("hamiltonian JSON does not parse: ") + e.what());
    }
    HamiltonianFile out;
    auto &h = out.hamiltonian;
    try {
        h.name = doc.at("name").get<std::string>();
        h.n_qubits = doc.at("n_qubits").get<int>();
        h.hf_occupation = doc.at("hf_occupation").get<std::vector<int>>();
        for (const auto &t : doc.at("terms"))
            h.terms.push_back({t.at("coeff").get<double>(), t.at("word").get<std::string>()});
        if (auto it = doc.find("ground_energy_hint"); it != doc.end() && !it->is_null())
            h.ground_energy_hint = it->get<double>();
        if (auto it = doc.find("excitations"); it != doc.end() && !it->is_null()) {
            pool::ExcitationLists ex;
            ex.singles = parse_tuples<2>(it->at("singles"), "singles");
            ex.doubles = parse_tuples<4>(it->at("doubles"), "doubles");
            out.excitations = std::move(ex);
        }
    } catch (const json::exception &e) {
        throw InputError(std::string("hamiltonian JSON schema error: ") + e.what());
    }
    h.validate();
    return out;
}

HamiltonianFile load_hamiltonian(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open hamiltonian file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_hamiltonian_json(ss.str());
}

std::string to_json(const HamiltonianFile &file) {
    const auto &h = file.hamiltonian;
    json doc;
    doc["name"] = h.name;
    doc["n_qubits"] = h.n_qubits;
    doc["hf_occupation"] = h.hf_occupation;
    json terms = json::array();
    for (const auto &t : h.terms)
        terms.push_back({{"coeff", t.coeff}, {"word", t.word}});
    doc["terms"] = std::move(terms);
    doc["ground_energy_hint"] = h.ground_energy_hint ? json(*h.ground_energy_hint) : json(nullptr);
    if (file.excitations)
        doc["excitations"] = {{"singles", file.excitations->singles},
                              {"doubles", file.excitations->doubles}};
    return doc.dump(1);
}

pool::OperatorPool pool_for(const HamiltonianFile &file, std::vector<double> angle_set) {
    const auto &h = file.hamiltonian;
    const int n_el = h.particle_count();
    for (int q = 0; q < h.n_qubits; ++q)
        if (h.hf_occupation[q] != (q < n_el ? 1 : 0))
            throw InputError("hf_occupation must fill the lowest spin orbitals first");
    pool::OperatorPool p(n_el, h.n_qubits, std::move(angle_set));
    if (file.excitations)
        p.cross_check(*file.excitations);
    return p;
}

} // namespace gqe::io
