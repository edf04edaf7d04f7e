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

#include <optional>
#include <string>

#include "operator_pool.hpp"
#include "statevec.hpp"

namespace gqe::io {

struct HamiltonianFile {
    sim::Hamiltonian hamiltonian;
    /// Present when the file carries an "excitations" block.
    std::optional<pool::ExcitationLists> excitations;
};

/// Parses the Hamiltonian JSON document. Throws InputError on schema errors.
HamiltonianFile parse_hamiltonian_json(const std::string &text);
/// Throws IoError when the file cannot be read.
HamiltonianFile load_hamiltonian(const std::string &path);

std::string to_json(const HamiltonianFile &file);

/// Pool for the file's hamiltonian (electron count from hf_occupation),
/// cross-checked against the declared excitation block when present.
pool::OperatorPool pool_for(const HamiltonianFile &file,
                            std::vector<double> angle_set = pool::default_angle_set());

} // namespace gqe::io
