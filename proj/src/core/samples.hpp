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

#include <vector>

#include "operator_pool.hpp"

namespace gqe {

/// One generated circuit with its energy and the frozen reference model's
/// log-probability, cached when the sample is created.
struct EnergySample {
    pool::CircuitSequence sequence;
    double energy = 0.0;
    int created_step = 0;
    double ref_logp = 0.0;
};

} // namespace gqe
