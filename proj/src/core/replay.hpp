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

#include <ostream>
#include <span>
#include <vector>

#include "rng.hpp"
#include "samples.hpp"

namespace gqe::replay {

/// Capacity C, reuse size R, start step S.
struct HybridConfig {
    bool enabled = false;
    int capacity = 25;
    int reuse = 2;
    int start = 50;

    void validate() const;
};

/// Bounded sample store. Once over capacity, the highest-energy sample is
/// evicted first; among equal energies the oldest (smallest created_step,
/// then earliest inserted) goes first.
class ReplayBuffer {
  public:
    explicit ReplayBuffer(HybridConfig config);

    const HybridConfig &config() const { return config_; }
    std::span<const EnergySample> samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    /// +inf when empty.
    double min_energy() const;

    void store(std::span<const EnergySample> batch);

    /// Up to `count` distinct buffer entries, uniformly without replacement.
    std::vector<EnergySample> draw(int count, Rng &rng) const;

    /// Online samples of step t plus, when enabled and t >= S, R replayed
    /// ones. The draw happens before the online batch is stored.
    std::vector<EnergySample> assemble_step(std::span<const EnergySample> online, int t, Rng &rng);

    /// One JSON object per line: {"sequence": [...], "energy": e, "created_step": s}
    void dump_jsonl(std::ostream &out) const;

  private:
    HybridConfig config_;
    std::vector<EnergySample> samples_;
};

} // namespace gqe::replay
