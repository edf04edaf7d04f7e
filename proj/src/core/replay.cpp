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
#include "replay.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "errors.hpp"

namespace gqe::replay {

void HybridConfig::validate() const {
    if (capacity < 0 || reuse < 0 || start < 0)
        throw InputError("hybrid C, R and S must be non-negative");
    if (enabled && reuse > capacity)
        throw InputError("hybrid reuse R must not exceed capacity C");
}

ReplayBuffer::ReplayBuffer(HybridConfig config) : config_(config) { config_.validate(); }

double ReplayBuffer::min_energy() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto &s : samples_)
        m = std::min(m, s.energy);
    return m;
}

void ReplayBuffer::store(std::span<const EnergySample> batch) {
    samples_.insert(samples_.end(), batch.begin(), batch.end());
    const auto capacity = static_cast<std::size_t>(config_.capacity);
    while (samples_.size() > capacity) {
        // max_element keeps the first of equal maxima; entries are stored in
        // insertion order, so compare created_step explicitly for age.
        auto victim = std::max_element(samples_.begin(), samples_.end(),
                                       [](const EnergySample &a, const EnergySample &b) {
                                           if (a.energy != b.energy)
                                               return a.energy < b.energy;
                                           return a.created_step > b.created_step;
                                       });
        samples_.erase(victim);
    }
}

std::vector<EnergySample> ReplayBuffer::draw(int count, Rng &rng) const {
    const std::size_t n = samples_.size();
    const std::size_t k = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(count, 0)));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<EnergySample> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
        out.push_back(samples_[idx[i]]);
    }
    return out;
}

std::vector<EnergySample> ReplayBuffer::assemble_step(std::span<const EnergySample> online, int t,
                                                      Rng &rng) {
    std::vector<EnergySample> out(online.begin(), online.end());
    if (config_.enabled && t >= config_.start) {
        auto replayed = draw(config_.reuse, rng);
        out.insert(out.end(), replayed.begin(), replayed.end());
    }
    store(online);
    return out;
}

void ReplayBuffer::dump_jsonl(std::ostream &out) const {
    for (const auto &s : samples_) {
        nlohmann::json line = {
            {"sequence", s.sequence}, {"energy", s.energy}, {"created_step", s.created_step}};
        out << line.dump() << '\n';
    }
}

} // namespace gqe::replay
