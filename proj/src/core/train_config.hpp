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

#include <cstdint>
#include <string>
#include <string_view>

#include "preference_losses.hpp"
#include "replay.hpp"
#include "seq_model.hpp"

namespace gqe::train {

/// Linear annealing from t_initial at step 0 to t_final at step n_steps - 1.
/// A single-step schedule stays at t_initial.
struct ScheduleConfig {
    double t_initial = 1.5;
    double t_final = 0.7;
    int n_steps = 300;

    void validate() const;
};

struct TrainConfig {
    model::ModelConfig model; ///< vocab_size is filled in from the pool
    loss::LossConfig loss;
    replay::HybridConfig hybrid;
    ScheduleConfig schedule;
    int samples_per_step = 10;
    double learning_rate = 8e-5;
    double weight_decay = 0.01;
    double grad_clip = 0.0; ///< max global gradient norm; 0 disables
    std::uint64_t seed = 42;

    std::string hamiltonian_path = "data/h2.json";
    std::string output_path;     ///< RunLog CSV; empty skips writing
    std::string summary_path;    ///< empty derives "<output stem>.summary.json"
    std::string checkpoint_path; ///< final model; empty skips
    std::string buffer_dump_path;

    /// Recompute cached energies and reference log-probs of replayed
    /// samples and fail on any drift.
    bool debug_checks = false;
    /// Replace sampling by all-identity sequences.
    bool force_identity = false;

    void validate() const;

    /// Sets one field from its textual form (the same keys the config file
    /// and the C API use). Throws InputError on unknown keys or bad values.
    void set(std::string_view key, std::string_view value);

    /// Sorted key=value dump of everything that affects the run's numbers.
    std::string canonical() const;
    /// 16-hex-digit FNV-1a hash of canonical().
    std::string digest() const;

    std::string effective_summary_path() const;
};

/// Learning rate of the desk profile.
inline constexpr double kDeskLearningRate = 8e-5;

/// Small model, H2, 300 steps.
TrainConfig desk_defaults();
/// Full-size model (768/3072/12/12), N = 40, 3000 steps, BeH2.
TrainConfig paper_scale();

/// Reads `key = value` lines ('#' starts a comment) into cfg.
void apply_config_file(TrainConfig &cfg, const std::string &path);
void apply_config_text(TrainConfig &cfg, std::string_view text);

/// Parses "C=25,R=2,S=50" (any order, all three required) or "off".
replay::HybridConfig parse_hybrid(std::string_view spec);

} // namespace gqe::train
