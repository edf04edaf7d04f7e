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
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hamiltonian_io.hpp"
#include "optimizer.hpp"
#include "preference_losses.hpp"
#include "replay.hpp"
#include "seq_model.hpp"
#include "statevec.hpp"
#include "train_config.hpp"

namespace gqe::train {

/// T = t_initial - (t_initial - t_final) * t / (n_steps - 1)
double temperature(int t, const ScheduleConfig &sched);

struct StepRecord {
    int step = 0;
    double temperature = 0.0;
    double batch_min_energy = 0.0;
    double min_energy_so_far = 0.0;
    double loss = 0.0; ///< NaN when the step had no valid pair
    int n_pairs = 0;
    std::size_t buffer_size = 0;
};

struct RunLog {
    std::vector<StepRecord> records;
    double best_energy = 0.0;
    pool::CircuitSequence best_sequence;
    double wall_time_s = 0.0;
    std::uint64_t seed = 0;
    std::string config_digest;
};

inline constexpr const char *kRunLogHeader =
    "step,temperature,batch_min_energy,min_energy_so_far,loss,n_pairs,buffer_size";

void write_csv(const RunLog &log, std::ostream &out);
std::string summary_json(const RunLog &log);

/// Loss of `batch` (pairs index into `samples`) under `params`, with the
/// reference log-probabilities taken from the samples' cache.
double preference_loss(const model::ModelParams &params, std::span<const EnergySample> samples,
                       const loss::PreferenceBatch &batch, const loss::LossConfig &cfg);

/// Same loss; also accumulates d(loss)/d(params) into `grad`. Each sequence
/// is back-propagated once with its summed weight beta * dL/dz.
double preference_loss_and_grad(const model::ModelParams &params,
                                std::span<const EnergySample> samples,
                                const loss::PreferenceBatch &batch, const loss::LossConfig &cfg,
                                std::span<double> grad, Rng *dropout_rng = nullptr);

/// Max relative error between the analytic parameter gradient of the batch
/// loss and central finite differences over every parameter.
double gradcheck(const model::ModelParams &params, std::span<const EnergySample> samples,
                 const loss::PreferenceBatch &batch, const loss::LossConfig &cfg,
                 double step = 1e-4);

/// One training run: owns the model, frozen reference, optimizer, replay
/// buffer and RNG streams.
class Trainer {
  public:
    Trainer(TrainConfig cfg, io::HamiltonianFile hamiltonian);

    StepRecord step(int t);
    /// Runs every remaining step.
    RunLog run();

    const TrainConfig &config() const { return cfg_; }
    const pool::OperatorPool &pool() const { return pool_; }
    const sim::Hamiltonian &hamiltonian() const { return ham_.hamiltonian; }
    const model::ModelParams &params() const { return params_; }
    const model::ModelParams &reference() const { return reference_; }
    const replay::ReplayBuffer &buffer() const { return buffer_; }
    const RunLog &log() const { return log_; }

  private:
    double energy_of(const pool::CircuitSequence &seq) const;

    TrainConfig cfg_;
    io::HamiltonianFile ham_;
    sim::CompiledHamiltonian compiled_;
    pool::OperatorPool pool_;
    model::ModelParams params_;
    model::ModelParams reference_;
    optim::AdamW optimizer_;
    replay::ReplayBuffer buffer_;
    Rng sampling_rng_;
    Rng replay_rng_;
    Rng dropout_rng_;
    RunLog log_;
    int next_step_ = 0;
};

/// Loads the hamiltonian, runs every step and writes the configured outputs
/// (CSV, summary JSON, optional checkpoint and buffer dump).
RunLog train(const TrainConfig &cfg);

} // namespace gqe::train
