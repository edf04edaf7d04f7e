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
#include "trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

#include "errors.hpp"

namespace gqe::train {

namespace {

constexpr double kEnergyDriftTol = 1e-12;
constexpr double kRefLogpDriftTol = 1e-10;
constexpr double kGradcheckFloor = 1e-7;

std::string fmt(double v) {
    if (std::isnan(v))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

model::ModelConfig model_config_for(const TrainConfig &cfg, const pool::OperatorPool &p) {
    auto m = cfg.model;
    m.vocab_size = static_cast<int>(p.size());
    return m;
}

// Log-probabilities under params for the samples a batch refers to.
std::map<std::size_t, double> theta_logps(const model::ModelParams &params,
                                          std::span<const EnergySample> samples,
                                          const loss::PreferenceBatch &batch) {
    std::map<std::size_t, double> out;
    for (const auto &p : batch.pairs)
        for (std::size_t i : {p.winner, p.loser})
            if (!out.contains(i))
                out[i] = model::sequence_log_prob(params, samples[i].sequence).total;
    return out;
}

std::vector<double> z_values(std::span<const EnergySample> samples,
                             const loss::PreferenceBatch &batch,
                             const std::map<std::size_t, double> &logp, double beta) {
    std::vector<double> z;
    z.reserve(batch.pairs.size());
    for (const auto &p : batch.pairs)
        z.push_back(loss::z_value(logp.at(p.winner), samples[p.winner].ref_logp, logp.at(p.loser),
                                  samples[p.loser].ref_logp, beta));
    return z;
}

} // namespace

double temperature(int t, const ScheduleConfig &sched) {
    sched.validate();
    if (t < 0 || t > sched.n_steps - 1)
        throw InputError("step " + std::to_string(t) + " outside schedule of " +
                         std::to_string(sched.n_steps) + " steps");
    if (sched.n_steps == 1)
        return sched.t_initial;
    return sched.t_initial -
           (sched.t_initial - sched.t_final) * t / static_cast<double>(sched.n_steps - 1);
}

void write_csv(const RunLog &log, std::ostream &out) {
    out << kRunLogHeader << '\n';
    for (const auto &r : log.records)
        out << r.step << ',' << fmt(r.temperature) << ',' << fmt(r.batch_min_energy) << ','
            << fmt(r.min_energy_so_far) << ',' << fmt(r.loss) << ',' << r.n_pairs << ','
            << r.buffer_size << '\n';
}

std::string summary_json(const RunLog &log) {
    nlohmann::json doc = {{"best_energy", log.best_energy},
                          {"best_sequence", log.best_sequence},
                          {"seed", log.seed},
                          {"config_digest", log.config_digest}};
    return doc.dump(2) + "\n";
}

double preference_loss(const model::ModelParams &params, std::span<const EnergySample> samples,
                       const loss::PreferenceBatch &batch, const loss::LossConfig &cfg) {
    const auto logp = theta_logps(params, samples, batch);
    return loss::batch_loss(z_values(samples, batch, logp, cfg.beta), cfg);
}

double preference_loss_and_grad(const model::ModelParams &params,
                                std::span<const EnergySample> samples,
                                const loss::PreferenceBatch &batch, const loss::LossConfig &cfg,
                                std::span<double> grad, Rng *dropout_rng) {
    std::map<std::size_t, model::LogProbTape> tapes;
    std::map<std::size_t, double> logp;
    for (const auto &p : batch.pairs)
        for (std::size_t i : {p.winner, p.loser})
            if (!tapes.contains(i)) {
                auto it = tapes.emplace(i, model::LogProbTape(params, samples[i].sequence,
                                                              dropout_rng))
                              .first;
                logp[i] = it->second.result().total;
            }
    const auto z = z_values(samples, batch, logp, cfg.beta);
    const double value = loss::batch_loss(z, cfg);
    if (!std::isfinite(value))
        return value;

    // dz/dlogp_w = beta, dz/dlogp_l = -beta
    const auto dl_dz = loss::loss_grad_wrt_z(z, cfg);
    std::map<std::size_t, double> weight;
    for (std::size_t k = 0; k < batch.pairs.size(); ++k) {
        weight[batch.pairs[k].winner] += cfg.beta * dl_dz[k];
        weight[batch.pairs[k].loser] -= cfg.beta * dl_dz[k];
    }
    for (const auto &[i, tape] : tapes)
        tape.backward(weight[i], grad);
    return value;
}

double gradcheck(const model::ModelParams &params, std::span<const EnergySample> samples,
                 const loss::PreferenceBatch &batch, const loss::LossConfig &cfg, double step) {
    std::vector<double> analytic(params.size(), 0.0);
    preference_loss_and_grad(params, samples, batch, cfg, analytic);
    model::ModelParams probe = params;
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double orig = probe.values()[i];
        probe.values()[i] = orig + step;
        const double up = preference_loss(probe, samples, batch, cfg);
        probe.values()[i] = orig - step;
        const double down = preference_loss(probe, samples, batch, cfg);
        probe.values()[i] = orig;
        const double numeric = (up - down) / (2.0 * step);
        const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), kGradcheckFloor});
        worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
    }
    return worst;
}

Trainer::Trainer(TrainConfig cfg, io::HamiltonianFile hamiltonian)
    : cfg_(std::move(cfg)), ham_(std::move(hamiltonian)), compiled_(ham_.hamiltonian),
      pool_(io::pool_for(ham_)),
      params_(model::init_model(model_config_for(cfg_, pool_), cfg_.seed)), reference_(params_),
      optimizer_({cfg_.learning_rate, cfg_.weight_decay}, params_.size()), buffer_(cfg_.hybrid),
      sampling_rng_(make_stream(cfg_.seed, Stream::Sampling)),
      replay_rng_(make_stream(cfg_.seed, Stream::ReplayDraw)),
      dropout_rng_(make_stream(cfg_.seed, Stream::Dropout)) {
    cfg_.validate();
    if (ham_.hamiltonian.n_qubits > sim::kMaxQubits)
        throw CapabilityError("hamiltonian has too many qubits to simulate");
    log_.seed = cfg_.seed;
    log_.config_digest = cfg_.digest();
    log_.best_energy = std::numeric_limits<double>::infinity();
}

double Trainer::energy_of(const pool::CircuitSequence &seq) const {
    return pool::evaluate_sequence(pool_, seq, ham_.hamiltonian, compiled_);
}

StepRecord Trainer::step(int t) {
    StepRecord rec;
    rec.step = t;
    rec.temperature = temperature(t, cfg_.schedule);
    const int m = cfg_.samples_per_step;

    std::vector<pool::CircuitSequence> seqs;
    if (cfg_.force_identity)
        seqs.assign(m, pool::CircuitSequence(cfg_.model.max_len, 0));
    else
        seqs = model::sample_sequences(params_, m, rec.temperature, sampling_rng_);

    std::vector<EnergySample> online;
    online.reserve(m);
    rec.batch_min_energy = std::numeric_limits<double>::infinity();
    for (auto &seq : seqs) {
        EnergySample s;
        s.energy = energy_of(seq);
        s.created_step = t;
        s.ref_logp = model::sequence_log_prob(reference_, seq).total;
        s.sequence = std::move(seq);
        if (s.energy < rec.batch_min_energy)
            rec.batch_min_energy = s.energy;
        if (s.energy < log_.best_energy) {
            log_.best_energy = s.energy;
            log_.best_sequence = s.sequence;
        }
        online.push_back(std::move(s));
    }
    rec.min_energy_so_far = log_.best_energy;

    const auto assembled = buffer_.assemble_step(online, t, replay_rng_);
    rec.buffer_size = buffer_.size();

    if (cfg_.debug_checks) {
        for (std::size_t i = online.size(); i < assembled.size(); ++i) {
            const auto &s = assembled[i];
            if (std::abs(energy_of(s.sequence) - s.energy) > kEnergyDriftTol)
                throw NumericError("cached energy of a replayed sample drifted");
            if (std::abs(model::sequence_log_prob(reference_, s.sequence).total - s.ref_logp) >
                kRefLogpDriftTol)
                throw NumericError("cached reference log-probability drifted");
        }
    }

    loss::PreferenceBatch batch;
    try {
        batch = loss::pair_best_vs_others(assembled);
    } catch (const EmptyBatchError &) {
        rec.loss = std::numeric_limits<double>::quiet_NaN();
        rec.n_pairs = 0;
        return rec;
    }
    rec.n_pairs = static_cast<int>(batch.pairs.size());

    std::vector<double> grad(params_.size(), 0.0);
    Rng *dropout = cfg_.model.dropout > 0.0 ? &dropout_rng_ : nullptr;
    rec.loss = preference_loss_and_grad(params_, assembled, batch, cfg_.loss, grad, dropout);
    if (!std::isfinite(rec.loss))
        throw NumericError("non-finite loss at step " + std::to_string(t));
    for (double g : grad)
        if (!std::isfinite(g))
            throw NumericError("non-finite gradient at step " + std::to_string(t));
    if (cfg_.grad_clip > 0.0)
        optim::clip_grad_norm(grad, cfg_.grad_clip);
    optimizer_.step(params_.values(), grad);
    return rec;
}

RunLog Trainer::run() {
    const auto start = std::chrono::steady_clock::now();
    for (; next_step_ < cfg_.schedule.n_steps; ++next_step_)
        log_.records.push_back(step(next_step_));
    log_.wall_time_s +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return log_;
}

RunLog train(const TrainConfig &cfg) {
    cfg.validate();
    Trainer trainer(cfg, io::load_hamiltonian(cfg.hamiltonian_path));
    auto log = trainer.run();

    auto open = [](const std::string &path) {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw IoError("cannot write '" + path + "'");
        return out;
    };
    if (!cfg.output_path.empty()) {
        auto out = open(cfg.output_path);
        write_csv(log, out);
    }
    if (const auto path = cfg.effective_summary_path(); !path.empty()) {
        auto out = open(path);
        out << summary_json(log);
    }
    if (!cfg.checkpoint_path.empty())
        model::save_checkpoint(trainer.params(), cfg.checkpoint_path);
    if (!cfg.buffer_dump_path.empty()) {
        auto out = open(cfg.buffer_dump_path);
        trainer.buffer().dump_jsonl(out);
    }
    return log;
}

} // namespace gqe::train
