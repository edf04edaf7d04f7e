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
#include "gqe/gqe.h"

#include <cstring>
#include <fstream>
#include <string>

#include "../core/aggregate.hpp"
#include "../core/errors.hpp"
#include "../core/hamiltonian_io.hpp"
#include "../core/seq_model.hpp"
#include "../core/trainer.hpp"

struct gqe_hamiltonian {
    gqe::io::HamiltonianFile file;
};

struct gqe_pool {
    gqe::pool::OperatorPool pool;
};

struct gqe_train_config {
    gqe::train::TrainConfig cfg;
};

struct gqe_run_log {
    gqe::train::RunLog log;
};

struct gqe_model {
    gqe::model::ModelParams params;
};

namespace {

thread_local std::string g_last_error;

// Runs fn, translating exceptions into status codes.
template <typename Fn> gqe_status guarded(Fn &&fn) {
    try {
        fn();
        g_last_error.clear();
        return GQE_OK;
    } catch (const gqe::InputError &e) {
        g_last_error = e.what();
        return GQE_ERR_INPUT;
    } catch (const gqe::NumericError &e) {
        g_last_error = e.what();
        return GQE_ERR_NUMERIC;
    } catch (const gqe::CapabilityError &e) {
        g_last_error = e.what();
        return GQE_ERR_CAPABILITY;
    } catch (const gqe::IoError &e) {
        g_last_error = e.what();
        return GQE_ERR_IO;
    } catch (const gqe::EmptyBatchError &e) {
        g_last_error = e.what();
        return GQE_ERR_EMPTY_BATCH;
    } catch (const std::bad_alloc &) {
        g_last_error = "out of memory";
        return GQE_ERR_CAPABILITY;
    } catch (const std::exception &e) {
        g_last_error = e.what();
        return GQE_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return GQE_ERR_INTERNAL;
    }
}

template <typename T> void require(const T *ptr, const char *what) {
    if (!ptr)
        throw gqe::InputError(std::string(what) + " is NULL");
}

} // namespace

extern "C" {

const char *gqe_version(void) { return "1.0.0"; }

const char *gqe_last_error(void) { return g_last_error.c_str(); }

const char *gqe_status_name(gqe_status status) {
    switch (status) {
    case GQE_OK:
        return "ok";
    case GQE_ERR_INPUT:
        return "input error";
    case GQE_ERR_NUMERIC:
        return "numeric error";
    case GQE_ERR_CAPABILITY:
        return "capability error";
    case GQE_ERR_IO:
        return "I/O error";
    case GQE_ERR_EMPTY_BATCH:
        return "empty batch";
    case GQE_ERR_INTERNAL:
        return "internal error";
    }
    return "unknown status";
}

gqe_status gqe_hamiltonian_load(const char *path, gqe_hamiltonian **out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new gqe_hamiltonian{gqe::io::load_hamiltonian(path)};
    });
}

gqe_status gqe_hamiltonian_parse(const char *json_text, gqe_hamiltonian **out) {
    return guarded([&] {
        require(json_text, "json_text");
        require(out, "out");
        *out = new gqe_hamiltonian{gqe::io::parse_hamiltonian_json(json_text)};
    });
}

void gqe_hamiltonian_free(gqe_hamiltonian *h) { delete h; }

gqe_status gqe_hamiltonian_info(const gqe_hamiltonian *h, int *n_qubits, size_t *n_terms,
                                int *n_electrons) {
    return guarded([&] {
        require(h, "hamiltonian");
        const auto &ham = h->file.hamiltonian;
        if (n_qubits)
            *n_qubits = ham.n_qubits;
        if (n_terms)
            *n_terms = ham.terms.size();
        if (n_electrons)
            *n_electrons = ham.particle_count();
    });
}

gqe_status gqe_hamiltonian_name(const gqe_hamiltonian *h, const char **name) {
    return guarded([&] {
        require(h, "hamiltonian");
        require(name, "name");
        *name = h->file.hamiltonian.name.c_str();
    });
}

gqe_status gqe_hamiltonian_ground_hint(const gqe_hamiltonian *h, double *value, int *present) {
    return guarded([&] {
        require(h, "hamiltonian");
        require(present, "present");
        const auto &hint = h->file.hamiltonian.ground_energy_hint;
        *present = hint ? 1 : 0;
        if (hint && value)
            *value = *hint;
    });
}

gqe_status gqe_hf_energy(const gqe_hamiltonian *h, double *energy) {
    return guarded([&] {
        require(h, "hamiltonian");
        require(energy, "energy");
        const auto &ham = h->file.hamiltonian;
        *energy = gqe::sim::expectation(gqe::sim::hartree_fock_state(ham.n_qubits, ham.hf_occupation),
                                        ham);
    });
}

gqe_status gqe_exact_ground_energy(const gqe_hamiltonian *h, double *energy) {
    return guarded([&] {
        require(h, "hamiltonian");
        require(energy, "energy");
        *energy = gqe::sim::exact_ground_energy(h->file.hamiltonian);
    });
}

gqe_status gqe_pool_build(const gqe_hamiltonian *h, const double *angles, size_t n_angles,
                          gqe_pool **out) {
    return guarded([&] {
        require(h, "hamiltonian");
        require(out, "out");
        std::vector<double> set = angles ? std::vector<double>(angles, angles + n_angles)
                                         : gqe::pool::default_angle_set();
        *out = new gqe_pool{gqe::io::pool_for(h->file, std::move(set))};
    });
}

void gqe_pool_free(gqe_pool *p) { delete p; }

gqe_status gqe_pool_info(const gqe_pool *p, size_t *size, size_t *n_singles, size_t *n_doubles,
                         size_t *n_angles) {
    return guarded([&] {
        require(p, "pool");
        if (size)
            *size = p->pool.size();
        if (n_singles)
            *n_singles = p->pool.excitations().singles.size();
        if (n_doubles)
            *n_doubles = p->pool.excitations().doubles.size();
        if (n_angles)
            *n_angles = p->pool.angle_set().size();
    });
}

gqe_status gqe_pool_angle(const gqe_pool *p, size_t index, double *angle) {
    return guarded([&] {
        require(p, "pool");
        require(angle, "angle");
        if (index >= p->pool.angle_set().size())
            throw gqe::InputError("angle index out of range");
        *angle = p->pool.angle_set()[index];
    });
}

gqe_status gqe_pool_gate(const gqe_pool *p, int token, gqe_gate_kind *kind, int *wires,
                         int *n_wires, double *angle) {
    return guarded([&] {
        require(p, "pool");
        const auto &g = p->pool.token_to_gate(token);
        if (kind)
            *kind = static_cast<gqe_gate_kind>(g.kind);
        if (n_wires)
            *n_wires = static_cast<int>(g.wires.size());
        if (wires)
            std::copy(g.wires.begin(), g.wires.end(), wires);
        if (angle)
            *angle = g.angle;
    });
}

gqe_status gqe_evaluate_sequence(const gqe_hamiltonian *h, const gqe_pool *p, const int *tokens,
                                 size_t n_tokens, double *energy) {
    return guarded([&] {
        require(h, "hamiltonian");
        require(p, "pool");
        require(energy, "energy");
        if (n_tokens > 0)
            require(tokens, "tokens");
        *energy = gqe::pool::evaluate_sequence(p->pool, std::span<const int>(tokens, n_tokens),
                                               h->file.hamiltonian);
    });
}

gqe_status gqe_train_config_new(int paper_scale, gqe_train_config **out) {
    return guarded([&] {
        require(out, "out");
        *out = new gqe_train_config{paper_scale ? gqe::train::paper_scale()
                                                : gqe::train::desk_defaults()};
    });
}

void gqe_train_config_free(gqe_train_config *cfg) { delete cfg; }

gqe_status gqe_train_config_set(gqe_train_config *cfg, const char *key, const char *value) {
    return guarded([&] {
        require(cfg, "config");
        require(key, "key");
        require(value, "value");
        cfg->cfg.set(key, value);
    });
}

gqe_status gqe_train_config_load(gqe_train_config *cfg, const char *path) {
    return guarded([&] {
        require(cfg, "config");
        require(path, "path");
        gqe::train::apply_config_file(cfg->cfg, path);
    });
}

gqe_status gqe_train_config_validate(const gqe_train_config *cfg) {
    return guarded([&] {
        require(cfg, "config");
        cfg->cfg.validate();
    });
}

gqe_status gqe_train_config_digest(const gqe_train_config *cfg, char *out) {
    return guarded([&] {
        require(cfg, "config");
        require(out, "out");
        const auto d = cfg->cfg.digest();
        std::memcpy(out, d.c_str(), d.size() + 1);
    });
}

gqe_status gqe_temperature(double t_initial, double t_final, int n_steps, int step,
                           double *temperature) {
    return guarded([&] {
        require(temperature, "temperature");
        *temperature = gqe::train::temperature(step, {t_initial, t_final, n_steps});
    });
}

gqe_status gqe_train(const gqe_train_config *cfg, gqe_run_log **out) {
    return guarded([&] {
        require(cfg, "config");
        require(out, "out");
        *out = new gqe_run_log{gqe::train::train(cfg->cfg)};
    });
}

void gqe_run_log_free(gqe_run_log *log) { delete log; }

gqe_status gqe_run_log_info(const gqe_run_log *log, size_t *n_records, double *best_energy,
                            double *wall_time_s) {
    return guarded([&] {
        require(log, "run log");
        if (n_records)
            *n_records = log->log.records.size();
        if (best_energy)
            *best_energy = log->log.best_energy;
        if (wall_time_s)
            *wall_time_s = log->log.wall_time_s;
    });
}

gqe_status gqe_run_log_record(const gqe_run_log *log, size_t index, gqe_step_record *out) {
    return guarded([&] {
        require(log, "run log");
        require(out, "out");
        if (index >= log->log.records.size())
            throw gqe::InputError("record index out of range");
        const auto &r = log->log.records[index];
        *out = {r.step,    r.temperature, r.batch_min_energy, r.min_energy_so_far,
                r.loss,    r.n_pairs,     r.buffer_size};
    });
}

gqe_status gqe_run_log_best_sequence(const gqe_run_log *log, int *tokens, size_t cap,
                                     size_t *len) {
    return guarded([&] {
        require(log, "run log");
        const auto &seq = log->log.best_sequence;
        if (len)
            *len = seq.size();
        if (tokens)
            std::copy_n(seq.begin(), std::min(cap, seq.size()), tokens);
    });
}

gqe_status gqe_run_log_write_csv(const gqe_run_log *log, const char *path) {
    return guarded([&] {
        require(log, "run log");
        require(path, "path");
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw gqe::IoError(std::string("cannot write '") + path + "'");
        gqe::train::write_csv(log->log, out);
    });
}

gqe_status gqe_model_load(const char *checkpoint_path, gqe_model **out) {
    return guarded([&] {
        require(checkpoint_path, "path");
        require(out, "out");
        *out = new gqe_model{gqe::model::load_checkpoint(checkpoint_path)};
    });
}

void gqe_model_free(gqe_model *m) { delete m; }

gqe_status gqe_model_info(const gqe_model *m, int *vocab_size, int *max_len, size_t *n_params) {
    return guarded([&] {
        require(m, "model");
        if (vocab_size)
            *vocab_size = m->params.config().vocab_size;
        if (max_len)
            *max_len = m->params.config().max_len;
        if (n_params)
            *n_params = m->params.size();
    });
}

gqe_status gqe_model_log_prob(const gqe_model *m, const int *tokens, size_t n_tokens,
                              double *total) {
    return guarded([&] {
        require(m, "model");
        require(tokens, "tokens");
        require(total, "total");
        *total = gqe::model::sequence_log_prob(m->params, std::span<const int>(tokens, n_tokens))
                     .total;
    });
}

gqe_status gqe_model_sample(const gqe_model *m, int count, double temperature, uint64_t seed,
                            int *tokens_out) {
    return guarded([&] {
        require(m, "model");
        require(tokens_out, "tokens_out");
        auto rng = gqe::make_stream(seed, gqe::Stream::Sampling);
        const auto seqs = gqe::model::sample_sequences(m->params, count, temperature, rng);
        for (const auto &s : seqs)
            tokens_out = std::copy(s.begin(), s.end(), tokens_out);
    });
}

gqe_status gqe_aggregate(const char *const *csv_paths, size_t n_paths, const char *out_path,
                         int block, const char *blocks_out_path) {
    return guarded([&] {
        require(csv_paths, "csv_paths");
        require(out_path, "out_path");
        std::vector<gqe::aggregate::RunSeries> runs;
        for (size_t i = 0; i < n_paths; ++i) {
            require(csv_paths[i], "csv path");
            runs.push_back(gqe::aggregate::load_run_csv(csv_paths[i]));
        }
        const auto curve = gqe::aggregate::aggregate_curve(runs);
        {
            std::ofstream out(out_path, std::ios::binary);
            if (!out)
                throw gqe::IoError(std::string("cannot write '") + out_path + "'");
            gqe::aggregate::write_curve_csv(curve, out);
        }
        if (block > 0) {
            require(blocks_out_path, "blocks_out_path");
            std::vector<gqe::aggregate::BlockMin> blocks;
            for (const auto &r : runs) {
                auto b = gqe::aggregate::block_minima(r, block);
                blocks.insert(blocks.end(), b.begin(), b.end());
            }
            std::ofstream out(blocks_out_path, std::ios::binary);
            if (!out)
                throw gqe::IoError(std::string("cannot write '") + blocks_out_path + "'");
            gqe::aggregate::write_blocks_csv(blocks, out);
        }
    });
}

} // extern "C"
