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
/*
 * C interface to the generative quantum eigensolver trainer.
 *
 * Every object is an opaque handle released with its *_free function.
 * Functions return a gqe_status; on failure gqe_last_error() returns a
 * message describing the most recent error on the calling thread.
 * Token and qubit indices are 0-based; qubit 0 is the most significant bit
 * of a basis index.
 */
#ifndef GQE_GQE_H
#define GQE_GQE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(GQE_BUILDING_LIBRARY)
#define GQE_API __declspec(dllexport)
#else
#define GQE_API __declspec(dllimport)
#endif
#else
#define GQE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gqe_status {
    GQE_OK = 0,
    GQE_ERR_INPUT = 1,       /* malformed input, bad config, bad token */
    GQE_ERR_NUMERIC = 2,     /* non-finite loss or gradient, eigensolver failure */
    GQE_ERR_CAPABILITY = 3,  /* request beyond supported sizes */
    GQE_ERR_IO = 4,          /* file could not be read or written */
    GQE_ERR_EMPTY_BATCH = 5, /* no valid preference pair */
    GQE_ERR_INTERNAL = 99
} gqe_status;

GQE_API const char *gqe_version(void);
/* Message of the last failing call on this thread ("" if none). */
GQE_API const char *gqe_last_error(void);
GQE_API const char *gqe_status_name(gqe_status status);

/* ---- Hamiltonians ------------------------------------------------------ */

typedef struct gqe_hamiltonian gqe_hamiltonian;

GQE_API gqe_status gqe_hamiltonian_load(const char *path, gqe_hamiltonian **out);
GQE_API gqe_status gqe_hamiltonian_parse(const char *json_text, gqe_hamiltonian **out);
GQE_API void gqe_hamiltonian_free(gqe_hamiltonian *h);
GQE_API gqe_status gqe_hamiltonian_info(const gqe_hamiltonian *h, int *n_qubits, size_t *n_terms,
                                        int *n_electrons);
/* The returned string lives as long as the handle. */
GQE_API gqe_status gqe_hamiltonian_name(const gqe_hamiltonian *h, const char **name);
GQE_API gqe_status gqe_hamiltonian_ground_hint(const gqe_hamiltonian *h, double *value,
                                               int *present);
/* Energy of the Hartree-Fock reference state. */
GQE_API gqe_status gqe_hf_energy(const gqe_hamiltonian *h, double *energy);
/* Minimum eigenvalue; GQE_ERR_CAPABILITY above 16 qubits. */
GQE_API gqe_status gqe_exact_ground_energy(const gqe_hamiltonian *h, double *energy);

/* ---- Operator pools ---------------------------------------------------- */

typedef struct gqe_pool gqe_pool;

typedef enum gqe_gate_kind {
    GQE_GATE_IDENTITY = 0,
    GQE_GATE_SINGLE_EXCITATION = 1,
    GQE_GATE_DOUBLE_EXCITATION = 2
} gqe_gate_kind;

/* angles == NULL selects the default set {+-2^k/160, k = 1..4}. When the
 * hamiltonian file declares excitations they are cross-checked. */
GQE_API gqe_status gqe_pool_build(const gqe_hamiltonian *h, const double *angles, size_t n_angles,
                                  gqe_pool **out);
GQE_API void gqe_pool_free(gqe_pool *p);
GQE_API gqe_status gqe_pool_info(const gqe_pool *p, size_t *size, size_t *n_singles,
                                 size_t *n_doubles, size_t *n_angles);
GQE_API gqe_status gqe_pool_angle(const gqe_pool *p, size_t index, double *angle);
/* wires must hold 4 ints; *n_wires receives 0, 2 or 4. */
GQE_API gqe_status gqe_pool_gate(const gqe_pool *p, int token, gqe_gate_kind *kind, int *wires,
                                 int *n_wires, double *angle);
GQE_API gqe_status gqe_evaluate_sequence(const gqe_hamiltonian *h, const gqe_pool *p,
                                         const int *tokens, size_t n_tokens, double *energy);

/* ---- Training ---------------------------------------------------------- */

typedef struct gqe_train_config gqe_train_config;

/* paper_scale = 0: desk-scale defaults; otherwise the full-size profile. */
GQE_API gqe_status gqe_train_config_new(int paper_scale, gqe_train_config **out);
GQE_API void gqe_train_config_free(gqe_train_config *cfg);
/* Keys: hamiltonian out summary checkpoint buffer_dump loss alpha beta seed
 * steps t_initial t_final samples seq_len embed_dim ff_dim heads layers bias
 * dropout lr weight_decay grad_clip hybrid debug_checks force_identity. */
GQE_API gqe_status gqe_train_config_set(gqe_train_config *cfg, const char *key, const char *value);
/* Applies a file of "key = value" lines. */
GQE_API gqe_status gqe_train_config_load(gqe_train_config *cfg, const char *path);
GQE_API gqe_status gqe_train_config_validate(const gqe_train_config *cfg);
/* Writes the 16 hex digits plus NUL into out (17 bytes). */
GQE_API gqe_status gqe_train_config_digest(const gqe_train_config *cfg, char *out);

GQE_API gqe_status gqe_temperature(double t_initial, double t_final, int n_steps, int step,
                                   double *temperature);

typedef struct gqe_step_record {
    int step;
    double temperature;
    double batch_min_energy;
    double min_energy_so_far;
    double loss; /* NaN when the step had no valid pair */
    int n_pairs;
    size_t buffer_size;
} gqe_step_record;

typedef struct gqe_run_log gqe_run_log;

/* Runs a full training and writes the configured CSV/summary/checkpoint. */
GQE_API gqe_status gqe_train(const gqe_train_config *cfg, gqe_run_log **out);
GQE_API void gqe_run_log_free(gqe_run_log *log);
GQE_API gqe_status gqe_run_log_info(const gqe_run_log *log, size_t *n_records, double *best_energy,
                                    double *wall_time_s);
GQE_API gqe_status gqe_run_log_record(const gqe_run_log *log, size_t index, gqe_step_record *out);
/* Copies up to cap tokens; *len receives the full length. */
GQE_API gqe_status gqe_run_log_best_sequence(const gqe_run_log *log, int *tokens, size_t cap,
                                             size_t *len);
GQE_API gqe_status gqe_run_log_write_csv(const gqe_run_log *log, const char *path);

/* ---- Checkpointed models ----------------------------------------------- */

typedef struct gqe_model gqe_model;

GQE_API gqe_status gqe_model_load(const char *checkpoint_path, gqe_model **out);
GQE_API void gqe_model_free(gqe_model *m);
GQE_API gqe_status gqe_model_info(const gqe_model *m, int *vocab_size, int *max_len,
                                  size_t *n_params);
GQE_API gqe_status gqe_model_log_prob(const gqe_model *m, const int *tokens, size_t n_tokens,
                                      double *total);
/* tokens_out receives count * max_len tokens, row by row. */
GQE_API gqe_status gqe_model_sample(const gqe_model *m, int count, double temperature,
                                    uint64_t seed, int *tokens_out);

/* ---- Aggregation ------------------------------------------------------- */

/* Writes step,mean,min,max over the runs. With block > 0 also writes
 * per-run block minima to blocks_out_path. */
GQE_API gqe_status gqe_aggregate(const char *const *csv_paths, size_t n_paths, const char *out_path,
                                 int block, const char *blocks_out_path);

#ifdef __cplusplus
}
#endif

#endif /* GQE_GQE_H */
