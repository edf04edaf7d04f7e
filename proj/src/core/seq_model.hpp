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
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "operator_pool.hpp"
#include "rng.hpp"

namespace gqe::model {

using pool::CircuitSequence;
using pool::Token;

/// Decoder-only transformer shape. Pre-norm blocks, learned absolute
/// positions, exact-erf GELU, untied output head.
struct ModelConfig {
    int vocab_size = 0; ///< pool size L; the embedding table has one extra BOS row
    int max_len = 12;   ///< sequence length N
    int embed_dim = 64;
    int ff_dim = 256;
    int n_heads = 4;
    int n_layers = 2;
    bool use_bias = false;
    double dropout = 0.0;

    void validate() const;
    bool operator==(const ModelConfig &) const = default;
};

struct TensorInfo {
    std::string name;
    std::vector<int> shape;
    std::size_t offset = 0;
    std::size_t size = 0;
};

/// All trainable tensors in one contiguous buffer. Matrices are row-major
/// and act on row vectors (x * W).
class ModelParams {
  public:
    explicit ModelParams(ModelConfig config);

    const ModelConfig &config() const { return config_; }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    const std::vector<TensorInfo> &tensors() const { return tensors_; }
    const TensorInfo &info(std::string_view name) const;
    std::span<double> tensor(std::string_view name);
    std::span<const double> tensor(std::string_view name) const;

    bool operator==(const ModelParams &other) const {
        return config_ == other.config_ && values_ == other.values_;
    }

  private:
    ModelConfig config_;
    std::vector<TensorInfo> tensors_;
    std::vector<double> values_;
};

/// normal(0, 0.02) weights and embeddings, unit norm gains, zero offsets
/// and biases.
ModelParams init_model(const ModelConfig &config, std::uint64_t seed);

/// Logits for the token following `prefix` (BOS is implicit at step 0).
std::vector<double> next_token_logits(const ModelParams &params, std::span<const Token> prefix);

/// Draws `count` full-length sequences from softmax(logits / temperature).
std::vector<CircuitSequence> sample_sequences(const ModelParams &params, int count,
                                              double temperature, Rng &rng);

struct LogProbResult {
    double total = 0.0;
    std::vector<double> per_token;
};

LogProbResult sequence_log_prob(const ModelParams &params, std::span<const Token> seq);

/// Forward pass retained for a later backward pass. Holding the tape keeps
/// the dropout masks of the forward pass for the matching backward.
class LogProbTape {
  public:
    LogProbTape(const ModelParams &params, std::span<const Token> seq, Rng *dropout_rng = nullptr);
    ~LogProbTape();
    LogProbTape(LogProbTape &&) noexcept;
    LogProbTape &operator=(LogProbTape &&) noexcept;

    const LogProbResult &result() const;
    /// Accumulates `weight * d(total)/d(params)` into `grad`.
    void backward(double weight, std::span<double> grad) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Same forward pass, then accumulates `weight * d(total)/d(params)` into
/// `grad` (laid out like params.values()). A non-null `dropout_rng` enables
/// training-mode dropout.
LogProbResult sequence_log_prob_backward(const ModelParams &params, std::span<const Token> seq,
                                         double weight, std::span<double> grad,
                                         Rng *dropout_rng = nullptr);

/// Numerically stable log(sum(exp(v))).
double log_sum_exp(std::span<const double> v);
/// softmax(v / temperature)
std::vector<double> softmax(std::span<const double> v, double temperature = 1.0);

/// Versioned binary container: config and every tensor with shape metadata.
/// Doubles are stored in host byte order (little-endian on supported
/// targets), so save -> load is bit-exact.
void save_checkpoint(const ModelParams &params, const std::string &path);
ModelParams load_checkpoint(const std::string &path);

} // namespace gqe::model
