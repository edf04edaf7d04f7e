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

#include <span>
#include <vector>

#include "samples.hpp"

namespace gqe::loss {

enum class Variant { DPO, PDPO };

struct LossConfig {
    double beta = 0.1;
    double alpha = 0.5; ///< ignored by DPO
    Variant variant = Variant::PDPO;

    void validate() const;
};

/// Indices into the sample list the batch was built from.
struct PreferencePair {
    std::size_t winner;
    std::size_t loser;
};

struct PreferenceBatch {
    std::vector<PreferencePair> pairs;
};

/// The unique lowest-energy sample (first occurrence on exact ties) wins
/// against every sample with strictly higher energy. Throws EmptyBatchError
/// when no such pair exists.
PreferenceBatch pair_best_vs_others(std::span<const EnergySample> samples);

/// beta * [(logp_w - ref_w) - (logp_l - ref_l)]
double z_value(double logp_w_theta, double logp_w_ref, double logp_l_theta, double logp_l_ref,
               double beta);

/// log(1 + exp(x)) without overflow.
double softplus(double x);
/// log(sigmoid(z)) = -softplus(-z)
double log_sigmoid(double z);
double sigmoid(double z);

/// mean(-log sigmoid(z))
double dpo_loss(std::span<const double> z);
/// mean(-[alpha z + (1 - alpha) log sigmoid(z)])
double pdpo_loss(std::span<const double> z, double alpha);
/// Loss of the configured variant.
double batch_loss(std::span<const double> z, const LossConfig &cfg);

/// w(z) = alpha + (1 - alpha) sigmoid(-z), the per-pair gradient weight.
double gradient_weight(double z, double alpha);

/// d(batch_loss)/dz_i for every pair: -w(z_i) / n_pairs (alpha = 0 for DPO).
std::vector<double> loss_grad_wrt_z(std::span<const double> z, const LossConfig &cfg);

} // namespace gqe::loss
