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
#include "preference_losses.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"

namespace gqe::loss {

namespace {

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw InputError("alpha must lie in [0, 1], got " + std::to_string(alpha));
}

void check_batch(std::span<const double> z) {
    if (z.empty())
        throw InputError("loss of an empty batch");
}

double effective_alpha(const LossConfig &cfg) { return cfg.variant == Variant::DPO ? 0.0 : cfg.alpha; }

} // namespace

void LossConfig::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw InputError("beta must be a finite positive number");
    check_alpha(alpha);
}

PreferenceBatch pair_best_vs_others(std::span<const EnergySample> samples) {
    if (samples.size() < 2)
        throw EmptyBatchError("best-vs-others needs at least two samples");
    std::size_t best = 0;
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (samples[i].energy < samples[best].energy)
            best = i;
    PreferenceBatch batch;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (samples[i].energy > samples[best].energy)
            batch.pairs.push_back({best, i});
    if (batch.pairs.empty())
        throw EmptyBatchError("all sample energies are tied");
    return batch;
}

double z_value(double logp_w_theta, double logp_w_ref, double logp_l_theta, double logp_l_ref,
               double beta) {
    for (double v : {logp_w_theta, logp_w_ref, logp_l_theta, logp_l_ref, beta})
        if (!std::isfinite(v))
            throw NumericError("non-finite input to z");
    if (!(beta > 0.0))
        throw InputError("beta must be positive");
    return beta * ((logp_w_theta - logp_w_ref) - (logp_l_theta - logp_l_ref));
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double log_sigmoid(double z) { return -softplus(-z); }

double sigmoid(double z) {
    if (z >= 0.0)
        return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double dpo_loss(std::span<const double> z) {
    check_batch(z);
    double sum = 0.0;
    for (double v : z)
        sum += softplus(-v);
    return sum / static_cast<double>(z.size());
}

double pdpo_loss(std::span<const double> z, double alpha) {
    check_batch(z);
    check_alpha(alpha);
    double sum = 0.0;
    for (double v : z)
        sum += -(alpha * v + (1.0 - alpha) * log_sigmoid(v));
    return sum / static_cast<double>(z.size());
}

double batch_loss(std::span<const double> z, const LossConfig &cfg) {
    return cfg.variant == Variant::DPO ? dpo_loss(z) : pdpo_loss(z, cfg.alpha);
}

double gradient_weight(double z, double alpha) {
    check_alpha(alpha);
    return alpha + (1.0 - alpha) * sigmoid(-z);
}

std::vector<double> loss_grad_wrt_z(std::span<const double> z, const LossConfig &cfg) {
    check_batch(z);
    const double alpha = effective_alpha(cfg);
    const double n = static_cast<double>(z.size());
    std::vector<double> out;
    out.reserve(z.size());
    for (double v : z)
        out.push_back(-gradient_weight(v, alpha) / n);
    return out;
}

} // namespace gqe::loss
