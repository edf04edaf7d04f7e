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

namespace gqe::optim {

struct AdamWConfig {
    double lr = 8e-5;
    double weight_decay = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam with decoupled weight decay, applied uniformly to every parameter.
class AdamW {
  public:
    AdamW(AdamWConfig config, std::size_t n_params);

    void step(std::span<double> params, std::span<const double> grad);
    long steps_taken() const { return t_; }

  private:
    AdamWConfig cfg_;
    std::vector<double> m_, v_;
    long t_ = 0;
};

/// Scales grad in place so its L2 norm is at most max_norm; returns the
/// norm before clipping.
double clip_grad_norm(std::span<double> grad, double max_norm);

} // namespace gqe::optim
