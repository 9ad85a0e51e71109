// Copyright 2026 The derivgen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "derivgen/optimizer.h"

#include <cmath>

#include "derivgen/errors.h"

namespace derivgen {

void zero_grads(std::span<Parameter *const> params) {
  for (Parameter *p : params) p->zero_grad();
}

double grad_norm(std::span<Parameter *const> params) {
  double sq = 0.0;
  for (const Parameter *p : params) {
    for (double g : p->grad.data()) sq += g * g;
  }
  return std::sqrt(sq);
}

void sgd_momentum_step(std::span<Parameter *const> params, const SgdOptions &options) {
  for (const Parameter *p : params) {
    if (!p->grad.all_finite()) {
      throw DivergenceError("non-finite gradient in parameter " + p->name);
    }
  }
  double scale = 1.0;
  if (options.max_grad_norm > 0.0) {
    double norm = grad_norm(params);
    if (norm > options.max_grad_norm) scale = options.max_grad_norm / norm;
  }
  double step = options.learning_rate * scale;
  for (Parameter *p : params) {
    auto value = p->value.data();
    auto grad = p->grad.data();
    auto velocity = p->velocity.data();
    for (std::size_t i = 0; i < value.size(); ++i) {
      velocity[i] = options.momentum * velocity[i] - step * grad[i];
      value[i] += velocity[i];
      grad[i] = 0.0;
    }
  }
}

}  // namespace derivgen
