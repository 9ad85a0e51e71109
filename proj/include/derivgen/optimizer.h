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

#ifndef DERIVGEN_OPTIMIZER_H_
#define DERIVGEN_OPTIMIZER_H_

#include <span>

#include "derivgen/tensor.h"

namespace derivgen {

struct SgdOptions {
  double learning_rate = 0.1;
  double momentum = 0.9;
  // Rescale the joint gradient to this L2 norm when it is larger.
  // Zero disables clipping.
  double max_grad_norm = 0.0;
};

// velocity <- momentum * velocity - lr * grad; value <- value + velocity;
// then zeroes every grad. Throws DivergenceError, leaving all parameters
// untouched, if any gradient entry is NaN or infinite.
void sgd_momentum_step(std::span<Parameter *const> params, const SgdOptions &options);

void zero_grads(std::span<Parameter *const> params);

// L2 norm of all gradients taken together.
double grad_norm(std::span<Parameter *const> params);

}  // namespace derivgen

#endif  // DERIVGEN_OPTIMIZER_H_
