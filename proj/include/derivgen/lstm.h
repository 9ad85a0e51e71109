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

#ifndef DERIVGEN_LSTM_H_
#define DERIVGEN_LSTM_H_

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "derivgen/autodiff.h"
#include "derivgen/tensor.h"

namespace derivgen {

// One LSTM layer. The four gates are stacked row-wise in the order
// input, forget, output, candidate, so input_weights is 4h x d_in,
// recurrent_weights is 4h x h and bias is 4h.
struct LstmLayerParams {
  Parameter input_weights;
  Parameter recurrent_weights;
  Parameter bias;

  std::size_t hidden_dim() const { return recurrent_weights.value.cols(); }
  std::size_t input_dim() const { return input_weights.value.cols(); }

  // Weights uniform(-init_scale, init_scale), biases zero except the forget
  // gate, which starts at 1.
  static LstmLayerParams Create(const std::string &name, std::size_t input_dim,
                                std::size_t hidden_dim, double init_scale,
                                std::mt19937_64 &rng);
};

enum class Direction { kForward, kBackward };

struct LstmStack {
  Direction direction = Direction::kForward;
  std::vector<LstmLayerParams> layers;

  std::size_t hidden_dim() const { return layers.front().hidden_dim(); }
  std::size_t output_dim() const { return hidden_dim() * layers.size(); }

  static LstmStack Create(const std::string &name, Direction direction,
                          std::size_t input_dim, std::size_t hidden_dim,
                          std::size_t num_layers, double init_scale,
                          std::mt19937_64 &rng);
  void collect(std::vector<Parameter *> &out);
};

struct LstmState {
  Var h;
  Var c;
};

// i = sigmoid(W_i x + U_i h + b_i), likewise f and o; g = tanh(...);
// c = f*c_prev + i*g; h = o*tanh(c).
LstmState lstm_step(LstmLayerParams &layer, Var x, Var h_prev, Var c_prev);

// Runs the stack over `sequence` (reversed for a backward stack) from zero
// initial states and returns every layer's final hidden state, layer 0
// first, concatenated to h * num_layers entries.
Var run_stack(LstmStack &stack, std::span<const Var> sequence);

}  // namespace derivgen

#endif  // DERIVGEN_LSTM_H_
