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

#include "derivgen/lstm.h"

#include "derivgen/errors.h"

namespace derivgen {

LstmLayerParams LstmLayerParams::Create(const std::string &name, std::size_t input_dim,
                                        std::size_t hidden_dim, double init_scale,
                                        std::mt19937_64 &rng) {
  LstmLayerParams p{
      Parameter(name + ".W", Tensor({4 * hidden_dim, input_dim})),
      Parameter(name + ".U", Tensor({4 * hidden_dim, hidden_dim})),
      Parameter(name + ".b", Tensor({4 * hidden_dim})),
  };
  uniform_init(p.input_weights, init_scale, rng);
  uniform_init(p.recurrent_weights, init_scale, rng);
  for (std::size_t i = hidden_dim; i < 2 * hidden_dim; ++i) p.bias.value[i] = 1.0;
  return p;
}

LstmStack LstmStack::Create(const std::string &name, Direction direction,
                            std::size_t input_dim, std::size_t hidden_dim,
                            std::size_t num_layers, double init_scale,
                            std::mt19937_64 &rng) {
  if (num_layers == 0 || hidden_dim == 0 || input_dim == 0) {
    throw ConfigError("LSTM stack " + name + " needs positive dimensions");
  }
  LstmStack stack;
  stack.direction = direction;
  for (std::size_t k = 0; k < num_layers; ++k) {
    stack.layers.push_back(LstmLayerParams::Create(name + ".l" + std::to_string(k),
                                                   k == 0 ? input_dim : hidden_dim,
                                                   hidden_dim, init_scale, rng));
  }
  return stack;
}

void LstmStack::collect(std::vector<Parameter *> &out) {
  for (auto &layer : layers) {
    out.push_back(&layer.input_weights);
    out.push_back(&layer.recurrent_weights);
    out.push_back(&layer.bias);
  }
}

LstmState lstm_step(LstmLayerParams &layer, Var x, Var h_prev, Var c_prev) {
  std::size_t h = layer.hidden_dim();
  if (h_prev.size() != h || c_prev.size() != h) {
    throw DimensionError("lstm_step: state sizes " + std::to_string(h_prev.size()) + "/" +
                         std::to_string(c_prev.size()) + " do not match hidden size " +
                         std::to_string(h));
  }
  Var z = add(affine(layer.input_weights, x, layer.bias),
              matvec(layer.recurrent_weights, h_prev));
  Var in_gate = sigmoid(slice(z, 0, h));
  Var forget_gate = sigmoid(slice(z, h, h));
  Var out_gate = sigmoid(slice(z, 2 * h, h));
  Var candidate = tanh(slice(z, 3 * h, h));
  Var c = add(mul(forget_gate, c_prev), mul(in_gate, candidate));
  Var h_new = mul(out_gate, tanh(c));
  return {h_new, c};
}

Var run_stack(LstmStack &stack, std::span<const Var> sequence) {
  if (sequence.empty()) throw DimensionError("run_stack: empty sequence");
  if (stack.layers.empty()) throw ConfigError("run_stack: stack has no layers");
  Tape *tape = sequence.front().tape();
  std::vector<Var> inputs(sequence.begin(), sequence.end());
  if (stack.direction == Direction::kBackward) {
    inputs.assign(sequence.rbegin(), sequence.rend());
  }
  std::vector<Var> finals;
  finals.reserve(stack.layers.size());
  for (auto &layer : stack.layers) {
    std::vector<double> zeros(layer.hidden_dim(), 0.0);
    LstmState state{tape->constant(zeros), tape->constant(zeros)};
    std::vector<Var> outputs;
    outputs.reserve(inputs.size());
    for (Var x : inputs) {
      state = lstm_step(layer, x, state.h, state.c);
      outputs.push_back(state.h);
    }
    finals.push_back(state.h);
    inputs = std::move(outputs);
  }
  return concat(finals);
}

}  // namespace derivgen
