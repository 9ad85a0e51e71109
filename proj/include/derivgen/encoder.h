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

#ifndef DERIVGEN_ENCODER_H_
#define DERIVGEN_ENCODER_H_

#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "derivgen/autodiff.h"
#include "derivgen/tensor.h"

namespace derivgen {

// Which summary states feed the fusion layer.
struct VariantConfig {
  bool use_context = true;
  bool use_base = true;
  // false keeps only the two states adjacent to the slot: the forward
  // state of the left context and the backward state of the right context.
  bool bidirectional_context = true;
  bool use_pos = false;

  void validate() const;
  // Number of h*l-sized states the encoder concatenates.
  std::size_t num_state_slots() const;
  std::string name() const;

  // Accepts the names produced by name(): "biLSTM+BS", "biLSTM+CTX",
  // "biLSTM+CTX+BS", "biLSTM+CTX+BS+POS", "LSTM+CTX+BS+POS", and the
  // remaining LSTM+... combinations.
  static VariantConfig Parse(const std::string &name);

  friend bool operator==(const VariantConfig &, const VariantConfig &) = default;
};

// Last hidden states, each of size h*l. Only the slots the variant asks
// for may be set.
struct EncoderStates {
  std::optional<Var> left_forward;
  std::optional<Var> left_backward;
  std::optional<Var> right_forward;
  std::optional<Var> right_backward;
  std::optional<Var> base_forward;
  std::optional<Var> base_backward;
};

struct EncoderParams {
  Parameter fusion_weights;            // H: round(1.5*h*l) x d_cat
  Parameter fusion_bias;               // b_h
  Parameter output_weights;            // T: h*l x round(1.5*h*l)
  Parameter output_bias;               // b_o
  std::optional<Parameter> pos_table;  // #POS x d_pos

  std::size_t state_dim() const { return output_weights.value.rows(); }

  static EncoderParams Create(const VariantConfig &variant, std::size_t state_dim,
                              std::size_t num_pos, std::size_t pos_dim, double init_scale,
                              std::mt19937_64 &rng);
  void collect(std::vector<Parameter *> &out);
};

// 1.5 * state_dim, rounded half up.
std::size_t fused_dim(std::size_t state_dim);

// t = relu(H * [enabled states; pos embedding] + b_h); o = T * t + b_o.
// Throws ConfigError when the provided slots differ from what `variant`
// demands, or when a POS tag is given or missing against use_pos.
Var encode(const EncoderStates &states, std::optional<std::size_t> pos,
           const VariantConfig &variant, EncoderParams &params);

}  // namespace derivgen

#endif  // DERIVGEN_ENCODER_H_
