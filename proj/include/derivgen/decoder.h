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

#ifndef DERIVGEN_DECODER_H_
#define DERIVGEN_DECODER_H_

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "derivgen/autodiff.h"
#include "derivgen/lstm.h"
#include "derivgen/tensor.h"

namespace derivgen {

// Next-character classifier
//
//   logits = R * c_j + max(B * o, S * l_{j+1}) + b_d
//
// where c_j embeds the previous output character, l_{j+1} embeds the base
// character at the same position and o is the encoder's context vector.
// The elementwise max lets a base character's row of S override the
// context-driven scores, which is how the decoder copies the stem.
//
// With `recurrence` set, R reads the hidden state of a one-layer LSTM run
// over the previous output characters instead of c_j itself.
struct DecoderParams {
  Parameter char_table;       // |Sigma| x d_c, shared by c_j and l_{j+1}
  Parameter prev_weights;     // R: |Sigma| x d_c
  Parameter context_weights;  // B: |Sigma| x h*l
  Parameter copy_weights;     // S: |Sigma| x d_c
  Parameter bias;             // b_d: |Sigma|
  std::optional<LstmLayerParams> recurrence;

  std::size_t alphabet_size() const { return bias.value.size(); }
  std::size_t char_dim() const { return char_table.value.cols(); }
  std::size_t context_dim() const { return context_weights.value.cols(); }

  static DecoderParams Create(std::size_t alphabet_size, std::size_t char_dim,
                              std::size_t context_dim, bool recurrent, double init_scale,
                              std::mt19937_64 &rng, double lstm_init_scale = 0.08,
                              std::optional<double> copy_init_scale = {});
  void collect(std::vector<Parameter *> &out);
};

// Base character aligned with output position j, or end-of-word once the
// base is exhausted.
std::size_t base_prefix_char(std::span<const std::size_t> base, std::size_t j);

// Logits of one step of the literal (non-recurrent) decoder. Throws
// VocabularyError for indices outside the alphabet.
Var decode_step(std::size_t prev_char, Var context, std::size_t base_char,
                DecoderParams &params);

// Summed cross-entropy of the gold target under teacher forcing. Output
// position j (0-based) sees the previous gold character (begin-of-word at
// j = 0) and base_prefix_char(base, j); the final step predicts
// end-of-word.
Var teacher_forced_loss(std::span<const std::size_t> base,
                        std::span<const std::size_t> target, Var context,
                        DecoderParams &params);

struct Generation {
  std::vector<std::size_t> chars;  // without begin/end-of-word
  bool truncated = false;          // stopped by max_len, not end-of-word
};

// Argmax decoding; ties go to the lowest character index. Emits at most
// max_len characters.
Generation generate_greedy(std::span<const std::size_t> base, Var context,
                           DecoderParams &params, std::size_t max_len);

}  // namespace derivgen

#endif  // DERIVGEN_DECODER_H_
