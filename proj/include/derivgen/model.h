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

#ifndef DERIVGEN_MODEL_H_
#define DERIVGEN_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "derivgen/autodiff.h"
#include "derivgen/dataset.h"
#include "derivgen/decoder.h"
#include "derivgen/embeddings.h"
#include "derivgen/encoder.h"
#include "derivgen/lstm.h"
#include "derivgen/vocab.h"

namespace derivgen {

struct ModelConfig {
  VariantConfig variant;
  std::size_t hidden_dim = 100;  // h
  std::size_t num_layers = 3;    // l
  std::size_t char_dim = 100;    // d_c
  std::size_t pos_dim = 16;
  bool recurrent_decoder = false;
  // uniform(-s, s) for LSTM weights, and separately for the embedding
  // tables and dense layers of the encoder and decoder.
  double lstm_init_scale = 0.08;
  double init_scale = 0.2;
  // Range for S, the weights on the aligned base character.
  double copy_init_scale = 0.01;

  void validate() const;
  std::size_t state_dim() const { return hidden_dim * num_layers; }
  friend bool operator==(const ModelConfig &, const ModelConfig &) = default;
};

// An instance resolved against the model's vocabularies. Word vectors point
// into the model's embedding table.
struct EncodedInstance {
  std::vector<std::span<const double>> left;
  std::vector<std::span<const double>> right;
  std::vector<std::size_t> base;
  std::vector<std::size_t> target;
  std::optional<std::size_t> pos;
};

class DerivationModel {
 public:
  DerivationModel(ModelConfig config, CharVocab chars, Vocabulary pos_tags,
                  EmbeddingTable embeddings, std::uint64_t seed);

  // Builds Sigma and the POS inventory from `train`.
  static DerivationModel ForTraining(const ModelConfig &config,
                                     const std::vector<Instance> &train,
                                     EmbeddingTable embeddings, std::uint64_t seed);

  const ModelConfig &config() const { return config_; }
  const CharVocab &chars() const { return chars_; }
  const Vocabulary &pos_tags() const { return pos_tags_; }
  const EmbeddingTable &embeddings() const { return embeddings_; }
  // Swaps in vectors for a new test vocabulary. The dimension must match.
  void set_embeddings(EmbeddingTable embeddings);

  EncodedInstance encode(const Instance &instance) const;

  // Runs the context/base LSTMs and the fusion layers; returns o.
  Var context_vector(Tape &tape, const EncodedInstance &x);
  Var loss(Tape &tape, const EncodedInstance &x);
  Generation generate(Tape &tape, const EncodedInstance &x, std::size_t max_len);

  // len(base) + slack.
  static std::size_t default_max_len(const EncodedInstance &x, std::size_t slack = 10);

  // Every trainable parameter in a fixed order. Names are unique.
  std::vector<Parameter *> parameters();
  std::size_t num_weights();

 private:
  std::vector<Var> word_sequence(Tape &tape,
                                 const std::vector<std::span<const double>> &w,
                                 std::span<const double> sentinel) const;

  ModelConfig config_;
  CharVocab chars_;
  Vocabulary pos_tags_;
  EmbeddingTable embeddings_;

  std::optional<LstmStack> left_forward_;
  std::optional<LstmStack> left_backward_;
  std::optional<LstmStack> right_forward_;
  std::optional<LstmStack> right_backward_;
  std::optional<LstmStack> base_forward_;
  std::optional<LstmStack> base_backward_;
  EncoderParams encoder_;
  DecoderParams decoder_;
};

}  // namespace derivgen

#endif  // DERIVGEN_MODEL_H_
