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

#include "derivgen/model.h"

#include <random>
#include <set>

#include "derivgen/errors.h"

namespace derivgen {

void ModelConfig::validate() const {
  variant.validate();
  if (hidden_dim == 0 || num_layers == 0 || char_dim == 0) {
    throw ConfigError("hidden_dim, num_layers and char_dim must be positive");
  }
  if (variant.use_pos && pos_dim == 0) {
    throw ConfigError("pos_dim must be positive for POS variants");
  }
  if (!(init_scale > 0.0) || !(lstm_init_scale > 0.0) || !(copy_init_scale > 0.0)) {
    throw ConfigError("init_scale, lstm_init_scale and copy_init_scale must be positive");
  }
}

DerivationModel::DerivationModel(ModelConfig config, CharVocab chars, Vocabulary pos_tags,
                                 EmbeddingTable embeddings, std::uint64_t seed)
    : config_(config),
      chars_(std::move(chars)),
      pos_tags_(std::move(pos_tags)),
      embeddings_(std::move(embeddings)) {
  config_.validate();
  if (embeddings_.dim() == 0) throw ConfigError("model needs word embeddings");
  std::mt19937_64 rng(seed);
  const VariantConfig &v = config_.variant;
  const std::size_t h = config_.hidden_dim;
  const std::size_t l = config_.num_layers;
  const std::size_t d_w = embeddings_.dim();
  const double s = config_.lstm_init_scale;
  const double dense = config_.init_scale;
  if (v.use_context) {
    left_forward_ =
        LstmStack::Create("ctx.left.fw", Direction::kForward, d_w, h, l, s, rng);
    if (v.bidirectional_context) {
      left_backward_ =
          LstmStack::Create("ctx.left.bw", Direction::kBackward, d_w, h, l, s, rng);
      right_forward_ =
          LstmStack::Create("ctx.right.fw", Direction::kForward, d_w, h, l, s, rng);
    }
    right_backward_ =
        LstmStack::Create("ctx.right.bw", Direction::kBackward, d_w, h, l, s, rng);
  }
  if (v.use_base) {
    base_forward_ =
        LstmStack::Create("base.fw", Direction::kForward, config_.char_dim, h, l, s, rng);
    base_backward_ = LstmStack::Create("base.bw", Direction::kBackward, config_.char_dim,
                                       h, l, s, rng);
  }
  encoder_ = EncoderParams::Create(v, config_.state_dim(), pos_tags_.size(),
                                   config_.pos_dim, dense, rng);
  decoder_ = DecoderParams::Create(chars_.size(), config_.char_dim, config_.state_dim(),
                                   config_.recurrent_decoder, dense, rng, s,
                                   config_.copy_init_scale);
}

DerivationModel DerivationModel::ForTraining(const ModelConfig &config,
                                             const std::vector<Instance> &train,
                                             EmbeddingTable embeddings,
                                             std::uint64_t seed) {
  std::vector<std::string> words;
  std::set<std::string> tags;
  for (const auto &x : train) {
    words.push_back(x.base);
    words.push_back(x.target);
    tags.insert(x.pos);
  }
  return DerivationModel(config, CharVocab::Build(words),
                         Vocabulary({tags.begin(), tags.end()}), std::move(embeddings),
                         seed);
}

void DerivationModel::set_embeddings(EmbeddingTable embeddings) {
  if (embeddings.dim() != embeddings_.dim()) {
    throw DimensionError("embedding dimension " + std::to_string(embeddings.dim()) +
                         " does not match the model's " +
                         std::to_string(embeddings_.dim()));
  }
  embeddings_ = std::move(embeddings);
}

EncodedInstance DerivationModel::encode(const Instance &instance) const {
  EncodedInstance x;
  for (const auto &w : instance.left) x.left.push_back(embeddings_.lookup(w));
  for (const auto &w : instance.right) x.right.push_back(embeddings_.lookup(w));
  x.base = chars_.encode(instance.base);
  x.target = chars_.encode(instance.target);
  if (x.base.empty()) throw Error("instance has an empty base form");
  if (config_.variant.use_pos) x.pos = pos_tags_.index(instance.pos);
  return x;
}

std::vector<Var> DerivationModel::word_sequence(
    Tape &tape, const std::vector<std::span<const double>> &words,
    std::span<const double> sentinel) const {
  std::vector<Var> seq;
  if (words.empty()) {
    seq.push_back(tape.constant(sentinel));
  } else {
    for (auto w : words) seq.push_back(tape.constant(w));
  }
  return seq;
}

Var DerivationModel::context_vector(Tape &tape, const EncodedInstance &x) {
  EncoderStates states;
  if (config_.variant.use_context) {
    auto left = word_sequence(tape, x.left, embeddings_.sentence_begin());
    auto right = word_sequence(tape, x.right, embeddings_.sentence_end());
    states.left_forward = run_stack(*left_forward_, left);
    if (left_backward_) states.left_backward = run_stack(*left_backward_, left);
    if (right_forward_) states.right_forward = run_stack(*right_forward_, right);
    states.right_backward = run_stack(*right_backward_, right);
  }
  if (config_.variant.use_base) {
    std::vector<Var> chars;
    for (std::size_t c : x.base) chars.push_back(tape.lookup(decoder_.char_table, c));
    states.base_forward = run_stack(*base_forward_, chars);
    states.base_backward = run_stack(*base_backward_, chars);
  }
  return derivgen::encode(states, x.pos, config_.variant, encoder_);
}

Var DerivationModel::loss(Tape &tape, const EncodedInstance &x) {
  Var o = context_vector(tape, x);
  return teacher_forced_loss(x.base, x.target, o, decoder_);
}

Generation DerivationModel::generate(Tape &tape, const EncodedInstance &x,
                                     std::size_t max_len) {
  Var o = context_vector(tape, x);
  return generate_greedy(x.base, o, decoder_, max_len);
}

std::size_t DerivationModel::default_max_len(const EncodedInstance &x,
                                             std::size_t slack) {
  return x.base.size() + slack;
}

std::vector<Parameter *> DerivationModel::parameters() {
  std::vector<Parameter *> out;
  for (auto *stack : {&left_forward_, &left_backward_, &right_forward_, &right_backward_,
                      &base_forward_, &base_backward_}) {
    if (*stack) (*stack)->collect(out);
  }
  encoder_.collect(out);
  decoder_.collect(out);
  return out;
}

std::size_t DerivationModel::num_weights() {
  std::size_t n = 0;
  for (const Parameter *p : parameters()) n += p->value.size();
  return n;
}

}  // namespace derivgen
