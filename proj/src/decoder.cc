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

#include "derivgen/decoder.h"

#include <string>

#include "derivgen/errors.h"
#include "derivgen/vocab.h"

namespace derivgen {
namespace {

void check_char(std::size_t c, const DecoderParams &p) {
  if (c >= p.alphabet_size()) {
    throw VocabularyError("character index " + std::to_string(c) +
                          " outside alphabet of " + std::to_string(p.alphabet_size()));
  }
}

Var logits_from(Var prev_repr, Var context, std::size_t base_char, DecoderParams &p) {
  Tape *tape = context.tape();
  Var copy = matvec(p.copy_weights, tape->lookup(p.char_table, base_char));
  Var pooled = pairwise_max(matvec(p.context_weights, context), copy);
  return add(affine(p.prev_weights, prev_repr, p.bias), pooled);
}

// Feeds previous characters through the optional decoder recurrence.
class PrevCharReader {
 public:
  PrevCharReader(DecoderParams &p, Tape *tape) : p_(p) {
    if (p_.recurrence) {
      std::vector<double> zeros(p_.recurrence->hidden_dim(), 0.0);
      state_ = {tape->constant(zeros), tape->constant(zeros)};
    }
  }

  Var read(Tape *tape, std::size_t prev_char) {
    Var emb = tape->lookup(p_.char_table, prev_char);
    if (!p_.recurrence) return emb;
    state_ = lstm_step(*p_.recurrence, emb, state_.h, state_.c);
    return state_.h;
  }

 private:
  DecoderParams &p_;
  LstmState state_;
};

}  // namespace

DecoderParams DecoderParams::Create(std::size_t alphabet_size, std::size_t char_dim,
                                    std::size_t context_dim, bool recurrent,
                                    double init_scale, std::mt19937_64 &rng,
                                    double lstm_init_scale,
                                    std::optional<double> copy_init_scale) {
  if (alphabet_size < 3 || char_dim == 0 || context_dim == 0) {
    throw ConfigError(
        "decoder needs an alphabet with the reserved symbols "
        "and positive dimensions");
  }
  DecoderParams p{
      Parameter("decoder.chars", Tensor({alphabet_size, char_dim})),
      Parameter("decoder.R", Tensor({alphabet_size, char_dim})),
      Parameter("decoder.B", Tensor({alphabet_size, context_dim})),
      Parameter("decoder.S", Tensor({alphabet_size, char_dim})),
      Parameter("decoder.b_d", Tensor({alphabet_size})),
      std::nullopt,
  };
  uniform_init(p.char_table, init_scale, rng);
  uniform_init(p.prev_weights, init_scale, rng);
  uniform_init(p.context_weights, init_scale, rng);
  uniform_init(p.copy_weights, copy_init_scale.value_or(init_scale), rng);
  if (recurrent) {
    p.recurrence =
        LstmLayerParams::Create("decoder.lstm", char_dim, char_dim, lstm_init_scale, rng);
  }
  return p;
}

void DecoderParams::collect(std::vector<Parameter *> &out) {
  out.push_back(&char_table);
  out.push_back(&prev_weights);
  out.push_back(&context_weights);
  out.push_back(&copy_weights);
  out.push_back(&bias);
  if (recurrence) {
    out.push_back(&recurrence->input_weights);
    out.push_back(&recurrence->recurrent_weights);
    out.push_back(&recurrence->bias);
  }
}

std::size_t base_prefix_char(std::span<const std::size_t> base, std::size_t j) {
  return j < base.size() ? base[j] : CharVocab::kEndOfWord;
}

Var decode_step(std::size_t prev_char, Var context, std::size_t base_char,
                DecoderParams &params) {
  check_char(prev_char, params);
  check_char(base_char, params);
  Tape *tape = context.tape();
  return logits_from(tape->lookup(params.char_table, prev_char), context, base_char,
                     params);
}

Var teacher_forced_loss(std::span<const std::size_t> base,
                        std::span<const std::size_t> target, Var context,
                        DecoderParams &params) {
  if (target.empty()) throw Error("teacher_forced_loss: empty target form");
  for (std::size_t c : base) check_char(c, params);
  for (std::size_t c : target) check_char(c, params);
  Tape *tape = context.tape();
  PrevCharReader reader(params, tape);
  std::vector<Var> losses;
  losses.reserve(target.size() + 1);
  std::size_t prev = CharVocab::kBeginOfWord;
  for (std::size_t j = 0; j <= target.size(); ++j) {
    std::size_t gold = j < target.size() ? target[j] : CharVocab::kEndOfWord;
    Var logits =
        logits_from(reader.read(tape, prev), context, base_prefix_char(base, j), params);
    losses.push_back(tape->softmax_xent(logits, gold));
    prev = gold;
  }
  return add_n(losses);
}

Generation generate_greedy(std::span<const std::size_t> base, Var context,
                           DecoderParams &params, std::size_t max_len) {
  if (max_len == 0) throw ConfigError("generate_greedy: max_len must be >= 1");
  for (std::size_t c : base) check_char(c, params);
  Tape *tape = context.tape();
  PrevCharReader reader(params, tape);
  Generation out;
  std::size_t prev = CharVocab::kBeginOfWord;
  for (std::size_t j = 0;; ++j) {
    if (out.chars.size() >= max_len) {
      out.truncated = true;
      break;
    }
    Var logits =
        logits_from(reader.read(tape, prev), context, base_prefix_char(base, j), params);
    // Begin-of-word is never a training target, so it is not a candidate.
    auto v = logits.value();
    std::size_t best = CharVocab::kEndOfWord;
    for (std::size_t k = best + 1; k < v.size(); ++k) {
      if (v[k] > v[best]) best = k;
    }
    if (best == CharVocab::kEndOfWord) break;
    out.chars.push_back(best);
    prev = best;
  }
  return out;
}

}  // namespace derivgen
