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

#ifndef DERIVGEN_SYNTHETIC_H_
#define DERIVGEN_SYNTHETIC_H_

// Toy derivation data with a deterministic cue: the word right before the
// slot names the suffix. Used for smoke runs and learnability checks.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "derivgen/dataset.h"
#include "derivgen/embeddings.h"

namespace derivgen {

struct SyntheticRule {
  std::string cue;
  std::string suffix;  // label, kNullSuffix for the identity rule
  std::string ending;  // appended to the stem
  std::string pos;
};

// the -> -ation, one -> -er, his -> -ment, to -> NULL (verb).
const std::vector<SyntheticRule> &synthetic_rules();

struct SyntheticOptions {
  std::size_t num_stems = 40;
  std::size_t contexts_per_rule = 4;
  // Filler words on each side of the slot; the cue replaces the last
  // filler on the left.
  std::size_t context_tokens = 5;
  std::size_t embedding_dim = 32;
  double embedding_scale = 0.5;
  bool null_only = false;
  std::uint64_t seed = 1;
};

struct SyntheticData {
  std::vector<std::string> stems;
  std::vector<LemmaPair> pairs;
  std::vector<Sentence> corpus;
  std::vector<Instance> instances;  // extract_contexts over corpus
  EmbeddingTable embeddings;        // random, covers every context word
};

SyntheticData make_synthetic(const SyntheticOptions &options);

// Distinct consonant-vowel stems ending in a consonant, e.g. "bolak".
std::vector<std::string> random_pronounceable_stems(std::size_t n,
                                                    std::size_t min_syllables,
                                                    std::size_t max_syllables,
                                                    std::uint64_t seed);

}  // namespace derivgen

#endif  // DERIVGEN_SYNTHETIC_H_
