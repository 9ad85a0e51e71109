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

#include "derivgen/synthetic.h"

#include <random>
#include <set>

#include "derivgen/errors.h"

namespace derivgen {
namespace {

constexpr char kConsonants[] = "bdfgklmnprstvz";
constexpr char kVowels[] = "aeiou";

const std::vector<std::string> &fillers() {
  static const std::vector<std::string> words{
      "and",  "it",    "was",  "of", "in",  "that", "with",  "for", "as",  "on", "at",
      "by",   "from",  "they", "we", "but", "or",   "an",    "not", "all", "so", "there",
      "what", "which", "when", "up", "out", "if",   "about", "who", ".",   ","};
  return words;
}

}  // namespace

const std::vector<SyntheticRule> &synthetic_rules() {
  static const std::vector<SyntheticRule> rules{
      {"the", "-ation", "ation", "NOUN"},
      {"one", "-er", "er", "NOUN"},
      {"his", "-ment", "ment", "NOUN"},
      {"to", kNullSuffix, "", "VERB"},
  };
  return rules;
}

std::vector<std::string> random_pronounceable_stems(std::size_t n,
                                                    std::size_t min_syllables,
                                                    std::size_t max_syllables,
                                                    std::uint64_t seed) {
  if (min_syllables == 0 || max_syllables < min_syllables) {
    throw ConfigError("bad syllable range");
  }
  std::mt19937_64 rng(seed);
  const std::size_t nc = sizeof(kConsonants) - 1, nv = sizeof(kVowels) - 1;
  std::set<std::string> seen;
  std::vector<std::string> out;
  std::size_t attempts = 0;
  while (out.size() < n) {
    if (++attempts > 1000 * (n + 1))
      throw ConfigError("cannot draw enough distinct stems");
    std::size_t syl = min_syllables + rng() % (max_syllables - min_syllables + 1);
    std::string s;
    for (std::size_t i = 0; i < syl; ++i) {
      s += kConsonants[rng() % nc];
      s += kVowels[rng() % nv];
    }
    s += kConsonants[rng() % nc];
    if (seen.insert(s).second) out.push_back(s);
  }
  return out;
}

SyntheticData make_synthetic(const SyntheticOptions &options) {
  if (options.num_stems == 0 || options.contexts_per_rule == 0 ||
      options.context_tokens == 0 || options.embedding_dim == 0) {
    throw ConfigError("synthetic sizes must be positive");
  }
  SyntheticData d;
  d.stems = random_pronounceable_stems(options.num_stems, 2, 2, options.seed);
  std::vector<SyntheticRule> rules;
  for (const auto &r : synthetic_rules()) {
    if (!options.null_only || r.suffix == kNullSuffix) rules.push_back(r);
  }
  for (const auto &stem : d.stems) {
    for (const auto &r : rules) {
      LemmaPair p;
      p.base = stem;
      p.derived = stem + r.ending;
      p.suffix = r.suffix;
      p.pos = r.pos;
      p.base_forms = {p.base};
      p.derived_forms = {p.derived};
      d.pairs.push_back(p);
    }
  }

  std::mt19937_64 rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
  const auto &words = fillers();
  auto filler = [&] { return words[rng() % words.size()]; };
  for (const auto &p : d.pairs) {
    const SyntheticRule *rule = nullptr;
    for (const auto &r : rules) {
      if (r.suffix == p.suffix) rule = &r;
    }
    for (std::size_t c = 0; c < options.contexts_per_rule; ++c) {
      Sentence s;
      for (std::size_t i = 1; i < options.context_tokens; ++i) s.push_back(filler());
      s.push_back(rule->cue);
      s.push_back(p.derived);
      for (std::size_t i = 0; i < options.context_tokens; ++i) s.push_back(filler());
      d.corpus.push_back(std::move(s));
    }
  }
  ContextOptions copts;
  copts.max_sentence_tokens = std::max<std::size_t>(50, 2 * options.context_tokens + 1);
  d.instances = extract_contexts(d.corpus, d.pairs, {}, copts);
  d.embeddings =
      EmbeddingTable::Random(word_vocabulary(d.instances), options.embedding_dim,
                             options.seed, options.embedding_scale);
  return d;
}

}  // namespace derivgen
