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

#ifndef DERIVGEN_KN_LM_H_
#define DERIVGEN_KN_LM_H_

// Interpolated modified Kneser-Ney trigram model.
//
// Sentences are padded as <s> <s> w1 ... wn </s>. The trigram level uses raw
// counts; the bigram and unigram levels use continuation counts (number of
// distinct left extensions). Each level has three discounts D1, D2, D3+
// estimated from its own counts-of-counts n1..n4:
//
//   Y = n1 / (n1 + 2 n2)
//   D1 = 1 - 2Y n2/n1,  D2 = 2 - 3Y n3/n2,  D3+ = 3 - 4Y n4/n3
//
// and interpolates with the next lower level; the unigram level
// interpolates with the uniform distribution over the predictable
// vocabulary (every word type, </s> and <unk>; <s> is never predicted).
// Where some n_k makes a discount undefined, or an estimate falls outside
// [0, k], the level falls back to a flat 0.75 for all three discounts and a
// warning is recorded.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "derivgen/dataset.h"
#include "derivgen/vocab.h"

namespace derivgen {

struct KnOptions {
  // Training words seen fewer times than this become <unk>.
  std::size_t min_count = 2;
  double fallback_discount = 0.75;
};

struct KnDiscounts {
  std::array<double, 3> d{};       // D1, D2, D3+
  std::array<std::size_t, 4> n{};  // counts-of-counts n1..n4
  bool fallback = false;
};

class KnLm {
 public:
  static constexpr std::string_view kBos = "<s>";
  static constexpr std::string_view kEos = "</s>";
  static constexpr std::string_view kUnk = "<unk>";

  // Throws EmptyDatasetError for an empty corpus.
  static KnLm Train(const std::vector<Sentence> &corpus, const KnOptions &options = {});

  // Smoothed probabilities. Out-of-vocabulary words are read as <unk>.
  double prob(std::string_view w, std::string_view u, std::string_view v) const;
  double prob(std::string_view w, std::string_view v) const;
  double prob(std::string_view w) const;

  // Sum of ln P(token | two predecessors) over the padded sentence,
  // including the final </s>.
  double score_sentence(const std::vector<std::string> &tokens) const;

  // Every word the model can predict: the kept word types, </s>, <unk>.
  std::vector<std::string> predictable_vocabulary() const;
  // Contexts (u, v) seen in training, as strings.
  std::vector<std::pair<std::string, std::string>> trigram_contexts() const;
  std::vector<std::string> bigram_contexts() const;

  // order is 1, 2 or 3.
  const KnDiscounts &discounts(int order) const { return discounts_[order - 1]; }
  const std::vector<std::string> &warnings() const { return warnings_; }

  // ARPA backoff format: log10 probabilities, the interpolation weights as
  // backoff weights. Lists "<s> <s>" as a bigram so that the double-<s>
  // trigram context has a home for its weight.
  void write_arpa(std::ostream &out) const;

 private:
  struct ContextStats {
    double total = 0;                    // sum of (continuation) counts
    std::array<std::size_t, 3> types{};  // # of words with count 1, 2, 3+
  };

  std::uint32_t id(std::string_view word) const;
  double p1(std::uint32_t w) const;
  double p2(std::uint32_t w, std::uint32_t v) const;
  double p3(std::uint32_t w, std::uint32_t u, std::uint32_t v) const;
  double gamma(const ContextStats &s, int order) const;
  double discount(int order, std::size_t count) const;

  static std::uint64_t key2(std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }
  static std::uint64_t key3(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    return (static_cast<std::uint64_t>(a) << 42) | (static_cast<std::uint64_t>(b) << 21) |
           c;
  }

  Vocabulary vocab_;  // 0 = <s>, 1 = </s>, 2 = <unk>
  std::unordered_map<std::uint64_t, std::size_t> tri_counts_;
  std::unordered_map<std::uint64_t, ContextStats> tri_contexts_;
  std::unordered_map<std::uint64_t, std::size_t> bi_cont_;
  std::unordered_map<std::uint32_t, ContextStats> bi_contexts_;
  std::vector<std::size_t> uni_cont_;
  ContextStats uni_stats_;
  std::array<KnDiscounts, 3> discounts_{};
  std::vector<std::string> warnings_;
};

}  // namespace derivgen

#endif  // DERIVGEN_KN_LM_H_
