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

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "derivgen/errors.h"
#include "derivgen/kn_lm.h"
#include "doctest.h"
#include "testing/kn_oracle.h"

namespace derivgen {
namespace {

std::vector<Sentence> toy_corpus() {
  std::vector<Sentence> out;
  for (const char *s :
       {"the cat sat on the mat", "the dog sat on the log", "a cat saw the dog",
        "the cat sat", "a dog sat on a mat", "the mat was on the log", "a cat and a dog",
        "on the mat the cat sat", "the dog saw a cat on the log"}) {
    out.push_back(split_tokens(s));
  }
  return out;
}

// Minimal ARPA reader doing standard backoff lookups.
struct Arpa {
  std::map<std::string, std::pair<double, double>> grams;  // key -> (logp, bow)

  explicit Arpa(std::istream &in) {
    std::string line;
    int order = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line == "\\data\\" || line.rfind("ngram ", 0) == 0) continue;
      if (line == "\\end\\") break;
      if (line[0] == '\\') {
        order = line[1] - '0';
        continue;
      }
      std::istringstream f(line);
      std::string logp;
      std::getline(f, logp, '\t');
      std::string words;
      std::getline(f, words, '\t');
      std::string bow;
      double b = 0;
      if (std::getline(f, bow, '\t')) b = std::stod(bow);
      REQUIRE(static_cast<int>(split_tokens(words).size()) == order);
      grams[words] = {std::stod(logp), b};
    }
  }

  double bow(const std::string &k) const {
    auto it = grams.find(k);
    return it == grams.end() ? 0.0 : it->second.second;
  }
  double log10p(const std::string &w, const std::string &v) const {
    auto it = grams.find(v + " " + w);
    if (it != grams.end()) return it->second.first;
    return bow(v) + grams.at(w).first;
  }
  double log10p(const std::string &w, const std::string &u, const std::string &v) const {
    auto it = grams.find(u + " " + v + " " + w);
    if (it != grams.end()) return it->second.first;
    return bow(u + " " + v) + log10p(w, v);
  }
};

TEST_CASE("degenerate counts fall back to a flat discount with a warning") {
  auto lm = KnLm::Train({split_tokens("a b a b")});
  for (int order = 1; order <= 3; ++order) {
    CHECK(lm.discounts(order).fallback);
    CHECK(lm.discounts(order).d[0] == 0.75);
  }
  CHECK(lm.warnings().size() == 3);
  // Exact values from the rational-arithmetic oracle in tests/oracles.
  CHECK(lm.prob("b") == doctest::Approx(13.0 / 64).epsilon(1e-14));
  CHECK(lm.prob("b", "a") == doctest::Approx(359.0 / 512).epsilon(1e-14));
}

TEST_CASE("trigram probabilities match the exact oracle") {
  auto lm = KnLm::Train(toy_corpus());
  CHECK(lm.discounts(1).fallback);
  CHECK(lm.discounts(2).fallback);
  CHECK_FALSE(lm.discounts(3).fallback);
  CHECK(lm.discounts(3).d[0] == doctest::Approx(29.0 / 43).epsilon(1e-14));
  CHECK(lm.discounts(3).d[1] == doctest::Approx(254.0 / 301).epsilon(1e-14));
  CHECK(lm.discounts(3).d[2] == doctest::Approx(3.0).epsilon(1e-14));

  struct Case {
    const char *w, *u, *v;
    double p;
  };
  for (const Case &c :
       {Case{"sat", "the", "cat", 53.0 / 464},
        Case{"mat", "on", "the", 478109.0 / 1222060},
        Case{"dog", "<s>", "a", 43777.0 / 174580},
        Case{"</s>", "cat", "sat", 145325.0 / 314244},
        Case{"log", "was", "on", 3.0 / 430}, Case{"<unk>", "a", "cat", 383.0 / 2064}}) {
    INFO(c.w << " | " << c.u << " " << c.v);
    CHECK(lm.prob(c.w, c.u, c.v) == doctest::Approx(c.p).epsilon(1e-12));
  }
  // "and" occurs once, so it is read as <unk>.
  CHECK(lm.prob("and", "a", "cat") == lm.prob("<unk>", "a", "cat"));
  CHECK(lm.prob("zebra") == lm.prob("<unk>"));
}

TEST_CASE("every context distribution sums to one") {
  auto lm = KnLm::Train(toy_corpus());
  auto vocab = lm.predictable_vocabulary();
  CHECK(std::find(vocab.begin(), vocab.end(), "<s>") == vocab.end());
  auto sum = [&](auto &&p) {
    double s = 0;
    for (const auto &w : vocab) s += p(w);
    return s;
  };
  CHECK(std::abs(sum([&](const std::string &w) { return lm.prob(w); }) - 1) < 1e-9);
  auto bigram_ctx = lm.bigram_contexts();
  bigram_ctx.push_back("never-seen");
  for (const auto &v : bigram_ctx) {
    INFO(v);
    CHECK(std::abs(sum([&](const std::string &w) { return lm.prob(w, v); }) - 1) < 1e-9);
  }
  auto tri_ctx = lm.trigram_contexts();
  tri_ctx.emplace_back("log", "cat");
  for (const auto &[u, v] : tri_ctx) {
    INFO(u << " " << v);
    CHECK(std::abs(sum([&](const std::string &w) { return lm.prob(w, u, v); }) - 1) <
          1e-9);
  }
}

TEST_CASE("normalization holds on random corpora") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Sentence> corpus;
    std::size_t types = 3 + rng() % 8;
    for (std::size_t s = 0; s < 1 + rng() % 30; ++s) {
      Sentence sent;
      for (std::size_t i = 0; i < rng() % 9; ++i) {
        sent.push_back("w" + std::to_string(rng() % types));
      }
      corpus.push_back(sent);
    }
    auto lm = KnLm::Train(corpus);
    auto vocab = lm.predictable_vocabulary();
    for (const auto &[u, v] : lm.trigram_contexts()) {
      double s = 0;
      for (const auto &w : vocab) s += lm.prob(w, u, v);
      CHECK(std::abs(s - 1) < 1e-9);
    }
  }
}

TEST_CASE("sentence score is the sum of padded trigram log probabilities") {
  auto lm = KnLm::Train(toy_corpus());
  auto toks = split_tokens("the cat sat on a log");
  double expected =
      std::log(lm.prob("the", "<s>", "<s>")) + std::log(lm.prob("cat", "<s>", "the"));
  for (std::size_t i = 2; i < toks.size(); ++i) {
    expected += std::log(lm.prob(toks[i], toks[i - 2], toks[i - 1]));
  }
  expected += std::log(lm.prob("</s>", "a", "log"));
  CHECK(lm.score_sentence(toks) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(lm.score_sentence(split_tokens("the cat sat")) >
        lm.score_sentence(split_tokens("sat cat the")));
}

TEST_CASE("ARPA export reproduces the model under backoff lookup") {
  auto lm = KnLm::Train(toy_corpus());
  std::stringstream arpa;
  lm.write_arpa(arpa);
  Arpa reader(arpa);
  CHECK(reader.grams.count("<s> <s>") == 1);
  auto vocab = lm.predictable_vocabulary();
  std::vector<std::string> ctx{"<s>", "the", "cat", "on", "log", "<unk>"};
  for (const auto &u : ctx) {
    for (const auto &v : ctx) {
      if (v == "<s>" && u != "<s>") continue;
      for (const auto &w : vocab) {
        INFO(u << " " << v << " " << w);
        CHECK(reader.log10p(w, u, v) ==
              doctest::Approx(std::log10(lm.prob(w, u, v))).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("small corpora agree with the exact rational oracle everywhere") {
  for (const auto &corpus : testing::small_kn_corpora()) {
    auto lm = KnLm::Train(corpus);
    testing::KnOracle oracle(corpus);
    for (int order = 1; order <= 3; ++order) {
      const auto &want = order == 1 ? oracle.d1_ : order == 2 ? oracle.d2_ : oracle.d3_;
      for (int k = 0; k < 3; ++k) {
        CHECK(lm.discounts(order).d[k] ==
              doctest::Approx(static_cast<double>(want[k])).epsilon(1e-15));
      }
    }
    auto r = testing::compare_with_oracle(lm, oracle);
    CHECK(r.checked > 0);
    CHECK(r.max_rel_error < 1e-12);
    CHECK(r.max_sum_error < 1e-9);
    CHECK(r.min_prob > 0.0);
  }
}

TEST_CASE("a one-word sentence scores two padded trigrams") {
  auto lm = KnLm::Train(toy_corpus());
  double s = lm.score_sentence({"a"});
  CHECK(s == doctest::Approx(std::log(lm.prob("a", "<s>", "<s>")) +
                             std::log(lm.prob("</s>", "<s>", "a")))
                 .epsilon(1e-14));
  CHECK(s <= 0.0);
}

TEST_CASE("empty corpora are rejected") {
  CHECK_THROWS_AS(KnLm::Train({}), EmptyDatasetError);
}

}  // namespace
}  // namespace derivgen
