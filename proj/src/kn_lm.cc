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

#include "derivgen/kn_lm.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "derivgen/errors.h"

namespace derivgen {
namespace {

constexpr std::uint32_t kBosId = 0;
constexpr std::uint32_t kEosId = 1;
constexpr std::uint32_t kUnkId = 2;
constexpr std::size_t kMaxVocab = std::size_t{1} << 21;

KnDiscounts estimate(const std::array<std::size_t, 4> &n, int order, double fallback,
                     std::vector<std::string> &warnings) {
  KnDiscounts out;
  out.n = n;
  auto use_fallback = [&](const std::string &why) {
    out.d = {fallback, fallback, fallback};
    out.fallback = true;
    std::ostringstream msg;
    msg << "order " << order << ": " << why << " (n1..n4 = " << n[0] << "," << n[1] << ","
        << n[2] << "," << n[3] << "); using fixed discount " << fallback;
    warnings.push_back(msg.str());
  };
  if (n[0] == 0 || n[1] == 0 || n[2] == 0) {
    use_fallback("counts-of-counts leave a discount undefined");
    return out;
  }
  double n1 = n[0], n2 = n[1], n3 = n[2], n4 = n[3];
  double y = n1 / (n1 + 2 * n2);
  out.d = {1 - 2 * y * n2 / n1, 2 - 3 * y * n3 / n2, 3 - 4 * y * n4 / n3};
  for (int k = 0; k < 3; ++k) {
    if (!(out.d[k] >= 0.0 && out.d[k] <= k + 1)) {
      use_fallback("discount estimate out of range");
      break;
    }
  }
  return out;
}

std::string format_log10(double p) {
  std::ostringstream out;
  out << std::setprecision(17) << (p > 0 ? std::log10(p) : -99.0);
  return out.str();
}

}  // namespace

KnLm KnLm::Train(const std::vector<Sentence> &corpus, const KnOptions &options) {
  if (corpus.empty()) throw EmptyDatasetError("cannot train on an empty corpus");
  KnLm lm;
  std::map<std::string, std::size_t> word_counts;
  for (const auto &s : corpus) {
    for (const auto &w : s) ++word_counts[w];
  }
  lm.vocab_.add(std::string(kBos));
  lm.vocab_.add(std::string(kEos));
  lm.vocab_.add(std::string(kUnk));
  for (const auto &[w, c] : word_counts) {
    if (c >= options.min_count) lm.vocab_.add(w);
  }
  if (lm.vocab_.size() >= kMaxVocab) {
    throw ConfigError("vocabulary too large for packed trigram keys");
  }

  std::vector<std::uint32_t> ids;
  for (const auto &s : corpus) {
    ids.assign({kBosId, kBosId});
    for (const auto &w : s) ids.push_back(lm.id(w));
    ids.push_back(kEosId);
    for (std::size_t i = 2; i < ids.size(); ++i) {
      ++lm.tri_counts_[key3(ids[i - 2], ids[i - 1], ids[i])];
    }
  }

  auto bump = [](ContextStats &s, std::size_t c) {
    s.total += static_cast<double>(c);
    ++s.types[std::min<std::size_t>(c, 3) - 1];
  };
  std::array<std::size_t, 4> n3{}, n2{}, n1{};
  auto count_of = [](std::array<std::size_t, 4> &n, std::size_t c) {
    if (c >= 1 && c <= 4) ++n[c - 1];
  };
  const std::uint64_t mask = (std::uint64_t{1} << 21) - 1;
  for (const auto &[k, c] : lm.tri_counts_) {
    auto u = static_cast<std::uint32_t>(k >> 42);
    auto v = static_cast<std::uint32_t>((k >> 21) & mask);
    auto w = static_cast<std::uint32_t>(k & mask);
    bump(lm.tri_contexts_[key2(u, v)], c);
    ++lm.bi_cont_[key2(v, w)];
    count_of(n3, c);
  }
  lm.uni_cont_.assign(lm.vocab_.size(), 0);
  for (const auto &[k, c] : lm.bi_cont_) {
    auto v = static_cast<std::uint32_t>(k >> 32);
    auto w = static_cast<std::uint32_t>(k & 0xffffffffu);
    bump(lm.bi_contexts_[v], c);
    ++lm.uni_cont_[w];
    count_of(n2, c);
  }
  for (std::uint32_t w = 1; w < lm.uni_cont_.size(); ++w) {
    if (lm.uni_cont_[w] > 0) {
      bump(lm.uni_stats_, lm.uni_cont_[w]);
      count_of(n1, lm.uni_cont_[w]);
    }
  }
  lm.discounts_[0] = estimate(n1, 1, options.fallback_discount, lm.warnings_);
  lm.discounts_[1] = estimate(n2, 2, options.fallback_discount, lm.warnings_);
  lm.discounts_[2] = estimate(n3, 3, options.fallback_discount, lm.warnings_);
  return lm;
}

std::uint32_t KnLm::id(std::string_view word) const {
  if (!vocab_.contains(word)) return kUnkId;
  return static_cast<std::uint32_t>(vocab_.index(word));
}

double KnLm::discount(int order, std::size_t count) const {
  if (count == 0) return 0.0;
  return discounts_[order - 1].d[std::min<std::size_t>(count, 3) - 1];
}

double KnLm::gamma(const ContextStats &s, int order) const {
  const auto &d = discounts_[order - 1].d;
  return (d[0] * s.types[0] + d[1] * s.types[1] + d[2] * s.types[2]) / s.total;
}

double KnLm::p1(std::uint32_t w) const {
  double uniform = 1.0 / static_cast<double>(vocab_.size() - 1);
  if (uni_stats_.total == 0) return uniform;
  std::size_t c = uni_cont_[w];
  double direct = std::max(c - discount(1, c), 0.0) / uni_stats_.total;
  return direct + gamma(uni_stats_, 1) * uniform;
}

double KnLm::p2(std::uint32_t w, std::uint32_t v) const {
  auto ctx = bi_contexts_.find(v);
  if (ctx == bi_contexts_.end()) return p1(w);
  auto it = bi_cont_.find(key2(v, w));
  std::size_t c = it == bi_cont_.end() ? 0 : it->second;
  double direct = std::max(c - discount(2, c), 0.0) / ctx->second.total;
  return direct + gamma(ctx->second, 2) * p1(w);
}

double KnLm::p3(std::uint32_t w, std::uint32_t u, std::uint32_t v) const {
  auto ctx = tri_contexts_.find(key2(u, v));
  if (ctx == tri_contexts_.end()) return p2(w, v);
  auto it = tri_counts_.find(key3(u, v, w));
  std::size_t c = it == tri_counts_.end() ? 0 : it->second;
  double direct = std::max(c - discount(3, c), 0.0) / ctx->second.total;
  return direct + gamma(ctx->second, 3) * p2(w, v);
}

double KnLm::prob(std::string_view w, std::string_view u, std::string_view v) const {
  return p3(id(w), id(u), id(v));
}

double KnLm::prob(std::string_view w, std::string_view v) const {
  return p2(id(w), id(v));
}

double KnLm::prob(std::string_view w) const { return p1(id(w)); }

double KnLm::score_sentence(const std::vector<std::string> &tokens) const {
  std::uint32_t u = kBosId, v = kBosId;
  double total = 0.0;
  for (const auto &t : tokens) {
    std::uint32_t w = id(t);
    total += std::log(p3(w, u, v));
    u = v;
    v = w;
  }
  return total + std::log(p3(kEosId, u, v));
}

std::vector<std::string> KnLm::predictable_vocabulary() const {
  return {vocab_.symbols().begin() + 1, vocab_.symbols().end()};
}

std::vector<std::pair<std::string, std::string>> KnLm::trigram_contexts() const {
  std::vector<std::uint64_t> keys;
  for (const auto &[k, s] : tri_contexts_) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  std::vector<std::pair<std::string, std::string>> out;
  for (auto k : keys) {
    out.emplace_back(vocab_.symbol(k >> 32), vocab_.symbol(k & 0xffffffffu));
  }
  return out;
}

std::vector<std::string> KnLm::bigram_contexts() const {
  std::vector<std::uint32_t> keys;
  for (const auto &[k, s] : bi_contexts_) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  std::vector<std::string> out;
  for (auto k : keys) out.push_back(vocab_.symbol(k));
  return out;
}

void KnLm::write_arpa(std::ostream &out) const {
  const std::uint64_t mask = (std::uint64_t{1} << 21) - 1;
  std::vector<std::uint64_t> bigrams;
  for (const auto &[k, c] : bi_cont_) bigrams.push_back(k);
  bool bos_bos =
      tri_contexts_.count(key2(kBosId, kBosId)) && !bi_cont_.count(key2(kBosId, kBosId));
  if (bos_bos) bigrams.push_back(key2(kBosId, kBosId));
  std::sort(bigrams.begin(), bigrams.end());
  std::vector<std::uint64_t> trigrams;
  for (const auto &[k, c] : tri_counts_) trigrams.push_back(k);
  std::sort(trigrams.begin(), trigrams.end());

  out << "\n\\data\\\n";
  out << "ngram 1=" << vocab_.size() << "\n";
  out << "ngram 2=" << bigrams.size() << "\n";
  out << "ngram 3=" << trigrams.size() << "\n";

  auto backoff = [](double g) {
    std::ostringstream s;
    s << std::setprecision(17) << std::log10(g);
    return s.str();
  };

  out << "\n\\1-grams:\n";
  for (std::uint32_t w = 0; w < vocab_.size(); ++w) {
    out << (w == kBosId ? "-99" : format_log10(p1(w))) << '\t' << vocab_.symbol(w);
    auto ctx = bi_contexts_.find(w);
    if (ctx != bi_contexts_.end()) out << '\t' << backoff(gamma(ctx->second, 2));
    out << '\n';
  }

  out << "\n\\2-grams:\n";
  for (auto k : bigrams) {
    auto v = static_cast<std::uint32_t>(k >> 32);
    auto w = static_cast<std::uint32_t>(k & 0xffffffffu);
    out << (w == kBosId ? "-99" : format_log10(p2(w, v))) << '\t' << vocab_.symbol(v)
        << ' ' << vocab_.symbol(w);
    auto ctx = tri_contexts_.find(key2(v, w));
    if (ctx != tri_contexts_.end()) out << '\t' << backoff(gamma(ctx->second, 3));
    out << '\n';
  }

  out << "\n\\3-grams:\n";
  for (auto k : trigrams) {
    auto u = static_cast<std::uint32_t>(k >> 42);
    auto v = static_cast<std::uint32_t>((k >> 21) & mask);
    auto w = static_cast<std::uint32_t>(k & mask);
    out << format_log10(p3(w, u, v)) << '\t' << vocab_.symbol(u) << ' '
        << vocab_.symbol(v) << ' ' << vocab_.symbol(w) << '\n';
  }
  out << "\n\\end\\\n";
}

}  // namespace derivgen
