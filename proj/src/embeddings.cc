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

#include "derivgen/embeddings.h"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "derivgen/dataset.h"
#include "derivgen/errors.h"

namespace derivgen {
namespace {

// Sentinel vectors come from a fixed stream so that every table built with
// the same dimension agrees on them.
constexpr std::uint64_t kSentinelSeed = 0x5e17e9u;

std::vector<double> draw(std::size_t dim, double scale, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::vector<double> v(dim);
  for (double &x : v) x = dist(rng);
  return v;
}

std::pair<std::vector<double>, std::vector<double>> sentinels(std::size_t dim) {
  std::mt19937_64 rng(kSentinelSeed);
  auto b = draw(dim, 0.1, rng);
  auto e = draw(dim, 0.1, rng);
  return {std::move(b), std::move(e)};
}

bool parse_double(const std::string &s, double &out) {
  const char *first = s.data();
  const char *last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool is_count_header(const std::vector<std::string> &f) {
  if (f.size() != 2) return false;
  for (const auto &s : f) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      return false;
    }
  }
  return true;
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t dim, Vocabulary words,
                               std::vector<double> vectors, std::vector<double> unk,
                               std::vector<double> sentence_begin,
                               std::vector<double> sentence_end)
    : dim_(dim),
      words_(std::move(words)),
      vectors_(std::move(vectors)),
      unk_(std::move(unk)),
      begin_(std::move(sentence_begin)),
      end_(std::move(sentence_end)) {
  if (dim_ == 0) throw ConfigError("embedding dimension must be positive");
  if (vectors_.size() != words_.size() * dim_ || unk_.size() != dim_ ||
      begin_.size() != dim_ || end_.size() != dim_) {
    throw DimensionError("embedding table storage does not match dimension " +
                         std::to_string(dim_));
  }
}

EmbeddingTable EmbeddingTable::Random(const std::vector<std::string> &words,
                                      std::size_t dim, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  Vocabulary vocab;
  std::vector<double> vectors;
  for (const auto &w : words) {
    if (vocab.contains(w)) continue;
    vocab.add(w);
    auto v = draw(dim, scale, rng);
    vectors.insert(vectors.end(), v.begin(), v.end());
  }
  auto unk = draw(dim, scale, rng);
  auto [b, e] = sentinels(dim);
  return EmbeddingTable(dim, std::move(vocab), std::move(vectors), std::move(unk),
                        std::move(b), std::move(e));
}

std::span<const double> EmbeddingTable::lookup(std::string_view word) const {
  if (word == kSentenceBegin) return begin_;
  if (word == kSentenceEnd) return end_;
  if (!words_.contains(word)) return unk_;
  return std::span<const double>(vectors_).subspan(words_.index(word) * dim_, dim_);
}

EmbeddingTable parse_embeddings(std::istream &in, const std::vector<std::string> &vocab,
                                std::size_t expected_dim) {
  std::unordered_set<std::string> wanted(vocab.begin(), vocab.end());
  std::size_t dim = expected_dim;
  std::vector<double> sum;
  std::size_t loaded = 0;
  Vocabulary words;
  std::vector<double> vectors;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto f = split_tokens(line);
    if (f.empty()) continue;
    if (line_no == 1 && is_count_header(f)) continue;
    std::size_t d = f.size() - 1;
    if (d == 0) {
      throw FormatError("line " + std::to_string(line_no) + ": word without a vector");
    }
    if (dim == 0) dim = d;
    if (d != dim) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(dim) + " components, got " + std::to_string(d));
    }
    if (sum.empty()) sum.assign(dim, 0.0);
    std::vector<double> v(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      if (!parse_double(f[i + 1], v[i])) {
        throw FormatError("line " + std::to_string(line_no) + ": bad number '" +
                          f[i + 1] + "'");
      }
      sum[i] += v[i];
    }
    ++loaded;
    if (wanted.count(f[0]) && !words.contains(f[0])) {
      words.add(f[0]);
      vectors.insert(vectors.end(), v.begin(), v.end());
    }
  }
  if (dim == 0) throw FormatError("embedding file is empty and no dimension given");
  std::vector<double> unk(dim, 0.0);
  if (loaded > 0) {
    for (std::size_t i = 0; i < dim; ++i) unk[i] = sum[i] / loaded;
  }
  auto [b, e] = sentinels(dim);
  EmbeddingTable table(dim, std::move(words), std::move(vectors), std::move(unk),
                       std::move(b), std::move(e));
  if (table.size() == 0) {
    table.add_warning(
        "no vocabulary word has a pretrained vector; every "
        "context token resolves to UNK");
  }
  return table;
}

EmbeddingTable load_embeddings(const std::string &path,
                               const std::vector<std::string> &vocab,
                               std::size_t expected_dim) {
  std::ifstream in(path);
  if (!in) throw PathError("cannot open " + path);
  try {
    return parse_embeddings(in, vocab, expected_dim);
  } catch (const FormatError &e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_embeddings(std::ostream &out, const EmbeddingTable &table) {
  out << table.size() << ' ' << table.dim() << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.words().symbol(i);
    for (std::size_t k = 0; k < table.dim(); ++k) {
      out << ' ' << table.vectors()[i * table.dim() + k];
    }
    out << '\n';
  }
}

}  // namespace derivgen
