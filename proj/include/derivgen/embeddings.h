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

#ifndef DERIVGEN_EMBEDDINGS_H_
#define DERIVGEN_EMBEDDINGS_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "derivgen/vocab.h"

namespace derivgen {

// Fixed word vectors. Never trained. Unknown words resolve to the UNK
// vector; the sentence sentinels stand in for an empty context side.
class EmbeddingTable {
 public:
  static constexpr std::string_view kSentenceBegin = "<s>";
  static constexpr std::string_view kSentenceEnd = "</s>";

  EmbeddingTable() = default;
  EmbeddingTable(std::size_t dim, Vocabulary words, std::vector<double> vectors,
                 std::vector<double> unk, std::vector<double> sentence_begin,
                 std::vector<double> sentence_end);

  // Independent uniform(-scale, scale) vectors for `words`, UNK and the
  // sentinels. For synthetic data and runs without pretrained vectors.
  static EmbeddingTable Random(const std::vector<std::string> &words, std::size_t dim,
                               std::uint64_t seed, double scale = 0.5);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return words_.size(); }
  bool contains(std::string_view word) const { return words_.contains(word); }
  std::span<const double> lookup(std::string_view word) const;
  std::span<const double> unk() const { return unk_; }
  std::span<const double> sentence_begin() const { return begin_; }
  std::span<const double> sentence_end() const { return end_; }

  const Vocabulary &words() const { return words_; }
  const std::vector<double> &vectors() const { return vectors_; }

  // Problems worth surfacing to the user, e.g. an empty vocabulary overlap.
  const std::vector<std::string> &warnings() const { return warnings_; }
  void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

  friend bool operator==(const EmbeddingTable &a, const EmbeddingTable &b) {
    return a.dim_ == b.dim_ && a.words_ == b.words_ && a.vectors_ == b.vectors_ &&
           a.unk_ == b.unk_ && a.begin_ == b.begin_ && a.end_ == b.end_;
  }

 private:
  std::size_t dim_ = 0;
  Vocabulary words_;
  std::vector<double> vectors_;  // size() x dim_, row-major
  std::vector<double> unk_;
  std::vector<double> begin_;
  std::vector<double> end_;
  std::vector<std::string> warnings_;
};

// Reads "word v1 ... vd" lines; a leading "count dim" header line is
// skipped. Only words in `vocab` are kept, but UNK is the mean of every
// vector in the file. `expected_dim` of 0 accepts the file's dimension.
// Throws FormatError on inconsistent dimensions or unparsable numbers.
EmbeddingTable load_embeddings(const std::string &path,
                               const std::vector<std::string> &vocab,
                               std::size_t expected_dim = 0);
EmbeddingTable parse_embeddings(std::istream &in, const std::vector<std::string> &vocab,
                                std::size_t expected_dim = 0);

// Writes the word vectors in the format parse_embeddings reads, with a
// "count dim" header. UNK and the sentinels are not written.
void write_embeddings(std::ostream &out, const EmbeddingTable &table);

}  // namespace derivgen

#endif  // DERIVGEN_EMBEDDINGS_H_
