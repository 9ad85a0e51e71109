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

#ifndef DERIVGEN_VOCAB_H_
#define DERIVGEN_VOCAB_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace derivgen {

// Splits UTF-8 text into one string per code point. Invalid lead bytes are
// kept as single-byte symbols.
std::vector<std::string> utf8_symbols(std::string_view text);

// Dense string <-> index map that keeps insertion order.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> symbols);

  // Returns the index of `symbol`, adding it if new.
  std::size_t add(const std::string &symbol);
  bool contains(std::string_view symbol) const;
  // Throws VocabularyError for unknown symbols.
  std::size_t index(std::string_view symbol) const;
  const std::string &symbol(std::size_t i) const;
  std::size_t size() const { return symbols_.size(); }
  const std::vector<std::string> &symbols() const { return symbols_; }

  friend bool operator==(const Vocabulary &a, const Vocabulary &b) {
    return a.symbols_ == b.symbols_;
  }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Character inventory. Indices 0..2 are reserved for begin-of-word,
// end-of-word and unknown; the remaining symbols are sorted code points.
class CharVocab {
 public:
  static constexpr std::size_t kBeginOfWord = 0;
  static constexpr std::size_t kEndOfWord = 1;
  static constexpr std::size_t kUnknown = 2;
  static constexpr std::string_view kBeginOfWordSymbol = "<w>";
  static constexpr std::string_view kEndOfWordSymbol = "</w>";
  static constexpr std::string_view kUnknownSymbol = "<unk>";

  CharVocab();
  // Rebuilds from a symbol list as produced by symbols(); used by
  // checkpoint loading.
  explicit CharVocab(std::vector<std::string> symbols);

  static CharVocab Build(std::span<const std::string> words);

  std::size_t size() const { return vocab_.size(); }
  const std::vector<std::string> &symbols() const { return vocab_.symbols(); }
  bool contains(std::string_view symbol) const { return vocab_.contains(symbol); }

  // Unseen characters map to kUnknown.
  std::vector<std::size_t> encode(std::string_view word) const;
  // Special symbols other than unknown are dropped; unknown renders as
  // its symbol text.
  std::string decode(std::span<const std::size_t> chars) const;

  friend bool operator==(const CharVocab &, const CharVocab &) = default;

 private:
  Vocabulary vocab_;
};

}  // namespace derivgen

#endif  // DERIVGEN_VOCAB_H_
