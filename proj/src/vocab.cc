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

#include "derivgen/vocab.h"

#include <algorithm>
#include <set>

#include "derivgen/errors.h"

namespace derivgen {

std::vector<std::string> utf8_symbols(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    if ((lead & 0xE0) == 0xC0) {
      len = 2;
    } else if ((lead & 0xF0) == 0xE0) {
      len = 3;
    } else if ((lead & 0xF8) == 0xF0) {
      len = 4;
    }
    if (i + len > text.size()) len = 1;
    out.emplace_back(text.substr(i, len));
    i += len;
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> symbols) {
  for (auto &s : symbols) {
    if (contains(s)) throw VocabularyError("duplicate symbol '" + s + "'");
    add(s);
  }
}

std::size_t Vocabulary::add(const std::string &symbol) {
  auto it = index_.find(symbol);
  if (it != index_.end()) return it->second;
  index_.emplace(symbol, symbols_.size());
  symbols_.push_back(symbol);
  return symbols_.size() - 1;
}

bool Vocabulary::contains(std::string_view symbol) const {
  return index_.count(std::string(symbol)) > 0;
}

std::size_t Vocabulary::index(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it == index_.end()) {
    throw VocabularyError("unknown symbol '" + std::string(symbol) + "'");
  }
  return it->second;
}

const std::string &Vocabulary::symbol(std::size_t i) const {
  if (i >= symbols_.size()) {
    throw VocabularyError("index " + std::to_string(i) + " outside vocabulary of " +
                          std::to_string(symbols_.size()));
  }
  return symbols_[i];
}

CharVocab::CharVocab()
    : vocab_({std::string(kBeginOfWordSymbol), std::string(kEndOfWordSymbol),
              std::string(kUnknownSymbol)}) {}

CharVocab::CharVocab(std::vector<std::string> symbols) : vocab_(std::move(symbols)) {
  if (vocab_.size() < 3 || vocab_.symbol(kBeginOfWord) != kBeginOfWordSymbol ||
      vocab_.symbol(kEndOfWord) != kEndOfWordSymbol ||
      vocab_.symbol(kUnknown) != kUnknownSymbol) {
    throw VocabularyError("character inventory lacks the reserved symbols");
  }
}

CharVocab CharVocab::Build(std::span<const std::string> words) {
  std::set<std::string> chars;
  for (const auto &w : words) {
    for (auto &c : utf8_symbols(w)) chars.insert(std::move(c));
  }
  CharVocab v;
  for (const auto &c : chars) v.vocab_.add(c);
  return v;
}

std::vector<std::size_t> CharVocab::encode(std::string_view word) const {
  std::vector<std::size_t> out;
  for (const auto &c : utf8_symbols(word)) {
    out.push_back(vocab_.contains(c) ? vocab_.index(c) : kUnknown);
  }
  return out;
}

std::string CharVocab::decode(std::span<const std::size_t> chars) const {
  std::string out;
  for (std::size_t c : chars) {
    if (c == kBeginOfWord || c == kEndOfWord) continue;
    out += vocab_.symbol(c);
  }
  return out;
}

}  // namespace derivgen
