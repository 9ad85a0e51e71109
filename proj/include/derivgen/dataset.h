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

#ifndef DERIVGEN_DATASET_H_
#define DERIVGEN_DATASET_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace derivgen {

inline constexpr char kNullSuffix[] = "NULL";

struct LemmaPair {
  std::string base;
  std::string derived;
  std::string suffix;  // kNullSuffix for verb-verb pairs
  std::string pos;     // POS of the derived member: NOUN or VERB
  std::vector<std::string> base_forms;
  std::vector<std::string> derived_forms;

  bool is_verb_verb() const { return suffix == kNullSuffix; }
  friend bool operator==(const LemmaPair &, const LemmaPair &) = default;
};

// One obscured-slot example. `target` is the surface form that occupied
// the slot in the corpus.
struct Instance {
  std::vector<std::string> left;
  std::vector<std::string> right;
  std::string base;
  std::string target;
  std::string pos;
  std::string suffix;

  friend bool operator==(const Instance &, const Instance &) = default;
};

using Sentence = std::vector<std::string>;
using InflectionTable = std::unordered_map<std::string, std::vector<std::string>>;

struct LemmaPairOptions {
  // Suffixes attested in this many pairs or fewer are dropped.
  std::size_t max_rare_pairs = 5;
  bool add_verb_verb_pairs = true;
};

struct LemmaPairSet {
  std::vector<LemmaPair> pairs;
  std::vector<std::string> dropped_suffixes;
  std::size_t synthesized_verb_verb = 0;
};

// Parses `base \t derived \t suffix \t pos` rows. Blank lines and lines
// starting with '#' are skipped. Throws FormatError (with the line number)
// on malformed rows and EmptyDatasetError if nothing survives filtering.
LemmaPairSet parse_lemma_pairs(std::istream &in, const LemmaPairOptions &options = {});
LemmaPairSet load_lemma_pairs(const std::string &path,
                              const LemmaPairOptions &options = {});

// `lemma \t form1,form2,...`
InflectionTable parse_inflections(std::istream &in);
InflectionTable load_inflections(const std::string &path);

// Fills base_forms/derived_forms: the lemma itself followed by its listed
// inflections, without duplicates.
void attach_inflections(std::vector<LemmaPair> &pairs,
                        const InflectionTable &inflections);

// One pre-tokenized sentence per line, space separated.
std::vector<Sentence> parse_corpus(std::istream &in);
std::vector<Sentence> load_corpus(const std::string &path);

struct ContextOptions {
  std::size_t min_sentence_tokens = 3;
  std::size_t max_sentence_tokens = 50;
};

// Emits one instance per occurrence of any surface form of any pair's
// derived member, in (sentence, token, pair) order. Sentences outside the
// length bounds are skipped.
std::vector<Instance> extract_contexts(const std::vector<Sentence> &corpus,
                                       const std::vector<LemmaPair> &pairs,
                                       const InflectionTable &inflections,
                                       const ContextOptions &options = {});

// Number of instances a group of size n keeps: min(n, ceil(alpha*ln(1+n))).
std::size_t dampened_size(std::size_t n, double alpha);

// Groups instances by (base, suffix, pos, surface form) and keeps a seeded
// uniform sample of dampened_size(n) from each. Surviving instances keep
// their input order.
std::vector<Instance> dampen_contexts(const std::vector<Instance> &instances,
                                      double alpha, std::uint64_t seed);

enum class LexiconMode { kShared, kSplit };
std::string to_string(LexiconMode mode);
LexiconMode parse_lexicon_mode(const std::string &name);

struct DatasetSplit {
  std::vector<Instance> train;
  std::vector<Instance> dev;
  std::vector<Instance> test;
};

// kShared: instances are shuffled and cut by `ratios`; a dev/test instance
// whose base has no training instance yet moves to train, so every dev and
// test stem is seen in training.
// kSplit: base lemmas are shuffled and cut by `ratios`; every instance
// follows its base. Needs at least 3 distinct bases.
DatasetSplit split_dataset(const std::vector<Instance> &instances, LexiconMode mode,
                           std::array<double, 3> ratios, std::uint64_t seed);

struct LexiconAudit {
  std::size_t test_stems = 0;
  std::size_t seen_in_train = 0;
  // "shared" when every test stem occurs in train, "split" when none does,
  // "mixed" otherwise.
  std::string designation;
};
LexiconAudit audit_lexicon(const std::vector<Instance> &train,
                           const std::vector<Instance> &test);

// Instance file: `left \t target \t right \t base \t pos \t suffix`.
void write_instances(std::ostream &out, const std::vector<Instance> &instances);
std::vector<Instance> read_instances(std::istream &in);
void save_instances(const std::string &path, const std::vector<Instance> &instances);
std::vector<Instance> load_instances(const std::string &path);

struct DatasetStats {
  std::size_t lemma_pairs = 0;
  std::size_t suffix_inventory = 0;  // distinct labels other than NULL
  std::size_t instances = 0;
  std::map<std::string, std::size_t> instances_per_suffix;
};
DatasetStats compute_stats(const std::vector<LemmaPair> &pairs,
                           const std::vector<Instance> &instances);

// Distinct context words, sorted.
std::vector<std::string> word_vocabulary(const std::vector<Instance> &instances);

std::vector<std::string> split_tokens(const std::string &line);
std::string join_tokens(const std::vector<std::string> &tokens);

}  // namespace derivgen

#endif  // DERIVGEN_DATASET_H_
