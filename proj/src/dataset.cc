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

#include "derivgen/dataset.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include "derivgen/errors.h"

namespace derivgen {
namespace {

std::vector<std::string> split_on(const std::string &line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t end = line.find(sep, start);
    if (end == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, end - start));
    start = end + 1;
  }
}

void strip_cr(std::string &line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::ifstream open_input(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw PathError("cannot open " + path);
  return in;
}

void push_unique(std::vector<std::string> &v, const std::string &s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

std::string format_error(std::size_t line_no, const std::string &what) {
  return "line " + std::to_string(line_no) + ": " + what;
}

// Shuffles `items` with a Fisher-Yates pass driven by mt19937_64 directly so
// the permutation does not depend on the standard library's distributions.
template <typename T>
void seeded_shuffle(std::vector<T> &items, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = rng() % i;
    std::swap(items[i - 1], items[j]);
  }
}

std::array<std::size_t, 3> cut_sizes(std::size_t n, std::array<double, 3> r) {
  std::size_t train = static_cast<std::size_t>(std::llround(r[0] * n));
  train = std::min(train, n);
  std::size_t dev = static_cast<std::size_t>(std::llround(r[1] * n));
  dev = std::min(dev, n - train);
  if (r[2] == 0.0) dev = n - train;
  return {train, dev, n - train - dev};
}

void check_ratios(std::array<double, 3> r) {
  for (double v : r) {
    if (v < 0.0 || !std::isfinite(v)) {
      throw ConfigError("split ratios must be non-negative");
    }
  }
  if (std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-9) {
    throw ConfigError("split ratios must sum to 1");
  }
}

}  // namespace

std::vector<std::string> split_tokens(const std::string &line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string join_tokens(const std::vector<std::string> &tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

LemmaPairSet parse_lemma_pairs(std::istream &in, const LemmaPairOptions &options) {
  std::vector<LemmaPair> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    auto f = split_on(line, '\t');
    if (f.size() != 4) {
      throw FormatError(format_error(
          line_no, "expected 4 tab-separated fields, got " + std::to_string(f.size())));
    }
    for (const auto &field : f) {
      if (field.empty()) throw FormatError(format_error(line_no, "empty field"));
    }
    LemmaPair p{f[0], f[1], f[2], f[3], {}, {}};
    if (p.pos != "NOUN" && p.pos != "VERB") {
      throw FormatError(
          format_error(line_no, "POS must be NOUN or VERB, got '" + p.pos + "'"));
    }
    if (p.is_verb_verb() != (p.base == p.derived)) {
      throw FormatError(
          format_error(line_no, "suffix NULL must be used exactly for identity pairs"));
    }
    rows.push_back(std::move(p));
  }

  std::map<std::string, std::size_t> per_suffix;
  for (const auto &p : rows) {
    if (!p.is_verb_verb()) ++per_suffix[p.suffix];
  }
  LemmaPairSet out;
  for (const auto &[suffix, n] : per_suffix) {
    if (n <= options.max_rare_pairs) out.dropped_suffixes.push_back(suffix);
  }
  for (auto &p : rows) {
    if (!p.is_verb_verb() && per_suffix[p.suffix] <= options.max_rare_pairs) {
      continue;
    }
    out.pairs.push_back(std::move(p));
  }

  if (options.add_verb_verb_pairs) {
    std::set<std::string> have_identity;
    for (const auto &p : out.pairs) {
      if (p.is_verb_verb()) have_identity.insert(p.base);
    }
    std::vector<LemmaPair> extra;
    for (const auto &p : out.pairs) {
      if (have_identity.insert(p.base).second) {
        extra.push_back({p.base, p.base, kNullSuffix, "VERB", {}, {}});
      }
    }
    out.synthesized_verb_verb = extra.size();
    for (auto &p : extra) out.pairs.push_back(std::move(p));
  }
  if (out.pairs.empty()) {
    throw EmptyDatasetError("no lemma pairs left after filtering rare suffixes");
  }
  return out;
}

LemmaPairSet load_lemma_pairs(const std::string &path, const LemmaPairOptions &options) {
  auto in = open_input(path);
  try {
    return parse_lemma_pairs(in, options);
  } catch (const FormatError &e) {
    throw FormatError(path + ": " + e.what());
  }
}

InflectionTable parse_inflections(std::istream &in) {
  InflectionTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    auto f = split_on(line, '\t');
    if (f.size() != 2 || f[0].empty()) {
      throw FormatError(format_error(line_no, "expected 'lemma<TAB>form1,form2,...'"));
    }
    auto &forms = table[f[0]];
    for (const auto &form : split_on(f[1], ',')) {
      if (!form.empty()) push_unique(forms, form);
    }
  }
  return table;
}

InflectionTable load_inflections(const std::string &path) {
  auto in = open_input(path);
  try {
    return parse_inflections(in);
  } catch (const FormatError &e) {
    throw FormatError(path + ": " + e.what());
  }
}

void attach_inflections(std::vector<LemmaPair> &pairs,
                        const InflectionTable &inflections) {
  auto forms_of = [&](const std::string &lemma) {
    std::vector<std::string> forms{lemma};
    auto it = inflections.find(lemma);
    if (it != inflections.end()) {
      for (const auto &f : it->second) push_unique(forms, f);
    }
    return forms;
  };
  for (auto &p : pairs) {
    p.base_forms = forms_of(p.base);
    p.derived_forms = forms_of(p.derived);
  }
}

std::vector<Sentence> parse_corpus(std::istream &in) {
  std::vector<Sentence> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(split_tokens(line));
  return out;
}

std::vector<Sentence> load_corpus(const std::string &path) {
  auto in = open_input(path);
  return parse_corpus(in);
}

std::vector<Instance> extract_contexts(const std::vector<Sentence> &corpus,
                                       const std::vector<LemmaPair> &pairs,
                                       const InflectionTable &inflections,
                                       const ContextOptions &options) {
  // surface form -> indices of pairs whose derived member it realizes
  std::unordered_map<std::string, std::vector<std::size_t>> form_index;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::vector<std::string> forms{pairs[i].derived};
    for (const auto &f : pairs[i].derived_forms) push_unique(forms, f);
    auto it = inflections.find(pairs[i].derived);
    if (it != inflections.end()) {
      for (const auto &f : it->second) push_unique(forms, f);
    }
    for (const auto &f : forms) form_index[f].push_back(i);
  }

  std::vector<Instance> out;
  for (const auto &sentence : corpus) {
    if (sentence.size() < options.min_sentence_tokens ||
        sentence.size() > options.max_sentence_tokens) {
      continue;
    }
    for (std::size_t k = 0; k < sentence.size(); ++k) {
      auto it = form_index.find(sentence[k]);
      if (it == form_index.end()) continue;
      for (std::size_t pi : it->second) {
        const LemmaPair &p = pairs[pi];
        Instance inst;
        inst.left.assign(sentence.begin(), sentence.begin() + k);
        inst.right.assign(sentence.begin() + k + 1, sentence.end());
        inst.base = p.base;
        inst.target = sentence[k];
        inst.pos = p.pos;
        inst.suffix = p.suffix;
        out.push_back(std::move(inst));
      }
    }
  }
  return out;
}

std::size_t dampened_size(std::size_t n, double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("dampening alpha must be positive");
  if (n == 0) return 0;
  double cap = std::ceil(alpha * std::log1p(static_cast<double>(n)));
  return std::min(n, static_cast<std::size_t>(cap));
}

std::vector<Instance> dampen_contexts(const std::vector<Instance> &instances,
                                      double alpha, std::uint64_t seed) {
  if (!(alpha > 0.0)) throw ConfigError("dampening alpha must be positive");
  using Key = std::tuple<std::string, std::string, std::string, std::string>;
  std::map<Key, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto &x = instances[i];
    groups[{x.base, x.suffix, x.pos, x.target}].push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> keep;
  for (auto &[key, members] : groups) {
    std::size_t k = dampened_size(members.size(), alpha);
    // Partial Fisher-Yates: the first k slots become a uniform sample.
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + rng() % (members.size() - i);
      std::swap(members[i], members[j]);
    }
    keep.insert(keep.end(), members.begin(), members.begin() + k);
  }
  std::sort(keep.begin(), keep.end());
  std::vector<Instance> out;
  out.reserve(keep.size());
  for (std::size_t i : keep) out.push_back(instances[i]);
  return out;
}

std::string to_string(LexiconMode mode) {
  return mode == LexiconMode::kShared ? "shared" : "split";
}

LexiconMode parse_lexicon_mode(const std::string &name) {
  if (name == "shared") return LexiconMode::kShared;
  if (name == "split") return LexiconMode::kSplit;
  throw ConfigError("lexicon mode must be 'shared' or 'split', got '" + name + "'");
}

DatasetSplit split_dataset(const std::vector<Instance> &instances, LexiconMode mode,
                           std::array<double, 3> ratios, std::uint64_t seed) {
  check_ratios(ratios);
  DatasetSplit out;
  if (mode == LexiconMode::kShared) {
    std::vector<std::size_t> order(instances.size());
    std::iota(order.begin(), order.end(), 0);
    seeded_shuffle(order, seed);
    auto sizes = cut_sizes(order.size(), ratios);
    std::set<std::string> train_stems;
    std::vector<std::size_t> dev_idx, test_idx, train_idx;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i < sizes[0]) {
        train_idx.push_back(order[i]);
        train_stems.insert(instances[order[i]].base);
      } else if (i < sizes[0] + sizes[1]) {
        dev_idx.push_back(order[i]);
      } else {
        test_idx.push_back(order[i]);
      }
    }
    auto route = [&](const std::vector<std::size_t> &idx, std::vector<Instance> &dest) {
      for (std::size_t i : idx) {
        const Instance &x = instances[i];
        if (train_stems.count(x.base)) {
          dest.push_back(x);
        } else {
          // First occurrence of an unseen stem moves to train; later ones
          // may then stay where they are.
          train_stems.insert(x.base);
          train_idx.push_back(i);
        }
      }
    };
    route(dev_idx, out.dev);
    route(test_idx, out.test);
    for (std::size_t i : train_idx) out.train.push_back(instances[i]);
    return out;
  }

  std::vector<std::string> stems;
  {
    std::set<std::string> seen;
    for (const auto &x : instances) seen.insert(x.base);
    stems.assign(seen.begin(), seen.end());
  }
  if (stems.size() < 3) {
    throw InsufficientDataError("split lexicon needs at least 3 base lemmas, got " +
                                std::to_string(stems.size()));
  }
  seeded_shuffle(stems, seed);
  auto sizes = cut_sizes(stems.size(), ratios);
  std::map<std::string, int> part;
  for (std::size_t i = 0; i < stems.size(); ++i) {
    part[stems[i]] = i < sizes[0] ? 0 : (i < sizes[0] + sizes[1] ? 1 : 2);
  }
  for (const auto &x : instances) {
    switch (part[x.base]) {
      case 0:
        out.train.push_back(x);
        break;
      case 1:
        out.dev.push_back(x);
        break;
      default:
        out.test.push_back(x);
        break;
    }
  }
  return out;
}

LexiconAudit audit_lexicon(const std::vector<Instance> &train,
                           const std::vector<Instance> &test) {
  std::unordered_set<std::string> train_stems;
  for (const auto &x : train) train_stems.insert(x.base);
  std::set<std::string> test_stems;
  for (const auto &x : test) test_stems.insert(x.base);
  LexiconAudit a;
  a.test_stems = test_stems.size();
  for (const auto &s : test_stems) a.seen_in_train += train_stems.count(s);
  if (a.seen_in_train == a.test_stems) {
    a.designation = "shared";
  } else if (a.seen_in_train == 0) {
    a.designation = "split";
  } else {
    a.designation = "mixed";
  }
  return a;
}

void write_instances(std::ostream &out, const std::vector<Instance> &instances) {
  for (const auto &x : instances) {
    out << join_tokens(x.left) << '\t' << x.target << '\t' << join_tokens(x.right) << '\t'
        << x.base << '\t' << x.pos << '\t' << x.suffix << '\n';
  }
}

std::vector<Instance> read_instances(std::istream &in) {
  std::vector<Instance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    auto f = split_on(line, '\t');
    if (f.size() != 6) {
      throw FormatError(format_error(
          line_no,
          "instance rows need 6 tab-separated fields, got " + std::to_string(f.size())));
    }
    if (f[1].empty() || f[3].empty() || f[4].empty() || f[5].empty()) {
      throw FormatError(format_error(line_no, "empty target/base/pos/suffix"));
    }
    out.push_back({split_tokens(f[0]), split_tokens(f[2]), f[3], f[1], f[4], f[5]});
  }
  return out;
}

void save_instances(const std::string &path, const std::vector<Instance> &instances) {
  std::ofstream out(path);
  if (!out) throw PathError("cannot write " + path);
  write_instances(out, instances);
}

std::vector<Instance> load_instances(const std::string &path) {
  auto in = open_input(path);
  try {
    return read_instances(in);
  } catch (const FormatError &e) {
    throw FormatError(path + ": " + e.what());
  }
}

DatasetStats compute_stats(const std::vector<LemmaPair> &pairs,
                           const std::vector<Instance> &instances) {
  DatasetStats s;
  s.lemma_pairs = pairs.size();
  std::set<std::string> suffixes;
  for (const auto &p : pairs) {
    if (!p.is_verb_verb()) suffixes.insert(p.suffix);
  }
  s.suffix_inventory = suffixes.size();
  s.instances = instances.size();
  for (const auto &x : instances) ++s.instances_per_suffix[x.suffix];
  return s;
}

std::vector<std::string> word_vocabulary(const std::vector<Instance> &instances) {
  std::set<std::string> words;
  for (const auto &x : instances) {
    words.insert(x.left.begin(), x.left.end());
    words.insert(x.right.begin(), x.right.end());
  }
  return {words.begin(), words.end()};
}

}  // namespace derivgen
