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

#include "derivgen/baseline.h"

#include "derivgen/errors.h"

namespace derivgen {

DerivationTable DerivationTable::Build(const std::vector<Instance> &train) {
  DerivationTable t;
  for (const auto &x : train) t.add(x.base, x.target);
  return t;
}

void DerivationTable::add(const std::string &base, const std::string &form) {
  auto &forms = forms_[base];
  forms.insert(base);
  forms.insert(form);
}

std::vector<std::string> DerivationTable::candidates(const std::string &base) const {
  auto it = forms_.find(base);
  if (it == forms_.end()) return {base};
  return {it->second.begin(), it->second.end()};
}

std::vector<std::string> fill_slot(const std::vector<std::string> &left,
                                   const std::string &form,
                                   const std::vector<std::string> &right) {
  std::vector<std::string> s(left);
  s.push_back(form);
  s.insert(s.end(), right.begin(), right.end());
  return s;
}

std::string select_derivation(const KnLm &lm, const std::vector<std::string> &left,
                              const std::vector<std::string> &right,
                              const std::vector<std::string> &candidates) {
  if (candidates.empty()) throw ConfigError("select_derivation: no candidates");
  const std::string *best = nullptr;
  double best_score = 0;
  for (const auto &c : candidates) {
    double s = lm.score_sentence(fill_slot(left, c, right));
    if (!best || s > best_score || (s == best_score && c < *best)) {
      best = &c;
      best_score = s;
    }
  }
  return *best;
}

BaselineSystem BaselineSystem::Train(const std::vector<Instance> &train,
                                     const KnOptions &options) {
  if (train.empty()) throw EmptyDatasetError("baseline: empty training set");
  std::vector<Sentence> corpus;
  corpus.reserve(train.size());
  for (const auto &x : train) corpus.push_back(fill_slot(x.left, x.target, x.right));
  BaselineSystem b;
  b.lm_ = KnLm::Train(corpus, options);
  b.table_ = DerivationTable::Build(train);
  return b;
}

std::string BaselineSystem::predict(const Instance &x) const {
  return select_derivation(lm_, x.left, x.right, table_.candidates(x.base));
}

}  // namespace derivgen
