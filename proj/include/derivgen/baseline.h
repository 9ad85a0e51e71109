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

#ifndef DERIVGEN_BASELINE_H_
#define DERIVGEN_BASELINE_H_

// Language-model baseline: fill the slot with every known form of the base
// and keep the sentence the trigram model likes best.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "derivgen/dataset.h"
#include "derivgen/kn_lm.h"

namespace derivgen {

// base lemma -> surface forms seen for it in training, plus the base itself.
class DerivationTable {
 public:
  static DerivationTable Build(const std::vector<Instance> &train);

  void add(const std::string &base, const std::string &form);
  // Sorted. A base never seen in training yields just {base}.
  std::vector<std::string> candidates(const std::string &base) const;
  bool contains(const std::string &base) const { return forms_.count(base) > 0; }
  std::size_t size() const { return forms_.size(); }

 private:
  std::map<std::string, std::set<std::string>> forms_;
};

// Whole sentence left + form + right, in token order.
std::vector<std::string> fill_slot(const std::vector<std::string> &left,
                                   const std::string &form,
                                   const std::vector<std::string> &right);

// Argmax of score_sentence over the candidates; ties go to the
// lexicographically smallest form. Throws ConfigError if empty.
std::string select_derivation(const KnLm &lm, const std::vector<std::string> &left,
                              const std::vector<std::string> &right,
                              const std::vector<std::string> &candidates);

class BaselineSystem {
 public:
  // Trains the language model on the training sentences with their gold
  // forms in the slot.
  static BaselineSystem Train(const std::vector<Instance> &train,
                              const KnOptions &options = {});

  std::string predict(const Instance &x) const;
  const KnLm &lm() const { return lm_; }
  const DerivationTable &table() const { return table_; }

 private:
  KnLm lm_;
  DerivationTable table_;
};

}  // namespace derivgen

#endif  // DERIVGEN_BASELINE_H_
