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

#ifndef DERIVGEN_EVAL_H_
#define DERIVGEN_EVAL_H_

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "derivgen/baseline.h"
#include "derivgen/dataset.h"
#include "derivgen/model.h"
#include "derivgen/trainer.h"

namespace derivgen {

using Predictor = std::function<Prediction(const Instance &)>;

Predictor model_predictor(DerivationModel &model, std::size_t max_len_slack = 10);
Predictor baseline_predictor(const BaselineSystem &baseline);

struct PredictionRecord {
  std::size_t id = 0;  // position in the evaluated instance list
  std::string suffix;
  std::string gold;
  std::string predicted;
  bool correct = false;
  bool truncated = false;
  friend bool operator==(const PredictionRecord &, const PredictionRecord &) = default;
};

struct EvalReport {
  std::string system;
  std::string lexicon;  // declared setting: shared or split
  LexiconAudit audit;
  double accuracy = 0;
  std::size_t correct = 0;
  std::map<std::string, double> per_suffix_recall;
  std::vector<PredictionRecord> predictions;
};

// Exact-match scoring of `predict` over `instances`. Throws
// EmptyDatasetError on an empty list. The header fields are left empty.
EvalReport evaluate(const Predictor &predict, const std::vector<Instance> &instances);

// Recall per gold suffix; suffixes without gold instances are absent.
std::map<std::string, double> per_suffix_recall(
    const std::vector<PredictionRecord> &predictions);

struct EvalSetup {
  std::string system;
  LexiconMode lexicon = LexiconMode::kShared;
  // The n-gram baseline can only choose among attested derivations.
  bool supports_split = true;
};

// Audits stem overlap between train and test before scoring. A declared
// setting the audit contradicts is a ConfigError; split evaluation of a
// system without split support is an UnsupportedEvaluationError.
EvalReport run_evaluation(const Predictor &predict, const EvalSetup &setup,
                          const std::vector<Instance> &train,
                          const std::vector<Instance> &test);

// One JSON object per line: a header, each prediction in id order, then a
// summary. Field order is fixed.
void write_report(std::ostream &out, const EvalReport &report);
void save_report(const std::string &path, const EvalReport &report);

struct ProbeRecord {
  std::size_t template_id = 0;
  std::string stem;
  std::string form;
  bool terminated = false;  // stopped on end-of-word
  bool in_alphabet = true;  // no begin-of-word or unknown symbols emitted
  friend bool operator==(const ProbeRecord &, const ProbeRecord &) = default;
};

// Instances whose base is `base`, in input order.
std::vector<Instance> probe_templates(const std::vector<Instance> &instances,
                                      const std::string &base);

// Puts every stem into every template's base slot and decodes greedily.
// Records are ordered by template, then stem.
std::vector<ProbeRecord> nonsense_probe(DerivationModel &model,
                                        const std::vector<Instance> &templates,
                                        const std::vector<std::string> &stems,
                                        std::size_t max_len_slack = 10);

void write_probe(std::ostream &out, const std::vector<ProbeRecord> &records);

// One row per instance: id, then the context vector o, tab separated.
void write_context_vectors(std::ostream &out, DerivationModel &model,
                           const std::vector<Instance> &instances);

}  // namespace derivgen

#endif  // DERIVGEN_EVAL_H_
