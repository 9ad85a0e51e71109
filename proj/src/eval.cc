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

#include "derivgen/eval.h"

#include <fstream>
#include <iomanip>
#include <ostream>

#include "json.hpp"

#include "derivgen/errors.h"

namespace derivgen {

using ordered_json = nlohmann::ordered_json;

Predictor model_predictor(DerivationModel &model, std::size_t max_len_slack) {
  return [&model, max_len_slack](const Instance &x) {
    return predict(model, x, max_len_slack);
  };
}

Predictor baseline_predictor(const BaselineSystem &baseline) {
  return
      [&baseline](const Instance &x) { return Prediction{baseline.predict(x), false}; };
}

std::map<std::string, double> per_suffix_recall(
    const std::vector<PredictionRecord> &predictions) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
  for (const auto &p : predictions) {
    auto &c = counts[p.suffix];
    c.first += p.correct;
    ++c.second;
  }
  std::map<std::string, double> out;
  for (const auto &[s, c] : counts) {
    out[s] = static_cast<double>(c.first) / static_cast<double>(c.second);
  }
  return out;
}

EvalReport evaluate(const Predictor &predict, const std::vector<Instance> &instances) {
  if (instances.empty()) throw EmptyDatasetError("no instances to evaluate");
  EvalReport r;
  r.predictions.reserve(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Instance &x = instances[i];
    Prediction p = predict(x);
    PredictionRecord rec{i, x.suffix, x.target, p.form, p.form == x.target, p.truncated};
    r.correct += rec.correct;
    r.predictions.push_back(std::move(rec));
  }
  r.accuracy = static_cast<double>(r.correct) / static_cast<double>(instances.size());
  r.per_suffix_recall = per_suffix_recall(r.predictions);
  return r;
}

EvalReport run_evaluation(const Predictor &predict, const EvalSetup &setup,
                          const std::vector<Instance> &train,
                          const std::vector<Instance> &test) {
  if (setup.lexicon == LexiconMode::kSplit && !setup.supports_split) {
    throw UnsupportedEvaluationError(
        setup.system +
        " does not support the split lexicon setting: it can "
        "only choose among derivations attested in training");
  }
  LexiconAudit audit = audit_lexicon(train, test);
  std::string declared = to_string(setup.lexicon);
  if (audit.designation != declared) {
    throw ConfigError("declared " + declared + " lexicon but " +
                      std::to_string(audit.seen_in_train) + " of " +
                      std::to_string(audit.test_stems) +
                      " test stems occur in training (" + audit.designation + ")");
  }
  EvalReport r = evaluate(predict, test);
  r.system = setup.system;
  r.lexicon = declared;
  r.audit = audit;
  return r;
}

void write_report(std::ostream &out, const EvalReport &report) {
  ordered_json header;
  header["type"] = "header";
  header["system"] = report.system;
  header["lexicon"] = report.lexicon;
  header["test_stems"] = report.audit.test_stems;
  header["test_stems_seen_in_train"] = report.audit.seen_in_train;
  header["audit"] = report.audit.designation;
  header["instances"] = report.predictions.size();
  out << header.dump() << '\n';
  for (const auto &p : report.predictions) {
    ordered_json j;
    j["type"] = "prediction";
    j["id"] = p.id;
    j["suffix"] = p.suffix;
    j["gold"] = p.gold;
    j["predicted"] = p.predicted;
    j["correct"] = p.correct;
    j["truncated"] = p.truncated;
    out << j.dump() << '\n';
  }
  ordered_json summary;
  summary["type"] = "summary";
  summary["accuracy"] = report.accuracy;
  summary["correct"] = report.correct;
  summary["total"] = report.predictions.size();
  ordered_json recall = ordered_json::object();
  for (const auto &[s, v] : report.per_suffix_recall) recall[s] = v;
  summary["per_suffix_recall"] = recall;
  out << summary.dump() << '\n';
}

void save_report(const std::string &path, const EvalReport &report) {
  std::ofstream out(path);
  if (!out) throw PathError("cannot write " + path);
  write_report(out, report);
}

std::vector<Instance> probe_templates(const std::vector<Instance> &instances,
                                      const std::string &base) {
  std::vector<Instance> out;
  for (const auto &x : instances) {
    if (x.base == base) out.push_back(x);
  }
  return out;
}

std::vector<ProbeRecord> nonsense_probe(DerivationModel &model,
                                        const std::vector<Instance> &templates,
                                        const std::vector<std::string> &stems,
                                        std::size_t max_len_slack) {
  std::vector<ProbeRecord> out;
  Tape tape;
  for (std::size_t t = 0; t < templates.size(); ++t) {
    for (const auto &stem : stems) {
      Instance x = templates[t];
      x.base = stem;
      x.target.clear();
      EncodedInstance e = model.encode(x);
      tape.reset();
      Generation g =
          model.generate(tape, e, DerivationModel::default_max_len(e, max_len_slack));
      ProbeRecord rec;
      rec.template_id = t;
      rec.stem = stem;
      rec.form = model.chars().decode(g.chars);
      rec.terminated = !g.truncated;
      for (std::size_t c : g.chars) {
        if (c == CharVocab::kBeginOfWord || c == CharVocab::kUnknown) {
          rec.in_alphabet = false;
        }
      }
      out.push_back(std::move(rec));
    }
  }
  return out;
}

void write_probe(std::ostream &out, const std::vector<ProbeRecord> &records) {
  for (const auto &r : records) {
    ordered_json j;
    j["template"] = r.template_id;
    j["stem"] = r.stem;
    j["form"] = r.form;
    j["terminated"] = r.terminated;
    j["in_alphabet"] = r.in_alphabet;
    out << j.dump() << '\n';
  }
}

void write_context_vectors(std::ostream &out, DerivationModel &model,
                           const std::vector<Instance> &instances) {
  Tape tape;
  out << std::setprecision(17);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    tape.reset();
    EncodedInstance e = model.encode(instances[i]);
    Var o = model.context_vector(tape, e);
    out << i;
    for (double v : o.value()) out << '\t' << v;
    out << '\n';
  }
}

}  // namespace derivgen
