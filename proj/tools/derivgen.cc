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

// derivgen: build datasets, train and evaluate derivation models, and run
// the n-gram baseline.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "derivgen/baseline.h"
#include "derivgen/checkpoint.h"
#include "derivgen/dataset.h"
#include "derivgen/embeddings.h"
#include "derivgen/errors.h"
#include "derivgen/eval.h"
#include "derivgen/kn_lm.h"
#include "derivgen/manifest.h"
#include "derivgen/run_config.h"
#include "derivgen/synthetic.h"
#include "derivgen/trainer.h"

namespace fs = std::filesystem;
using namespace derivgen;

namespace {

constexpr int kUsageError = 2;
constexpr int kPathError = 3;
constexpr int kUnsupported = 4;

struct Paths {
  std::string config;
  std::string pairs, inflections, corpus;
  std::string train, dev, test, instances;
  std::string embeddings;
  std::string checkpoint;
  std::string out, report, log, arpa, stems;
  std::string manifest;
};

struct DataOptions {
  std::size_t max_rare_pairs = 5;
  bool no_verb_verb = false;
  std::size_t min_tokens = 3;
  std::size_t max_tokens = 50;
};

struct ProbeOptions {
  std::string template_base;
  std::size_t random_stems = 100;
};

void add_run_options(CLI::App &app, RunConfig &c) {
  auto env = [](const std::string &key) { return "DERIVGEN_" + key; };
  auto opt = [&](const std::string &key, auto &field, const std::string &help) {
    app.add_option("--" + key, field, help)
        ->envname(env(key))
        ->capture_default_str()
        ->group("Run configuration");
  };
  opt("variant", c.variant, "model variant, e.g. biLSTM+CTX+BS+POS");
  opt("hidden_dim", c.hidden_dim, "LSTM hidden size h");
  opt("num_layers", c.num_layers, "LSTM layers l");
  opt("char_dim", c.char_dim, "character embedding size d_c");
  opt("pos_dim", c.pos_dim, "POS embedding size");
  opt("embedding_dim", c.embedding_dim, "word embedding size");
  opt("recurrent_decoder", c.recurrent_decoder,
      "condition the decoder on an LSTM over all previous characters");
  opt("lstm_init_scale", c.lstm_init_scale, "uniform init range for LSTM weights");
  opt("init_scale", c.init_scale, "uniform init range for other weights");
  opt("copy_init_scale", c.copy_init_scale, "uniform init range for the copy weights S");
  opt("learning_rate", c.learning_rate, "SGD learning rate");
  opt("momentum", c.momentum, "SGD momentum");
  opt("max_grad_norm", c.max_grad_norm, "gradient clip norm, 0 disables");
  opt("max_epochs", c.max_epochs, "training epochs");
  opt("patience", c.patience, "early stopping patience, 0 disables");
  opt("candidates", c.candidates, "initializations probed before full training");
  opt("probe_epochs", c.probe_epochs, "epochs per probed initialization");
  opt("max_len_slack", c.max_len_slack, "generation budget beyond base length");
  opt("alpha", c.alpha, "context dampening weight");
  opt("lexicon", c.lexicon, "shared or split");
  opt("train_ratio", c.train_ratio, "train share of the split");
  opt("dev_ratio", c.dev_ratio, "dev share of the split");
  opt("test_ratio", c.test_ratio, "test share of the split");
  opt("seed", c.seed, "random seed");
}

CLI::Option *path_option(CLI::App *app, const std::string &name, std::string &field,
                         const std::string &help) {
  return app->add_option("--" + name, field, help);
}

void ensure_dir(const std::string &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw PathError("cannot create " + dir + ": " + ec.message());
}

std::string join(const std::string &dir, const std::string &name) {
  return (fs::path(dir) / name).string();
}

void write_lines(const std::string &path, const std::vector<std::string> &lines) {
  std::ofstream out(path);
  if (!out) throw PathError("cannot write " + path);
  for (const auto &l : lines) out << l << '\n';
}

std::vector<std::string> read_lines(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw PathError("cannot read " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

Manifest start_manifest(const std::string &command, const RunConfig &config,
                        const Paths &paths) {
  Manifest m;
  m.command = command;
  m.config = config;
  if (!paths.config.empty()) m.add_input("config", paths.config);
  return m;
}

void finish_manifest(Manifest &m, const std::string &path) {
  save_manifest(path, m);
  std::cerr << "manifest: " << path << '\n';
}

std::string manifest_path(const Paths &paths, const std::string &fallback) {
  return paths.manifest.empty() ? fallback : paths.manifest;
}

std::array<double, 3> ratios(const RunConfig &c) {
  return {c.train_ratio, c.dev_ratio, c.test_ratio};
}

void write_split(const std::string &dir, const DatasetSplit &split, Manifest &m) {
  save_instances(join(dir, "train.tsv"), split.train);
  save_instances(join(dir, "dev.tsv"), split.dev);
  save_instances(join(dir, "test.tsv"), split.test);
  m.add_output("train", join(dir, "train.tsv"));
  m.add_output("dev", join(dir, "dev.tsv"));
  m.add_output("test", join(dir, "test.tsv"));
}

void write_stats(const std::string &path, const DatasetStats &stats,
                 const DatasetSplit &split) {
  nlohmann::ordered_json j;
  j["lemma_pairs"] = stats.lemma_pairs;
  j["suffix_inventory"] = stats.suffix_inventory;
  j["instances"] = stats.instances;
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto &[s, n] : stats.instances_per_suffix) per[s] = n;
  j["instances_per_suffix"] = per;
  j["train"] = split.train.size();
  j["dev"] = split.dev.size();
  j["test"] = split.test.size();
  std::ofstream out(path);
  if (!out) throw PathError("cannot write " + path);
  out << j.dump(2) << '\n';
}

int run_build_data(const RunConfig &c, const Paths &p, const DataOptions &d) {
  c.validate();
  Manifest m = start_manifest("build-data", c, p);
  LemmaPairOptions po;
  po.max_rare_pairs = d.max_rare_pairs;
  po.add_verb_verb_pairs = !d.no_verb_verb;
  LemmaPairSet pairs = load_lemma_pairs(p.pairs, po);
  m.add_input("pairs", p.pairs);
  InflectionTable inflections;
  if (!p.inflections.empty()) {
    inflections = load_inflections(p.inflections);
    m.add_input("inflections", p.inflections);
  }
  attach_inflections(pairs.pairs, inflections);
  auto corpus = load_corpus(p.corpus);
  m.add_input("corpus", p.corpus);
  for (const auto &s : pairs.dropped_suffixes) {
    std::cerr << "dropped rare suffix " << s << '\n';
  }
  ContextOptions co{d.min_tokens, d.max_tokens};
  auto instances = extract_contexts(corpus, pairs.pairs, inflections, co);
  instances = dampen_contexts(instances, c.alpha, c.seed);
  if (instances.empty()) throw EmptyDatasetError("no contexts found in the corpus");
  auto split = split_dataset(instances, parse_lexicon_mode(c.lexicon), ratios(c), c.seed);
  ensure_dir(p.out);
  write_split(p.out, split, m);
  write_stats(join(p.out, "stats.json"), compute_stats(pairs.pairs, instances), split);
  m.add_output("stats", join(p.out, "stats.json"));
  finish_manifest(m, manifest_path(p, join(p.out, "manifest.json")));
  std::cerr << instances.size() << " instances: " << split.train.size() << " train, "
            << split.dev.size() << " dev, " << split.test.size() << " test\n";
  return 0;
}

int run_synth(const RunConfig &c, const Paths &p, const SyntheticOptions &so_in) {
  c.validate();
  Manifest m = start_manifest("synth", c, p);
  SyntheticOptions so = so_in;
  so.seed = c.seed;
  so.embedding_dim = c.embedding_dim;
  SyntheticData data = make_synthetic(so);
  auto split =
      split_dataset(data.instances, parse_lexicon_mode(c.lexicon), ratios(c), c.seed);
  ensure_dir(p.out);
  write_split(p.out, split, m);
  std::vector<std::string> pair_rows, corpus_rows;
  for (const auto &pr : data.pairs) {
    pair_rows.push_back(pr.base + "\t" + pr.derived + "\t" + pr.suffix + "\t" + pr.pos);
  }
  for (const auto &s : data.corpus) corpus_rows.push_back(join_tokens(s));
  write_lines(join(p.out, "pairs.tsv"), pair_rows);
  write_lines(join(p.out, "corpus.txt"), corpus_rows);
  {
    std::ofstream out(join(p.out, "embeddings.txt"));
    if (!out) throw PathError("cannot write embeddings");
    write_embeddings(out, data.embeddings);
  }
  for (const char *name : {"pairs.tsv", "corpus.txt", "embeddings.txt"}) {
    m.add_output(name, join(p.out, name));
  }
  write_stats(join(p.out, "stats.json"), compute_stats(data.pairs, data.instances),
              split);
  m.add_output("stats", join(p.out, "stats.json"));
  finish_manifest(m, manifest_path(p, join(p.out, "manifest.json")));
  return 0;
}

EmbeddingTable embeddings_for(const RunConfig &c, const Paths &p,
                              const std::vector<Instance> &instances, Manifest &m) {
  std::vector<std::string> vocab = word_vocabulary(instances);
  if (p.embeddings.empty()) {
    std::cerr << "no --embeddings given: using random fixed vectors\n";
    return EmbeddingTable::Random(vocab, c.embedding_dim, c.seed);
  }
  m.add_input("embeddings", p.embeddings);
  EmbeddingTable t = load_embeddings(p.embeddings, vocab, c.embedding_dim);
  for (const auto &w : t.warnings()) std::cerr << "warning: " << w << '\n';
  return t;
}

int run_train(const RunConfig &c, const Paths &p) {
  c.validate();
  Manifest m = start_manifest("train", c, p);
  auto train = load_instances(p.train);
  m.add_input("train", p.train);
  std::vector<Instance> dev;
  if (!p.dev.empty()) {
    dev = load_instances(p.dev);
    m.add_input("dev", p.dev);
  }
  std::vector<Instance> all = train;
  all.insert(all.end(), dev.begin(), dev.end());
  EmbeddingTable emb = embeddings_for(c, p, all, m);
  ModelConfig mc = c.model_config();

  std::optional<std::ofstream> log;
  if (!p.log.empty()) {
    log.emplace(p.log);
    if (!*log) throw PathError("cannot write " + p.log);
  }
  auto on_epoch = [&](const EpochRecord &e) {
    nlohmann::ordered_json j;
    j["candidate"] = e.candidate;
    j["epoch"] = e.epoch;
    j["mean_loss"] = e.mean_loss;
    j["monitored_accuracy"] = e.monitored_accuracy;
    j["improved"] = e.improved;
    std::cerr << j.dump() << '\n';
    if (log) *log << j.dump() << '\n';
  };
  RestartResult r = train_with_restarts(
      [&](std::uint64_t seed) {
        return DerivationModel::ForTraining(mc, train, emb, seed);
      },
      c.seed, train, dev, c.train_options(), c.restart_options(), on_epoch);
  CheckpointMeta meta{c.to_text(), r.result.best_epoch, r.result.best_accuracy,
                      r.model_seed};
  save_checkpoint(p.checkpoint, r.model, meta);
  m.add_output("checkpoint", p.checkpoint);
  if (log) {
    log->close();
    m.add_output("log", p.log);
  }
  finish_manifest(m, manifest_path(p, p.checkpoint + ".manifest.json"));
  std::cerr << "best epoch " << r.result.best_epoch << ", monitored accuracy "
            << r.result.best_accuracy << '\n';
  return 0;
}

// Refreshes the checkpoint's word vectors when an embeddings file is
// given, so that test words outside the training vocabulary resolve.
void refresh_embeddings(Checkpoint &ck, const Paths &p,
                        const std::vector<Instance> &instances, Manifest &m) {
  if (p.embeddings.empty()) return;
  m.add_input("embeddings", p.embeddings);
  ck.model.set_embeddings(load_embeddings(p.embeddings, word_vocabulary(instances),
                                          ck.model.embeddings().dim()));
}

Checkpoint open_checkpoint(const Paths &p, Manifest &m) {
  Checkpoint ck = load_checkpoint(p.checkpoint);
  m.add_input("checkpoint", p.checkpoint);
  return ck;
}

int run_predict(const RunConfig &c, const Paths &p) {
  Manifest m = start_manifest("predict", c, p);
  Checkpoint ck = open_checkpoint(p, m);
  auto instances = load_instances(p.instances);
  m.add_input("instances", p.instances);
  refresh_embeddings(ck, p, instances, m);
  std::ofstream out(p.out);
  if (!out) throw PathError("cannot write " + p.out);
  for (const auto &x : instances) {
    Prediction pr = predict(ck.model, x, c.max_len_slack);
    out << x.base << '\t' << pr.form << '\t' << (pr.truncated ? "truncated" : "ok")
        << '\n';
  }
  out.close();
  m.add_output("predictions", p.out);
  finish_manifest(m, manifest_path(p, p.out + ".manifest.json"));
  return 0;
}

int run_evaluate(const RunConfig &c, const Paths &p) {
  Manifest m = start_manifest("evaluate", c, p);
  Checkpoint ck = open_checkpoint(p, m);
  auto train = load_instances(p.train);
  auto test = load_instances(p.test);
  m.add_input("train", p.train);
  m.add_input("test", p.test);
  refresh_embeddings(ck, p, test, m);
  EvalSetup setup{"derivgen " + ck.model.config().variant.name(),
                  parse_lexicon_mode(c.lexicon), true};
  EvalReport r =
      run_evaluation(model_predictor(ck.model, c.max_len_slack), setup, train, test);
  save_report(p.report, r);
  m.add_output("report", p.report);
  finish_manifest(m, manifest_path(p, p.report + ".manifest.json"));
  std::cout << "accuracy " << r.accuracy << " (" << r.correct << "/"
            << r.predictions.size() << ")\n";
  return 0;
}

int run_baseline(const RunConfig &c, const Paths &p) {
  Manifest m = start_manifest("baseline", c, p);
  EvalSetup setup{"kn-trigram baseline", parse_lexicon_mode(c.lexicon), false};
  if (setup.lexicon == LexiconMode::kSplit) {
    run_evaluation({}, setup, {}, {});  // throws with the explanation
  }
  auto train = load_instances(p.train);
  auto test = load_instances(p.test);
  m.add_input("train", p.train);
  m.add_input("test", p.test);
  BaselineSystem baseline = BaselineSystem::Train(train);
  for (const auto &w : baseline.lm().warnings()) std::cerr << "warning: " << w << '\n';
  if (!p.arpa.empty()) {
    std::ofstream out(p.arpa);
    if (!out) throw PathError("cannot write " + p.arpa);
    baseline.lm().write_arpa(out);
    out.close();
    m.add_output("arpa", p.arpa);
  }
  EvalReport r = run_evaluation(baseline_predictor(baseline), setup, train, test);
  save_report(p.report, r);
  m.add_output("report", p.report);
  finish_manifest(m, manifest_path(p, p.report + ".manifest.json"));
  std::cout << "accuracy " << r.accuracy << " (" << r.correct << "/"
            << r.predictions.size() << ")\n";
  return 0;
}

int run_probe(const RunConfig &c, const Paths &p, const ProbeOptions &po) {
  Manifest m = start_manifest("probe", c, p);
  Checkpoint ck = open_checkpoint(p, m);
  auto instances = load_instances(p.instances);
  m.add_input("instances", p.instances);
  refresh_embeddings(ck, p, instances, m);
  auto templates = probe_templates(instances, po.template_base);
  if (templates.empty()) {
    throw ConfigError("template_base: no instance has base '" + po.template_base + "'");
  }
  std::vector<std::string> stems;
  if (!p.stems.empty()) {
    stems = read_lines(p.stems);
    m.add_input("stems", p.stems);
  } else {
    stems = random_pronounceable_stems(po.random_stems, 1, 3, c.seed);
  }
  auto records = nonsense_probe(ck.model, templates, stems, c.max_len_slack);
  std::ofstream out(p.out);
  if (!out) throw PathError("cannot write " + p.out);
  write_probe(out, records);
  out.close();
  m.add_output("probe", p.out);
  finish_manifest(m, manifest_path(p, p.out + ".manifest.json"));
  std::size_t terminated = 0;
  for (const auto &r : records) terminated += r.terminated;
  std::cout << terminated << "/" << records.size() << " generations terminated\n";
  return 0;
}

int run_export(const RunConfig &c, const Paths &p) {
  Manifest m = start_manifest("export-context", c, p);
  Checkpoint ck = open_checkpoint(p, m);
  auto instances = load_instances(p.instances);
  m.add_input("instances", p.instances);
  refresh_embeddings(ck, p, instances, m);
  std::ofstream out(p.out);
  if (!out) throw PathError("cannot write " + p.out);
  write_context_vectors(out, ck.model, instances);
  out.close();
  m.add_output("context_vectors", p.out);
  finish_manifest(m, manifest_path(p, p.out + ".manifest.json"));
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Context-sensitive derivational morphology generation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value configuration file")
      ->check(CLI::ExistingFile);

  RunConfig config;
  Paths paths;
  DataOptions data;
  ProbeOptions probe;
  SyntheticOptions synth;
  add_run_options(app, config);
  app.add_option("--manifest", paths.manifest, "manifest output path");

  auto *build = app.add_subcommand("build-data", "extract, dampen and split instances");
  path_option(build, "pairs", paths.pairs, "lemma-pair TSV")
      ->required()
      ->check(CLI::ExistingFile);
  path_option(build, "inflections", paths.inflections, "inflection TSV")
      ->check(CLI::ExistingFile);
  path_option(build, "corpus", paths.corpus, "tokenized corpus")
      ->required()
      ->check(CLI::ExistingFile);
  path_option(build, "out", paths.out, "output directory")->required();
  build
      ->add_option("--max_rare_pairs", data.max_rare_pairs,
                   "drop suffixes with this many pairs or fewer")
      ->capture_default_str();
  build->add_flag("--no_verb_verb", data.no_verb_verb, "do not add NULL pairs");
  build->add_option("--min_tokens", data.min_tokens, "shortest sentence kept")
      ->capture_default_str();
  build->add_option("--max_tokens", data.max_tokens, "longest sentence kept")
      ->capture_default_str();

  auto *syn = app.add_subcommand("synth", "generate a synthetic cue-word dataset");
  path_option(syn, "out", paths.out, "output directory")->required();
  syn->add_option("--stems", synth.num_stems, "number of stems")->capture_default_str();
  syn->add_option("--contexts_per_rule", synth.contexts_per_rule,
                  "sentences per stem and rule")
      ->capture_default_str();
  syn->add_flag("--null_only", synth.null_only, "only verb-verb pairs");

  auto *train = app.add_subcommand("train", "train a model and write a checkpoint");
  path_option(train, "train", paths.train, "training instances")
      ->required()
      ->check(CLI::ExistingFile);
  path_option(train, "dev", paths.dev, "dev instances")->check(CLI::ExistingFile);
  path_option(train, "embeddings", paths.embeddings, "word vectors")
      ->check(CLI::ExistingFile);
  path_option(train, "checkpoint", paths.checkpoint, "checkpoint output")->required();
  path_option(train, "log", paths.log, "per-epoch log (JSON lines)");

  auto *base = app.add_subcommand("baseline", "KN trigram selection baseline");
  path_option(base, "train", paths.train, "training instances")
      ->required()
      ->check(CLI::ExistingFile);
  path_option(base, "test", paths.test, "test instances")
      ->required()
      ->check(CLI::ExistingFile);
  path_option(base, "report", paths.report, "report output")->required();
  path_option(base, "arpa", paths.arpa, "also write the language model in ARPA format");

  auto *pred = app.add_subcommand("predict", "predict derived forms");
  path_option(pred, "checkpoint", paths.checkpoint, "checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  path_option(pred, "instances", paths.instances, "instances")
      ->required()
      ->check(CLI::ExistingFile);
  path_option(pred, "embeddings", paths.embeddings, "word vectors")
      ->check(CLI::ExistingFile);
  path_option(pred, "out", paths.out, "predictions output")->required();

  auto *eval = app.add_subcommand("evaluate", "exact-match evaluation report");
  path_option(eval, "checkpoint", paths.checkpoint, "checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  path_option(eval, "train", paths.train, "training instances, for the lexicon audit")
      ->required()
      ->check(CLI::ExistingFile);
  path_option(eval, "test", paths.test, "test instances")
      ->required()
      ->check(CLI::ExistingFile);
  path_option(eval, "embeddings", paths.embeddings, "word vectors")
      ->check(CLI::ExistingFile);
  path_option(eval, "report", paths.report, "report output")->required();

  auto *prb = app.add_subcommand("probe", "substitute nonsense stems into contexts");
  path_option(prb, "checkpoint", paths.checkpoint, "checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  path_option(prb, "instances", paths.instances, "instances holding the templates")
      ->required()
      ->check(CLI::ExistingFile);
  path_option(prb, "embeddings", paths.embeddings, "word vectors")
      ->check(CLI::ExistingFile);
  path_option(prb, "stems", paths.stems, "one stem per line; random stems if absent")
      ->check(CLI::ExistingFile);
  prb->add_option("--template_base", probe.template_base,
                  "base whose contexts are reused")
      ->required();
  prb->add_option("--random_stems", probe.random_stems,
                  "pronounceable stems to draw when --stems is absent")
      ->capture_default_str();
  path_option(prb, "out", paths.out, "probe output")->required();

  auto *exp = app.add_subcommand("export-context", "write context vectors as a matrix");
  path_option(exp, "checkpoint", paths.checkpoint, "checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  path_option(exp, "instances", paths.instances, "instances")
      ->required()
      ->check(CLI::ExistingFile);
  path_option(exp, "embeddings", paths.embeddings, "word vectors")
      ->check(CLI::ExistingFile);
  path_option(exp, "out", paths.out, "output matrix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }
  if (auto *cfg = app.get_config_ptr(); cfg && cfg->count() > 0) {
    paths.config = cfg->as<std::string>();
  }

  try {
    if (*build) return run_build_data(config, paths, data);
    if (*syn) return run_synth(config, paths, synth);
    if (*train) return run_train(config, paths);
    if (*base) return run_baseline(config, paths);
    if (*pred) return run_predict(config, paths);
    if (*eval) return run_evaluate(config, paths);
    if (*prb) return run_probe(config, paths, probe);
    if (*exp) return run_export(config, paths);
  } catch (const ConfigError &e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const UnsupportedEvaluationError &e) {
    std::cerr << "unsupported: " << e.what() << '\n';
    return kUnsupported;
  } catch (const PathError &e) {
    std::cerr << "path error: " << e.what() << '\n';
    return kPathError;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
  return EXIT_FAILURE;
}
