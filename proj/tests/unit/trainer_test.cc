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

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "derivgen/checkpoint.h"
#include "derivgen/errors.h"
#include "derivgen/synthetic.h"
#include "derivgen/trainer.h"
#include "doctest.h"
#include "testing/gradcheck.h"
#include "testing/model_fixture.h"

namespace derivgen {
namespace {

ModelConfig tiny(const std::string &variant, bool recurrent) {
  ModelConfig c;
  c.variant = VariantConfig::Parse(variant);
  c.hidden_dim = 4;
  c.num_layers = 2;
  c.char_dim = 3;
  c.pos_dim = 2;
  c.recurrent_decoder = recurrent;
  // Away from the near-zero init every gradient is far above rounding noise.
  c.lstm_init_scale = 0.5;
  c.init_scale = 0.5;
  c.copy_init_scale = 0.5;
  return c;
}

Instance identity(const std::string &w) {
  return Instance{{"they"}, {"it"}, w, w, "VERB", kNullSuffix};
}

TEST_CASE("copy_init_scale sets only the range of S") {
  ModelConfig a = tiny("biLSTM+CTX+BS+POS", true);
  ModelConfig b = a;
  b.copy_init_scale = 0.01;
  auto ma = testing::random_model_case(a, 3).model;
  auto mb = testing::random_model_case(b, 3).model;
  auto pa = ma.parameters();
  auto pb = mb.parameters();
  REQUIRE(pa.size() == pb.size());
  bool saw_s = false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    INFO(pa[i]->name);
    auto va = pa[i]->value.data();
    auto vb = pb[i]->value.data();
    if (pa[i]->name == "decoder.S") {
      saw_s = true;
      double peak = 0;
      for (double v : vb) peak = std::max(peak, std::abs(v));
      CHECK(peak <= 0.01);
      CHECK(peak > 0.0);
    } else {
      CHECK(std::equal(va.begin(), va.end(), vb.begin(), vb.end()));
    }
  }
  CHECK(saw_s);
  b.copy_init_scale = 0;
  CHECK_THROWS_AS(b.validate(), ConfigError);
}

TEST_CASE("model gradients match finite differences for every variant") {
  for (const char *v : {"biLSTM+BS", "biLSTM+CTX", "biLSTM+CTX+BS", "biLSTM+CTX+BS+POS",
                        "LSTM+CTX+BS+POS", "LSTM+CTX+BS"}) {
    for (bool recurrent : {false, true}) {
      auto mc = testing::random_model_case(tiny(v, recurrent), 5, 3, 3, 4);
      auto e = mc.model.encode(mc.instance);
      auto r = testing::check_gradients([&](Tape &t) { return mc.model.loss(t, e); },
                                        mc.model.parameters());
      INFO(v << " recurrent=" << recurrent << " " << r.worst);
      CHECK(r.max_rel_error < 1e-4);
      CHECK(r.checked > 0);
    }
  }
}

TEST_CASE("one example can be overfit") {
  ModelConfig c;
  c.variant = VariantConfig::Parse("biLSTM+CTX+BS+POS");
  c.hidden_dim = 8;
  c.num_layers = 1;
  c.char_dim = 8;
  auto mc = testing::random_model_case(c, 3);
  std::vector<Instance> train{mc.instance};
  TrainOptions o;
  o.sgd.learning_rate = 0.05;
  o.max_epochs = 300;
  o.patience = 0;
  train_model(mc.model, train, {}, o);
  Tape tape;
  double loss = mc.model.loss(tape, mc.model.encode(mc.instance)).scalar();
  CHECK(loss < 0.01);
  CHECK(predict(mc.model, mc.instance).form == mc.instance.target);
}

TEST_CASE("identity pairs teach the model to copy") {
  auto stems = random_pronounceable_stems(60, 1, 2, 4);
  std::vector<Instance> train;
  for (const auto &s : stems) {
    if (s != "walk") train.push_back(identity(s));
  }
  // The generated stems never use 'w'.
  for (const char *w : {"lawk", "wab", "kiw", "wolp", "tawn"})
    train.push_back(identity(w));
  ModelConfig c;
  c.variant = VariantConfig::Parse("biLSTM+BS");
  c.hidden_dim = 16;
  c.num_layers = 1;
  c.char_dim = 16;
  auto emb = EmbeddingTable::Random(word_vocabulary(train), 4, 1);
  auto m = DerivationModel::ForTraining(c, train, emb, 1);
  TrainOptions o;
  o.sgd.learning_rate = 0.01;
  o.max_epochs = 60;
  o.patience = 0;
  train_model(m, train, {}, o);
  CHECK(predict(m, identity("walk")).form == "walk");
}

TEST_CASE("a suffix rule carries over to an unseen stem") {
  auto stems = random_pronounceable_stems(120, 1, 2, 9);
  std::vector<Instance> train;
  for (const auto &s : stems) {
    if (s == "blor") continue;
    train.push_back(
        Instance{{"the"}, {"of"}, s + "ify", s + "ification", "NOUN", "-ation"});
  }
  ModelConfig c;
  c.variant = VariantConfig::Parse("biLSTM+BS");
  c.hidden_dim = 16;
  c.num_layers = 1;
  c.char_dim = 16;
  c.recurrent_decoder = true;
  auto emb = EmbeddingTable::Random(word_vocabulary(train), 4, 1);
  auto m = DerivationModel::ForTraining(c, train, emb, 2);
  TrainOptions o;
  o.sgd.learning_rate = 0.01;
  o.max_epochs = 30;
  o.patience = 0;
  train_model(m, train, {}, o);
  Instance x{{"the"}, {"of"}, "blorify", "blorification", "NOUN", "-ation"};
  CHECK(predict(m, x).form == "blorification");
}

struct SmallTask {
  std::vector<Instance> train, dev;
  EmbeddingTable embeddings;
  ModelConfig config;
};

SmallTask small_task() {
  SyntheticOptions so;
  so.num_stems = 8;
  so.contexts_per_rule = 2;
  so.embedding_dim = 6;
  auto d = make_synthetic(so);
  auto split = split_dataset(d.instances, LexiconMode::kShared, {0.8, 0.2, 0.0}, 1);
  ModelConfig c;
  c.variant = VariantConfig::Parse("biLSTM+CTX+BS+POS");
  c.hidden_dim = 6;
  c.num_layers = 1;
  c.char_dim = 6;
  return {split.train, split.dev, d.embeddings, c};
}

TrainOptions few_epochs(std::size_t n) {
  TrainOptions o;
  o.sgd.learning_rate = 0.01;
  o.max_epochs = n;
  o.patience = 0;
  return o;
}

std::string checkpoint_bytes(DerivationModel &m) {
  std::ostringstream out;
  write_checkpoint(out, m, {});
  return out.str();
}

TEST_CASE("training is deterministic for a fixed seed") {
  auto t = small_task();
  auto a = DerivationModel::ForTraining(t.config, t.train, t.embeddings, 4);
  auto b = DerivationModel::ForTraining(t.config, t.train, t.embeddings, 4);
  auto ra = train_model(a, t.train, t.dev, few_epochs(3));
  auto rb = train_model(b, t.train, t.dev, few_epochs(3));
  CHECK(checkpoint_bytes(a) == checkpoint_bytes(b));
  REQUIRE(ra.history.size() == rb.history.size());
  for (std::size_t i = 0; i < ra.history.size(); ++i) {
    CHECK(ra.history[i].mean_loss == rb.history[i].mean_loss);
  }
  auto c = DerivationModel::ForTraining(t.config, t.train, t.embeddings, 5);
  train_model(c, t.train, t.dev, few_epochs(3));
  CHECK(checkpoint_bytes(a) != checkpoint_bytes(c));
}

TEST_CASE("the best epoch's weights are restored") {
  auto t = small_task();
  auto m = DerivationModel::ForTraining(t.config, t.train, t.embeddings, 4);
  auto r = train_model(m, t.train, t.dev, few_epochs(4));
  REQUIRE(r.history.size() == 4);
  CHECK(r.best_epoch >= 1);
  CHECK(r.history[r.best_epoch - 1].improved);
  CHECK(exact_match_accuracy(m, t.dev) == r.best_accuracy);
  for (const auto &e : r.history) CHECK(e.monitored_accuracy <= r.best_accuracy);
}

TEST_CASE("patience stops training after epochs without improvement") {
  auto t = small_task();
  auto m = DerivationModel::ForTraining(t.config, t.train, t.embeddings, 4);
  TrainOptions o = few_epochs(40);
  o.sgd.learning_rate = 0.0;  // nothing changes, so nothing improves
  o.patience = 2;
  auto r = train_model(m, t.train, t.dev, o);
  CHECK(r.history.size() <= 40);
  CHECK(r.stopped_early);
  std::size_t since = 0;
  for (const auto &e : r.history) since = e.improved ? 0 : since + 1;
  CHECK(since == 2);
}

TEST_CASE("empty inputs are rejected") {
  auto t = small_task();
  auto m = DerivationModel::ForTraining(t.config, t.train, t.embeddings, 4);
  CHECK_THROWS_AS(train_model(m, {}, t.dev, few_epochs(1)), EmptyDatasetError);
  CHECK_THROWS_AS(exact_match_accuracy(m, {}), EmptyDatasetError);
  CHECK_THROWS_AS(train_model(m, t.train, t.dev, few_epochs(0)), ConfigError);
}

TEST_CASE("one candidate is plain training") {
  auto t = small_task();
  auto make = [&](std::uint64_t s) {
    return DerivationModel::ForTraining(t.config, t.train, t.embeddings, s);
  };
  auto plain = make(7);
  auto rp = train_model(plain, t.train, t.dev, few_epochs(3));
  auto rr = train_with_restarts(make, 7, t.train, t.dev, few_epochs(3), {1, 2});
  CHECK(rr.model_seed == 7);
  CHECK(checkpoint_bytes(plain) == checkpoint_bytes(rr.model));
  CHECK(rr.result.best_epoch == rp.best_epoch);
}

TEST_CASE("restarts keep the candidate with the best probe") {
  auto t = small_task();
  auto make = [&](std::uint64_t s) {
    return DerivationModel::ForTraining(t.config, t.train, t.embeddings, s);
  };
  std::vector<std::size_t> candidates_seen;
  auto r = train_with_restarts(
      make, 20, t.train, t.dev, few_epochs(4), {3, 2}, [&](const EpochRecord &e) {
        if (candidates_seen.empty() || candidates_seen.back() != e.candidate) {
          candidates_seen.push_back(e.candidate);
        }
      });
  REQUIRE(!r.probe_accuracy.empty());
  std::size_t k = r.model_seed - 20;
  REQUIRE(k < r.probe_accuracy.size());
  for (double a : r.probe_accuracy) CHECK(a <= r.probe_accuracy[k]);
  // Probes run in order, then the chosen candidate continues.
  CHECK(candidates_seen.back() == k);
  CHECK(r.result.history.size() == 4);
  // Reproducing the winner by hand gives the same weights.
  auto again = make(r.model_seed);
  train_model(again, t.train, t.dev, few_epochs(4));
  CHECK(checkpoint_bytes(again) == checkpoint_bytes(r.model));

  CHECK_THROWS_AS(train_with_restarts(make, 1, t.train, t.dev, few_epochs(2), {0, 2}),
                  ConfigError);
  CHECK_THROWS_AS(train_with_restarts(make, 1, t.train, t.dev, few_epochs(2), {2, 0}),
                  ConfigError);
}

}  // namespace
}  // namespace derivgen
