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

#include "derivgen/run_config.h"

#include <charconv>
#include <cmath>

#include "derivgen/dataset.h"
#include "derivgen/errors.h"

namespace derivgen {
namespace {

void require(bool ok, const std::string &field, const std::string &what) {
  if (!ok) throw ConfigError(field + ": " + what);
}

// Shortest text that reads back as the same double.
std::string real(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

void RunConfig::validate() const {
  require(hidden_dim > 0, "hidden_dim", "must be positive");
  require(num_layers > 0, "num_layers", "must be positive");
  require(char_dim > 0, "char_dim", "must be positive");
  require(pos_dim > 0, "pos_dim", "must be positive");
  require(embedding_dim > 0, "embedding_dim", "must be positive");
  require(lstm_init_scale > 0, "lstm_init_scale", "must be positive");
  require(init_scale > 0, "init_scale", "must be positive");
  require(copy_init_scale > 0, "copy_init_scale", "must be positive");
  require(learning_rate > 0, "learning_rate", "must be positive");
  require(momentum >= 0 && momentum < 1, "momentum", "must be in [0, 1)");
  require(max_grad_norm >= 0, "max_grad_norm", "must not be negative");
  require(max_epochs > 0, "max_epochs", "must be positive");
  require(candidates > 0, "candidates", "must be positive");
  require(candidates == 1 || probe_epochs > 0, "probe_epochs",
          "must be positive with several candidates");
  require(alpha > 0, "alpha", "must be positive");
  require(train_ratio >= 0 && dev_ratio >= 0 && test_ratio >= 0, "ratios",
          "must not be negative");
  require(std::abs(train_ratio + dev_ratio + test_ratio - 1.0) < 1e-9, "ratios",
          "must sum to 1");
  parse_lexicon_mode(lexicon);
  model_config().validate();
}

ModelConfig RunConfig::model_config() const {
  ModelConfig c;
  c.variant = VariantConfig::Parse(variant);
  c.hidden_dim = hidden_dim;
  c.num_layers = num_layers;
  c.char_dim = char_dim;
  c.pos_dim = pos_dim;
  c.recurrent_decoder = recurrent_decoder;
  c.lstm_init_scale = lstm_init_scale;
  c.init_scale = init_scale;
  c.copy_init_scale = copy_init_scale;
  return c;
}

TrainOptions RunConfig::train_options() const {
  TrainOptions o;
  o.sgd.learning_rate = learning_rate;
  o.sgd.momentum = momentum;
  o.sgd.max_grad_norm = max_grad_norm;
  o.max_epochs = max_epochs;
  o.patience = patience;
  o.seed = seed;
  o.max_len_slack = max_len_slack;
  return o;
}

RestartOptions RunConfig::restart_options() const {
  return RestartOptions{candidates, probe_epochs};
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  return {
      {"variant", variant},
      {"hidden_dim", std::to_string(hidden_dim)},
      {"num_layers", std::to_string(num_layers)},
      {"char_dim", std::to_string(char_dim)},
      {"pos_dim", std::to_string(pos_dim)},
      {"embedding_dim", std::to_string(embedding_dim)},
      {"recurrent_decoder", recurrent_decoder ? "true" : "false"},
      {"lstm_init_scale", real(lstm_init_scale)},
      {"init_scale", real(init_scale)},
      {"copy_init_scale", real(copy_init_scale)},
      {"learning_rate", real(learning_rate)},
      {"momentum", real(momentum)},
      {"max_grad_norm", real(max_grad_norm)},
      {"max_epochs", std::to_string(max_epochs)},
      {"patience", std::to_string(patience)},
      {"candidates", std::to_string(candidates)},
      {"probe_epochs", std::to_string(probe_epochs)},
      {"max_len_slack", std::to_string(max_len_slack)},
      {"alpha", real(alpha)},
      {"lexicon", lexicon},
      {"train_ratio", real(train_ratio)},
      {"dev_ratio", real(dev_ratio)},
      {"test_ratio", real(test_ratio)},
      {"seed", std::to_string(seed)},
  };
}

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto &[k, v] : entries()) out += k + "=" + v + "\n";
  return out;
}

}  // namespace derivgen
