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

#ifndef DERIVGEN_RUN_CONFIG_H_
#define DERIVGEN_RUN_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "derivgen/model.h"
#include "derivgen/trainer.h"

namespace derivgen {

// Everything that decides what a run computes. Paths are not part of it,
// so runs that differ only in where files live produce identical
// checkpoints; the manifest records the inputs by digest instead.
struct RunConfig {
  std::string variant = "biLSTM+CTX+BS+POS";
  std::size_t hidden_dim = 100;
  std::size_t num_layers = 3;
  std::size_t char_dim = 100;
  std::size_t pos_dim = 16;
  std::size_t embedding_dim = 300;
  bool recurrent_decoder = false;
  double lstm_init_scale = 0.08;
  double init_scale = 0.2;
  double copy_init_scale = 0.01;

  double learning_rate = 0.1;
  double momentum = 0.9;
  double max_grad_norm = 0.0;
  std::size_t max_epochs = 50;
  std::size_t patience = 5;
  std::size_t candidates = 1;
  std::size_t probe_epochs = 6;
  std::size_t max_len_slack = 10;

  double alpha = 5.0;
  std::string lexicon = "shared";
  double train_ratio = 0.8;
  double dev_ratio = 0.1;
  double test_ratio = 0.1;
  std::uint64_t seed = 1;

  // Throws ConfigError naming the offending field.
  void validate() const;
  ModelConfig model_config() const;
  TrainOptions train_options() const;
  RestartOptions restart_options() const;

  // Fixed key order; values print exactly (reals round-trip).
  std::vector<std::pair<std::string, std::string>> entries() const;
  // entries() as key=value lines.
  std::string to_text() const;
};

}  // namespace derivgen

#endif  // DERIVGEN_RUN_CONFIG_H_
