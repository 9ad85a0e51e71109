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

#ifndef DERIVGEN_TRAINER_H_
#define DERIVGEN_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "derivgen/dataset.h"
#include "derivgen/model.h"
#include "derivgen/optimizer.h"

namespace derivgen {

struct TrainOptions {
  SgdOptions sgd;
  std::size_t max_epochs = 50;
  // Stop after this many epochs without a new best monitored accuracy.
  // Zero disables early stopping.
  std::size_t patience = 5;
  std::uint64_t seed = 1;
  bool shuffle = true;
  // Generation budget is len(base) + max_len_slack.
  std::size_t max_len_slack = 10;
};

struct EpochRecord {
  std::size_t epoch = 0;      // 1-based
  std::size_t candidate = 0;  // which initialization, see train_with_restarts
  double mean_loss = 0;
  // Exact-match accuracy on dev, or on train when there is no dev set.
  double monitored_accuracy = 0;
  bool improved = false;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_accuracy = 0;
  bool stopped_early = false;
};

// Greedy prediction for one instance, decoded to a string.
struct Prediction {
  std::string form;
  bool truncated = false;
};
Prediction predict(DerivationModel &model, const Instance &x,
                   std::size_t max_len_slack = 10);

double exact_match_accuracy(DerivationModel &model,
                            const std::vector<Instance> &instances,
                            std::size_t max_len_slack = 10);

// Pure SGD with momentum, one instance per update. Early stopping on dev
// exact-match accuracy (train accuracy if dev is empty), ties broken by lower
// mean training loss; the best epoch's weights are restored before
// returning. `on_epoch` is optional.
TrainResult train_model(DerivationModel &model, const std::vector<Instance> &train,
                        const std::vector<Instance> &dev, const TrainOptions &options,
                        const std::function<void(const EpochRecord &)> &on_epoch = {});

struct RestartOptions {
  // Fresh initializations to try. One means plain training.
  std::size_t candidates = 1;
  // Epochs each candidate trains before they are compared.
  std::size_t probe_epochs = 6;
};

struct RestartResult {
  DerivationModel model;
  TrainResult result;
  std::uint64_t model_seed = 0;
  std::vector<double> probe_accuracy;  // best monitored accuracy per candidate
};

// Builds candidates with make_model(model_seed + k), trains each for
// probe_epochs, keeps the one with the best monitored accuracy (ties: lower
// training loss; a perfect score ends the search) and trains it on to
// max_epochs. Only dev data (or train, if dev is empty) drives the choice.
RestartResult train_with_restarts(
    const std::function<DerivationModel(std::uint64_t)> &make_model,
    std::uint64_t model_seed, const std::vector<Instance> &train,
    const std::vector<Instance> &dev, const TrainOptions &options,
    const RestartOptions &restarts,
    const std::function<void(const EpochRecord &)> &on_epoch = {});

}  // namespace derivgen

#endif  // DERIVGEN_TRAINER_H_
