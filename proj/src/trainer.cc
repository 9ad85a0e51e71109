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

#include "derivgen/trainer.h"

#include <memory>
#include <numeric>
#include <random>

#include "derivgen/errors.h"

namespace derivgen {

Prediction predict(DerivationModel &model, const Instance &x, std::size_t max_len_slack) {
  EncodedInstance e = model.encode(x);
  Tape tape;
  Generation g =
      model.generate(tape, e, DerivationModel::default_max_len(e, max_len_slack));
  return {model.chars().decode(g.chars), g.truncated};
}

double exact_match_accuracy(DerivationModel &model,
                            const std::vector<Instance> &instances,
                            std::size_t max_len_slack) {
  if (instances.empty()) throw EmptyDatasetError("no instances to score");
  std::size_t correct = 0;
  for (const auto &x : instances) {
    if (predict(model, x, max_len_slack).form == x.target) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(instances.size());
}

namespace {

// Training state for one model, so that a run can be paused after a few
// epochs and resumed later.
class Session {
 public:
  Session(DerivationModel &model, const std::vector<Instance> &train,
          const std::vector<Instance> &dev, const TrainOptions &options,
          std::size_t candidate)
      : model_(model),
        monitor_(dev.empty() ? train : dev),
        options_(options),
        candidate_(candidate),
        params_(model.parameters()),
        best_(params_.size()),
        order_(train.size()),
        rng_(options.seed) {
    if (train.empty()) throw EmptyDatasetError("empty training set");
    if (options.max_epochs == 0) throw ConfigError("max_epochs must be positive");
    encoded_.reserve(train.size());
    for (const auto &x : train) encoded_.push_back(model.encode(x));
    std::iota(order_.begin(), order_.end(), 0);
    zero_grads(params_);
  }

  // Runs up to `epochs` more epochs, never past max_epochs. Returns false
  // once training is over.
  bool run(std::size_t epochs, const std::function<void(const EpochRecord &)> &on_epoch) {
    for (std::size_t k = 0; k < epochs && !done(); ++k) epoch(on_epoch);
    return !done();
  }

  bool done() const { return stopped_ || result_.history.size() >= options_.max_epochs; }

  const TrainResult &result() const { return result_; }
  double best_loss() const { return best_loss_; }

  TrainResult finish() {
    for (std::size_t i = 0; i < params_.size(); ++i) params_[i]->value = best_[i];
    return result_;
  }

 private:
  void epoch(const std::function<void(const EpochRecord &)> &on_epoch) {
    if (options_.shuffle) {
      for (std::size_t i = order_.size(); i > 1; --i) {
        std::swap(order_[i - 1], order_[rng_() % i]);
      }
    }
    double total = 0;
    for (std::size_t idx : order_) {
      tape_.reset();
      Var loss = model_.loss(tape_, encoded_[idx]);
      total += loss.scalar();
      tape_.backward(loss);
      sgd_momentum_step(params_, options_.sgd);
    }
    EpochRecord rec;
    rec.epoch = result_.history.size() + 1;
    rec.candidate = candidate_;
    rec.mean_loss = total / static_cast<double>(encoded_.size());
    rec.monitored_accuracy =
        exact_match_accuracy(model_, monitor_, options_.max_len_slack);
    // Ties on accuracy go to the lower training loss.
    rec.improved =
        rec.epoch == 1 || rec.monitored_accuracy > result_.best_accuracy ||
        (rec.monitored_accuracy == result_.best_accuracy && rec.mean_loss < best_loss_);
    if (rec.improved) {
      result_.best_epoch = rec.epoch;
      result_.best_accuracy = rec.monitored_accuracy;
      best_loss_ = rec.mean_loss;
      for (std::size_t i = 0; i < params_.size(); ++i) best_[i] = params_[i]->value;
      since_best_ = 0;
    } else {
      ++since_best_;
    }
    result_.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (options_.patience > 0 && since_best_ >= options_.patience) {
      stopped_ = true;
      result_.stopped_early = rec.epoch < options_.max_epochs;
    }
  }

  DerivationModel &model_;
  const std::vector<Instance> &monitor_;
  TrainOptions options_;
  std::size_t candidate_;
  std::vector<EncodedInstance> encoded_;
  std::vector<Parameter *> params_;
  std::vector<Tensor> best_;
  std::vector<std::size_t> order_;
  std::mt19937_64 rng_;
  Tape tape_;
  TrainResult result_;
  std::size_t since_best_ = 0;
  double best_loss_ = 0;
  bool stopped_ = false;
};

}  // namespace

TrainResult train_model(DerivationModel &model, const std::vector<Instance> &train,
                        const std::vector<Instance> &dev, const TrainOptions &options,
                        const std::function<void(const EpochRecord &)> &on_epoch) {
  Session s(model, train, dev, options, 0);
  s.run(options.max_epochs, on_epoch);
  return s.finish();
}

RestartResult train_with_restarts(
    const std::function<DerivationModel(std::uint64_t)> &make_model,
    std::uint64_t model_seed, const std::vector<Instance> &train,
    const std::vector<Instance> &dev, const TrainOptions &options,
    const RestartOptions &restarts,
    const std::function<void(const EpochRecord &)> &on_epoch) {
  if (restarts.candidates == 0) throw ConfigError("need at least one candidate");
  if (restarts.candidates > 1 && restarts.probe_epochs == 0) {
    throw ConfigError("probe_epochs must be positive with several candidates");
  }
  std::unique_ptr<DerivationModel> best_model;
  std::unique_ptr<Session> best;
  std::vector<double> probes;
  std::uint64_t chosen = model_seed;
  for (std::size_t k = 0; k < restarts.candidates; ++k) {
    auto model = std::make_unique<DerivationModel>(make_model(model_seed + k));
    auto session = std::make_unique<Session>(*model, train, dev, options, k);
    if (restarts.candidates > 1) session->run(restarts.probe_epochs, on_epoch);
    const TrainResult &r = session->result();
    probes.push_back(r.best_accuracy);
    bool better = !best || r.best_accuracy > best->result().best_accuracy ||
                  (r.best_accuracy == best->result().best_accuracy &&
                   session->best_loss() < best->best_loss());
    if (better) {
      best_model = std::move(model);
      best = std::move(session);
      chosen = model_seed + k;
    }
    // Nothing can beat a perfect score on accuracy alone.
    if (restarts.candidates > 1 && best->result().best_accuracy == 1.0) break;
  }
  best->run(options.max_epochs, on_epoch);
  TrainResult result = best->finish();
  best.reset();
  return RestartResult{std::move(*best_model), result, chosen, probes};
}

}  // namespace derivgen
