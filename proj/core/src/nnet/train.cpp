// core/src/nnet/train.cpp

// Copyright 2026  The uti-detect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "uti/nnet/train.hpp"

#include <cmath>
#include <numeric>
#include <algorithm>

#include "uti/digest.hpp"
#include "uti/error.hpp"
#include "uti/rng.hpp"
#include "uti/text_io.hpp"

namespace uti::nnet {

std::string TrainModeName(TrainMode m) {
  switch (m) {
    case TrainMode::kScratch: return "scratch";
    case TrainMode::kPooled: return "pooled";
    case TrainMode::kFinetune: return "finetune";
  }
  return "scratch";
}

TrainMode ParseTrainMode(const std::string &name) {
  if (name == "scratch") return TrainMode::kScratch;
  if (name == "pooled") return TrainMode::kPooled;
  if (name == "finetune") return TrainMode::kFinetune;
  throw InputError("unknown training mode '" + name + "'");
}

TrainConfig TrainConfig::Defaults(TrainMode mode) {
  TrainConfig c;
  c.mode = mode;
  switch (mode) {
    case TrainMode::kScratch: c.learning_rate = 0.1; c.epochs = 200; break;
    case TrainMode::kPooled: c.learning_rate = 0.1; c.epochs = 50; break;
    case TrainMode::kFinetune: c.learning_rate = 0.001; c.epochs = 100; break;
  }
  return c;
}

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InputError("learning rate must be positive");
  }
  if (epochs < 0) throw InputError("epochs must be >= 0");
  if (minibatch < 1) throw InputError("minibatch must be >= 1");
  if (!(l2_weight >= 0.0) || !std::isfinite(l2_weight)) {
    throw InputError("l2 weight must be >= 0");
  }
}

std::string EpochLogCsv(const std::vector<EpochRecord> &log) {
  std::string out = "epoch,train_loss,val_accuracy\n";
  for (const auto &r : log) {
    out += std::to_string(r.epoch) + "," + FormatReal(r.train_loss, 6) + "," +
           FormatReal(r.val_accuracy, 6) + "\n";
  }
  return out;
}

template <class T>
void SgdStep(Model<T> &model, const std::vector<AlignedVector<T>> &gradients, double lr) {
  const T step = static_cast<T>(lr);
  for (std::size_t i = 0; i < gradients.size(); ++i) {
    auto &p = model.params()[i].data;
    const auto &g = gradients[i];
    for (std::size_t j = 0; j < p.size(); ++j) p[j] -= step * g[j];
  }
}

template void SgdStep(Model<float> &, const std::vector<AlignedVector<float>> &, double);
template void SgdStep(Model<double> &, const std::vector<AlignedVector<double>> &, double);

std::vector<Posterior> InferAll(const ModelState &model, const std::vector<Sample> &samples,
                                std::size_t chunk) {
  std::vector<Posterior> out;
  out.reserve(samples.size());
  const auto ptrs = Pointers(samples);
  for (std::size_t start = 0; start < ptrs.size(); start += chunk) {
    const std::size_t n = std::min(chunk, ptrs.size() - start);
    auto part = Infer(model, Batch(ptrs.data() + start, n));
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

double Accuracy(const ModelState &model, const std::vector<Sample> &samples) {
  if (samples.empty()) throw InputError("accuracy over an empty sample set");
  const auto post = InferAll(model, samples);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (Predict(post[i]) == samples[i].label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

TrainResult Train(const ModelState &initial, const std::vector<Sample> &train,
                  const std::vector<Sample> &validation, const TrainConfig &config,
                  const EpochCallback &on_epoch) {
  config.Validate();
  if (validation.empty()) throw InputError("validation set is empty");
  TrainResult result{initial, {}};
  if (config.epochs == 0) return result;
  if (train.empty()) throw InputError("training set is empty");

  ModelState model = initial;
  model.meta.seed = config.seed;
  model.meta.mode = TrainModeName(config.mode);
  Rng rng(config.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<const Sample *> batch;
  bool have_best = false;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.Shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.minibatch) {
      const std::size_t n = std::min<std::size_t>(config.minibatch, order.size() - start);
      batch.clear();
      for (std::size_t i = 0; i < n; ++i) batch.push_back(&train[order[start + i]]);
      LossAndGradient<float> lg;
      try {
        lg = ComputeLossAndGradients(model, Batch(batch.data(), batch.size()), config.l2_weight);
      } catch (const NumericError &e) {
        throw DivergenceError("epoch " + std::to_string(epoch) + ": " + e.what(),
                              EpochLogCsv(result.log));
      }
      if (!std::isfinite(lg.loss)) {
        throw DivergenceError("epoch " + std::to_string(epoch) + ": non-finite loss",
                              EpochLogCsv(result.log));
      }
      loss_sum += lg.loss * static_cast<double>(n);
      SgdStep(model, lg.gradients, config.learning_rate);
    }
    EpochRecord rec{epoch, loss_sum / static_cast<double>(order.size()), 0.0};
    try {
      rec.val_accuracy = Accuracy(model, validation);
    } catch (const NumericError &e) {
      throw DivergenceError("epoch " + std::to_string(epoch) + " validation: " + e.what(),
                            EpochLogCsv(result.log));
    }
    result.log.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (!have_best || rec.val_accuracy > result.model.meta.validation_accuracy) {
      have_best = true;
      result.model = model;
      result.model.meta.epoch = epoch;
      result.model.meta.validation_accuracy = rec.val_accuracy;
    }
  }
  return result;
}

TrainResult Finetune(const ModelState &pretrained, const ArchitectureConfig &arch,
                     const std::vector<Sample> &train, const std::vector<Sample> &validation,
                     const TrainConfig &config, const EpochCallback &on_epoch) {
  if (pretrained.arch().Fingerprint() != arch.Fingerprint()) {
    throw IncompatibleError("pretrained architecture " + HexDigest(pretrained.arch().Fingerprint()) +
                            " does not match requested " + HexDigest(arch.Fingerprint()));
  }
  return Train(pretrained, train, validation, config, on_epoch);
}

}  // namespace uti::nnet
