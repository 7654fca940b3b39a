// core/include/uti/nnet/train.hpp

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

#ifndef UTI_NNET_TRAIN_HPP_
#define UTI_NNET_TRAIN_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "uti/nnet/model.hpp"

namespace uti::nnet {

enum class TrainMode { kScratch, kPooled, kFinetune };

std::string TrainModeName(TrainMode m);
/// Throws InputError for unknown names.
TrainMode ParseTrainMode(const std::string &name);

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 200;
  int minibatch = 128;
  double l2_weight = 0.1;
  std::uint64_t seed = 0;
  TrainMode mode = TrainMode::kScratch;

  /// scratch: 0.1 / 200 epochs, pooled: 0.1 / 50, finetune: 0.001 / 100.
  static TrainConfig Defaults(TrainMode mode);
  void Validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_accuracy = 0.0;
  bool operator==(const EpochRecord &) const = default;
};

/// CSV with header `epoch,train_loss,val_accuracy`.
std::string EpochLogCsv(const std::vector<EpochRecord> &log);

struct TrainResult {
  ModelState model;
  std::vector<EpochRecord> log;
};

using EpochCallback = std::function<void(const EpochRecord &)>;

/// Minibatch SGD from `initial`. The order of the training set is reshuffled
/// every epoch from the config seed; the last partial minibatch is kept.
/// Returns the state after the epoch with the highest validation accuracy
/// (earliest wins ties). With zero epochs `initial` comes back unchanged.
/// Throws DivergenceError carrying the partial log on a non-finite loss.
TrainResult Train(const ModelState &initial, const std::vector<Sample> &train,
                  const std::vector<Sample> &validation, const TrainConfig &config,
                  const EpochCallback &on_epoch = {});

/// Train starting from `pretrained`, after checking that its architecture
/// fingerprint matches `arch` (IncompatibleError otherwise).
TrainResult Finetune(const ModelState &pretrained, const ArchitectureConfig &arch,
                     const std::vector<Sample> &train, const std::vector<Sample> &validation,
                     const TrainConfig &config, const EpochCallback &on_epoch = {});

/// One update: param -= lr * gradient, for every trainable tensor.
template <class T>
void SgdStep(Model<T> &model, const std::vector<AlignedVector<T>> &gradients, double lr);

/// Inference-mode posteriors, evaluated in chunks to bound memory.
std::vector<Posterior> InferAll(const ModelState &model, const std::vector<Sample> &samples,
                                std::size_t chunk = 64);

double Accuracy(const ModelState &model, const std::vector<Sample> &samples);

}  // namespace uti::nnet

#endif  // UTI_NNET_TRAIN_HPP_
