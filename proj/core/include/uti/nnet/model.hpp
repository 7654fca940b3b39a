// core/include/uti/nnet/model.hpp

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

#ifndef UTI_NNET_MODEL_HPP_
#define UTI_NNET_MODEL_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uti/aligned.hpp"
#include "uti/articulation.hpp"
#include "uti/nnet/architecture.hpp"
#include "uti/sample.hpp"

namespace uti::nnet {

template <class T>
struct Tensor {
  std::string name;
  std::vector<int> shape;
  AlignedVector<T> data;
  bool is_weight = false;  // receives the L2 penalty

  std::size_t size() const { return data.size(); }
  bool operator==(const Tensor &) const = default;
};

/// Trainable tensors, in this order.
enum ParamIndex : std::size_t {
  kConv1Weight,
  kConv1Bias,
  kConv2Weight,
  kConv2Bias,
  kAudioWeight,
  kAudioBias,
  kBnGamma,
  kBnBeta,
  kFc1Weight,
  kFc1Bias,
  kFc2Weight,
  kFc2Bias,
  kOutWeight,
  kOutBias,
  kNumParams,
};

struct TrainingMeta {
  int epoch = 0;
  double validation_accuracy = 0.0;
  std::uint64_t seed = 0;
  std::string mode = "none";
  bool operator==(const TrainingMeta &) const = default;
};

/// Every parameter of the classifier plus batch-norm running statistics.
template <class T>
class Model {
 public:
  /// Zero weights, identity batch-norm affine, running stats (0, 1) and not
  /// yet usable for inference.
  explicit Model(ArchitectureConfig arch);

  /// Fan-in scaled uniform weights (limit sqrt(6 / fan_in)), zero biases.
  static Model Initialize(const ArchitectureConfig &arch, std::uint64_t seed);

  const ArchitectureConfig &arch() const { return arch_; }
  std::vector<Tensor<T>> &params() { return params_; }
  const std::vector<Tensor<T>> &params() const { return params_; }
  Tensor<T> &param(ParamIndex i) { return params_[i]; }
  const Tensor<T> &param(ParamIndex i) const { return params_[i]; }

  AlignedVector<T> running_mean;
  AlignedVector<T> running_var;
  /// Set once a training-mode pass has populated the running statistics.
  bool running_stats_ready = false;
  TrainingMeta meta;

  std::size_t NumParameters() const;

  template <class U>
  Model<U> Cast() const {
    Model<U> out(arch_);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      out.params()[i].data.assign(params_[i].data.begin(), params_[i].data.end());
    }
    out.running_mean.assign(running_mean.begin(), running_mean.end());
    out.running_var.assign(running_var.begin(), running_var.end());
    out.running_stats_ready = running_stats_ready;
    out.meta = meta;
    return out;
  }

  bool operator==(const Model &) const = default;

 private:
  ArchitectureConfig arch_;
  std::vector<Tensor<T>> params_;
};

using ModelState = Model<float>;

enum class Mode { kTrain, kInfer };

using Posterior = std::array<double, kNumClasses>;
using Batch = std::span<const Sample *const>;

/// Posteriors for a batch. Training mode normalises with batch statistics
/// and updates the running averages; inference mode uses the running
/// averages and throws StateError before they exist.
template <class T>
std::vector<Posterior> Forward(Model<T> &model, Batch batch, Mode mode);

/// Inference-only overload usable on a const model.
template <class T>
std::vector<Posterior> Infer(const Model<T> &model, Batch batch);

template <class T>
struct LossAndGradient {
  double loss = 0.0;           // cross-entropy + L2 term
  double cross_entropy = 0.0;  // mean over the batch
  std::vector<AlignedVector<T>> gradients;  // parallel to Model::params()
  /// Hash of every ReLU on/off decision and max-pool choice in the pass.
  /// Finite-difference checks use it to skip coordinates whose perturbation
  /// crosses a kink.
  std::uint64_t activation_signature = 0;
};

/// Training-mode forward and backward pass over a labelled batch.
/// Loss = mean cross-entropy + l2_weight * 0.5 * sum of squared weights
/// (kernels and fully-connected matrices; biases and batch-norm parameters
/// are excluded). Throws NumericError naming the first layer whose output
/// is not finite.
template <class T>
LossAndGradient<T> ComputeLossAndGradients(Model<T> &model, Batch batch, double l2_weight,
                                           bool want_signature = false);

/// Convenience: pointer views over a sample vector.
std::vector<const Sample *> Pointers(const std::vector<Sample> &samples);

/// Argmax with the first index winning ties.
ArticulationClass Predict(const Posterior &p);

extern template class Model<float>;
extern template class Model<double>;

}  // namespace uti::nnet

#endif  // UTI_NNET_MODEL_HPP_
