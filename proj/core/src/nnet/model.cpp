// core/src/nnet/model.cpp

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

#include "uti/nnet/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "uti/digest.hpp"
#include "uti/error.hpp"
#include "uti/rng.hpp"

namespace uti::nnet {
namespace {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using MapMat = Eigen::Map<Mat<T>>;
template <class T>
using ConstMapMat = Eigen::Map<const Mat<T>>;

// Column matrix for a valid k x k convolution: row (c*k + ki)*k + kj holds
// x[c][i + ki][j + kj] for every output position (i, j).
template <class T>
void Im2Col(const T *x, int channels, int rows, int cols, int k, T *col) {
  const int out_rows = rows - k + 1;
  const int out_cols = cols - k + 1;
  const std::size_t plane = static_cast<std::size_t>(out_rows) * out_cols;
  for (int c = 0; c < channels; ++c) {
    for (int ki = 0; ki < k; ++ki) {
      for (int kj = 0; kj < k; ++kj) {
        T *dst = col + (static_cast<std::size_t>(c * k + ki) * k + kj) * plane;
        for (int i = 0; i < out_rows; ++i) {
          const T *src = x + (static_cast<std::size_t>(c) * rows + i + ki) * cols + kj;
          std::copy(src, src + out_cols, dst + static_cast<std::size_t>(i) * out_cols);
        }
      }
    }
  }
}

// Adjoint of Im2Col; accumulates into dx.
template <class T>
void Col2Im(const T *col, int channels, int rows, int cols, int k, T *dx) {
  const int out_rows = rows - k + 1;
  const int out_cols = cols - k + 1;
  const std::size_t plane = static_cast<std::size_t>(out_rows) * out_cols;
  for (int c = 0; c < channels; ++c) {
    for (int ki = 0; ki < k; ++ki) {
      for (int kj = 0; kj < k; ++kj) {
        const T *src = col + (static_cast<std::size_t>(c * k + ki) * k + kj) * plane;
        for (int i = 0; i < out_rows; ++i) {
          T *dst = dx + (static_cast<std::size_t>(c) * rows + i + ki) * cols + kj;
          const T *s = src + static_cast<std::size_t>(i) * out_cols;
          for (int j = 0; j < out_cols; ++j) dst[j] += s[j];
        }
      }
    }
  }
}

// Max pooling with stride = size, floor semantics. idx receives the flat
// input index of each winner; the first maximum in scan order wins.
template <class T>
void MaxPool(const T *x, int channels, int rows, int cols, int p, T *out, std::int32_t *idx) {
  const int out_rows = rows / p;
  const int out_cols = cols / p;
  for (int c = 0; c < channels; ++c) {
    const std::size_t base = static_cast<std::size_t>(c) * rows * cols;
    for (int i = 0; i < out_rows; ++i) {
      for (int j = 0; j < out_cols; ++j) {
        std::size_t best = base + static_cast<std::size_t>(i * p) * cols + j * p;
        for (int di = 0; di < p; ++di) {
          for (int dj = 0; dj < p; ++dj) {
            const std::size_t at = base + static_cast<std::size_t>(i * p + di) * cols + j * p + dj;
            if (x[at] > x[best]) best = at;
          }
        }
        const std::size_t o = (static_cast<std::size_t>(c) * out_rows + i) * out_cols + j;
        out[o] = x[best];
        idx[o] = static_cast<std::int32_t>(best - base) + static_cast<std::int32_t>(base);
      }
    }
  }
}

template <class T>
void CheckFinite(std::span<const T> values, const char *layer) {
  for (T v : values) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string("non-finite activation in layer ") + layer);
    }
  }
}

template <class T>
void CheckFinite(const Mat<T> &m, const char *layer) {
  CheckFinite(std::span<const T>(m.data(), static_cast<std::size_t>(m.size())), layer);
}

template <class T>
struct Activations {
  int batch = 0;
  AlignedVector<T> ultrasound_in;  // B x C x H x W
  AlignedVector<T> conv1;          // post-ReLU, B x F1 x H1 x W1
  std::vector<std::int32_t> pool1_idx;
  AlignedVector<T> pool1;          // B x F1 x P1h x P1w
  AlignedVector<T> conv2;          // post-ReLU
  std::vector<std::int32_t> pool2_idx;
  Mat<T> audio_in;               // B x (frames * dim)
  Mat<T> audio_hidden;           // post-ReLU
  Mat<T> concat;                 // B x D, before batch norm
  Mat<T> normalized;             // x-hat
  Eigen::Matrix<T, 1, Eigen::Dynamic> inv_std;
  Eigen::Matrix<T, 1, Eigen::Dynamic> batch_mean;
  Eigen::Matrix<T, 1, Eigen::Dynamic> batch_var;
  Mat<T> bn_out;
  Mat<T> hidden1;                // post-ReLU
  Mat<T> hidden2;                // post-ReLU
  Mat<T> logits;
};

void CheckBatch(const ArchitectureConfig &a, Batch batch) {
  if (batch.empty()) throw InputError("empty batch");
  for (const Sample *s : batch) {
    if (s->audio_frames != a.audio_frames || s->audio_dim != a.audio_dim ||
        s->audio.size() != static_cast<std::size_t>(a.audio_input())) {
      throw ShapeError("audio stack is " + std::to_string(s->audio_frames) + "x" +
                       std::to_string(s->audio_dim) + ", model expects " +
                       std::to_string(a.audio_frames) + "x" + std::to_string(a.audio_dim));
    }
    if (s->ultrasound_frames != a.ultrasound_channels || s->ultrasound_rows != a.ultrasound_rows ||
        s->ultrasound_cols != a.ultrasound_cols ||
        s->ultrasound.size() != static_cast<std::size_t>(a.ultrasound_channels) *
                                    a.ultrasound_rows * a.ultrasound_cols) {
      throw ShapeError("ultrasound stack is " + std::to_string(s->ultrasound_frames) + "x" +
                       std::to_string(s->ultrasound_rows) + "x" +
                       std::to_string(s->ultrasound_cols) + ", model expects " +
                       std::to_string(a.ultrasound_channels) + "x" +
                       std::to_string(a.ultrasound_rows) + "x" + std::to_string(a.ultrasound_cols));
    }
  }
}

template <class T>
void Relu(Mat<T> &m) {
  m = m.cwiseMax(T(0));
}

// Full forward pass. With use_batch_stats the batch mean/variance normalise
// the concatenated features; otherwise the running statistics do.
template <class T>
void RunForward(const Model<T> &model, Batch batch, bool use_batch_stats, Activations<T> &act) {
  const ArchitectureConfig &a = model.arch();
  CheckBatch(a, batch);
  const int B = static_cast<int>(batch.size());
  act.batch = B;

  const int C = a.ultrasound_channels, H = a.ultrasound_rows, W = a.ultrasound_cols;
  const int k1 = a.conv1_kernel, F1 = a.conv1_filters;
  const int H1 = a.conv1_rows(), W1 = a.conv1_cols();
  const int P1h = a.pool1_rows(), P1w = a.pool1_cols();
  const int k2 = a.conv2_kernel, F2 = a.conv2_filters;
  const int H2 = a.conv2_rows(), W2 = a.conv2_cols();
  const int P2h = a.pool2_rows(), P2w = a.pool2_cols();
  const std::size_t in_size = static_cast<std::size_t>(C) * H * W;
  const std::size_t c1_size = static_cast<std::size_t>(F1) * H1 * W1;
  const std::size_t p1_size = static_cast<std::size_t>(F1) * P1h * P1w;
  const std::size_t c2_size = static_cast<std::size_t>(F2) * H2 * W2;
  const std::size_t p2_size = static_cast<std::size_t>(F2) * P2h * P2w;

  act.ultrasound_in.resize(B * in_size);
  act.conv1.resize(B * c1_size);
  act.pool1_idx.resize(B * p1_size);
  act.pool1.resize(B * p1_size);
  act.conv2.resize(B * c2_size);
  act.pool2_idx.resize(B * p2_size);
  act.concat.resize(B, a.concat_dim());
  act.audio_in.resize(B, a.audio_input());

  const auto &w1 = model.param(kConv1Weight).data;
  const auto &b1 = model.param(kConv1Bias).data;
  const auto &w2 = model.param(kConv2Weight).data;
  const auto &b2 = model.param(kConv2Bias).data;
  ConstMapMat<T> W1m(w1.data(), F1, C * k1 * k1);
  ConstMapMat<T> W2m(w2.data(), F2, F1 * k2 * k2);

  Mat<T> col1(C * k1 * k1, H1 * W1);
  Mat<T> col2(F1 * k2 * k2, H2 * W2);
  AlignedVector<T> pool2(p2_size);
  for (int b = 0; b < B; ++b) {
    const Sample &s = *batch[b];
    T *x = act.ultrasound_in.data() + b * in_size;
    std::copy(s.ultrasound.begin(), s.ultrasound.end(), x);
    for (int i = 0; i < a.audio_input(); ++i) act.audio_in(b, i) = static_cast<T>(s.audio[i]);

    Im2Col(x, C, H, W, k1, col1.data());
    MapMat<T> z1(act.conv1.data() + b * c1_size, F1, H1 * W1);
    z1.noalias() = W1m * col1;
    for (int f = 0; f < F1; ++f) z1.row(f).array() += b1[f];
    z1 = z1.cwiseMax(T(0));
    MaxPool(z1.data(), F1, H1, W1, a.pool, act.pool1.data() + b * p1_size,
            act.pool1_idx.data() + b * p1_size);

    Im2Col(act.pool1.data() + b * p1_size, F1, P1h, P1w, k2, col2.data());
    MapMat<T> z2(act.conv2.data() + b * c2_size, F2, H2 * W2);
    z2.noalias() = W2m * col2;
    for (int f = 0; f < F2; ++f) z2.row(f).array() += b2[f];
    z2 = z2.cwiseMax(T(0));
    MaxPool(z2.data(), F2, H2, W2, a.pool, pool2.data(), act.pool2_idx.data() + b * p2_size);
    for (std::size_t i = 0; i < p2_size; ++i) act.concat(b, static_cast<Eigen::Index>(i)) = pool2[i];
  }
  CheckFinite(std::span<const T>(act.conv1), "conv1");
  CheckFinite(std::span<const T>(act.conv2), "conv2");

  ConstMapMat<T> Wa(model.param(kAudioWeight).data.data(), a.audio_fc, a.audio_input());
  Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> ba(model.param(kAudioBias).data.data(), a.audio_fc);
  act.audio_hidden.noalias() = act.audio_in * Wa.transpose();
  act.audio_hidden.rowwise() += ba;
  Relu(act.audio_hidden);
  CheckFinite(act.audio_hidden, "audio_fc");
  act.concat.rightCols(a.audio_fc) = act.audio_hidden;

  const int D = a.concat_dim();
  const T eps = static_cast<T>(a.bn_epsilon);
  if (use_batch_stats) {
    act.batch_mean = act.concat.colwise().mean();
    act.batch_var = (act.concat.rowwise() - act.batch_mean).array().square().colwise().mean();
    act.inv_std = (act.batch_var.array() + eps).rsqrt();
    act.normalized = (act.concat.rowwise() - act.batch_mean).array().rowwise() * act.inv_std.array();
  } else {
    Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> rm(model.running_mean.data(), D);
    Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> rv(model.running_var.data(), D);
    act.inv_std = (rv.array() + eps).rsqrt();
    act.normalized = (act.concat.rowwise() - rm).array().rowwise() * act.inv_std.array();
  }
  Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> gamma(model.param(kBnGamma).data.data(), D);
  Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> beta(model.param(kBnBeta).data.data(), D);
  act.bn_out = (act.normalized.array().rowwise() * gamma.array()).rowwise() + beta.array();
  CheckFinite(act.bn_out, "batch_norm");

  ConstMapMat<T> Wf1(model.param(kFc1Weight).data.data(), a.hidden1, D);
  Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> bf1(model.param(kFc1Bias).data.data(), a.hidden1);
  act.hidden1.noalias() = act.bn_out * Wf1.transpose();
  act.hidden1.rowwise() += bf1;
  Relu(act.hidden1);
  CheckFinite(act.hidden1, "fc1");

  ConstMapMat<T> Wf2(model.param(kFc2Weight).data.data(), a.hidden2, a.hidden1);
  Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> bf2(model.param(kFc2Bias).data.data(), a.hidden2);
  act.hidden2.noalias() = act.hidden1 * Wf2.transpose();
  act.hidden2.rowwise() += bf2;
  Relu(act.hidden2);
  CheckFinite(act.hidden2, "fc2");

  ConstMapMat<T> Wo(model.param(kOutWeight).data.data(), a.output_dim, a.hidden2);
  Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> bo(model.param(kOutBias).data.data(), a.output_dim);
  act.logits.noalias() = act.hidden2 * Wo.transpose();
  act.logits.rowwise() += bo;
  CheckFinite(act.logits, "output");
}

template <class T>
void UpdateRunningStats(Model<T> &model, const Activations<T> &act) {
  const T m = static_cast<T>(model.arch().bn_momentum);
  const int B = act.batch;
  const T unbias = B > 1 ? static_cast<T>(B) / static_cast<T>(B - 1) : T(1);
  for (std::size_t d = 0; d < model.running_mean.size(); ++d) {
    model.running_mean[d] = m * model.running_mean[d] + (T(1) - m) * act.batch_mean[d];
    model.running_var[d] = m * model.running_var[d] + (T(1) - m) * act.batch_var[d] * unbias;
  }
  model.running_stats_ready = true;
}

template <class T>
std::vector<Posterior> Softmax(const Mat<T> &logits) {
  std::vector<Posterior> out(logits.rows());
  for (Eigen::Index b = 0; b < logits.rows(); ++b) {
    double mx = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < logits.cols(); ++k) mx = std::max(mx, double(logits(b, k)));
    double sum = 0.0;
    for (Eigen::Index k = 0; k < logits.cols(); ++k) {
      out[b][k] = std::exp(double(logits(b, k)) - mx);
      sum += out[b][k];
    }
    for (auto &p : out[b]) p /= sum;
  }
  return out;
}

std::vector<int> Shape(std::initializer_list<int> dims) { return dims; }

template <class T>
std::uint64_t Signature(const Activations<T> &act) {
  Fnv1a64 h;
  auto put_mask = [&](std::span<const T> v) {
    std::uint8_t byte = 0;
    int bits = 0;
    for (T x : v) {
      byte = static_cast<std::uint8_t>((byte << 1) | (x > T(0)));
      if (++bits == 8) {
        h.Update(std::span<const std::uint8_t>(&byte, 1));
        byte = 0;
        bits = 0;
      }
    }
    h.Update(std::span<const std::uint8_t>(&byte, 1));
  };
  auto put_idx = [&](const std::vector<std::int32_t> &v) {
    h.Update(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t *>(v.data()),
                                           v.size() * sizeof(std::int32_t)));
  };
  put_mask(act.conv1);
  put_idx(act.pool1_idx);
  put_mask(act.conv2);
  put_idx(act.pool2_idx);
  put_mask({act.audio_hidden.data(), static_cast<std::size_t>(act.audio_hidden.size())});
  put_mask({act.hidden1.data(), static_cast<std::size_t>(act.hidden1.size())});
  put_mask({act.hidden2.data(), static_cast<std::size_t>(act.hidden2.size())});
  return h.value();
}

}  // namespace

template <class T>
Model<T>::Model(ArchitectureConfig arch) : arch_(std::move(arch)) {
  arch_.Validate();
  const auto &a = arch_;
  auto add = [&](const char *name, std::vector<int> shape, bool weight, T fill) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    params_.push_back({name, std::move(shape), AlignedVector<T>(n, fill), weight});
  };
  add("conv1.weight", Shape({a.conv1_filters, a.ultrasound_channels, a.conv1_kernel, a.conv1_kernel}), true, 0);
  add("conv1.bias", Shape({a.conv1_filters}), false, 0);
  add("conv2.weight", Shape({a.conv2_filters, a.conv1_filters, a.conv2_kernel, a.conv2_kernel}), true, 0);
  add("conv2.bias", Shape({a.conv2_filters}), false, 0);
  add("audio_fc.weight", Shape({a.audio_fc, a.audio_input()}), true, 0);
  add("audio_fc.bias", Shape({a.audio_fc}), false, 0);
  add("bn.gamma", Shape({a.concat_dim()}), false, 1);
  add("bn.beta", Shape({a.concat_dim()}), false, 0);
  add("fc1.weight", Shape({a.hidden1, a.concat_dim()}), true, 0);
  add("fc1.bias", Shape({a.hidden1}), false, 0);
  add("fc2.weight", Shape({a.hidden2, a.hidden1}), true, 0);
  add("fc2.bias", Shape({a.hidden2}), false, 0);
  add("out.weight", Shape({a.output_dim, a.hidden2}), true, 0);
  add("out.bias", Shape({a.output_dim}), false, 0);
  running_mean.assign(a.concat_dim(), T(0));
  running_var.assign(a.concat_dim(), T(1));
}

template <class T>
Model<T> Model<T>::Initialize(const ArchitectureConfig &arch, std::uint64_t seed) {
  Model m(arch);
  Rng rng(seed);
  for (auto &t : m.params_) {
    if (!t.is_weight) continue;
    std::size_t fan_in = 1;
    for (std::size_t i = 1; i < t.shape.size(); ++i) fan_in *= static_cast<std::size_t>(t.shape[i]);
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (auto &v : t.data) v = static_cast<T>(rng.Uniform(-limit, limit));
  }
  m.meta.seed = seed;
  return m;
}

template <class T>
std::size_t Model<T>::NumParameters() const {
  std::size_t n = 0;
  for (const auto &t : params_) n += t.size();
  return n;
}

template <class T>
std::vector<Posterior> Forward(Model<T> &model, Batch batch, Mode mode) {
  if (mode == Mode::kInfer) return Infer(model, batch);
  Activations<T> act;
  RunForward(model, batch, true, act);
  UpdateRunningStats(model, act);
  return Softmax(act.logits);
}

template <class T>
std::vector<Posterior> Infer(const Model<T> &model, Batch batch) {
  if (!model.running_stats_ready) {
    throw StateError("inference requested before any training step populated batch-norm statistics");
  }
  Activations<T> act;
  RunForward(model, batch, false, act);
  return Softmax(act.logits);
}

template <class T>
LossAndGradient<T> ComputeLossAndGradients(Model<T> &model, Batch batch, double l2_weight,
                                           bool want_signature) {
  const ArchitectureConfig &a = model.arch();
  Activations<T> act;
  RunForward(model, batch, true, act);
  UpdateRunningStats(model, act);

  LossAndGradient<T> result;
  if (want_signature) result.activation_signature = Signature(act);
  const int B = act.batch;
  const int O = a.output_dim;

  // Softmax cross-entropy in double precision.
  Mat<T> dlogits(B, O);
  double ce = 0.0;
  for (int b = 0; b < B; ++b) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < O; ++k) mx = std::max(mx, double(act.logits(b, k)));
    double sum = 0.0;
    for (int k = 0; k < O; ++k) sum += std::exp(double(act.logits(b, k)) - mx);
    const double lse = mx + std::log(sum);
    const int y = static_cast<int>(ClassIndex(batch[b]->label));
    ce += lse - double(act.logits(b, y));
    for (int k = 0; k < O; ++k) {
      const double p = std::exp(double(act.logits(b, k)) - lse);
      dlogits(b, k) = static_cast<T>((p - (k == y ? 1.0 : 0.0)) / B);
    }
  }
  ce /= B;
  if (!std::isfinite(ce)) throw NumericError("non-finite activation in layer loss");

  auto &g = result.gradients;
  g.resize(kNumParams);
  for (std::size_t i = 0; i < kNumParams; ++i) g[i].assign(model.param(ParamIndex(i)).size(), T(0));
  auto gmat = [&](ParamIndex i, int rows, int cols) { return MapMat<T>(g[i].data(), rows, cols); };
  auto gvec = [&](ParamIndex i, int n) {
    return Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(g[i].data(), n);
  };
  auto pmat = [&](ParamIndex i, int rows, int cols) {
    return ConstMapMat<T>(model.param(i).data.data(), rows, cols);
  };

  const int D = a.concat_dim();
  // Output layer.
  gmat(kOutWeight, O, a.hidden2).noalias() = dlogits.transpose() * act.hidden2;
  gvec(kOutBias, O) = dlogits.colwise().sum();
  Mat<T> dh2 = dlogits * pmat(kOutWeight, O, a.hidden2);
  dh2 = dh2.cwiseProduct((act.hidden2.array() > T(0)).template cast<T>().matrix());

  gmat(kFc2Weight, a.hidden2, a.hidden1).noalias() = dh2.transpose() * act.hidden1;
  gvec(kFc2Bias, a.hidden2) = dh2.colwise().sum();
  Mat<T> dh1 = dh2 * pmat(kFc2Weight, a.hidden2, a.hidden1);
  dh1 = dh1.cwiseProduct((act.hidden1.array() > T(0)).template cast<T>().matrix());

  gmat(kFc1Weight, a.hidden1, D).noalias() = dh1.transpose() * act.bn_out;
  gvec(kFc1Bias, a.hidden1) = dh1.colwise().sum();
  Mat<T> dy = dh1 * pmat(kFc1Weight, a.hidden1, D);

  // Batch norm with batch statistics.
  Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> gamma(model.param(kBnGamma).data.data(), D);
  gvec(kBnGamma, D) = dy.cwiseProduct(act.normalized).colwise().sum();
  gvec(kBnBeta, D) = dy.colwise().sum();
  Mat<T> dxhat = dy.array().rowwise() * gamma.array();
  const Eigen::Matrix<T, 1, Eigen::Dynamic> mean_dxhat = dxhat.colwise().mean();
  const Eigen::Matrix<T, 1, Eigen::Dynamic> mean_dxhat_xhat =
      dxhat.cwiseProduct(act.normalized).colwise().mean();
  Mat<T> dconcat = dxhat.rowwise() - mean_dxhat;
  dconcat -= (act.normalized.array().rowwise() * mean_dxhat_xhat.array()).matrix();
  dconcat = dconcat.array().rowwise() * act.inv_std.array();

  // Audio branch.
  Mat<T> daudio = dconcat.rightCols(a.audio_fc)
                      .cwiseProduct((act.audio_hidden.array() > T(0)).template cast<T>().matrix());
  gmat(kAudioWeight, a.audio_fc, a.audio_input()).noalias() = daudio.transpose() * act.audio_in;
  gvec(kAudioBias, a.audio_fc) = daudio.colwise().sum();

  // Ultrasound branch, one sample at a time.
  const int C = a.ultrasound_channels, H = a.ultrasound_rows, W = a.ultrasound_cols;
  const int k1 = a.conv1_kernel, F1 = a.conv1_filters;
  const int H1 = a.conv1_rows(), W1 = a.conv1_cols();
  const int P1h = a.pool1_rows(), P1w = a.pool1_cols();
  const int k2 = a.conv2_kernel, F2 = a.conv2_filters;
  const int H2 = a.conv2_rows(), W2 = a.conv2_cols();
  const std::size_t in_size = static_cast<std::size_t>(C) * H * W;
  const std::size_t c1_size = static_cast<std::size_t>(F1) * H1 * W1;
  const std::size_t p1_size = static_cast<std::size_t>(F1) * P1h * P1w;
  const std::size_t c2_size = static_cast<std::size_t>(F2) * H2 * W2;
  const int flat = a.ultrasound_flat();

  auto gW1 = gmat(kConv1Weight, F1, C * k1 * k1);
  auto gW2 = gmat(kConv2Weight, F2, F1 * k2 * k2);
  auto gb1 = gvec(kConv1Bias, F1);
  auto gb2 = gvec(kConv2Bias, F2);
  const auto W2m = pmat(kConv2Weight, F2, F1 * k2 * k2);

  Mat<T> col1(C * k1 * k1, H1 * W1);
  Mat<T> col2(F1 * k2 * k2, H2 * W2);
  Mat<T> dz2(F2, H2 * W2);
  Mat<T> dcol2(F1 * k2 * k2, H2 * W2);
  Mat<T> dz1(F1, H1 * W1);
  AlignedVector<T> dpool1(p1_size);
  for (int b = 0; b < B; ++b) {
    const T *a2 = act.conv2.data() + b * c2_size;
    const std::int32_t *idx2 = act.pool2_idx.data() + static_cast<std::size_t>(b) * flat;
    dz2.setZero();
    for (int i = 0; i < flat; ++i) dz2.data()[idx2[i]] += dconcat(b, i);
    for (std::size_t i = 0; i < c2_size; ++i) {
      if (!(a2[i] > T(0))) dz2.data()[i] = T(0);
    }
    Im2Col(act.pool1.data() + b * p1_size, F1, P1h, P1w, k2, col2.data());
    gW2.noalias() += dz2 * col2.transpose();
    gb2 += dz2.rowwise().sum().transpose();
    dcol2.noalias() = W2m.transpose() * dz2;
    std::fill(dpool1.begin(), dpool1.end(), T(0));
    Col2Im(dcol2.data(), F1, P1h, P1w, k2, dpool1.data());

    const T *a1 = act.conv1.data() + b * c1_size;
    const std::int32_t *idx1 = act.pool1_idx.data() + b * p1_size;
    dz1.setZero();
    for (std::size_t i = 0; i < p1_size; ++i) dz1.data()[idx1[i]] += dpool1[i];
    for (std::size_t i = 0; i < c1_size; ++i) {
      if (!(a1[i] > T(0))) dz1.data()[i] = T(0);
    }
    Im2Col(act.ultrasound_in.data() + b * in_size, C, H, W, k1, col1.data());
    gW1.noalias() += dz1 * col1.transpose();
    gb1 += dz1.rowwise().sum().transpose();
  }

  double l2 = 0.0;
  for (std::size_t i = 0; i < kNumParams; ++i) {
    const auto &t = model.param(ParamIndex(i));
    if (!t.is_weight) continue;
    double sq = 0.0;
    for (std::size_t j = 0; j < t.data.size(); ++j) {
      sq += double(t.data[j]) * double(t.data[j]);
      g[i][j] += static_cast<T>(l2_weight) * t.data[j];
    }
    l2 += sq;
  }
  result.cross_entropy = ce;
  result.loss = ce + l2_weight * 0.5 * l2;
  return result;
}

std::vector<const Sample *> Pointers(const std::vector<Sample> &samples) {
  std::vector<const Sample *> out;
  out.reserve(samples.size());
  for (const auto &s : samples) out.push_back(&s);
  return out;
}

ArticulationClass Predict(const Posterior &p) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < p.size(); ++k) {
    if (p[k] > p[best]) best = k;
  }
  return ClassFromIndex(best);
}

template class Model<float>;
template class Model<double>;
template std::vector<Posterior> Forward(Model<float> &, Batch, Mode);
template std::vector<Posterior> Forward(Model<double> &, Batch, Mode);
template std::vector<Posterior> Infer(const Model<float> &, Batch);
template std::vector<Posterior> Infer(const Model<double> &, Batch);
template LossAndGradient<float> ComputeLossAndGradients(Model<float> &, Batch, double, bool);
template LossAndGradient<double> ComputeLossAndGradients(Model<double> &, Batch, double, bool);

}  // namespace uti::nnet
