// core/src/nnet/architecture.cpp

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

#include "uti/nnet/architecture.hpp"

#include <sstream>

#include "uti/articulation.hpp"
#include "uti/digest.hpp"
#include "uti/error.hpp"
#include "uti/text_io.hpp"

namespace uti::nnet {

void ArchitectureConfig::Validate() const {
  auto positive = [](int v, const char *what) {
    if (v <= 0) throw IncompatibleError(std::string("architecture: ") + what + " must be positive");
  };
  positive(ultrasound_channels, "ultrasound_channels");
  positive(audio_frames, "audio_frames");
  positive(audio_dim, "audio_dim");
  positive(conv1_kernel, "conv1_kernel");
  positive(conv1_filters, "conv1_filters");
  positive(conv2_kernel, "conv2_kernel");
  positive(conv2_filters, "conv2_filters");
  positive(pool, "pool");
  positive(audio_fc, "audio_fc");
  positive(hidden1, "hidden1");
  positive(hidden2, "hidden2");
  if (pool2_rows() <= 0 || pool2_cols() <= 0 || conv2_rows() <= 0 || conv2_cols() <= 0) {
    throw IncompatibleError("architecture: ultrasound input " + std::to_string(ultrasound_rows) +
                            "x" + std::to_string(ultrasound_cols) +
                            " is too small for the convolution stack");
  }
  if (output_dim != static_cast<int>(kNumClasses)) {
    throw IncompatibleError("architecture: output_dim must be " + std::to_string(kNumClasses) +
                            ", got " + std::to_string(output_dim));
  }
  if (!(bn_momentum >= 0.0 && bn_momentum < 1.0) || !(bn_epsilon > 0.0)) {
    throw IncompatibleError("architecture: bad batch-norm constants");
  }
}

std::string ArchitectureConfig::Canonical() const {
  std::ostringstream ss;
  ss << "ultrasound_channels=" << ultrasound_channels << "\n"
     << "ultrasound_rows=" << ultrasound_rows << "\n"
     << "ultrasound_cols=" << ultrasound_cols << "\n"
     << "audio_frames=" << audio_frames << "\n"
     << "audio_dim=" << audio_dim << "\n"
     << "conv1_kernel=" << conv1_kernel << "\n"
     << "conv1_filters=" << conv1_filters << "\n"
     << "conv2_kernel=" << conv2_kernel << "\n"
     << "conv2_filters=" << conv2_filters << "\n"
     << "pool=" << pool << "\n"
     << "audio_fc=" << audio_fc << "\n"
     << "hidden1=" << hidden1 << "\n"
     << "hidden2=" << hidden2 << "\n"
     << "output_dim=" << output_dim << "\n"
     << "bn_momentum=" << FormatReal(bn_momentum, 9) << "\n"
     << "bn_epsilon=" << FormatReal(bn_epsilon, 12) << "\n";
  return ss.str();
}

ArchitectureConfig ArchitectureConfig::Parse(const std::string &canonical) {
  const auto kv = ParseKeyValue(canonical, "architecture");
  ArchitectureConfig a;
  auto get_int = [&](const char *key, int &field) {
    auto it = kv.find(key);
    if (it == kv.end()) throw IncompatibleError(std::string("architecture: missing ") + key);
    field = static_cast<int>(ParseInt(it->second, key));
  };
  get_int("ultrasound_channels", a.ultrasound_channels);
  get_int("ultrasound_rows", a.ultrasound_rows);
  get_int("ultrasound_cols", a.ultrasound_cols);
  get_int("audio_frames", a.audio_frames);
  get_int("audio_dim", a.audio_dim);
  get_int("conv1_kernel", a.conv1_kernel);
  get_int("conv1_filters", a.conv1_filters);
  get_int("conv2_kernel", a.conv2_kernel);
  get_int("conv2_filters", a.conv2_filters);
  get_int("pool", a.pool);
  get_int("audio_fc", a.audio_fc);
  get_int("hidden1", a.hidden1);
  get_int("hidden2", a.hidden2);
  get_int("output_dim", a.output_dim);
  auto bm = kv.find("bn_momentum");
  auto be = kv.find("bn_epsilon");
  if (bm == kv.end() || be == kv.end()) throw IncompatibleError("architecture: missing batch-norm keys");
  a.bn_momentum = ParseDouble(bm->second, "bn_momentum");
  a.bn_epsilon = ParseDouble(be->second, "bn_epsilon");
  return a;
}

std::uint64_t ArchitectureConfig::Fingerprint() const { return Digest64(Canonical()); }

}  // namespace uti::nnet
