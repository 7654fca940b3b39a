// core/include/uti/nnet/architecture.hpp

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

#ifndef UTI_NNET_ARCHITECTURE_HPP_
#define UTI_NNET_ARCHITECTURE_HPP_

#include <cstdint>
#include <string>

namespace uti::nnet {

/// Layer sizes of the dual-stream classifier. Convolutions are "valid" with
/// stride 1; pooling is max with stride equal to its size and floor
/// semantics, so 63x103 -> 59x99 -> 29x49 -> 25x45 -> 12x22 by default.
struct ArchitectureConfig {
  int ultrasound_channels = 9;
  int ultrasound_rows = 63;
  int ultrasound_cols = 103;
  int audio_frames = 11;
  int audio_dim = 60;
  int conv1_kernel = 5;
  int conv1_filters = 32;
  int conv2_kernel = 5;
  int conv2_filters = 64;
  int pool = 2;
  int audio_fc = 256;
  int hidden1 = 512;
  int hidden2 = 512;
  int output_dim = 9;
  double bn_momentum = 0.9;
  double bn_epsilon = 1e-5;

  int conv1_rows() const { return ultrasound_rows - conv1_kernel + 1; }
  int conv1_cols() const { return ultrasound_cols - conv1_kernel + 1; }
  int pool1_rows() const { return conv1_rows() / pool; }
  int pool1_cols() const { return conv1_cols() / pool; }
  int conv2_rows() const { return pool1_rows() - conv2_kernel + 1; }
  int conv2_cols() const { return pool1_cols() - conv2_kernel + 1; }
  int pool2_rows() const { return conv2_rows() / pool; }
  int pool2_cols() const { return conv2_cols() / pool; }
  int ultrasound_flat() const { return conv2_filters * pool2_rows() * pool2_cols(); }
  int audio_input() const { return audio_frames * audio_dim; }
  int concat_dim() const { return ultrasound_flat() + audio_fc; }

  /// Throws IncompatibleError on impossible shapes or an output size other
  /// than the number of articulation classes.
  void Validate() const;

  /// Canonical key=value text; round-trips through Parse.
  std::string Canonical() const;
  static ArchitectureConfig Parse(const std::string &canonical);
  std::uint64_t Fingerprint() const;

  bool operator==(const ArchitectureConfig &) const = default;
};

}  // namespace uti::nnet

#endif  // UTI_NNET_ARCHITECTURE_HPP_
