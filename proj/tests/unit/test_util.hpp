// tests/unit/test_util.hpp

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

#ifndef UTI_TESTS_TEST_UTIL_HPP_
#define UTI_TESTS_TEST_UTIL_HPP_

#include <unistd.h>

#include <filesystem>
#include <string>

#include "uti/nnet/architecture.hpp"
#include "uti/rng.hpp"
#include "uti/sample.hpp"

namespace uti::test {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string &tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("uti_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path &path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline nnet::ArchitectureConfig TinyArchitecture() {
  nnet::ArchitectureConfig a;
  a.ultrasound_channels = 3;
  a.ultrasound_rows = 16;
  a.ultrasound_cols = 20;
  a.audio_frames = 3;
  a.audio_dim = 5;
  a.conv1_filters = 4;
  a.conv2_filters = 6;
  a.audio_fc = 6;
  a.hidden1 = 8;
  a.hidden2 = 8;
  return a;
}

inline Sample RandomSample(const nnet::ArchitectureConfig &a, ArticulationClass label, Rng &rng) {
  Sample s;
  s.audio_frames = a.audio_frames;
  s.audio_dim = a.audio_dim;
  s.audio.resize(static_cast<std::size_t>(a.audio_input()));
  for (auto &v : s.audio) v = static_cast<float>(rng.Normal());
  s.ultrasound_frames = a.ultrasound_channels;
  s.ultrasound_rows = a.ultrasound_rows;
  s.ultrasound_cols = a.ultrasound_cols;
  s.ultrasound.resize(static_cast<std::size_t>(a.ultrasound_channels) * a.ultrasound_rows *
                      a.ultrasound_cols);
  for (auto &v : s.ultrasound) v = static_cast<float>(rng.Uniform());
  s.label = label;
  return s;
}

}  // namespace uti::test

#endif  // UTI_TESTS_TEST_UTIL_HPP_
