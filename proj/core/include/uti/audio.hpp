// core/include/uti/audio.hpp

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

#ifndef UTI_AUDIO_HPP_
#define UTI_AUDIO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace uti {

inline constexpr int kTargetSampleRate = 16000;

struct AudioStream {
  std::vector<std::int16_t> samples;
  int sample_rate = kTargetSampleRate;

  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

/// Reads a RIFF/WAVE PCM file (8, 16, 24 or 32 bit integer; any channel
/// count, mixed down to mono). Throws IngestionError naming the file.
AudioStream ReadWav(const std::filesystem::path &path);
AudioStream DecodeWav(std::span<const std::uint8_t> bytes,
                      const std::string &source_name);

/// 16-bit mono PCM.
std::vector<std::uint8_t> EncodeWav(const AudioStream &audio);
void WriteWav(const std::filesystem::path &path, const AudioStream &audio);

/// Rational-ratio resampler built on a linear-phase windowed-sinc FIR applied
/// in polyphase form. Only ratios that reduce to small integers are
/// accepted (integer multiples and the usual 22.05k/44.1k/48k family).
class PolyphaseResampler {
 public:
  PolyphaseResampler(int input_rate, int output_rate);

  int up() const { return up_; }
  int down() const { return down_; }

  /// Output has ceil(n * up / down) samples, time-aligned with the input
  /// (the filter's group delay is compensated).
  std::vector<double> Process(std::span<const double> input) const;

 private:
  int up_;
  int down_;
  int half_length_;               // taps on each side of the centre, per phase
  std::vector<double> taps_;      // prototype filter at the upsampled rate
};

/// Returns `audio` at 16 kHz, rounding and clamping to int16.
AudioStream ResampleTo16k(const AudioStream &audio);

}  // namespace uti

#endif  // UTI_AUDIO_HPP_
