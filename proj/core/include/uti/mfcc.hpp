// core/include/uti/mfcc.hpp

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

#ifndef UTI_MFCC_HPP_
#define UTI_MFCC_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uti/audio.hpp"

namespace uti {

struct MfccConfig {
  int sample_rate = 16000;
  double window_ms = 25.0;
  double shift_ms = 10.0;
  int num_ceps = 20;
  int num_mel_filters = 26;
  double low_freq = 0.0;
  double high_freq = 8000.0;
  double preemphasis = 0.97;
  int fft_size = 512;
  int delta_window = 2;
  double log_floor = 1e-10;

  int window_length() const;  // samples
  int frame_shift() const;    // samples
  int dim() const { return 3 * num_ceps; }

  /// Throws ValidationError.
  void Validate() const;
  /// Stable text form; its digest keys the feature cache.
  std::string Canonical() const;
};

/// Frames of `dim()` values: static cepstra, deltas, delta-deltas.
struct FeatureMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<float> data;

  std::span<const float> row(int r) const {
    return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
  }
  float at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  bool operator==(const FeatureMatrix &) const = default;
};

/// Computes static MFCCs with Hamming windowing, per-frame pre-emphasis,
/// a triangular mel filterbank on the power spectrum, log compression and an
/// orthonormal DCT-II. Returns frames x num_ceps in double precision.
/// Throws TooShortError when fewer samples than one window are given.
std::vector<std::vector<double>> ComputeStaticCepstra(std::span<const double> signal,
                                                      const MfccConfig &config);

/// Regression deltas over +/- window frames with edge replication.
std::vector<std::vector<double>> ComputeDeltas(const std::vector<std::vector<double>> &frames,
                                               int window);

/// Full 60-dimensional features for 16 kHz audio.
FeatureMatrix ExtractMfcc(const AudioStream &audio, const MfccConfig &config = {});
FeatureMatrix ExtractMfcc(std::span<const double> signal, const MfccConfig &config = {});

/// floor((n - window) / shift) + 1, or 0 when n < window.
int NumFrames(std::size_t num_samples, const MfccConfig &config);

/// Mel filterbank weights, num_mel_filters x (fft_size/2 + 1).
std::vector<std::vector<double>> MelFilterbank(const MfccConfig &config);

/// Power spectrum in dB of Hamming-windowed frames, used for spectrogram
/// rendering. Rows are frames; columns are fft_size/2 + 1 bins.
std::vector<std::vector<double>> LogPowerSpectrogram(std::span<const double> signal,
                                                     const MfccConfig &config);

}  // namespace uti

#endif  // UTI_MFCC_HPP_
