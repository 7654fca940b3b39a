// core/src/mfcc.cpp

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

#include "uti/mfcc.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "uti/error.hpp"
#include "uti/text_io.hpp"

namespace uti {
namespace {

double HzToMel(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }

// FFTW planning is not thread-safe; plans are created under a lock and the
// execute-with-new-array interface is used afterwards.
std::mutex &PlannerMutex() {
  static std::mutex m;
  return m;
}

class RealFft {
 public:
  explicit RealFft(int n) : n_(n) {
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard<std::mutex> lock(PlannerMutex());
    plan_ = fftw_plan_dft_r2c_1d(n, in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard<std::mutex> lock(PlannerMutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft &) = delete;
  RealFft &operator=(const RealFft &) = delete;

  /// Power spectrum |X_k|^2 of `frame` zero-padded to n.
  void Power(std::span<const double> frame, std::vector<double> &power) {
    for (int i = 0; i < n_; ++i) in_[i] = i < static_cast<int>(frame.size()) ? frame[i] : 0.0;
    fftw_execute(plan_);
    power.resize(n_ / 2 + 1);
    for (int k = 0; k <= n_ / 2; ++k) {
      power[k] = out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
    }
  }

 private:
  int n_;
  double *in_;
  fftw_complex *out_;
  fftw_plan plan_;
};

std::vector<double> HammingWindow(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
  }
  return w;
}

// Windowed, pre-emphasised frame `f`.
void PrepareFrame(std::span<const double> signal, int f, const MfccConfig &config,
                  const std::vector<double> &window, std::vector<double> &frame) {
  const int len = config.window_length();
  const std::size_t offset = static_cast<std::size_t>(f) * config.frame_shift();
  frame.assign(signal.begin() + offset, signal.begin() + offset + len);
  for (int i = len - 1; i > 0; --i) frame[i] -= config.preemphasis * frame[i - 1];
  frame[0] -= config.preemphasis * frame[0];
  for (int i = 0; i < len; ++i) frame[i] *= window[i];
}

}  // namespace

int MfccConfig::window_length() const {
  return static_cast<int>(std::lround(window_ms * sample_rate / 1000.0));
}

int MfccConfig::frame_shift() const {
  return static_cast<int>(std::lround(shift_ms * sample_rate / 1000.0));
}

void MfccConfig::Validate() const {
  if (sample_rate <= 0 || window_length() <= 1 || frame_shift() <= 0) {
    throw ValidationError("MFCC window and shift must be positive");
  }
  if (fft_size < window_length()) throw ValidationError("FFT size smaller than the window");
  if (num_mel_filters <= 0 || num_ceps <= 0 || num_ceps > num_mel_filters) {
    throw ValidationError("need 0 < num_ceps <= num_mel_filters");
  }
  if (!(low_freq >= 0.0 && high_freq > low_freq && high_freq <= sample_rate / 2.0)) {
    throw ValidationError("bad mel frequency range");
  }
  if (delta_window <= 0) throw ValidationError("delta window must be positive");
  if (!(log_floor > 0.0)) throw ValidationError("log floor must be positive");
}

std::string MfccConfig::Canonical() const {
  std::ostringstream ss;
  ss << "mfcc-v1 rate=" << sample_rate << " win=" << FormatReal(window_ms, 4)
     << " shift=" << FormatReal(shift_ms, 4) << " ceps=" << num_ceps
     << " mels=" << num_mel_filters << " lo=" << FormatReal(low_freq, 4)
     << " hi=" << FormatReal(high_freq, 4) << " pre=" << FormatReal(preemphasis, 6)
     << " fft=" << fft_size << " delta=" << delta_window
     << " floor=" << FormatReal(std::log10(log_floor), 4);
  return ss.str();
}

int NumFrames(std::size_t n, const MfccConfig &config) {
  const auto win = static_cast<std::size_t>(config.window_length());
  if (n < win) return 0;
  return static_cast<int>((n - win) / config.frame_shift()) + 1;
}

std::vector<std::vector<double>> MelFilterbank(const MfccConfig &config) {
  const int bins = config.fft_size / 2 + 1;
  const double mel_lo = HzToMel(config.low_freq);
  const double mel_hi = HzToMel(config.high_freq);
  const double step = (mel_hi - mel_lo) / (config.num_mel_filters + 1);
  std::vector<std::vector<double>> bank(config.num_mel_filters, std::vector<double>(bins, 0.0));
  for (int m = 0; m < config.num_mel_filters; ++m) {
    const double left = mel_lo + m * step;
    const double centre = left + step;
    const double right = centre + step;
    for (int k = 0; k < bins; ++k) {
      const double mel = HzToMel(static_cast<double>(k) * config.sample_rate / config.fft_size);
      if (mel > left && mel < right) {
        bank[m][k] = mel <= centre ? (mel - left) / (centre - left) : (right - mel) / (right - centre);
      }
    }
  }
  return bank;
}

std::vector<std::vector<double>> ComputeStaticCepstra(std::span<const double> signal,
                                                      const MfccConfig &config) {
  config.Validate();
  const int frames = NumFrames(signal.size(), config);
  if (frames == 0) {
    throw TooShortError("audio has " + std::to_string(signal.size()) +
                        " samples, fewer than one " + std::to_string(config.window_length()) +
                        "-sample window");
  }
  const auto window = HammingWindow(config.window_length());
  const auto bank = MelFilterbank(config);
  const int M = config.num_mel_filters;

  // Orthonormal DCT-II basis, first num_ceps rows.
  std::vector<std::vector<double>> dct(config.num_ceps, std::vector<double>(M));
  for (int c = 0; c < config.num_ceps; ++c) {
    const double scale = c == 0 ? std::sqrt(1.0 / M) : std::sqrt(2.0 / M);
    for (int m = 0; m < M; ++m) {
      dct[c][m] = scale * std::cos(std::numbers::pi * c * (m + 0.5) / M);
    }
  }

  RealFft fft(config.fft_size);
  std::vector<double> frame, power, logmel(M);
  std::vector<std::vector<double>> out(frames, std::vector<double>(config.num_ceps));
  for (int f = 0; f < frames; ++f) {
    PrepareFrame(signal, f, config, window, frame);
    fft.Power(frame, power);
    for (int m = 0; m < M; ++m) {
      double e = 0.0;
      for (std::size_t k = 0; k < power.size(); ++k) e += bank[m][k] * power[k];
      logmel[m] = std::log(std::max(e, config.log_floor));
    }
    for (int c = 0; c < config.num_ceps; ++c) {
      double acc = 0.0;
      for (int m = 0; m < M; ++m) acc += dct[c][m] * logmel[m];
      out[f][c] = acc;
    }
  }
  return out;
}

std::vector<std::vector<double>> ComputeDeltas(const std::vector<std::vector<double>> &frames,
                                               int window) {
  const int T = static_cast<int>(frames.size());
  std::vector<std::vector<double>> out(T);
  if (T == 0) return out;
  const std::size_t dim = frames[0].size();
  double denom = 0.0;
  for (int n = 1; n <= window; ++n) denom += 2.0 * n * n;
  for (int t = 0; t < T; ++t) {
    out[t].assign(dim, 0.0);
    for (int n = 1; n <= window; ++n) {
      const auto &ahead = frames[std::min(t + n, T - 1)];
      const auto &behind = frames[std::max(t - n, 0)];
      for (std::size_t d = 0; d < dim; ++d) out[t][d] += n * (ahead[d] - behind[d]);
    }
    for (auto &v : out[t]) v /= denom;
  }
  return out;
}

FeatureMatrix ExtractMfcc(std::span<const double> signal, const MfccConfig &config) {
  const auto stat = ComputeStaticCepstra(signal, config);
  const auto d1 = ComputeDeltas(stat, config.delta_window);
  const auto d2 = ComputeDeltas(d1, config.delta_window);
  FeatureMatrix fm;
  fm.rows = static_cast<int>(stat.size());
  fm.cols = config.dim();
  fm.data.reserve(static_cast<std::size_t>(fm.rows) * fm.cols);
  for (int t = 0; t < fm.rows; ++t) {
    for (double v : stat[t]) fm.data.push_back(static_cast<float>(v));
    for (double v : d1[t]) fm.data.push_back(static_cast<float>(v));
    for (double v : d2[t]) fm.data.push_back(static_cast<float>(v));
  }
  return fm;
}

FeatureMatrix ExtractMfcc(const AudioStream &audio, const MfccConfig &config) {
  if (audio.sample_rate != config.sample_rate) {
    throw ValidationError("audio must be at " + std::to_string(config.sample_rate) + " Hz");
  }
  std::vector<double> signal(audio.samples.begin(), audio.samples.end());
  return ExtractMfcc(std::span<const double>(signal), config);
}

std::vector<std::vector<double>> LogPowerSpectrogram(std::span<const double> signal,
                                                     const MfccConfig &config) {
  config.Validate();
  const int frames = NumFrames(signal.size(), config);
  const auto window = HammingWindow(config.window_length());
  RealFft fft(config.fft_size);
  std::vector<double> frame, power;
  std::vector<std::vector<double>> out(frames);
  for (int f = 0; f < frames; ++f) {
    PrepareFrame(signal, f, config, window, frame);
    fft.Power(frame, power);
    out[f].resize(power.size());
    for (std::size_t k = 0; k < power.size(); ++k) {
      out[f][k] = 10.0 * std::log10(std::max(power[k], config.log_floor));
    }
  }
  return out;
}

}  // namespace uti
