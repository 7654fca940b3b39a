// core/src/audio.cpp

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

#include "uti/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <numbers>
#include <string>

#include "uti/error.hpp"
#include "uti/text_io.hpp"

namespace uti {
namespace {

std::uint32_t ReadU32(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint32_t>(b[off]) |
         (static_cast<std::uint32_t>(b[off + 1]) << 8) |
         (static_cast<std::uint32_t>(b[off + 2]) << 16) |
         (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

std::uint16_t ReadU16(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint16_t>(b[off] | (b[off + 1] << 8));
}

void PutU32(std::vector<std::uint8_t> &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void PutU16(std::vector<std::uint8_t> &out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

// Zeroth-order modified Bessel function, for the Kaiser window.
double BesselI0(double x) {
  double sum = 1.0, term = 1.0;
  for (int k = 1; k < 64; ++k) {
    term *= (x / (2.0 * k)) * (x / (2.0 * k));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

}  // namespace

AudioStream DecodeWav(std::span<const std::uint8_t> b, const std::string &src) {
  if (b.size() < 12 || std::memcmp(b.data(), "RIFF", 4) != 0 ||
      std::memcmp(b.data() + 8, "WAVE", 4) != 0) {
    throw IngestionError(src + ": not a RIFF/WAVE file");
  }
  int channels = 0, rate = 0, bits = 0, format = 0;
  std::span<const std::uint8_t> data;
  bool have_fmt = false, have_data = false;
  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const std::uint32_t size = ReadU32(b, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > b.size()) {
      throw IngestionError(src + ": truncated chunk");
    }
    if (std::memcmp(b.data() + pos, "fmt ", 4) == 0) {
      if (size < 16) throw IngestionError(src + ": short fmt chunk");
      format = ReadU16(b, body);
      channels = ReadU16(b, body + 2);
      rate = static_cast<int>(ReadU32(b, body + 4));
      bits = ReadU16(b, body + 14);
      if (format == 0xFFFE && size >= 26) format = ReadU16(b, body + 24);
      have_fmt = true;
    } else if (std::memcmp(b.data() + pos, "data", 4) == 0) {
      data = b.subspan(body, size);
      have_data = true;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt || !have_data) throw IngestionError(src + ": missing fmt or data chunk");
  if (format != 1) throw IngestionError(src + ": only integer PCM is supported");
  if (channels < 1 || rate <= 0) throw IngestionError(src + ": bad channel count or rate");
  if (bits != 8 && bits != 16 && bits != 24 && bits != 32) {
    throw IngestionError(src + ": unsupported bit depth " + std::to_string(bits));
  }
  const std::size_t bytes_per = static_cast<std::size_t>(bits / 8);
  const std::size_t frames = data.size() / (bytes_per * channels);
  AudioStream out;
  out.sample_rate = rate;
  out.samples.resize(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      const std::size_t off = (f * channels + c) * bytes_per;
      double v = 0.0;
      switch (bits) {
        case 8: v = (static_cast<int>(data[off]) - 128) * 256.0; break;
        case 16: v = static_cast<std::int16_t>(ReadU16(data, off)); break;
        case 24: {
          std::int32_t s = data[off] | (data[off + 1] << 8) | (data[off + 2] << 16);
          if (s & 0x800000) s -= 0x1000000;
          v = s / 256.0;
          break;
        }
        case 32: v = static_cast<std::int32_t>(ReadU32(data, off)) / 65536.0; break;
      }
      acc += v;
    }
    const double mono = std::round(acc / channels);
    out.samples[f] = static_cast<std::int16_t>(std::clamp(mono, -32768.0, 32767.0));
  }
  return out;
}

AudioStream ReadWav(const std::filesystem::path &path) {
  const auto bytes = ReadBinaryFile(path);
  return DecodeWav(bytes, path.string());
}

std::vector<std::uint8_t> EncodeWav(const AudioStream &audio) {
  std::vector<std::uint8_t> out;
  const auto data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 2);
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  PutU32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  PutU32(out, 16);
  PutU16(out, 1);
  PutU16(out, 1);
  PutU32(out, static_cast<std::uint32_t>(audio.sample_rate));
  PutU32(out, static_cast<std::uint32_t>(audio.sample_rate * 2));
  PutU16(out, 2);
  PutU16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  PutU32(out, data_bytes);
  for (std::int16_t s : audio.samples) PutU16(out, static_cast<std::uint16_t>(s));
  return out;
}

void WriteWav(const std::filesystem::path &path, const AudioStream &audio) {
  WriteBinaryFile(path, EncodeWav(audio));
}

PolyphaseResampler::PolyphaseResampler(int input_rate, int output_rate) {
  if (input_rate <= 0 || output_rate <= 0) {
    throw InputError("sample rates must be positive");
  }
  const int g = std::gcd(input_rate, output_rate);
  up_ = output_rate / g;
  down_ = input_rate / g;
  if (up_ > 1000 || down_ > 1000) {
    throw InputError("unsupported resampling ratio " + std::to_string(input_rate) +
                     " -> " + std::to_string(output_rate));
  }
  // Cutoff at the narrower of the two Nyquist bands, slightly inside it.
  const int factor = std::max(up_, down_);
  const double cutoff = 0.95 / (2.0 * factor);  // cycles per upsampled sample
  constexpr int kZeroCrossings = 16;
  half_length_ = kZeroCrossings * factor;
  const int n = 2 * half_length_ + 1;
  taps_.resize(n);
  constexpr double kBeta = 8.6;
  const double i0b = BesselI0(kBeta);
  for (int i = 0; i < n; ++i) {
    const double t = i - half_length_;
    const double x = 2.0 * cutoff * t;
    const double sinc = t == 0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double r = t / half_length_;
    const double win = BesselI0(kBeta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0b;
    // Gain `up_` restores amplitude lost to zero-stuffing.
    taps_[i] = 2.0 * cutoff * sinc * win * up_;
  }
}

std::vector<double> PolyphaseResampler::Process(std::span<const double> in) const {
  const std::size_t n_in = in.size();
  const std::size_t n_out = (n_in * up_ + down_ - 1) / down_;
  std::vector<double> out(n_out, 0.0);
  const long long L = up_;
  const long long half = half_length_;
  for (std::size_t m = 0; m < n_out; ++m) {
    // Output m sits at upsampled index m*down; the centre tap lines up there.
    const long long centre = static_cast<long long>(m) * down_;
    // Upsampled positions j with j % L == 0 inside [centre-half, centre+half].
    long long j_lo = centre - half;
    long long first = j_lo <= 0 ? 0 : (j_lo + L - 1) / L;
    long long last = (centre + half) / L;
    if (last >= static_cast<long long>(n_in)) last = static_cast<long long>(n_in) - 1;
    double acc = 0.0;
    for (long long k = first; k <= last; ++k) {
      acc += in[k] * taps_[k * L - centre + half];
    }
    out[m] = acc;
  }
  return out;
}

AudioStream ResampleTo16k(const AudioStream &audio) {
  if (audio.sample_rate == kTargetSampleRate) return audio;
  PolyphaseResampler rs(audio.sample_rate, kTargetSampleRate);
  std::vector<double> in(audio.samples.begin(), audio.samples.end());
  const auto y = rs.Process(in);
  AudioStream out;
  out.sample_rate = kTargetSampleRate;
  out.samples.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    out.samples[i] = static_cast<std::int16_t>(std::clamp(std::round(y[i]), -32768.0, 32767.0));
  }
  return out;
}

}  // namespace uti
