// core/src/annotation/media.cpp

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

#include "uti/annotation/media.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "uti/audio.hpp"
#include "uti/error.hpp"
#include "uti/mfcc.hpp"

namespace uti::annotation {

std::vector<std::uint8_t> EncodeGrayPng(int width, int height,
                                        std::span<const std::uint8_t> pixels) {
  if (width <= 0 || height <= 0 ||
      pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw RenderError("image size does not match pixel count");
  }
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw RenderError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw RenderError("png_create_info_struct failed");
  }
  std::vector<std::uint8_t> out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw RenderError("png encoding failed");
  }
  png_set_write_fn(
      png, &out,
      [](png_structp p, png_bytep data, png_size_t n) {
        auto *buf = static_cast<std::vector<std::uint8_t> *>(png_get_io_ptr(p));
        buf->insert(buf->end(), data, data + n);
      },
      nullptr);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(pixels.data() + static_cast<std::size_t>(y) * width));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

MediaBundle RenderMedia(const PhoneInstance &instance, const Utterance &utt) {
  const double sr = utt.audio.sample_rate;
  const double duration = static_cast<double>(utt.audio.samples.size()) / sr;
  const double tolerance = 1.0 / sr;
  if (instance.word_start < -tolerance || instance.word_end > duration + tolerance ||
      instance.word_end <= instance.word_start) {
    throw RenderError("word '" + instance.word + "' [" + std::to_string(instance.word_start) + ", " +
                      std::to_string(instance.word_end) + "] is outside the audio of " + utt.id);
  }
  MediaBundle b;
  b.word_start = instance.word_start;
  b.word_end = instance.word_end;

  const auto first = static_cast<std::size_t>(std::max(0.0, std::round(instance.word_start * sr)));
  const auto last = std::min(utt.audio.samples.size(),
                             static_cast<std::size_t>(std::round(instance.word_end * sr)));
  AudioStream clip;
  clip.sample_rate = utt.audio.sample_rate;
  clip.samples.assign(utt.audio.samples.begin() + static_cast<std::ptrdiff_t>(first),
                      utt.audio.samples.begin() + static_cast<std::ptrdiff_t>(last));
  b.clip_start = static_cast<double>(first) / sr;
  b.wav = EncodeWav(clip);

  MfccConfig cfg;
  cfg.sample_rate = utt.audio.sample_rate;
  std::vector<double> signal(clip.samples.begin(), clip.samples.end());
  auto spec = LogPowerSpectrogram(signal, cfg);
  if (spec.empty()) spec.assign(1, std::vector<double>(cfg.fft_size / 2 + 1, kSpectrogramFloorDb));
  b.spectrogram_width = static_cast<int>(spec.size());
  b.spectrogram_height = static_cast<int>(spec[0].size());
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(b.spectrogram_width) *
                                   b.spectrogram_height);
  for (int x = 0; x < b.spectrogram_width; ++x) {
    for (int y = 0; y < b.spectrogram_height; ++y) {
      const double db = std::clamp(spec[x][y], kSpectrogramFloorDb, kSpectrogramCeilDb);
      const double v = (db - kSpectrogramFloorDb) / (kSpectrogramCeilDb - kSpectrogramFloorDb);
      const int row = b.spectrogram_height - 1 - y;
      pixels[static_cast<std::size_t>(row) * b.spectrogram_width + x] =
          static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
  }
  b.spectrogram_png = EncodeGrayPng(b.spectrogram_width, b.spectrogram_height, pixels);

  const auto &us = utt.ultrasound;
  std::vector<std::uint8_t> frame_pixels(us.frame_size());
  for (std::size_t i = 0; i < us.num_frames(); ++i) {
    const double t = us.frame_time(i);
    if (t < instance.word_start || t >= instance.word_end) continue;
    const auto frame = us.frame(i);
    // Stored scanline-major; draw echoes as rows, shallow at the top.
    for (int e = 0; e < us.echoes; ++e) {
      for (int s = 0; s < us.scanlines; ++s) {
        frame_pixels[static_cast<std::size_t>(e) * us.scanlines + s] =
            frame[static_cast<std::size_t>(s) * us.echoes + e];
      }
    }
    b.frames.push_back({i, t, EncodeGrayPng(us.scanlines, us.echoes, frame_pixels)});
  }
  if (b.frames.empty()) {
    throw RenderError("no ultrasound frame inside word '" + instance.word + "' of " + utt.id);
  }

  nlohmann::ordered_json meta;
  meta["utterance_id"] = instance.utterance_id;
  meta["phone_index"] = instance.phone_index;
  meta["phone"] = instance.phone_label;
  meta["word"] = instance.word;
  meta["word_start"] = instance.word_start;
  meta["word_end"] = instance.word_end;
  meta["phone_start"] = instance.start;
  meta["phone_end"] = instance.end;
  meta["clip_start"] = b.clip_start;
  meta["sample_rate"] = clip.sample_rate;
  meta["spectrogram"] = {{"asset", "spectrogram.png"},
                         {"width", b.spectrogram_width},
                         {"height", b.spectrogram_height},
                         {"frame_shift", cfg.shift_ms / 1000.0},
                         {"window", cfg.window_ms / 1000.0},
                         {"floor_db", kSpectrogramFloorDb},
                         {"ceil_db", kSpectrogramCeilDb}};
  nlohmann::ordered_json frames = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < b.frames.size(); ++k) {
    frames.push_back({{"asset", "frame-" + std::to_string(k) + ".png"},
                      {"index", b.frames[k].index},
                      {"time", b.frames[k].time}});
  }
  meta["frames"] = frames;
  b.meta_json = meta.dump(2) + "\n";
  return b;
}

}  // namespace uti::annotation
