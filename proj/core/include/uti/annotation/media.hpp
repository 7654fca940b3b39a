// core/include/uti/annotation/media.hpp

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

#ifndef UTI_ANNOTATION_MEDIA_HPP_
#define UTI_ANNOTATION_MEDIA_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uti/corpus.hpp"

namespace uti::annotation {

/// 8-bit grayscale PNG, row-major pixels.
std::vector<std::uint8_t> EncodeGrayPng(int width, int height, std::span<const std::uint8_t> pixels);

/// Spectrogram images map this dB range linearly onto 0..255.
inline constexpr double kSpectrogramFloorDb = -100.0;
inline constexpr double kSpectrogramCeilDb = 60.0;

struct FrameImage {
  std::size_t index = 0;  // frame index in the utterance
  double time = 0.0;      // seconds on the audio clock
  std::vector<std::uint8_t> png;
};

struct MediaBundle {
  double word_start = 0.0;
  double word_end = 0.0;
  double clip_start = 0.0;  // audio clock time of the first clip sample
  std::vector<std::uint8_t> wav;
  std::vector<std::uint8_t> spectrogram_png;
  int spectrogram_width = 0;   // frames, 10 ms apart
  int spectrogram_height = 0;  // frequency bins, low frequencies at the bottom
  std::vector<FrameImage> frames;
  std::string meta_json;
};

/// Word-bounded audio clip, its spectrogram, and every ultrasound frame
/// whose timestamp falls inside the word. Frames are drawn with depth
/// (echo) vertical and scanlines horizontal. Throws RenderError when the
/// word is not inside the audio or no frame falls inside it.
MediaBundle RenderMedia(const PhoneInstance &instance, const Utterance &utt);

}  // namespace uti::annotation

#endif  // UTI_ANNOTATION_MEDIA_HPP_
