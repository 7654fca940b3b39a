// core/src/ultrasound_resample.cpp

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

#include "uti/ultrasound_resample.hpp"

#include <algorithm>
#include <string>

#include "uti/error.hpp"

namespace uti {
namespace {

struct Tap {
  int lo;
  int hi;
  double frac;
};

std::vector<Tap> Taps(int src, int dst) {
  std::vector<Tap> taps(dst);
  for (int i = 0; i < dst; ++i) {
    const double x = dst == 1 ? 0.0 : static_cast<double>(i) * (src - 1) / (dst - 1);
    int lo = static_cast<int>(x);
    lo = std::min(lo, src - 1);
    taps[i] = {lo, std::min(lo + 1, src - 1), x - lo};
  }
  return taps;
}

}  // namespace

std::vector<double> BilinearResize(std::span<const double> src, int src_rows, int src_cols,
                                   int dst_rows, int dst_cols) {
  if (src_rows < 2 || src_cols < 2) {
    throw ShapeError("cannot resample a " + std::to_string(src_rows) + "x" +
                     std::to_string(src_cols) + " image; both dimensions must be >= 2");
  }
  if (dst_rows < 1 || dst_cols < 1) throw ShapeError("destination shape must be positive");
  if (src.size() != static_cast<std::size_t>(src_rows) * src_cols) {
    throw ShapeError("source buffer does not match its shape");
  }
  const auto rt = Taps(src_rows, dst_rows);
  const auto ct = Taps(src_cols, dst_cols);
  std::vector<double> out(static_cast<std::size_t>(dst_rows) * dst_cols);
  for (int r = 0; r < dst_rows; ++r) {
    const double *a = src.data() + static_cast<std::size_t>(rt[r].lo) * src_cols;
    const double *b = src.data() + static_cast<std::size_t>(rt[r].hi) * src_cols;
    const double fy = rt[r].frac;
    for (int c = 0; c < dst_cols; ++c) {
      const double fx = ct[c].frac;
      const double top = a[ct[c].lo] * (1.0 - fx) + a[ct[c].hi] * fx;
      const double bottom = b[ct[c].lo] * (1.0 - fx) + b[ct[c].hi] * fx;
      out[static_cast<std::size_t>(r) * dst_cols + c] = top * (1.0 - fy) + bottom * fy;
    }
  }
  return out;
}

std::vector<float> ResampleUltrasoundFrame(std::span<const std::uint8_t> frame, int scanlines,
                                           int echoes, int dst_rows, int dst_cols) {
  std::vector<double> src(frame.begin(), frame.end());
  const auto resized = BilinearResize(src, scanlines, echoes, dst_rows, dst_cols);
  std::vector<float> out(resized.size());
  for (std::size_t i = 0; i < resized.size(); ++i) {
    out[i] = static_cast<float>(resized[i] / 255.0);
  }
  return out;
}

}  // namespace uti
