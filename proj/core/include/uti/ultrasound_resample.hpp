// core/include/uti/ultrasound_resample.hpp

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

#ifndef UTI_ULTRASOUND_RESAMPLE_HPP_
#define UTI_ULTRASOUND_RESAMPLE_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace uti {

inline constexpr int kUltrasoundRows = 63;
inline constexpr int kUltrasoundCols = 103;

/// Bilinear resize on a corner-aligned grid: output index i samples source
/// coordinate i*(S-1)/(D-1). Row-major in and out. Throws ShapeError when a
/// source dimension is below 2.
std::vector<double> BilinearResize(std::span<const double> src, int src_rows, int src_cols,
                                   int dst_rows, int dst_cols);

/// One raw frame (scanlines x echoes bytes) to dst_rows x dst_cols floats
/// in [0, 1].
std::vector<float> ResampleUltrasoundFrame(std::span<const std::uint8_t> frame, int scanlines,
                                           int echoes, int dst_rows = kUltrasoundRows,
                                           int dst_cols = kUltrasoundCols);

}  // namespace uti

#endif  // UTI_ULTRASOUND_RESAMPLE_HPP_
