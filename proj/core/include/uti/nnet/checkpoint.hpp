// core/include/uti/nnet/checkpoint.hpp

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

#ifndef UTI_NNET_CHECKPOINT_HPP_
#define UTI_NNET_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "uti/nnet/model.hpp"

namespace uti::nnet {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Layout: magic "UTICKPT\0", u32 version, u64 architecture fingerprint,
/// u32-length architecture text, u32-length JSON metadata, u32 tensor count,
/// then per tensor a u16-length name, u8 weight flag, u32 rank, u32 dims and
/// float32 data; finally a u64 FNV-1a digest of every preceding byte.
/// Batch-norm running statistics are stored as the last two tensors.
std::vector<std::uint8_t> SerializeCheckpoint(const ModelState &model);

/// Throws CheckpointError on bad magic, version, digest, truncation, shape
/// disagreement with the embedded architecture, an output size other than
/// the number of classes, or non-positive running variance.
ModelState DeserializeCheckpoint(std::span<const std::uint8_t> bytes, const std::string &source);

void SaveCheckpoint(const ModelState &model, const std::filesystem::path &path);
ModelState LoadCheckpoint(const std::filesystem::path &path);

}  // namespace uti::nnet

#endif  // UTI_NNET_CHECKPOINT_HPP_
