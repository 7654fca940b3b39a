// core/src/nnet/checkpoint.cpp

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

#include "uti/nnet/checkpoint.hpp"

#include <json.hpp>

#include "uti/binary_io.hpp"
#include "uti/digest.hpp"
#include "uti/error.hpp"
#include "uti/text_io.hpp"

namespace uti::nnet {
namespace {

constexpr char kMagic[8] = {'U', 'T', 'I', 'C', 'K', 'P', 'T', '\0'};

void PutTensor(ByteWriter &w, const std::string &name, bool weight, const std::vector<int> &shape,
               std::span<const float> data) {
  w.PutString16(name);
  w.Put<std::uint8_t>(weight ? 1 : 0);
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(shape.size()));
  for (int d : shape) w.Put<std::uint32_t>(static_cast<std::uint32_t>(d));
  w.PutArray(data);
}

}  // namespace

std::vector<std::uint8_t> SerializeCheckpoint(const ModelState &model) {
  ByteWriter w;
  w.PutBytes(std::string_view(kMagic, sizeof(kMagic)));
  w.Put<std::uint32_t>(kCheckpointVersion);
  w.Put<std::uint64_t>(model.arch().Fingerprint());
  w.PutString32(model.arch().Canonical());
  nlohmann::json meta = {
      {"epoch", model.meta.epoch},
      {"validation_accuracy", model.meta.validation_accuracy},
      {"seed", model.meta.seed},
      {"mode", model.meta.mode},
      {"running_stats_ready", model.running_stats_ready},
  };
  w.PutString32(meta.dump());
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(model.params().size() + 2));
  for (const auto &t : model.params()) PutTensor(w, t.name, t.is_weight, t.shape, t.data);
  const int d = model.arch().concat_dim();
  PutTensor(w, "bn.running_mean", false, {d}, model.running_mean);
  PutTensor(w, "bn.running_var", false, {d}, model.running_var);
  Fnv1a64 h;
  h.Update(std::span<const std::uint8_t>(w.bytes()));
  w.Put<std::uint64_t>(h.value());
  return std::move(w.bytes());
}

ModelState DeserializeCheckpoint(std::span<const std::uint8_t> bytes, const std::string &source) {
  if (bytes.size() < sizeof(kMagic) + 4 + 8 + 8) {
    throw CheckpointError(source + ": truncated data");
  }
  const auto body = bytes.first(bytes.size() - 8);
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + body.size(), 8);

  ByteReader<CheckpointError> r(body, source);
  if (r.GetBytes(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic))) {
    throw CheckpointError(source + ": not a checkpoint file");
  }
  const auto version = r.Get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw CheckpointError(source + ": unsupported checkpoint version " + std::to_string(version));
  }
  Fnv1a64 h;
  h.Update(body);
  if (h.value() != stored) throw CheckpointError(source + ": digest mismatch");

  const auto fingerprint = r.Get<std::uint64_t>();
  ArchitectureConfig arch;
  try {
    arch = ArchitectureConfig::Parse(r.GetString32());
    arch.Validate();
  } catch (const CheckpointError &) {
    throw;
  } catch (const Error &e) {
    throw CheckpointError(source + ": " + e.what());
  }
  if (arch.Fingerprint() != fingerprint) {
    throw CheckpointError(source + ": architecture fingerprint mismatch");
  }
  ModelState model(arch);
  try {
    const auto meta = nlohmann::json::parse(r.GetString32());
    model.meta.epoch = meta.at("epoch").get<int>();
    model.meta.validation_accuracy = meta.at("validation_accuracy").get<double>();
    model.meta.seed = meta.at("seed").get<std::uint64_t>();
    model.meta.mode = meta.at("mode").get<std::string>();
    model.running_stats_ready = meta.at("running_stats_ready").get<bool>();
  } catch (const nlohmann::json::exception &e) {
    throw CheckpointError(source + ": bad metadata block: " + e.what());
  }

  const auto count = r.Get<std::uint32_t>();
  if (count != model.params().size() + 2) {
    throw CheckpointError(source + ": expected " + std::to_string(model.params().size() + 2) +
                          " tensors, found " + std::to_string(count));
  }
  const std::vector<int> stat_shape{arch.concat_dim()};
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = r.GetString16();
    const bool weight = r.Get<std::uint8_t>() != 0;
    const auto rank = r.Get<std::uint32_t>();
    if (rank > 8) throw CheckpointError(source + ": tensor " + name + " has rank " + std::to_string(rank));
    std::vector<int> shape(rank);
    for (auto &d : shape) d = static_cast<int>(r.Get<std::uint32_t>());

    AlignedVector<float> *dest;
    const std::vector<int> *want_shape;
    std::string want_name;
    bool want_weight = false;
    if (i < model.params().size()) {
      auto &t = model.params()[i];
      dest = &t.data;
      want_shape = &t.shape;
      want_name = t.name;
      want_weight = t.is_weight;
    } else {
      dest = i == model.params().size() ? &model.running_mean : &model.running_var;
      want_shape = &stat_shape;
      want_name = i == model.params().size() ? "bn.running_mean" : "bn.running_var";
    }
    if (name != want_name || shape != *want_shape || weight != want_weight) {
      throw CheckpointError(source + ": tensor " + std::to_string(i) + " is '" + name +
                            "', expected '" + want_name + "' with matching shape");
    }
    r.GetArray(std::span<float>(*dest));
  }
  if (r.remaining() != 0) throw CheckpointError(source + ": trailing bytes");
  for (float v : model.running_var) {
    if (!(v > 0.0f)) throw CheckpointError(source + ": non-positive running variance");
  }
  return model;
}

void SaveCheckpoint(const ModelState &model, const std::filesystem::path &path) {
  WriteBinaryFile(path, SerializeCheckpoint(model));
}

ModelState LoadCheckpoint(const std::filesystem::path &path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = ReadBinaryFile(path);
  } catch (const Error &e) {
    throw CheckpointError(e.what());
  }
  return DeserializeCheckpoint(bytes, path.string());
}

}  // namespace uti::nnet
