// core/src/sample.cpp

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

#include "uti/sample.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "uti/binary_io.hpp"
#include "uti/digest.hpp"
#include "uti/error.hpp"
#include "uti/rng.hpp"
#include "uti/text_io.hpp"

namespace fs = std::filesystem;

namespace uti {
namespace {

constexpr char kCacheMagic[] = "UMFC";
constexpr std::uint32_t kCacheVersion = 1;
constexpr char kSampleMagic[] = "UTISMP01";

}  // namespace

int SampleLayout::AudioStep(double shift_seconds) const {
  return std::max(1, static_cast<int>(std::lround(context_seconds / shift_seconds / audio_context)));
}

int SampleLayout::UltrasoundStep(double fps) const {
  return std::max(1, static_cast<int>(std::lround(context_seconds * fps / ultrasound_context)));
}

ContextIndices ComputeContextIndices(double anchor_time, std::size_t mfcc_frames,
                                     const UltrasoundStream &us, double shift_seconds,
                                     const SampleLayout &layout) {
  ContextIndices idx;
  idx.ultrasound_step = layout.UltrasoundStep(us.fps);
  idx.audio_step = layout.AudioStep(shift_seconds);
  const long us_anchor = std::lround((anchor_time - us.first_frame_time) * us.fps);
  const long us_last = static_cast<long>(us.num_frames()) - 1;
  for (int j = -layout.ultrasound_context; j <= layout.ultrasound_context; ++j) {
    idx.ultrasound.push_back(
        static_cast<int>(std::clamp(us_anchor + j * idx.ultrasound_step, 0L, us_last)));
  }
  const long a_anchor = std::lround(anchor_time / shift_seconds);
  const long a_last = static_cast<long>(mfcc_frames) - 1;
  for (int j = -layout.audio_context; j <= layout.audio_context; ++j) {
    idx.audio.push_back(static_cast<int>(std::clamp(a_anchor + j * idx.audio_step, 0L, a_last)));
  }
  return idx;
}

Sample BuildSample(const PhoneInstance &instance, const Utterance &utt, const FeatureMatrix &mfcc,
                   double perturbation_ms, const SampleLayout &layout,
                   const MfccConfig &mfcc_config) {
  if (std::abs(perturbation_ms) > layout.max_perturbation_ms) {
    throw ValidationError("perturbation " + FormatReal(perturbation_ms, 3) +
                          " ms exceeds the limit");
  }
  if (mfcc.rows == 0) throw UnsampleableError("utterance " + utt.id + " has no MFCC frames");
  const double anchor = instance.midpoint() + perturbation_ms / 1000.0;
  const bool in_audio = anchor >= 0.0 && anchor <= utt.audio.duration();
  const bool in_us = anchor >= utt.ultrasound.first_frame_time && anchor <= utt.ultrasound.end_time();
  if (!in_audio && !in_us) {
    throw UnsampleableError("anchor " + FormatReal(anchor, 4) + " s lies outside both streams of " +
                            utt.id);
  }
  const double shift = mfcc_config.shift_ms / 1000.0;
  const auto idx = ComputeContextIndices(anchor, static_cast<std::size_t>(mfcc.rows),
                                         utt.ultrasound, shift, layout);

  Sample s;
  s.audio_frames = layout.audio_frames();
  s.audio_dim = mfcc.cols;
  s.audio.reserve(static_cast<std::size_t>(s.audio_frames) * s.audio_dim);
  for (int i : idx.audio) {
    auto row = mfcc.row(i);
    s.audio.insert(s.audio.end(), row.begin(), row.end());
  }
  s.ultrasound_frames = layout.ultrasound_frames();
  s.ultrasound_rows = layout.ultrasound_rows;
  s.ultrasound_cols = layout.ultrasound_cols;
  s.ultrasound.reserve(static_cast<std::size_t>(s.ultrasound_frames) * s.ultrasound_rows *
                       s.ultrasound_cols);
  for (int i : idx.ultrasound) {
    const auto img = ResampleUltrasoundFrame(utt.ultrasound.frame(i), utt.ultrasound.scanlines,
                                             utt.ultrasound.echoes, layout.ultrasound_rows,
                                             layout.ultrasound_cols);
    s.ultrasound.insert(s.ultrasound.end(), img.begin(), img.end());
  }
  s.label = instance.cls;
  s.provenance = {instance.utterance_id, instance.speaker_id, instance.phone_index, anchor,
                  perturbation_ms};
  return s;
}

FeatureCache::FeatureCache(fs::path root, const MfccConfig &config)
    : dir_(std::move(root) / HexDigest(Digest64(config.Canonical()))) {}

fs::path FeatureCache::PathFor(const std::string &utterance_id) const {
  return dir_ / (utterance_id + ".mfc");
}

std::vector<std::uint8_t> FeatureCache::Encode(const FeatureMatrix &f) {
  ByteWriter w;
  w.PutBytes(std::string_view(kCacheMagic, 4));
  w.Put(kCacheVersion);
  w.Put(static_cast<std::uint32_t>(f.rows));
  w.Put(static_cast<std::uint32_t>(f.cols));
  w.PutArray(std::span<const float>(f.data));
  return std::move(w.bytes());
}

FeatureMatrix FeatureCache::Decode(std::span<const std::uint8_t> bytes, const std::string &source) {
  ByteReader<IngestionError> r(bytes, source);
  if (r.GetBytes(4) != std::string_view(kCacheMagic, 4)) {
    throw IngestionError(source + ": not a feature cache file");
  }
  if (r.Get<std::uint32_t>() != kCacheVersion) {
    throw IngestionError(source + ": unsupported cache version");
  }
  FeatureMatrix f;
  f.rows = static_cast<int>(r.Get<std::uint32_t>());
  f.cols = static_cast<int>(r.Get<std::uint32_t>());
  f.data.resize(static_cast<std::size_t>(f.rows) * f.cols);
  r.GetArray(std::span<float>(f.data));
  if (r.remaining() != 0) throw IngestionError(source + ": trailing bytes");
  return f;
}

std::optional<FeatureMatrix> FeatureCache::Load(const std::string &utterance_id) const {
  const auto path = PathFor(utterance_id);
  if (!fs::exists(path)) return std::nullopt;
  return Decode(ReadBinaryFile(path), path.string());
}

void FeatureCache::Store(const std::string &utterance_id, const FeatureMatrix &features) const {
  fs::create_directories(dir_);
  WriteBinaryFile(PathFor(utterance_id), Encode(features));
}

SampleFactory::SampleFactory(const Corpus &corpus, MfccConfig mfcc_config, SampleLayout layout,
                             const FeatureCache *cache)
    : corpus_(&corpus), mfcc_config_(std::move(mfcc_config)), layout_(layout) {
  for (const auto &u : corpus.utterances) {
    std::optional<FeatureMatrix> f;
    if (cache) f = cache->Load(u->id);
    if (!f) {
      f = ExtractMfcc(u->audio, mfcc_config_);
      if (cache) cache->Store(u->id, *f);
    }
    features_.emplace(u->id, std::move(*f));
  }
}

const FeatureMatrix &SampleFactory::features(const std::string &utterance_id) const {
  auto it = features_.find(utterance_id);
  if (it == features_.end()) throw NotFoundError("no features for utterance " + utterance_id);
  return it->second;
}

Sample SampleFactory::Build(std::size_t instance_index, double perturbation_ms) const {
  const auto &inst = corpus_->instances.at(instance_index);
  return BuildSample(inst, corpus_->utterance(inst.utterance_id), features(inst.utterance_id),
                     perturbation_ms, layout_, mfcc_config_);
}

std::vector<SampleRequest> PlanBalancedSet(std::span<const PhoneInstance> instances,
                                           const BalancePolicy &policy, std::uint64_t seed) {
  if (policy.per_class_cap == 0) throw ValidationError("per-class cap must be positive");
  if (!(policy.perturbation_limit_ms > 0.0)) {
    throw ValidationError("perturbation limit must be positive");
  }
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    by_class[ClassIndex(instances[i].cls)].push_back(i);
  }
  Rng rng(seed);
  std::vector<SampleRequest> plan;
  const std::size_t cap = policy.per_class_cap;
  for (auto &members : by_class) {
    const std::size_t n = members.size();
    if (n == 0) continue;
    if (n >= cap) {
      // Partial Fisher-Yates: the first `cap` entries form a uniform subset.
      for (std::size_t i = 0; i < cap; ++i) {
        std::swap(members[i], members[i + rng.Below(n - i)]);
        plan.push_back({members[i], 0.0});
      }
      continue;
    }
    for (std::size_t m : members) plan.push_back({m, 0.0});
    std::size_t have = n;
    while (have < cap) {
      std::vector<std::size_t> order = members;
      rng.Shuffle(order);
      for (std::size_t m : order) {
        if (have == cap) break;
        // Magnitude in (0, limit], random sign.
        const double magnitude = policy.perturbation_limit_ms * (1.0 - rng.Uniform());
        const double p = rng.Bernoulli(0.5) ? magnitude : -magnitude;
        plan.push_back({m, p});
        ++have;
      }
    }
  }
  rng.Shuffle(plan);
  return plan;
}

std::vector<Sample> BalanceTrainingSet(const SampleFactory &factory, const BalancePolicy &policy,
                                       std::uint64_t seed) {
  const auto plan = PlanBalancedSet(factory.corpus().instances, policy, seed);
  std::vector<Sample> samples;
  samples.reserve(plan.size());
  for (const auto &req : plan) samples.push_back(factory.Build(req.instance, req.perturbation_ms));
  return samples;
}

std::vector<Sample> BuildAllSamples(const SampleFactory &factory) {
  std::vector<Sample> samples;
  samples.reserve(factory.corpus().instances.size());
  for (std::size_t i = 0; i < factory.corpus().instances.size(); ++i) {
    samples.push_back(factory.Build(i, 0.0));
  }
  return samples;
}

namespace {

constexpr std::size_t kSampleHeaderBytes = 16;

std::vector<std::uint8_t> EncodeSampleRecord(const Sample &s) {
  ByteWriter w;
  w.Put(static_cast<std::uint8_t>(ClassIndex(s.label)));
  w.PutString16(s.provenance.utterance_id);
  w.PutString16(s.provenance.speaker_id);
  w.Put(static_cast<std::int32_t>(s.provenance.phone_index));
  w.Put(s.provenance.anchor_time);
  w.Put(s.provenance.perturbation_ms);
  w.Put(static_cast<std::uint32_t>(s.audio_frames));
  w.Put(static_cast<std::uint32_t>(s.audio_dim));
  w.Put(static_cast<std::uint32_t>(s.ultrasound_frames));
  w.Put(static_cast<std::uint32_t>(s.ultrasound_rows));
  w.Put(static_cast<std::uint32_t>(s.ultrasound_cols));
  w.PutArray(std::span<const float>(s.audio));
  w.PutArray(std::span<const float>(s.ultrasound));
  return std::move(w.bytes());
}

// Reads exactly n bytes or throws naming the file.
std::vector<std::uint8_t> ReadExact(std::istream &in, std::size_t n, const std::string &source) {
  std::vector<std::uint8_t> buf(n);
  in.read(reinterpret_cast<char *>(buf.data()), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) throw IngestionError(source + ": truncated data");
  return buf;
}

template <class T>
T ReadScalar(std::istream &in, const std::string &source) {
  const auto b = ReadExact(in, sizeof(T), source);
  return ByteReader<IngestionError>(b, source).Get<T>();
}

std::string ReadString16(std::istream &in, const std::string &source) {
  const auto n = ReadScalar<std::uint16_t>(in, source);
  const auto b = ReadExact(in, n, source);
  return std::string(b.begin(), b.end());
}

Sample DecodeSampleRecord(std::istream &in, const std::string &source) {
  Sample s;
  const auto label = ReadScalar<std::uint8_t>(in, source);
  if (label >= kNumClasses) throw IngestionError(source + ": bad class index");
  s.label = ClassFromIndex(label);
  s.provenance.utterance_id = ReadString16(in, source);
  s.provenance.speaker_id = ReadString16(in, source);
  const auto fixed = ReadExact(in, 4 + 8 + 8 + 5 * 4, source);
  ByteReader<IngestionError> r(fixed, source);
  s.provenance.phone_index = r.Get<std::int32_t>();
  s.provenance.anchor_time = r.Get<double>();
  s.provenance.perturbation_ms = r.Get<double>();
  s.audio_frames = static_cast<int>(r.Get<std::uint32_t>());
  s.audio_dim = static_cast<int>(r.Get<std::uint32_t>());
  s.ultrasound_frames = static_cast<int>(r.Get<std::uint32_t>());
  s.ultrasound_rows = static_cast<int>(r.Get<std::uint32_t>());
  s.ultrasound_cols = static_cast<int>(r.Get<std::uint32_t>());
  const std::size_t na = static_cast<std::size_t>(s.audio_frames) * s.audio_dim;
  const std::size_t nu = static_cast<std::size_t>(s.ultrasound_frames) * s.ultrasound_rows *
                         s.ultrasound_cols;
  if (na > (1u << 24) || nu > (1u << 26)) throw IngestionError(source + ": implausible sample shape");
  s.audio.resize(na);
  s.ultrasound.resize(nu);
  for (auto *v : {&s.audio, &s.ultrasound}) {
    in.read(reinterpret_cast<char *>(v->data()), static_cast<std::streamsize>(v->size() * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != v->size() * sizeof(float)) {
      throw IngestionError(source + ": truncated data");
    }
  }
  return s;
}

}  // namespace

SampleWriter::SampleWriter(const fs::path &path) : path_(path), out_(path, std::ios::binary) {
  if (!out_) throw InputError("cannot write " + path.string());
  ByteWriter w;
  w.PutBytes(std::string_view(kSampleMagic, 8));
  w.Put(static_cast<std::uint64_t>(0));
  out_.write(reinterpret_cast<const char *>(w.bytes().data()),
             static_cast<std::streamsize>(w.bytes().size()));
}

SampleWriter::~SampleWriter() {
  if (out_.is_open()) {
    try {
      Close();
    } catch (...) {
    }
  }
}

void SampleWriter::Write(const Sample &sample) {
  const auto record = EncodeSampleRecord(sample);
  out_.write(reinterpret_cast<const char *>(record.data()),
             static_cast<std::streamsize>(record.size()));
  if (!out_) throw InputError("write failure on " + path_.string());
  ++count_;
}

void SampleWriter::Close() {
  out_.seekp(8);
  const auto n = static_cast<std::uint64_t>(count_);
  out_.write(reinterpret_cast<const char *>(&n), sizeof n);
  out_.close();
  if (!out_) throw InputError("write failure on " + path_.string());
}

void SaveSamples(const fs::path &path, const std::vector<Sample> &samples) {
  SampleWriter w(path);
  for (const auto &s : samples) w.Write(s);
  w.Close();
}

std::vector<Sample> LoadSamples(const fs::path &path) {
  const std::string source = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open " + source);
  const auto header = ReadExact(in, kSampleHeaderBytes, source);
  ByteReader<IngestionError> r(header, source);
  if (r.GetBytes(8) != std::string_view(kSampleMagic, 8)) {
    throw IngestionError(source + ": not a sample-set file");
  }
  const auto count = r.Get<std::uint64_t>();
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 20)));
  for (std::uint64_t i = 0; i < count; ++i) samples.push_back(DecodeSampleRecord(in, source));
  if (in.peek() != std::char_traits<char>::eof()) throw IngestionError(source + ": trailing bytes");
  return samples;
}

}  // namespace uti
