// core/include/uti/sample.hpp

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

#ifndef UTI_SAMPLE_HPP_
#define UTI_SAMPLE_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "uti/articulation.hpp"
#include "uti/corpus.hpp"
#include "uti/mfcc.hpp"
#include "uti/ultrasound_resample.hpp"

namespace uti {

/// Context-window geometry. An anchor frame plus `*_context` frames on each
/// side, spread over `context_seconds` per side.
struct SampleLayout {
  double context_seconds = 0.1;
  int audio_context = 5;
  int ultrasound_context = 4;
  int ultrasound_rows = kUltrasoundRows;
  int ultrasound_cols = kUltrasoundCols;
  double max_perturbation_ms = 40.0;

  int audio_frames() const { return 2 * audio_context + 1; }
  int ultrasound_frames() const { return 2 * ultrasound_context + 1; }
  /// round(context / shift / audio_context), e.g. 2 at a 10 ms shift.
  int AudioStep(double shift_seconds) const;
  /// round(context * fps / ultrasound_context), at least 1.
  int UltrasoundStep(double fps) const;
};

struct SampleProvenance {
  std::string utterance_id;
  std::string speaker_id;
  int phone_index = 0;
  double anchor_time = 0.0;
  double perturbation_ms = 0.0;
  bool operator==(const SampleProvenance &) const = default;
};

/// Fixed-shape classifier input. Tensors are row-major:
/// audio [frames][dim], ultrasound [frames][rows][cols].
struct Sample {
  int audio_frames = 0;
  int audio_dim = 0;
  std::vector<float> audio;
  int ultrasound_frames = 0;
  int ultrasound_rows = 0;
  int ultrasound_cols = 0;
  std::vector<float> ultrasound;
  ArticulationClass label = ArticulationClass::kAlveolar;
  SampleProvenance provenance;

  bool operator==(const Sample &) const = default;
};

/// Frame indices used for one sample; exposed for tests.
struct ContextIndices {
  std::vector<int> audio;
  std::vector<int> ultrasound;
  int ultrasound_step = 0;
  int audio_step = 0;
};

ContextIndices ComputeContextIndices(double anchor_time, std::size_t mfcc_frames,
                                     const UltrasoundStream &us, double shift_seconds,
                                     const SampleLayout &layout);

/// Builds a sample around the phone midpoint shifted by `perturbation_ms`.
/// Out-of-range context frames are clamped to the nearest valid frame.
/// Throws ValidationError for perturbations beyond the limit and
/// UnsampleableError when the anchor lies outside both streams.
Sample BuildSample(const PhoneInstance &instance, const Utterance &utt, const FeatureMatrix &mfcc,
                   double perturbation_ms, const SampleLayout &layout = {},
                   const MfccConfig &mfcc_config = {});

/// MFCC frames stored on disk, one file per utterance under a directory
/// named by the digest of the MFCC configuration.
class FeatureCache {
 public:
  FeatureCache(std::filesystem::path root, const MfccConfig &config);
  std::optional<FeatureMatrix> Load(const std::string &utterance_id) const;
  void Store(const std::string &utterance_id, const FeatureMatrix &features) const;
  std::filesystem::path PathFor(const std::string &utterance_id) const;

  static std::vector<std::uint8_t> Encode(const FeatureMatrix &features);
  static FeatureMatrix Decode(std::span<const std::uint8_t> bytes, const std::string &source);

 private:
  std::filesystem::path dir_;
};

/// Owns per-utterance MFCCs for a corpus and builds samples on demand.
class SampleFactory {
 public:
  SampleFactory(const Corpus &corpus, MfccConfig mfcc_config = {}, SampleLayout layout = {},
                const FeatureCache *cache = nullptr);

  const Corpus &corpus() const { return *corpus_; }
  const SampleLayout &layout() const { return layout_; }
  const FeatureMatrix &features(const std::string &utterance_id) const;

  Sample Build(std::size_t instance_index, double perturbation_ms = 0.0) const;

 private:
  const Corpus *corpus_;
  MfccConfig mfcc_config_;
  SampleLayout layout_;
  std::map<std::string, FeatureMatrix> features_;
};

struct BalancePolicy {
  std::size_t per_class_cap = 1000;  // 10000 for the adult-domain sets
  double perturbation_limit_ms = 40.0;
};

struct SampleRequest {
  std::size_t instance = 0;
  double perturbation_ms = 0.0;
  bool operator==(const SampleRequest &) const = default;
};

/// Decides which instances (and perturbations) make up a class-balanced set.
/// Classes above the cap are subsampled without replacement; classes below
/// it keep every original and add perturbed copies, each instance used at
/// most ceil(cap / n) times. The result is shuffled.
std::vector<SampleRequest> PlanBalancedSet(std::span<const PhoneInstance> instances,
                                           const BalancePolicy &policy, std::uint64_t seed);

std::vector<Sample> BalanceTrainingSet(const SampleFactory &factory, const BalancePolicy &policy,
                                       std::uint64_t seed);

/// One sample per instance, perturbation 0, in corpus order.
std::vector<Sample> BuildAllSamples(const SampleFactory &factory);

/// Binary sample-set files written by `prepare`. The writer streams
/// records to disk one at a time.
class SampleWriter {
 public:
  explicit SampleWriter(const std::filesystem::path &path);
  ~SampleWriter();
  SampleWriter(const SampleWriter &) = delete;
  SampleWriter &operator=(const SampleWriter &) = delete;

  void Write(const Sample &sample);
  /// Finalizes the record count; called by the destructor if omitted.
  void Close();
  std::size_t count() const { return count_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t count_ = 0;
};

void SaveSamples(const std::filesystem::path &path, const std::vector<Sample> &samples);
std::vector<Sample> LoadSamples(const std::filesystem::path &path);

}  // namespace uti

#endif  // UTI_SAMPLE_HPP_
