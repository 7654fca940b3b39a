// core/include/uti/synth.hpp

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

#ifndef UTI_SYNTH_HPP_
#define UTI_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "uti/articulation.hpp"

namespace uti {

/// Parameters of a synthetic corpus. Each articulation class has a fixed
/// acoustic template (a three-tone mixture) and a fixed ultrasound template
/// (a bright ridge whose depth and curvature depend on the class); speakers
/// perturb both templates slightly.
struct SyntheticSpec {
  std::string speaker_prefix = "spk";
  int speakers = 4;
  int utterances_per_speaker = 20;
  int phones_per_utterance = 9;
  std::vector<ArticulationClass> classes{kAllClasses.begin(), kAllClasses.end()};

  int audio_sample_rate = 16000;
  double fps = 120.0;
  int scanlines = 63;
  int echoes = 128;
  double first_frame_time = 0.0;

  double min_phone_duration = 0.08;
  double max_phone_duration = 0.16;

  double audio_noise = 600.0;      // white-noise std-dev, int16 units
  double ultrasound_noise = 25.0;  // speckle std-dev, grey levels
  double speaker_variability = 1.0;  // scales per-speaker template jitter

  /// Fraction of instances labelled with a key class that are rendered as
  /// the mapped class instead.
  double error_rate = 0.0;
  std::map<ArticulationClass, ArticulationClass> substitutions;

  std::vector<std::string> sessions{"baseline", "mid", "post", "maintenance"};

  /// Throws SpecError.
  void Validate() const;
};

struct SynthesisSummary {
  std::size_t utterances = 0;
  std::size_t instances = 0;
  std::size_t substituted = 0;
};

/// Writes the corpus directory layout plus truth.tsv under `root`.
/// Output bytes depend only on (spec, seed).
SynthesisSummary GenerateSyntheticCorpus(const SyntheticSpec &spec, std::uint64_t seed,
                                         const std::filesystem::path &root);

/// Phone inventory used by the generator, one list per class, plus the
/// labels it emits for vowels and silence (all mapped to DISCARD).
const std::vector<std::string> &SyntheticPhones(ArticulationClass c);
const std::vector<std::string> &SyntheticDiscardPhones();

}  // namespace uti

#endif  // UTI_SYNTH_HPP_
