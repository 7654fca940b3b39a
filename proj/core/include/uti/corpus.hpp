// core/include/uti/corpus.hpp

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

#ifndef UTI_CORPUS_HPP_
#define UTI_CORPUS_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "uti/articulation.hpp"
#include "uti/audio.hpp"

namespace uti {

/// Raw B-mode frames. Storage is frame-major, scanline-major, echo-minor,
/// one unsigned byte per sample: the same order as the .ult file.
struct UltrasoundStream {
  int scanlines = 0;
  int echoes = 0;
  double fps = 0.0;
  double first_frame_time = 0.0;  // seconds, frame 0 relative to audio t=0
  std::vector<std::uint8_t> data;

  std::size_t frame_size() const {
    return static_cast<std::size_t>(scanlines) * static_cast<std::size_t>(echoes);
  }
  std::size_t num_frames() const { return frame_size() ? data.size() / frame_size() : 0; }
  std::span<const std::uint8_t> frame(std::size_t i) const {
    return {data.data() + i * frame_size(), frame_size()};
  }
  double frame_time(std::size_t i) const { return first_frame_time + i / fps; }
  /// Time just past the last frame.
  double end_time() const { return first_frame_time + num_frames() / fps; }
};

struct Utterance {
  std::string id;
  std::string speaker_id;
  std::string session_label;
  AudioStream audio;  // always 16 kHz after loading
  UltrasoundStream ultrasound;
};

enum class WordPosition { kInitial, kMedial, kFinal };
std::string_view WordPositionName(WordPosition p);
WordPosition ParseWordPosition(std::string_view s);

struct PhoneInstance {
  std::string utterance_id;
  std::string speaker_id;
  int phone_index = 0;  // 0-based row index within the utterance's alignment rows
  std::string phone_label;
  ArticulationClass cls = ArticulationClass::kAlveolar;
  double start = 0.0;
  double end = 0.0;
  std::string word;
  WordPosition word_position = WordPosition::kInitial;
  // Extent of the run of alignment rows sharing this word.
  double word_start = 0.0;
  double word_end = 0.0;

  double midpoint() const { return 0.5 * (start + end); }
  bool operator==(const PhoneInstance &) const = default;
};

/// phone label -> class, or nullopt for DISCARD.
class ClassMap {
 public:
  void Add(const std::string &phone, std::optional<ArticulationClass> cls);
  /// Throws ClassMapError naming the label when it has no entry.
  std::optional<ArticulationClass> Lookup(const std::string &phone) const;
  bool Contains(const std::string &phone) const { return entries_.count(phone) > 0; }
  const std::map<std::string, std::optional<ArticulationClass>> &entries() const {
    return entries_;
  }

  static ClassMap Parse(std::string_view tsv, const std::string &source);
  static ClassMap Load(const std::filesystem::path &path);
  std::string Serialize() const;

 private:
  std::map<std::string, std::optional<ArticulationClass>> entries_;
};

/// Immutable after loading; utterances are shared between a corpus and the
/// splits made from it.
struct Corpus {
  std::vector<std::shared_ptr<const Utterance>> utterances;  // sorted by id
  std::vector<PhoneInstance> instances;  // sorted by (utterance, phone_index)
  std::size_t dropped_no_parallel = 0;

  const Utterance &utterance(const std::string &id) const;
  std::array<std::size_t, kNumClasses> ClassCounts() const;
  std::set<std::string> Speakers() const;
};

/// Reads the on-disk layout:
///   <root>/<speaker>/<utt>.{wav,ult,meta}, <root>/alignments.tsv
/// Instances whose interval is not covered by both streams are dropped and
/// counted. Audio is resampled to 16 kHz.
Corpus LoadCorpus(const std::filesystem::path &root, const ClassMap &class_map);

/// Speaker-disjoint split. Every speaker in the corpus must belong to
/// exactly one of the three sets.
struct CorpusSplit {
  Corpus train;
  Corpus validation;
  Corpus test;
};
CorpusSplit SplitCorpus(const Corpus &corpus, const std::set<std::string> &train,
                        const std::set<std::string> &validation,
                        const std::set<std::string> &test);

// File formats shared by the loader and the synthetic generator.

struct UtteranceMeta {
  int scanlines = 0;
  int echoes = 0;
  double fps = 0.0;
  double first_frame_time = 0.0;
  std::string session;
};
UtteranceMeta ParseMeta(std::string_view text, const std::string &source);
std::string SerializeMeta(const UtteranceMeta &meta);

struct AlignmentRow {
  std::string utterance_id;
  std::string speaker_id;
  std::string phone;
  double start = 0.0;
  double end = 0.0;
  std::string word;
  WordPosition word_position = WordPosition::kInitial;
};
std::vector<AlignmentRow> ParseAlignments(std::string_view text, const std::string &source);
std::string SerializeAlignments(const std::vector<AlignmentRow> &rows);

struct TruthRow {
  std::string utterance_id;
  int phone_index = 0;
  ArticulationClass labeled = ArticulationClass::kAlveolar;
  ArticulationClass rendered = ArticulationClass::kAlveolar;
};
std::vector<TruthRow> ParseTruth(std::string_view text, const std::string &source);
std::string SerializeTruth(const std::vector<TruthRow> &rows);

}  // namespace uti

#endif  // UTI_CORPUS_HPP_
