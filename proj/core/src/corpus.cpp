// core/src/corpus.cpp

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

#include "uti/corpus.hpp"

#include <algorithm>
#include <tuple>

#include "uti/error.hpp"
#include "uti/text_io.hpp"

namespace fs = std::filesystem;

namespace uti {
namespace {

constexpr const char *kDiscard = "DISCARD";

bool IsHeaderOrComment(const std::vector<std::string> &fields, const char *first) {
  return fields.empty() || (fields.size() == 1 && Trim(fields[0]).empty()) ||
         fields[0].starts_with("#") || fields[0] == first;
}

}  // namespace

std::string_view WordPositionName(WordPosition p) {
  switch (p) {
    case WordPosition::kInitial: return "initial";
    case WordPosition::kMedial: return "medial";
    case WordPosition::kFinal: return "final";
  }
  return "initial";
}

WordPosition ParseWordPosition(std::string_view s) {
  if (s == "initial") return WordPosition::kInitial;
  if (s == "medial") return WordPosition::kMedial;
  if (s == "final") return WordPosition::kFinal;
  throw ValidationError("bad word position '" + std::string(s) + "'");
}

void ClassMap::Add(const std::string &phone, std::optional<ArticulationClass> cls) {
  entries_[phone] = cls;
}

std::optional<ArticulationClass> ClassMap::Lookup(const std::string &phone) const {
  auto it = entries_.find(phone);
  if (it == entries_.end()) {
    throw ClassMapError("phone label '" + phone + "' is not in the class map");
  }
  return it->second;
}

ClassMap ClassMap::Parse(std::string_view tsv, const std::string &source) {
  ClassMap map;
  int lineno = 0;
  for (const auto &line : SplitLines(tsv)) {
    ++lineno;
    auto f = SplitTabs(line);
    if (IsHeaderOrComment(f, "phone_label")) continue;
    if (f.size() != 2) {
      throw IngestionError(source + ":" + std::to_string(lineno) + ": expected 2 columns");
    }
    if (f[1] == kDiscard) {
      map.Add(f[0], std::nullopt);
    } else {
      auto cls = ParseClass(f[1]);
      if (!cls) {
        throw ClassMapError(source + ":" + std::to_string(lineno) + ": unknown class '" +
                            f[1] + "'");
      }
      map.Add(f[0], *cls);
    }
  }
  return map;
}

ClassMap ClassMap::Load(const fs::path &path) {
  return Parse(ReadTextFile(path), path.string());
}

std::string ClassMap::Serialize() const {
  std::string out = "phone_label\tclass\n";
  for (const auto &[phone, cls] : entries_) {
    out += phone + "\t" + (cls ? std::string(ClassName(*cls)) : kDiscard) + "\n";
  }
  return out;
}

const Utterance &Corpus::utterance(const std::string &id) const {
  auto it = std::lower_bound(utterances.begin(), utterances.end(), id,
                             [](const auto &u, const std::string &k) { return u->id < k; });
  if (it == utterances.end() || (*it)->id != id) {
    throw NotFoundError("no utterance '" + id + "' in corpus");
  }
  return **it;
}

std::array<std::size_t, kNumClasses> Corpus::ClassCounts() const {
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto &inst : instances) ++counts[ClassIndex(inst.cls)];
  return counts;
}

std::set<std::string> Corpus::Speakers() const {
  std::set<std::string> s;
  for (const auto &u : utterances) s.insert(u->speaker_id);
  return s;
}

UtteranceMeta ParseMeta(std::string_view text, const std::string &source) {
  std::map<std::string, std::string> kv;
  try {
    kv = ParseKeyValue(text, source);
  } catch (const InputError &e) {
    throw IngestionError(e.what());
  }
  auto need = [&](const char *key) -> const std::string & {
    auto it = kv.find(key);
    if (it == kv.end()) throw IngestionError(source + ": missing key '" + key + "'");
    return it->second;
  };
  UtteranceMeta m;
  try {
    m.scanlines = static_cast<int>(ParseInt(need("scanlines"), source + " scanlines"));
    m.echoes = static_cast<int>(ParseInt(need("echoes"), source + " echoes"));
    m.fps = ParseDouble(need("fps"), source + " fps");
    m.first_frame_time = ParseDouble(need("first_frame_time"), source + " first_frame_time");
  } catch (const InputError &e) {
    throw IngestionError(e.what());
  }
  auto it = kv.find("session");
  if (it != kv.end()) m.session = it->second;
  if (!(m.fps > 0.0)) throw MetadataError(source + ": fps must be positive");
  if (m.scanlines <= 0 || m.echoes <= 0) {
    throw MetadataError(source + ": scanlines and echoes must be positive");
  }
  return m;
}

std::string SerializeMeta(const UtteranceMeta &m) {
  std::string out;
  out += "scanlines=" + std::to_string(m.scanlines) + "\n";
  out += "echoes=" + std::to_string(m.echoes) + "\n";
  out += "fps=" + FormatReal(m.fps, 6) + "\n";
  out += "first_frame_time=" + FormatReal(m.first_frame_time, 6) + "\n";
  out += "session=" + m.session + "\n";
  return out;
}

std::vector<AlignmentRow> ParseAlignments(std::string_view text, const std::string &source) {
  std::vector<AlignmentRow> rows;
  int lineno = 0;
  for (const auto &line : SplitLines(text)) {
    ++lineno;
    auto f = SplitTabs(line);
    if (IsHeaderOrComment(f, "utt_id")) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    if (f.size() != 7) throw IngestionError(where + ": expected 7 columns");
    AlignmentRow r;
    r.utterance_id = f[0];
    r.speaker_id = f[1];
    r.phone = f[2];
    try {
      r.start = ParseDouble(f[3], where + " start_sec");
      r.end = ParseDouble(f[4], where + " end_sec");
      r.word_position = ParseWordPosition(f[6]);
    } catch (const Error &e) {
      throw IngestionError(e.what());
    }
    r.word = f[5];
    if (!(r.start < r.end)) throw IngestionError(where + ": start must precede end");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string SerializeAlignments(const std::vector<AlignmentRow> &rows) {
  std::string out = "utt_id\tspeaker\tphone\tstart_sec\tend_sec\tword\tword_position\n";
  for (const auto &r : rows) {
    out += r.utterance_id + "\t" + r.speaker_id + "\t" + r.phone + "\t" +
           FormatReal(r.start, 4) + "\t" + FormatReal(r.end, 4) + "\t" + r.word + "\t" +
           std::string(WordPositionName(r.word_position)) + "\n";
  }
  return out;
}

std::vector<TruthRow> ParseTruth(std::string_view text, const std::string &source) {
  std::vector<TruthRow> rows;
  int lineno = 0;
  for (const auto &line : SplitLines(text)) {
    ++lineno;
    auto f = SplitTabs(line);
    if (IsHeaderOrComment(f, "utt_id")) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    if (f.size() != 4) throw InputError(where + ": expected 4 columns");
    TruthRow r;
    r.utterance_id = f[0];
    r.phone_index = static_cast<int>(ParseInt(f[1], where + " phone_index"));
    r.labeled = ParseClassOrThrow(f[2]);
    r.rendered = ParseClassOrThrow(f[3]);
    rows.push_back(r);
  }
  return rows;
}

std::string SerializeTruth(const std::vector<TruthRow> &rows) {
  std::string out = "utt_id\tphone_index\tlabeled_class\trendered_class\n";
  for (const auto &r : rows) {
    out += r.utterance_id + "\t" + std::to_string(r.phone_index) + "\t" +
           std::string(ClassName(r.labeled)) + "\t" + std::string(ClassName(r.rendered)) + "\n";
  }
  return out;
}

namespace {

std::shared_ptr<Utterance> LoadUtterance(const fs::path &root, const std::string &speaker,
                                         const std::string &utt_id) {
  const fs::path base = root / speaker / utt_id;
  const fs::path meta_path = base.string() + ".meta";
  const fs::path wav_path = base.string() + ".wav";
  const fs::path ult_path = base.string() + ".ult";
  for (const auto &p : {meta_path, wav_path, ult_path}) {
    if (!fs::exists(p)) throw IngestionError("missing file " + p.string());
  }
  const UtteranceMeta meta = ParseMeta(ReadTextFile(meta_path), meta_path.string());

  auto utt = std::make_shared<Utterance>();
  utt->id = utt_id;
  utt->speaker_id = speaker;
  utt->session_label = meta.session;
  utt->audio = ResampleTo16k(ReadWav(wav_path));
  if (utt->audio.samples.empty()) throw IngestionError(wav_path.string() + ": no audio samples");

  auto &us = utt->ultrasound;
  us.scanlines = meta.scanlines;
  us.echoes = meta.echoes;
  us.fps = meta.fps;
  us.first_frame_time = meta.first_frame_time;
  us.data = ReadBinaryFile(ult_path);
  if (us.data.empty() || us.data.size() % us.frame_size() != 0) {
    throw IngestionError(ult_path.string() + ": size " + std::to_string(us.data.size()) +
                         " is not a positive multiple of the frame size " +
                         std::to_string(us.frame_size()));
  }
  return utt;
}

bool CoveredByBothStreams(const Utterance &u, double start, double end) {
  const bool audio_ok = start >= 0.0 && end <= u.audio.duration();
  const bool us_ok = start >= u.ultrasound.first_frame_time && end <= u.ultrasound.end_time();
  return audio_ok && us_ok;
}

}  // namespace

Corpus LoadCorpus(const fs::path &root, const ClassMap &class_map) {
  const fs::path align_path = root / "alignments.tsv";
  if (!fs::exists(align_path)) throw IngestionError("missing file " + align_path.string());
  const auto rows = ParseAlignments(ReadTextFile(align_path), align_path.string());

  // Totality of the class map is checked before touching media files.
  for (const auto &r : rows) class_map.Lookup(r.phone);

  std::map<std::string, std::string> utt_speaker;
  std::map<std::string, std::vector<const AlignmentRow *>> by_utt;
  for (const auto &r : rows) {
    auto [it, inserted] = utt_speaker.emplace(r.utterance_id, r.speaker_id);
    if (!inserted && it->second != r.speaker_id) {
      throw IngestionError(align_path.string() + ": utterance '" + r.utterance_id +
                           "' listed under two speakers");
    }
    by_utt[r.utterance_id].push_back(&r);
  }

  Corpus corpus;
  for (const auto &[utt_id, speaker] : utt_speaker) {
    corpus.utterances.push_back(LoadUtterance(root, speaker, utt_id));
  }

  for (const auto &[utt_id, utt_rows] : by_utt) {
    const Utterance &utt = corpus.utterance(utt_id);
    for (std::size_t i = 0; i < utt_rows.size(); ++i) {
      const AlignmentRow &r = *utt_rows[i];
      auto cls = class_map.Lookup(r.phone);
      if (!cls) continue;
      // Word extent: the contiguous run of rows carrying the same word.
      std::size_t lo = i, hi = i;
      while (lo > 0 && utt_rows[lo - 1]->word == r.word) --lo;
      while (hi + 1 < utt_rows.size() && utt_rows[hi + 1]->word == r.word) ++hi;
      if (!CoveredByBothStreams(utt, r.start, r.end)) {
        ++corpus.dropped_no_parallel;
        continue;
      }
      PhoneInstance inst;
      inst.utterance_id = utt_id;
      inst.speaker_id = r.speaker_id;
      inst.phone_index = static_cast<int>(i);
      inst.phone_label = r.phone;
      inst.cls = *cls;
      inst.start = r.start;
      inst.end = r.end;
      inst.word = r.word;
      inst.word_position = r.word_position;
      inst.word_start = utt_rows[lo]->start;
      inst.word_end = utt_rows[hi]->end;
      corpus.instances.push_back(std::move(inst));
    }
  }
  return corpus;
}

CorpusSplit SplitCorpus(const Corpus &corpus, const std::set<std::string> &train,
                        const std::set<std::string> &validation,
                        const std::set<std::string> &test) {
  auto overlap = [](const std::set<std::string> &a, const std::set<std::string> &b,
                    const char *an, const char *bn) {
    for (const auto &s : a) {
      if (b.count(s)) {
        throw SplitError("speaker '" + s + "' is in both " + an + " and " + bn);
      }
    }
  };
  overlap(train, validation, "train", "validation");
  overlap(train, test, "train", "test");
  overlap(validation, test, "validation", "test");

  CorpusSplit split;
  auto target = [&](const std::string &speaker) -> Corpus & {
    if (train.count(speaker)) return split.train;
    if (validation.count(speaker)) return split.validation;
    if (test.count(speaker)) return split.test;
    throw SplitError("speaker '" + speaker + "' is not assigned to any split");
  };
  for (const auto &u : corpus.utterances) target(u->speaker_id).utterances.push_back(u);
  for (const auto &inst : corpus.instances) target(inst.speaker_id).instances.push_back(inst);
  return split;
}

}  // namespace uti
