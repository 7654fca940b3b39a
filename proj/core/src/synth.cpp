// core/src/synth.cpp

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

#include "uti/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "uti/audio.hpp"
#include "uti/corpus.hpp"
#include "uti/error.hpp"
#include "uti/rng.hpp"
#include "uti/text_io.hpp"

namespace fs = std::filesystem;

namespace uti {
namespace {

struct Segment {
  double start;
  double end;
  std::optional<ArticulationClass> rendered;  // nullopt: vowel or silence
  bool silence;
};

struct SpeakerProfile {
  double freq_scale;
  double ridge_shift;  // fraction of echo range
};

// Tone frequencies for a class; spread so neighbouring classes differ in
// both low and high bands.
std::array<double, 3> ClassTones(ArticulationClass c) {
  const double i = static_cast<double>(ClassIndex(c));
  return {320.0 + 310.0 * i, 3300.0 + 420.0 * std::fmod(i * 4.0, 9.0), 7000.0 - 150.0 * i};
}

double RidgeDepth(ArticulationClass c) { return 0.14 + 0.08 * ClassIndex(c); }
double RidgeCurvature(ArticulationClass c) { return (ClassIndex(c) % 2 ? 0.25 : -0.25); }

double RenderAudioSample(const Segment &seg, double t, const SpeakerProfile &sp,
                         const std::array<double, 3> &phase) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  if (seg.silence) return 0.0;
  if (!seg.rendered) {
    // Vowel: two low formant-like tones.
    return 4000.0 * std::sin(kTwoPi * 700.0 * sp.freq_scale * t + phase[0]) +
           2500.0 * std::sin(kTwoPi * 1200.0 * sp.freq_scale * t + phase[1]);
  }
  const auto tones = ClassTones(*seg.rendered);
  return 3500.0 * std::sin(kTwoPi * tones[0] * sp.freq_scale * t + phase[0]) +
         2500.0 * std::sin(kTwoPi * tones[1] * sp.freq_scale * t + phase[1]) +
         1500.0 * std::sin(kTwoPi * tones[2] * sp.freq_scale * t + phase[2]);
}

void RenderUltrasoundFrame(const Segment &seg, const SyntheticSpec &spec,
                           const SpeakerProfile &sp, Rng &rng, std::uint8_t *out) {
  const double echoes = spec.echoes;
  double depth = 0.5, curvature = 0.0, brightness = 200.0;
  if (seg.silence) {
    depth = 0.5;
    brightness = 90.0;
  } else if (seg.rendered) {
    depth = RidgeDepth(*seg.rendered);
    curvature = RidgeCurvature(*seg.rendered);
  }
  depth += sp.ridge_shift;
  const double width = 0.035 * echoes;
  for (int s = 0; s < spec.scanlines; ++s) {
    const double u = spec.scanlines > 1 ? static_cast<double>(s) / (spec.scanlines - 1) - 0.5 : 0.0;
    const double centre = (depth + curvature * u * u) * echoes;
    for (int e = 0; e < spec.echoes; ++e) {
      const double d = (e - centre) / width;
      double v = 20.0 + brightness * std::exp(-0.5 * d * d) + rng.Normal(0.0, spec.ultrasound_noise);
      out[static_cast<std::size_t>(s) * spec.echoes + e] =
          static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
    }
  }
}

const Segment &SegmentAt(const std::vector<Segment> &segs, double t) {
  // Segments tile [0, duration) without gaps.
  auto it = std::upper_bound(segs.begin(), segs.end(), t,
                             [](double v, const Segment &s) { return v < s.end; });
  if (it == segs.end()) return segs.back();
  return *it;
}

}  // namespace

const std::vector<std::string> &SyntheticPhones(ArticulationClass c) {
  static const std::array<std::vector<std::string>, kNumClasses> kPhones = {{
      {"t", "d", "n", "s", "z"},
      {"th", "dh"},
      {"p", "b", "m", "f", "v"},
      {"w"},
      {"l"},
      {"j"},
      {"sh", "zh", "ch", "jh"},
      {"r"},
      {"k", "g", "ng"},
  }};
  return kPhones[ClassIndex(c)];
}

const std::vector<std::string> &SyntheticDiscardPhones() {
  static const std::vector<std::string> kDiscard = {"sil", "aa", "iy", "uw"};
  return kDiscard;
}

void SyntheticSpec::Validate() const {
  if (!(fps > 0.0)) throw SpecError("fps must be positive");
  if (audio_sample_rate <= 0) throw SpecError("audio sample rate must be positive");
  if (!(error_rate >= 0.0 && error_rate <= 1.0)) {
    throw SpecError("error rate must lie in [0, 1]");
  }
  if (speakers <= 0 || utterances_per_speaker <= 0 || phones_per_utterance <= 0) {
    throw SpecError("speaker, utterance and phone counts must be positive");
  }
  if (scanlines < 2 || echoes < 2) throw SpecError("ultrasound geometry must be at least 2x2");
  if (classes.empty()) throw SpecError("at least one class is required");
  if (!(min_phone_duration > 0.0 && max_phone_duration >= min_phone_duration)) {
    throw SpecError("bad phone duration range");
  }
  if (audio_noise < 0.0 || ultrasound_noise < 0.0 || speaker_variability < 0.0) {
    throw SpecError("noise levels must be non-negative");
  }
  if (sessions.empty()) throw SpecError("at least one session label is required");
}

SynthesisSummary GenerateSyntheticCorpus(const SyntheticSpec &spec, std::uint64_t seed,
                                         const fs::path &root) {
  spec.Validate();
  fs::create_directories(root);
  Rng rng(seed);
  SynthesisSummary summary;

  ClassMap class_map;
  for (auto c : kAllClasses) {
    for (const auto &p : SyntheticPhones(c)) class_map.Add(p, c);
  }
  for (const auto &p : SyntheticDiscardPhones()) class_map.Add(p, std::nullopt);

  std::vector<AlignmentRow> alignments;
  std::vector<TruthRow> truth;

  char name[64];
  for (int spk = 0; spk < spec.speakers; ++spk) {
    std::snprintf(name, sizeof(name), "%s%02d", spec.speaker_prefix.c_str(), spk);
    const std::string speaker = name;
    fs::create_directories(root / speaker);
    const SpeakerProfile profile{1.0 + 0.02 * spec.speaker_variability * rng.Normal(),
                                 0.015 * spec.speaker_variability * rng.Normal()};

    // Balanced label pool per speaker.
    std::vector<ArticulationClass> pool;
    const int total = spec.utterances_per_speaker * spec.phones_per_utterance;
    for (int i = 0; i < total; ++i) pool.push_back(spec.classes[i % spec.classes.size()]);
    rng.Shuffle(pool);

    for (int u = 0; u < spec.utterances_per_speaker; ++u) {
      std::snprintf(name, sizeof(name), "%s_u%03d", speaker.c_str(), u);
      const std::string utt_id = name;
      const std::string session = spec.sessions[u % spec.sessions.size()];

      std::vector<Segment> segs;
      std::vector<AlignmentRow> rows;
      double t = 0.0;
      auto push = [&](double dur, const std::string &phone, std::optional<ArticulationClass> cls,
                      bool silence) {
        segs.push_back({t, t + dur, cls, silence});
        AlignmentRow r;
        r.utterance_id = utt_id;
        r.speaker_id = speaker;
        r.phone = phone;
        r.start = t;
        r.end = t + dur;
        rows.push_back(r);
        t += dur;
      };

      push(0.15, "sil", std::nullopt, true);
      std::vector<std::size_t> consonant_rows;
      for (int p = 0; p < spec.phones_per_utterance; ++p) {
        const ArticulationClass labeled = pool[u * spec.phones_per_utterance + p];
        ArticulationClass rendered = labeled;
        auto sub = spec.substitutions.find(labeled);
        if (sub != spec.substitutions.end() && rng.Bernoulli(spec.error_rate)) {
          rendered = sub->second;
          ++summary.substituted;
        }
        const auto &inventory = SyntheticPhones(labeled);
        const std::string phone = inventory[rng.Below(inventory.size())];
        const double dur = std::round(rng.Uniform(spec.min_phone_duration, spec.max_phone_duration) * 1e4) / 1e4;
        consonant_rows.push_back(rows.size());
        truth.push_back({utt_id, static_cast<int>(rows.size()), labeled, rendered});
        push(dur, phone, rendered, false);
        const auto &vowels = SyntheticDiscardPhones();
        const double vdur = std::round(rng.Uniform(0.06, 0.12) * 1e4) / 1e4;
        push(vdur, vowels[1 + rng.Below(vowels.size() - 1)], std::nullopt, false);
        ++summary.instances;
      }
      push(0.15, "sil", std::nullopt, true);

      // Group consonant+vowel pairs into words of one to three syllables.
      std::size_t k = 0;
      int word_no = 0;
      while (k < consonant_rows.size()) {
        const std::size_t len = std::min<std::size_t>(1 + rng.Below(3), consonant_rows.size() - k);
        std::string word;
        for (std::size_t j = 0; j < len; ++j) {
          const std::size_t r = consonant_rows[k + j];
          if (!word.empty()) word += "_";
          word += rows[r].phone + rows[r + 1].phone;
        }
        word += "-" + std::to_string(word_no++);
        for (std::size_t j = 0; j < len; ++j) {
          const std::size_t r = consonant_rows[k + j];
          const WordPosition pos = j == 0 ? WordPosition::kInitial
                                   : j + 1 == len ? WordPosition::kFinal
                                                  : WordPosition::kMedial;
          for (std::size_t rr : {r, r + 1}) {
            rows[rr].word = word;
            rows[rr].word_position = pos;
          }
        }
        k += len;
      }
      for (auto &r : rows) {
        if (r.word.empty()) {
          r.word = "<sil>";
          r.word_position = WordPosition::kInitial;
        }
      }
      // Silence rows either side must not merge into one word run.
      rows.front().word = "<sil-start>";
      rows.back().word = "<sil-end>";

      const double duration = t;

      // Audio at the requested rate.
      AudioStream audio;
      audio.sample_rate = spec.audio_sample_rate;
      const auto n_samples = static_cast<std::size_t>(std::floor(duration * spec.audio_sample_rate));
      audio.samples.resize(n_samples);
      const std::array<double, 3> phase = {rng.Uniform(0, 6.28), rng.Uniform(0, 6.28),
                                           rng.Uniform(0, 6.28)};
      for (std::size_t i = 0; i < n_samples; ++i) {
        const double ts = static_cast<double>(i) / spec.audio_sample_rate;
        const double v = RenderAudioSample(SegmentAt(segs, ts), ts, profile, phase) +
                         rng.Normal(0.0, spec.audio_noise);
        audio.samples[i] = static_cast<std::int16_t>(std::clamp(std::round(v), -32768.0, 32767.0));
      }
      WriteWav(root / speaker / (utt_id + ".wav"), audio);

      // Ultrasound frames cover [first_frame_time, duration).
      const double span = duration - spec.first_frame_time;
      const auto n_frames = static_cast<std::size_t>(std::max(1.0, std::floor(span * spec.fps)));
      const std::size_t fsize = static_cast<std::size_t>(spec.scanlines) * spec.echoes;
      std::vector<std::uint8_t> ult(n_frames * fsize);
      for (std::size_t f = 0; f < n_frames; ++f) {
        const double tf = spec.first_frame_time + f / spec.fps;
        RenderUltrasoundFrame(SegmentAt(segs, std::clamp(tf, 0.0, duration)), spec, profile, rng,
                              ult.data() + f * fsize);
      }
      WriteBinaryFile(root / speaker / (utt_id + ".ult"), ult);

      UtteranceMeta meta{spec.scanlines, spec.echoes, spec.fps, spec.first_frame_time, session};
      WriteTextFile(root / speaker / (utt_id + ".meta"), SerializeMeta(meta));

      alignments.insert(alignments.end(), rows.begin(), rows.end());
      ++summary.utterances;
    }
  }

  WriteTextFile(root / "alignments.tsv", SerializeAlignments(alignments));
  WriteTextFile(root / "classmap.tsv", class_map.Serialize());
  WriteTextFile(root / "truth.tsv", SerializeTruth(truth));
  return summary;
}

}  // namespace uti
