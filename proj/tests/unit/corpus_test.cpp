// tests/unit/corpus_test.cpp

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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_util.hpp"
#include "uti/audio.hpp"
#include "uti/corpus.hpp"
#include "uti/error.hpp"
#include "uti/synth.hpp"
#include "uti/text_io.hpp"

namespace uti {
namespace {

namespace fs = std::filesystem;

TEST(TextIo, CsvRoundTrip) {
  const std::vector<std::string> row = {"a", "b,c", "d\"e", ""};
  const auto parsed = ParseCsv(CsvRow(row) + "\n" + CsvRow({"x"}) + "\n");
  ASSERT_EQ(parsed.size(), 2u);
  EXPECT_EQ(parsed[0], row);
  EXPECT_EQ(parsed[1], std::vector<std::string>{"x"});
}

TEST(TextIo, KeyValueAndNumbers) {
  const auto kv = ParseKeyValue("# comment\nfps = 120.5\n\nsession=mid\n", "m");
  EXPECT_EQ(kv.at("fps"), "120.5");
  EXPECT_EQ(kv.at("session"), "mid");
  EXPECT_EQ(ParseDouble("1e-3", "x"), 1e-3);
  EXPECT_THROW(ParseDouble("1.0abc", "x"), InputError);
  EXPECT_THROW(ParseInt("7.5", "x"), InputError);
}

TEST(Audio, WavRoundTrip) {
  AudioStream a;
  for (int i = 0; i < 1000; ++i) a.samples.push_back(static_cast<std::int16_t>(i * 31 - 15000));
  const AudioStream b = DecodeWav(EncodeWav(a), "mem");
  EXPECT_EQ(b.sample_rate, 16000);
  EXPECT_EQ(b.samples, a.samples);
}

TEST(Audio, RejectsGarbage) {
  const std::vector<std::uint8_t> junk = {'R', 'I', 'F', 'F', 0, 0};
  EXPECT_THROW(DecodeWav(junk, "junk.wav"), IngestionError);
}

TEST(Audio, ResamplesCommonRatesTo16k) {
  for (int rate : {48000, 44100, 22050, 32000}) {
    AudioStream a;
    a.sample_rate = rate;
    const int n = rate / 2;
    for (int i = 0; i < n; ++i) {
      a.samples.push_back(static_cast<std::int16_t>(
          std::lround(8000.0 * std::sin(2.0 * std::numbers::pi * 440.0 * i / rate))));
    }
    const AudioStream b = ResampleTo16k(a);
    EXPECT_EQ(b.sample_rate, 16000);
    EXPECT_NEAR(static_cast<double>(b.samples.size()), 8000.0, 1.0) << rate;
    // Away from the edges the tone is preserved in phase and amplitude.
    double max_err = 0.0;
    for (std::size_t i = 400; i + 400 < b.samples.size(); ++i) {
      const double ref = 8000.0 * std::sin(2.0 * std::numbers::pi * 440.0 * i / 16000.0);
      max_err = std::max(max_err, std::abs(b.samples[i] - ref));
    }
    EXPECT_LT(max_err, 40.0) << rate;
  }
  AudioStream odd;
  odd.sample_rate = 12345;
  odd.samples.resize(100);
  EXPECT_THROW(ResampleTo16k(odd), InputError);
}

TEST(ClassMapFile, ParseAndLookup) {
  const ClassMap m = ClassMap::Parse("k\tvelar\nsil\tDISCARD\n", "cm");
  EXPECT_EQ(m.Lookup("k"), ArticulationClass::kVelar);
  EXPECT_EQ(m.Lookup("sil"), std::nullopt);
  EXPECT_THROW(m.Lookup("zh"), ClassMapError);
  EXPECT_THROW(ClassMap::Parse("k\tuvular\n", "cm"), ClassMapError);
  EXPECT_EQ(ClassMap::Parse(m.Serialize(), "again").entries(), m.entries());
}

// Two utterances by hand: one second of audio each, 8x10 ultrasound at 100 fps.
void WriteUtterance(const fs::path &root, const std::string &speaker, const std::string &id,
                    double first_frame_time, double fps = 100.0) {
  fs::create_directories(root / speaker);
  AudioStream a;
  a.samples.assign(16000, 0);
  for (std::size_t i = 0; i < a.samples.size(); ++i) a.samples[i] = static_cast<std::int16_t>(i % 200);
  WriteWav(root / speaker / (id + ".wav"), a);
  UtteranceMeta meta{8, 10, fps, first_frame_time, "baseline"};
  WriteTextFile(root / speaker / (id + ".meta"), SerializeMeta(meta));
  const auto frames = fps > 0 ? static_cast<std::size_t>(100) : 1;
  WriteBinaryFile(root / speaker / (id + ".ult"), std::vector<std::uint8_t>(frames * 80, 7));
}

void WriteTinyCorpus(const fs::path &root, const std::string &extra_phone = "k",
                     double first_frame_time = 0.0) {
  WriteUtterance(root, "s1", "u1", 0.0);
  WriteUtterance(root, "s2", "u2", first_frame_time);
  std::vector<AlignmentRow> rows = {
      {"u1", "s1", "sil", 0.0, 0.2, "<sil>", WordPosition::kInitial},
      {"u1", "s1", "k", 0.2, 0.3, "key", WordPosition::kInitial},
      {"u1", "s1", "iy", 0.3, 0.5, "key", WordPosition::kFinal},
      {"u2", "s2", extra_phone, 0.05, 0.15, "tea", WordPosition::kInitial},
      {"u2", "s2", "t", 0.4, 0.5, "tea", WordPosition::kInitial},
  };
  WriteTextFile(root / "alignments.tsv", SerializeAlignments(rows));
}

ClassMap TinyMap() {
  return ClassMap::Parse("sil\tDISCARD\niy\tDISCARD\nk\tvelar\nt\talveolar\n", "tiny");
}

TEST(LoadCorpus, WellFormed) {
  test::TempDir dir("corpus");
  WriteTinyCorpus(dir.path());
  const Corpus c = LoadCorpus(dir.path(), TinyMap());
  ASSERT_EQ(c.utterances.size(), 2u);
  ASSERT_EQ(c.instances.size(), 3u);
  EXPECT_EQ(c.dropped_no_parallel, 0u);
  EXPECT_EQ(c.instances[0].phone_index, 1);
  EXPECT_EQ(c.instances[0].cls, ArticulationClass::kVelar);
  EXPECT_EQ(c.instances[0].word_start, 0.2);
  EXPECT_EQ(c.instances[0].word_end, 0.5);
  EXPECT_EQ(c.ClassCounts()[ClassIndex(ArticulationClass::kVelar)], 2u);
  EXPECT_EQ(c.utterance("u2").ultrasound.num_frames(), 100u);
  EXPECT_EQ(c.Speakers(), (std::set<std::string>{"s1", "s2"}));
}

TEST(LoadCorpus, UnmappedLabelNamesIt) {
  test::TempDir dir("corpus");
  WriteTinyCorpus(dir.path(), "zh");
  try {
    LoadCorpus(dir.path(), TinyMap());
    FAIL() << "expected ClassMapError";
  } catch (const ClassMapError &e) {
    EXPECT_NE(std::string(e.what()).find("'zh'"), std::string::npos);
  }
}

TEST(LoadCorpus, DropsInstanceWithoutParallelUltrasound) {
  test::TempDir dir("corpus");
  // Ultrasound of u2 starts 0.2 s into the audio; the phone at 0.05 s has
  // audio but no ultrasound.
  WriteTinyCorpus(dir.path(), "k", 0.2);
  const Corpus c = LoadCorpus(dir.path(), TinyMap());
  EXPECT_EQ(c.dropped_no_parallel, 1u);
  EXPECT_EQ(c.instances.size(), 2u);
}

TEST(LoadCorpus, MissingFileAndBadMetadata) {
  test::TempDir dir("corpus");
  WriteTinyCorpus(dir.path());
  fs::remove(dir.path() / "s2" / "u2.ult");
  try {
    LoadCorpus(dir.path(), TinyMap());
    FAIL() << "expected IngestionError";
  } catch (const IngestionError &e) {
    EXPECT_NE(std::string(e.what()).find("u2.ult"), std::string::npos);
  }
  WriteTinyCorpus(dir.path());
  WriteTextFile(dir.path() / "s2" / "u2.meta",
                "scanlines=8\nechoes=10\nfps=0\nfirst_frame_time=0\nsession=mid\n");
  EXPECT_THROW(LoadCorpus(dir.path(), TinyMap()), MetadataError);
}

TEST(LoadCorpus, Idempotent) {
  test::TempDir dir("corpus");
  WriteTinyCorpus(dir.path());
  const Corpus a = LoadCorpus(dir.path(), TinyMap());
  const Corpus b = LoadCorpus(dir.path(), TinyMap());
  EXPECT_EQ(a.instances, b.instances);
  ASSERT_EQ(a.utterances.size(), b.utterances.size());
  for (std::size_t i = 0; i < a.utterances.size(); ++i) {
    EXPECT_EQ(a.utterances[i]->audio.samples, b.utterances[i]->audio.samples);
    EXPECT_EQ(a.utterances[i]->ultrasound.data, b.utterances[i]->ultrasound.data);
  }
}

SyntheticSpec SmallSpec() {
  SyntheticSpec spec;
  spec.speakers = 4;
  spec.utterances_per_speaker = 20;
  spec.phones_per_utterance = 6;
  spec.scanlines = 16;
  spec.echoes = 24;
  return spec;
}

TEST(Synth, ZeroErrorRateRendersLabels) {
  test::TempDir dir("synth");
  const auto summary = GenerateSyntheticCorpus(SmallSpec(), 1, dir.path());
  EXPECT_EQ(summary.utterances, 80u);
  EXPECT_EQ(summary.substituted, 0u);
  const auto truth = ParseTruth(ReadTextFile(dir.path() / "truth.tsv"), "truth");
  EXPECT_EQ(truth.size(), summary.instances);
  for (const auto &row : truth) EXPECT_EQ(row.labeled, row.rendered);

  const Corpus c = LoadCorpus(dir.path(), ClassMap::Load(dir.path() / "classmap.tsv"));
  EXPECT_EQ(c.utterances.size(), 80u);
  EXPECT_EQ(c.instances.size(), summary.instances);
  EXPECT_EQ(c.dropped_no_parallel, 0u);
  for (auto n : c.ClassCounts()) EXPECT_GT(n, 0u);
}

TEST(Synth, SubstitutionCountMatchesManifest) {
  test::TempDir dir("synth");
  SyntheticSpec spec = SmallSpec();
  spec.error_rate = 0.25;
  spec.substitutions[ArticulationClass::kVelar] = ArticulationClass::kAlveolar;
  const auto summary = GenerateSyntheticCorpus(spec, 7, dir.path());
  const auto truth = ParseTruth(ReadTextFile(dir.path() / "truth.tsv"), "truth");
  std::size_t velar = 0, substituted = 0;
  for (const auto &row : truth) {
    if (row.labeled == ArticulationClass::kVelar) {
      ++velar;
      if (row.rendered == ArticulationClass::kAlveolar) ++substituted;
    } else {
      EXPECT_EQ(row.labeled, row.rendered);
    }
  }
  EXPECT_EQ(substituted, summary.substituted);
  ASSERT_GT(velar, 20u);
  // Binomial(velar, 0.25): well inside four standard deviations.
  const double mean = 0.25 * velar, sd = std::sqrt(velar * 0.25 * 0.75);
  EXPECT_LT(std::abs(static_cast<double>(substituted) - mean), 4 * sd);
}

std::map<std::string, std::vector<std::uint8_t>> Snapshot(const fs::path &root) {
  std::map<std::string, std::vector<std::uint8_t>> files;
  for (const auto &e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = ReadBinaryFile(e.path());
  }
  return files;
}

TEST(Synth, SameSeedSameBytes) {
  test::TempDir a("synth"), b("synth"), c("synth");
  SyntheticSpec spec = SmallSpec();
  spec.speakers = 2;
  spec.utterances_per_speaker = 3;
  GenerateSyntheticCorpus(spec, 5, a.path());
  GenerateSyntheticCorpus(spec, 5, b.path());
  GenerateSyntheticCorpus(spec, 6, c.path());
  EXPECT_EQ(Snapshot(a.path()), Snapshot(b.path()));
  EXPECT_NE(Snapshot(a.path()), Snapshot(c.path()));
}

TEST(Synth, InvalidSpec) {
  SyntheticSpec spec = SmallSpec();
  spec.fps = 0;
  EXPECT_THROW(spec.Validate(), SpecError);
  spec = SmallSpec();
  spec.error_rate = 1.5;
  EXPECT_THROW(spec.Validate(), SpecError);
}

class SplitTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new test::TempDir("split");
    SyntheticSpec spec = SmallSpec();
    spec.speakers = 10;
    spec.utterances_per_speaker = 2;
    GenerateSyntheticCorpus(spec, 3, dir_->path());
    corpus_ = new Corpus(LoadCorpus(dir_->path(), ClassMap::Load(dir_->path() / "classmap.tsv")));
  }
  static void TearDownTestSuite() {
    delete corpus_;
    delete dir_;
  }
  static test::TempDir *dir_;
  static Corpus *corpus_;
};
test::TempDir *SplitTest::dir_ = nullptr;
Corpus *SplitTest::corpus_ = nullptr;

TEST_F(SplitTest, PartitionsInstances) {
  std::set<std::string> train;
  for (int i = 0; i < 8; ++i) train.insert("spk0" + std::to_string(i));
  const auto s = SplitCorpus(*corpus_, train, {"spk08"}, {"spk09"});
  EXPECT_EQ(s.train.instances.size() + s.validation.instances.size() + s.test.instances.size(),
            corpus_->instances.size());
  for (const auto &p : s.validation.instances) EXPECT_EQ(p.speaker_id, "spk08");
  for (const auto &p : s.test.instances) EXPECT_EQ(p.speaker_id, "spk09");
  for (const auto &p : s.train.instances) EXPECT_TRUE(train.count(p.speaker_id));
}

TEST_F(SplitTest, OverlapIsRejected) {
  std::set<std::string> train;
  for (int i = 0; i < 9; ++i) train.insert("spk0" + std::to_string(i));
  EXPECT_THROW(SplitCorpus(*corpus_, train, {}, {"spk08", "spk09"}), SplitError);
}

TEST_F(SplitTest, EmptyValidationIsAllowed) {
  std::set<std::string> train;
  for (int i = 0; i < 9; ++i) train.insert("spk0" + std::to_string(i));
  const auto s = SplitCorpus(*corpus_, train, {}, {"spk09"});
  EXPECT_TRUE(s.validation.instances.empty());
}

}  // namespace
}  // namespace uti
