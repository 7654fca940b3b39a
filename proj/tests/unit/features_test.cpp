// tests/unit/features_test.cpp

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

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "test_util.hpp"
#include "uti/error.hpp"
#include "uti/mfcc.hpp"
#include "uti/rng.hpp"
#include "uti/sample.hpp"
#include "uti/text_io.hpp"
#include "uti/ultrasound_resample.hpp"

namespace uti {
namespace {

std::vector<double> Sine(std::size_t n, double hz, double amplitude = 1.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = amplitude * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / 16000.0);
  }
  return x;
}

TEST(Mfcc, OneSecondFrameCount) {
  // floor((16000 - 400) / 160) + 1
  const FeatureMatrix f = ExtractMfcc(Sine(16000, 440.0, 3000.0));
  EXPECT_EQ(f.rows, 98);
  EXPECT_EQ(f.cols, 60);
}

TEST(Mfcc, FrameCountFormula) {
  Rng rng(5);
  const MfccConfig cfg;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 400 + rng.Below(20000);
    EXPECT_EQ(NumFrames(n, cfg), static_cast<int>((n - 400) / 160) + 1) << n;
  }
  EXPECT_EQ(NumFrames(399, cfg), 0);
}

TEST(Mfcc, ShorterThanWindowThrows) {
  EXPECT_THROW(ExtractMfcc(std::vector<double>(399, 1.0)), TooShortError);
}

TEST(Mfcc, ConstantInputHasZeroDeltas) {
  const FeatureMatrix f = ExtractMfcc(std::vector<double>(8000, 1000.0));
  for (int r = 0; r < f.rows; ++r) {
    for (int c = 20; c < 60; ++c) ASSERT_EQ(f.at(r, c), 0.0f) << r << "," << c;
  }
}

// First-frame static cepstra of a 1 kHz unit sine, produced once by
// tests/oracles/mfcc_reference.py.
TEST(Mfcc, MatchesReferenceImplementation) {
  const double expected[20] = {
      -15.34432575, 3.187426807,  -7.596566243, -8.341867905,  -2.485230954,
      3.718422304,  5.069500016,  1.077171853,  -3.450234606,  -4.043775869,
      -0.4942654393, 3.121642356, 3.207534347,  0.01875001299, -2.761182754,
      -2.370955994, 0.3890880638, 2.386382558,  1.79211543,    -0.3050310418};
  const auto ceps = ComputeStaticCepstra(Sine(400, 1000.0), MfccConfig{});
  ASSERT_EQ(ceps.size(), 1u);
  for (int c = 0; c < 20; ++c) EXPECT_NEAR(ceps[0][c], expected[c], 1e-3) << "c" << c;
}

TEST(Mfcc, DeltaOfReversedSequenceIsNegated) {
  Rng rng(11);
  std::vector<std::vector<double>> frames(30, std::vector<double>(4));
  for (auto &f : frames) {
    for (auto &v : f) v = rng.Normal();
  }
  auto reversed = frames;
  std::reverse(reversed.begin(), reversed.end());
  const auto d = ComputeDeltas(frames, 2);
  const auto dr = ComputeDeltas(reversed, 2);
  const int T = 30;
  for (int t = 2; t < T - 2; ++t) {
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(d[t][k], -dr[T - 1 - t][k], 1e-12);
  }
}

TEST(Resample, ConstantIsFixedPoint) {
  const std::vector<std::uint8_t> frame(63 * 103, 128);
  for (float v : ResampleUltrasoundFrame(frame, 63, 103)) ASSERT_FLOAT_EQ(v, 128.0f / 255.0f);
  const std::vector<std::uint8_t> big(64 * 412, 128);
  for (float v : ResampleUltrasoundFrame(big, 64, 412)) ASSERT_NEAR(v, 128.0 / 255.0, 1e-6);
}

TEST(Resample, IdentitySizeIsExact) {
  Rng rng(2);
  std::vector<std::uint8_t> frame(63 * 103);
  for (auto &v : frame) v = static_cast<std::uint8_t>(rng.Below(256));
  const auto out = ResampleUltrasoundFrame(frame, 63, 103);
  for (std::size_t i = 0; i < frame.size(); ++i) ASSERT_EQ(out[i], frame[i] / 255.0f);
}

TEST(Resample, TwoByTwoToThreeByThree) {
  const std::vector<double> src = {0, 255, 0, 255};
  const auto out = BilinearResize(src, 2, 2, 3, 3);
  for (int r = 0; r < 3; ++r) {
    EXPECT_DOUBLE_EQ(out[r * 3 + 0], 0.0);
    EXPECT_DOUBLE_EQ(out[r * 3 + 1], 127.5);
    EXPECT_DOUBLE_EQ(out[r * 3 + 2], 255.0);
  }
}

TEST(Resample, Linearity) {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const int rows = 2 + static_cast<int>(rng.Below(40));
    const int cols = 2 + static_cast<int>(rng.Below(200));
    std::vector<double> x(rows * cols), y(rows * cols), z(rows * cols);
    const double a = rng.Normal(), b = rng.Normal();
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = rng.Uniform(0, 255);
      y[i] = rng.Uniform(0, 255);
      z[i] = a * x[i] + b * y[i];
    }
    const auto rx = BilinearResize(x, rows, cols, 63, 103);
    const auto ry = BilinearResize(y, rows, cols, 63, 103);
    const auto rz = BilinearResize(z, rows, cols, 63, 103);
    for (std::size_t i = 0; i < rz.size(); ++i) ASSERT_NEAR(rz[i], a * rx[i] + b * ry[i], 1e-9);
  }
}

TEST(Resample, DegenerateSourceThrows) {
  EXPECT_THROW(BilinearResize(std::vector<double>(10, 0.0), 1, 10, 63, 103), ShapeError);
  EXPECT_THROW(BilinearResize(std::vector<double>(10, 0.0), 10, 1, 63, 103), ShapeError);
}

// Utterance of `seconds` with ultrasound at `fps`; frame k is filled with k.
Utterance MakeUtterance(double seconds, double fps, double first_frame_time = 0.0) {
  Utterance u;
  u.id = "u";
  u.speaker_id = "s";
  Rng rng(1);
  u.audio.samples.resize(static_cast<std::size_t>(seconds * 16000));
  for (auto &v : u.audio.samples) v = static_cast<std::int16_t>(rng.Normal(0, 1000));
  u.ultrasound.scanlines = 8;
  u.ultrasound.echoes = 12;
  u.ultrasound.fps = fps;
  u.ultrasound.first_frame_time = first_frame_time;
  const auto n = static_cast<std::size_t>(seconds * fps);
  for (std::size_t k = 0; k < n; ++k) {
    u.ultrasound.data.insert(u.ultrasound.data.end(), u.ultrasound.frame_size(),
                             static_cast<std::uint8_t>(k % 256));
  }
  return u;
}

PhoneInstance Phone(double start, double end) {
  PhoneInstance p;
  p.utterance_id = "u";
  p.speaker_id = "s";
  p.cls = ArticulationClass::kVelar;
  p.start = start;
  p.end = end;
  return p;
}

TEST(SampleBuilder, ShapesForEveryFrameRate) {
  for (double fps : {80.0, 100.0, 120.0, 121.3}) {
    const Utterance u = MakeUtterance(1.0, fps);
    const FeatureMatrix mfcc = ExtractMfcc(u.audio);
    const Sample s = BuildSample(Phone(0.4, 0.5), u, mfcc, 0.0);
    EXPECT_EQ(s.audio_frames, 11);
    EXPECT_EQ(s.audio_dim, 60);
    EXPECT_EQ(s.audio.size(), 11u * 60u);
    EXPECT_EQ(s.ultrasound_frames, 9);
    EXPECT_EQ(s.ultrasound_rows, 63);
    EXPECT_EQ(s.ultrasound_cols, 103);
    EXPECT_EQ(s.ultrasound.size(), 9u * 63u * 103u);
  }
}

TEST(SampleBuilder, ShapesForRandomFrameRates) {
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    const double fps = rng.Uniform(60.0, 200.0);
    const Utterance u = MakeUtterance(0.6, fps);
    const Sample s = BuildSample(Phone(0.05, 0.1), u, ExtractMfcc(u.audio), 0.0);
    EXPECT_EQ(s.audio.size(), 660u) << fps;
    EXPECT_EQ(s.ultrasound.size(), 9u * 63u * 103u) << fps;
  }
}

TEST(SampleBuilder, UltrasoundSteps) {
  const SampleLayout layout;
  EXPECT_EQ(layout.UltrasoundStep(120.0), 3);
  EXPECT_EQ(layout.UltrasoundStep(80.0), 2);
  EXPECT_EQ(layout.UltrasoundStep(121.3), 3);
  EXPECT_EQ(layout.AudioStep(0.010), 2);

  UltrasoundStream us;
  us.scanlines = 1;
  us.echoes = 1;
  us.data.resize(1000);
  us.fps = 120.0;
  auto idx = ComputeContextIndices(2.0, 500, us, 0.010, layout);
  EXPECT_EQ(idx.ultrasound, (std::vector<int>{228, 231, 234, 237, 240, 243, 246, 249, 252}));
  EXPECT_EQ(idx.audio, (std::vector<int>{190, 192, 194, 196, 198, 200, 202, 204, 206, 208, 210}));
  us.fps = 80.0;
  idx = ComputeContextIndices(2.0, 500, us, 0.010, layout);
  EXPECT_EQ(idx.ultrasound, (std::vector<int>{152, 154, 156, 158, 160, 162, 164, 166, 168}));
}

TEST(SampleBuilder, ClampsAtStreamEdges) {
  const Utterance u = MakeUtterance(1.0, 120.0);
  const FeatureMatrix mfcc = ExtractMfcc(u.audio);
  const double t = 1.0 / 120.0;  // frame 1
  const auto idx = ComputeContextIndices(t, mfcc.rows, u.ultrasound, 0.010, SampleLayout{});
  for (int j = 0; j < 4; ++j) EXPECT_EQ(idx.ultrasound[j], 0);
  EXPECT_EQ(idx.ultrasound[4], 1);
  const Sample s = BuildSample(Phone(0.0, 2 * t), u, mfcc, 0.0);
  EXPECT_EQ(s.ultrasound.size(), 9u * 63u * 103u);
  // Frame k holds k everywhere; the clamped frames are frame 0.
  EXPECT_EQ(s.ultrasound[0], 0.0f);
  EXPECT_FLOAT_EQ(s.ultrasound[4 * 63 * 103], 1.0f / 255.0f);
}

TEST(SampleBuilder, AnchorAndProvenance) {
  const Utterance u = MakeUtterance(1.0, 100.0);
  const Sample s = BuildSample(Phone(0.3, 0.5), u, ExtractMfcc(u.audio), -20.0);
  EXPECT_NEAR(s.provenance.anchor_time, 0.38, 1e-12);
  EXPECT_EQ(s.provenance.perturbation_ms, -20.0);
  EXPECT_EQ(s.label, ArticulationClass::kVelar);
  EXPECT_FLOAT_EQ(s.ultrasound[4 * 63 * 103], 38.0f / 255.0f);
}

TEST(SampleBuilder, RejectsLargePerturbationAndOutsideAnchors) {
  const Utterance u = MakeUtterance(1.0, 100.0);
  const FeatureMatrix mfcc = ExtractMfcc(u.audio);
  EXPECT_THROW(BuildSample(Phone(0.3, 0.5), u, mfcc, 41.0), ValidationError);
  EXPECT_THROW(BuildSample(Phone(3.0, 3.2), u, mfcc, 0.0), UnsampleableError);
}

std::vector<PhoneInstance> Instances(std::map<ArticulationClass, int> counts) {
  std::vector<PhoneInstance> out;
  for (auto [cls, n] : counts) {
    for (int i = 0; i < n; ++i) {
      PhoneInstance p = Phone(0.1, 0.2);
      p.cls = cls;
      p.phone_index = static_cast<int>(out.size());
      out.push_back(p);
    }
  }
  return out;
}

TEST(Balance, SubsamplesAboveCap) {
  const auto inst = Instances({{ArticulationClass::kVelar, 1500}, {ArticulationClass::kLabial, 10}});
  const auto plan = PlanBalancedSet(inst, BalancePolicy{}, 3);
  std::size_t velar = 0, labial = 0;
  std::set<std::size_t> seen;
  for (const auto &r : plan) {
    if (inst[r.instance].cls == ArticulationClass::kVelar) {
      ++velar;
      EXPECT_EQ(r.perturbation_ms, 0.0);
      EXPECT_TRUE(seen.insert(r.instance).second);
    } else {
      ++labial;
    }
  }
  EXPECT_EQ(velar, 1000u);
  // 10 instances reused at most ceil(1000 / 10) = 100 times each.
  EXPECT_EQ(labial, 1000u);
}

TEST(Balance, UpsamplesWithBoundedPerturbations) {
  const auto inst = Instances({{ArticulationClass::kRhotic, 400}});
  const auto plan = PlanBalancedSet(inst, BalancePolicy{}, 9);
  ASSERT_EQ(plan.size(), 1000u);
  std::size_t perturbed = 0;
  std::map<std::size_t, int> originals;
  for (const auto &r : plan) {
    if (r.perturbation_ms != 0.0) {
      ++perturbed;
      EXPECT_LE(std::abs(r.perturbation_ms), 40.0);
    } else {
      ++originals[r.instance];
    }
  }
  EXPECT_GE(perturbed, 600u);
  EXPECT_EQ(originals.size(), 400u);
  for (const auto &[i, n] : originals) EXPECT_EQ(n, 1);
}

TEST(Balance, SmallCapAndTinyClass) {
  const auto inst = Instances({{ArticulationClass::kDental, 3}, {ArticulationClass::kLateral, 50}});
  BalancePolicy policy;
  policy.per_class_cap = 20;
  const auto plan = PlanBalancedSet(inst, policy, 1);
  std::size_t dental = 0, lateral = 0;
  for (const auto &r : plan) (inst[r.instance].cls == ArticulationClass::kDental ? dental : lateral)++;
  // 3 instances at most ceil(20 / 3) = 7 uses each -> 20 reachable.
  EXPECT_EQ(dental, 20u);
  EXPECT_EQ(lateral, 20u);
}

TEST(Balance, DeterministicPerSeed) {
  const auto inst = Instances({{ArticulationClass::kVelar, 70}, {ArticulationClass::kPalatal, 30}});
  BalancePolicy policy;
  policy.per_class_cap = 50;
  EXPECT_EQ(PlanBalancedSet(inst, policy, 4), PlanBalancedSet(inst, policy, 4));
  EXPECT_NE(PlanBalancedSet(inst, policy, 4), PlanBalancedSet(inst, policy, 5));
}

TEST(FeatureCacheFile, RoundTripAndCorruption) {
  test::TempDir dir("cache");
  const FeatureMatrix f = ExtractMfcc(Sine(3200, 300.0, 2000.0));
  const FeatureCache cache(dir.path(), MfccConfig{});
  EXPECT_FALSE(cache.Load("x").has_value());
  cache.Store("x", f);
  EXPECT_EQ(*cache.Load("x"), f);
  auto bytes = FeatureCache::Encode(f);
  bytes.pop_back();
  EXPECT_THROW(FeatureCache::Decode(bytes, "x"), IngestionError);
  MfccConfig other;
  other.num_mel_filters = 30;
  EXPECT_NE(FeatureCache(dir.path(), other).PathFor("x"), cache.PathFor("x"));
}

TEST(SampleFile, RoundTripAndCorruption) {
  test::TempDir dir("smp");
  const auto arch = test::TinyArchitecture();
  Rng rng(8);
  std::vector<Sample> samples;
  for (int i = 0; i < 7; ++i) {
    samples.push_back(test::RandomSample(arch, ClassFromIndex(i % 9), rng));
    samples.back().provenance = {"utt" + std::to_string(i), "spk", i, 0.25 * i, i % 2 ? 20.0 : 0.0};
  }
  const auto path = dir.path() / "a.smp";
  SaveSamples(path, samples);
  EXPECT_EQ(LoadSamples(path), samples);
  SaveSamples(dir.path() / "empty.smp", {});
  EXPECT_TRUE(LoadSamples(dir.path() / "empty.smp").empty());

  {
    SampleWriter w(dir.path() / "b.smp");
    for (const auto &s : samples) w.Write(s);
    EXPECT_EQ(w.count(), 7u);
  }
  EXPECT_EQ(LoadSamples(dir.path() / "b.smp"), samples);

  auto bytes = ReadBinaryFile(path);
  bytes.push_back(0);
  WriteBinaryFile(dir.path() / "trailing.smp", bytes);
  EXPECT_THROW(LoadSamples(dir.path() / "trailing.smp"), IngestionError);
  bytes.resize(bytes.size() - 100);
  WriteBinaryFile(dir.path() / "short.smp", bytes);
  EXPECT_THROW(LoadSamples(dir.path() / "short.smp"), IngestionError);
  bytes[0] = 'X';
  WriteBinaryFile(dir.path() / "magic.smp", bytes);
  EXPECT_THROW(LoadSamples(dir.path() / "magic.smp"), IngestionError);
}

}  // namespace
}  // namespace uti
