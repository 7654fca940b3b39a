// benchmarks/core_bench.cpp

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

#include <benchmark/benchmark.h>

#include <optional>
#include <vector>

#include "uti/agreement.hpp"
#include "uti/mfcc.hpp"
#include "uti/nnet/model.hpp"
#include "uti/rng.hpp"
#include "uti/ultrasound_resample.hpp"

namespace {

using namespace uti;

AudioStream Noise(double seconds) {
  Rng rng(1);
  AudioStream a;
  a.samples.resize(static_cast<std::size_t>(seconds * a.sample_rate));
  for (auto &s : a.samples) s = static_cast<std::int16_t>(rng.Normal(0, 2000));
  return a;
}

void BM_Mfcc(benchmark::State &state) {
  const auto audio = Noise(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ExtractMfcc(audio));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(audio.samples.size()));
}
BENCHMARK(BM_Mfcc)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_ResampleFrame(benchmark::State &state) {
  const int scanlines = static_cast<int>(state.range(0)), echoes = static_cast<int>(state.range(1));
  Rng rng(2);
  std::vector<std::uint8_t> frame(static_cast<std::size_t>(scanlines) * echoes);
  for (auto &v : frame) v = static_cast<std::uint8_t>(rng.Below(256));
  for (auto _ : state) benchmark::DoNotOptimize(ResampleUltrasoundFrame(frame, scanlines, echoes));
}
BENCHMARK(BM_ResampleFrame)->Args({64, 842})->Args({63, 412})->Unit(benchmark::kMicrosecond);

std::vector<Sample> Batch(const nnet::ArchitectureConfig &arch, int n) {
  Rng rng(3);
  std::vector<Sample> out(n);
  for (int i = 0; i < n; ++i) {
    Sample &s = out[i];
    s.audio_frames = arch.audio_frames;
    s.audio_dim = arch.audio_dim;
    s.ultrasound_frames = arch.ultrasound_channels;
    s.ultrasound_rows = arch.ultrasound_rows;
    s.ultrasound_cols = arch.ultrasound_cols;
    s.audio.resize(static_cast<std::size_t>(s.audio_frames) * s.audio_dim);
    s.ultrasound.resize(static_cast<std::size_t>(s.ultrasound_frames) * s.ultrasound_rows * s.ultrasound_cols);
    for (auto &v : s.audio) v = static_cast<float>(rng.Normal());
    for (auto &v : s.ultrasound) v = static_cast<float>(rng.Uniform());
    s.label = ClassFromIndex(static_cast<std::size_t>(i) % kNumClasses);
  }
  return out;
}

void BM_Forward(benchmark::State &state) {
  const nnet::ArchitectureConfig arch;
  auto model = nnet::ModelState::Initialize(arch, 1);
  const auto samples = Batch(arch, static_cast<int>(state.range(0)));
  const auto ptrs = nnet::Pointers(samples);
  for (auto _ : state) benchmark::DoNotOptimize(nnet::Forward(model, nnet::Batch(ptrs), nnet::Mode::kTrain));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Forward)->Arg(1)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State &state) {
  const nnet::ArchitectureConfig arch;
  auto model = nnet::ModelState::Initialize(arch, 1);
  const auto samples = Batch(arch, static_cast<int>(state.range(0)));
  const auto ptrs = nnet::Pointers(samples);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nnet::ComputeLossAndGradients(model, nnet::Batch(ptrs), 0.1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBackward)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Alpha(benchmark::State &state, Scale scale) {
  const auto items = static_cast<std::size_t>(state.range(0));
  Rng rng(4);
  RatingMatrix m;
  m.scale = scale;
  m.values.assign(4, std::vector<std::optional<double>>(items));
  for (auto &row : m.values) {
    for (auto &v : row) {
      if (!rng.Bernoulli(0.1)) v = 1 + static_cast<double>(rng.Below(5));
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(KrippendorffAlpha(m));
}
BENCHMARK_CAPTURE(BM_Alpha, nominal, Scale::kNominal)->Arg(120)->Arg(5000);
BENCHMARK_CAPTURE(BM_Alpha, ordinal, Scale::kOrdinal)->Arg(120)->Arg(5000);
BENCHMARK_CAPTURE(BM_Alpha, interval, Scale::kInterval)->Arg(120)->Arg(5000);

}  // namespace

BENCHMARK_MAIN();
