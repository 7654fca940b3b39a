// tools/commands.hpp

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

#ifndef UTI_TOOLS_COMMANDS_HPP_
#define UTI_TOOLS_COMMANDS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uti/nnet/architecture.hpp"
#include "uti/sample.hpp"
#include "uti/synth.hpp"

namespace uti::cli {

struct CommonOptions {
  std::string out;
  bool force = false;
  std::uint64_t seed = 1;
};

struct SynthOptions {
  CommonOptions common;
  SyntheticSpec spec;
  std::vector<std::string> classes;        // empty: all nine
  std::vector<std::string> substitutions;  // "velar=alveolar"
};

struct PrepareOptions {
  CommonOptions common;
  std::string corpus;
  std::string class_map;
  std::string cache;
  std::vector<std::string> train, validation, test;
  int validation_count = 1;
  int test_count = 1;
  bool train_only = false;
  BalancePolicy balance;
};

struct ArchitectureOverrides {
  std::optional<int> conv1_filters, conv2_filters, audio_fc, hidden1, hidden2;
};

struct TrainOptions {
  CommonOptions common;
  std::vector<std::string> data;
  std::string checkpoint;
  std::string mode = "scratch";
  std::optional<double> learning_rate;
  std::optional<int> epochs;
  std::optional<int> minibatch;
  std::optional<double> l2_weight;
  ArchitectureOverrides arch;
};

struct ScoreOptions {
  CommonOptions common;
  std::string checkpoint;
  std::string corpus;
  std::string class_map;
  std::string preset;
  std::string expected;
  std::string competing;  // empty or "auto": argmax competitor
  double k = 0.0;
  std::vector<std::string> speakers;
  std::string truth;
  std::string ratings;
  std::string annotator;
};

struct EvaluateOptions {
  CommonOptions common;
  std::string checkpoint;
  std::string data;
  std::string scores;
  std::string ratings;  // replaces b_expert with clear-case labels
  std::string annotator;
};

struct SweepOptions {
  CommonOptions common;
  std::string scores;
  double k_min = -2.0;
  double k_max = 2.0;
  double k_step = 0.1;
};

struct AgreementOptions {
  CommonOptions common;
  std::string ratings;
  std::string scale = "ordinal";
};

struct ServeOptions {
  std::string config;
  std::optional<std::string> host;
  std::optional<int> port;
  std::optional<std::string> data_dir;
  std::optional<std::string> corpus;
  std::optional<int> playback_cap;
};

int RunSynth(const SynthOptions &o);
int RunPrepare(const PrepareOptions &o);
int RunTrain(const TrainOptions &o, bool finetune);
int RunScore(const ScoreOptions &o);
int RunEvaluate(const EvaluateOptions &o);
int RunSweep(const SweepOptions &o);
int RunAgreement(const AgreementOptions &o);
int RunServe(const ServeOptions &o);

}  // namespace uti::cli

#endif  // UTI_TOOLS_COMMANDS_HPP_
