// tools/main.cpp

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

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "run_dir.hpp"
#include "uti/error.hpp"

namespace {

using namespace uti::cli;

void AddCommon(CLI::App *cmd, CommonOptions &c) {
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_flag("--force", c.force, "replace an existing run directory");
  cmd->add_option("--seed", c.seed, "random seed")->capture_default_str();
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Ultrasound tongue imaging speech error toolkit"};
  app.require_subcommand(1);
  std::function<int()> action;

  SynthOptions synth;
  auto *c = app.add_subcommand("synth", "generate a synthetic parallel corpus");
  AddCommon(c, synth.common);
  c->add_option("--speaker-prefix", synth.spec.speaker_prefix);
  c->add_option("--speakers", synth.spec.speakers)->capture_default_str();
  c->add_option("--utterances", synth.spec.utterances_per_speaker)->capture_default_str();
  c->add_option("--phones", synth.spec.phones_per_utterance)->capture_default_str();
  c->add_option("--classes", synth.classes, "class names (default: all)")->delimiter(',');
  c->add_option("--fps", synth.spec.fps)->capture_default_str();
  c->add_option("--first-frame-time", synth.spec.first_frame_time);
  c->add_option("--audio-noise", synth.spec.audio_noise)->capture_default_str();
  c->add_option("--ultrasound-noise", synth.spec.ultrasound_noise)->capture_default_str();
  c->add_option("--speaker-variability", synth.spec.speaker_variability)->capture_default_str();
  c->add_option("--error-rate", synth.spec.error_rate)->capture_default_str();
  c->add_option("--substitute", synth.substitutions, "from=to, e.g. velar=alveolar");
  c->callback([&] { action = [&] { return RunSynth(synth); }; });

  PrepareOptions prepare;
  c = app.add_subcommand("prepare", "build train/validation/test sample sets");
  AddCommon(c, prepare.common);
  c->add_option("--corpus", prepare.corpus)->required();
  c->add_option("--class-map", prepare.class_map, "default: <corpus>/classmap.tsv");
  c->add_option("--cache", prepare.cache, "feature cache directory");
  c->add_option("--train-speakers", prepare.train)->delimiter(',');
  c->add_option("--val-speakers", prepare.validation)->delimiter(',');
  c->add_option("--test-speakers", prepare.test)->delimiter(',');
  c->add_option("--val-count", prepare.validation_count)->capture_default_str();
  c->add_option("--test-count", prepare.test_count)->capture_default_str();
  c->add_flag("--train-only", prepare.train_only, "every speaker goes to training");
  c->add_option("--balance-cap", prepare.balance.per_class_cap)->capture_default_str();
  c->add_option("--perturb-limit", prepare.balance.perturbation_limit_ms, "milliseconds")
      ->capture_default_str();
  c->callback([&] { action = [&] { return RunPrepare(prepare); }; });

  TrainOptions train, finetune;
  for (auto [name, opts, is_finetune] :
       {std::tuple{"train", &train, false}, std::tuple{"finetune", &finetune, true}}) {
    c = app.add_subcommand(name, is_finetune ? "continue training from a checkpoint"
                                             : "train the classifier");
    AddCommon(c, opts->common);
    c->add_option("--data", opts->data, "prepare output; repeat to pool")->required();
    auto *ckpt = c->add_option("--checkpoint", opts->checkpoint);
    if (is_finetune) {
      ckpt->required();
    } else {
      c->add_option("--mode", opts->mode, "scratch or pooled")->capture_default_str();
    }
    c->add_option("--lr", opts->learning_rate);
    c->add_option("--epochs", opts->epochs);
    c->add_option("--minibatch", opts->minibatch);
    c->add_option("--l2", opts->l2_weight);
    c->add_option("--conv1-filters", opts->arch.conv1_filters);
    c->add_option("--conv2-filters", opts->arch.conv2_filters);
    c->add_option("--audio-fc", opts->arch.audio_fc);
    c->add_option("--hidden1", opts->arch.hidden1);
    c->add_option("--hidden2", opts->arch.hidden2);
    c->callback([&action, opts, is_finetune] {
      action = [opts, is_finetune] { return RunTrain(*opts, is_finetune); };
    });
  }

  ScoreOptions score;
  c = app.add_subcommand("score", "score phone instances against an expected class");
  AddCommon(c, score.common);
  c->add_option("--checkpoint", score.checkpoint)->required();
  c->add_option("--corpus", score.corpus)->required();
  c->add_option("--class-map", score.class_map);
  c->add_option("--preset", score.preset, "velar-fronting or gliding");
  c->add_option("--expected", score.expected);
  c->add_option("--competing", score.competing, "class name or auto");
  c->add_option("--k", score.k, "decision threshold")->capture_default_str();
  c->add_option("--speakers", score.speakers)->delimiter(',');
  c->add_option("--truth", score.truth, "default: <corpus>/truth.tsv when present");
  c->add_option("--ratings", score.ratings, "expert ratings CSV");
  c->add_option("--annotator", score.annotator, "restrict --ratings to one annotator");
  c->callback([&] { action = [&] { return RunScore(score); }; });

  EvaluateOptions evaluate;
  c = app.add_subcommand("evaluate", "classification and detection reports");
  AddCommon(c, evaluate.common);
  c->add_option("--checkpoint", evaluate.checkpoint);
  c->add_option("--data", evaluate.data, "prepare output with test.smp");
  c->add_option("--scores", evaluate.scores, "scores.csv or a score run directory");
  c->add_option("--ratings", evaluate.ratings, "expert ratings CSV");
  c->add_option("--annotator", evaluate.annotator, "restrict --ratings to one annotator");
  c->callback([&] { action = [&] { return RunEvaluate(evaluate); }; });

  SweepOptions sweep;
  c = app.add_subcommand("sweep", "precision and recall over thresholds");
  AddCommon(c, sweep.common);
  c->add_option("--scores", sweep.scores)->required();
  c->add_option("--k-min", sweep.k_min)->capture_default_str();
  c->add_option("--k-max", sweep.k_max)->capture_default_str();
  c->add_option("--k-step", sweep.k_step)->capture_default_str();
  c->callback([&] { action = [&] { return RunSweep(sweep); }; });

  AgreementOptions agreement;
  c = app.add_subcommand("agreement", "inter- and intra-annotator agreement");
  AddCommon(c, agreement.common);
  c->add_option("--ratings", agreement.ratings)->required();
  c->add_option("--scale", agreement.scale, "nominal, ordinal or interval")->capture_default_str();
  c->callback([&] { action = [&] { return RunAgreement(agreement); }; });

  ServeOptions serve;
  c = app.add_subcommand("serve", "run the annotation service");
  c->add_option("--config", serve.config, "key=value service config");
  c->add_option("--host", serve.host);
  c->add_option("--port", serve.port);
  c->add_option("--data-dir", serve.data_dir);
  c->add_option("--corpus", serve.corpus);
  c->add_option("--playback-cap", serve.playback_cap);
  c->callback([&] { action = [&] { return RunServe(serve); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  try {
    return action();
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const uti::Error &e) {
    std::cerr << "error [" << e.kind() << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
