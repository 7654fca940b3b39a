// tools/commands.cpp

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

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>

#include <json.hpp>

#include "run_dir.hpp"
#include "uti/agreement.hpp"
#include "uti/corpus.hpp"
#include "uti/digest.hpp"
#include "uti/error.hpp"
#include "uti/evaluation.hpp"
#include "uti/nnet/checkpoint.hpp"
#include "uti/nnet/train.hpp"
#include "uti/rng.hpp"
#include "uti/scoring.hpp"
#include "uti/text_io.hpp"

namespace uti::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void RequirePath(const std::string &path, const std::string &flag) {
  if (path.empty()) throw UsageError(flag + " is required");
  if (!fs::exists(path)) throw UsageError(flag + ": " + path + " does not exist");
}

ordered_json CommonJson(const std::string &command, const CommonOptions &c) {
  ordered_json j;
  j["command"] = command;
  j["seed"] = c.seed;
  return j;
}

fs::path ClassMapPath(const std::string &corpus, const std::string &class_map) {
  fs::path p = class_map.empty() ? fs::path(corpus) / "classmap.tsv" : fs::path(class_map);
  if (!fs::exists(p)) throw UsageError("class map " + p.string() + " does not exist");
  return p;
}

std::string ItemId(const std::string &utterance_id, int phone_index) {
  return utterance_id + ":" + std::to_string(phone_index);
}

// First-occurrence rating per item, optionally for a single annotator.
std::map<std::string, ExpertRating> FirstRatings(const std::string &path,
                                                 const std::string &annotator) {
  const RatingsTable table = ParseRatingsCsv(ReadTextFile(path), path);
  std::map<std::string, ExpertRating> first;
  for (const auto &e : table.entries) {
    if (e.occurrence != 1 || (!annotator.empty() && e.annotator != annotator)) continue;
    if (first.count(e.item)) continue;
    ExpertRating r;
    r.primary = static_cast<int>(std::lround(e.value));
    r.secondary = e.secondary;
    r.Validate();
    first.emplace(e.item, r);
  }
  if (first.empty()) throw InputError("no usable ratings in " + path);
  return first;
}

using ClassCounts = std::array<std::size_t, kNumClasses>;

std::size_t Total(const ClassCounts &counts) {
  std::size_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

ordered_json CountsJson(const ClassCounts &counts) {
  ordered_json j = ordered_json::object();
  for (auto c : kAllClasses) j[std::string(ClassName(c))] = counts[ClassIndex(c)];
  return j;
}

}  // namespace

int RunSynth(const SynthOptions &o) {
  SyntheticSpec spec = o.spec;
  if (!o.classes.empty()) {
    spec.classes.clear();
    for (const auto &name : o.classes) spec.classes.push_back(ParseClassOrThrow(name));
  }
  for (const auto &sub : o.substitutions) {
    const auto eq = sub.find('=');
    if (eq == std::string::npos) throw UsageError("--substitute expects from=to, got " + sub);
    spec.substitutions[ParseClassOrThrow(sub.substr(0, eq))] =
        ParseClassOrThrow(sub.substr(eq + 1));
  }
  spec.Validate();

  RunDir dir("synth", o.common.out, o.common.force);
  ordered_json cfg = CommonJson("synth", o.common);
  cfg["speaker_prefix"] = spec.speaker_prefix;
  cfg["speakers"] = spec.speakers;
  cfg["utterances_per_speaker"] = spec.utterances_per_speaker;
  cfg["phones_per_utterance"] = spec.phones_per_utterance;
  ordered_json classes = ordered_json::array();
  for (auto c : spec.classes) classes.push_back(std::string(ClassName(c)));
  cfg["classes"] = classes;
  cfg["fps"] = spec.fps;
  cfg["first_frame_time"] = spec.first_frame_time;
  cfg["audio_noise"] = spec.audio_noise;
  cfg["ultrasound_noise"] = spec.ultrasound_noise;
  cfg["speaker_variability"] = spec.speaker_variability;
  cfg["error_rate"] = spec.error_rate;
  ordered_json subs = ordered_json::object();
  for (const auto &[from, to] : spec.substitutions) {
    subs[std::string(ClassName(from))] = std::string(ClassName(to));
  }
  cfg["substitutions"] = subs;
  dir.WriteConfig(cfg);

  const SynthesisSummary summary = GenerateSyntheticCorpus(spec, o.common.seed, dir.path());
  std::cout << "corpus " << dir.path().string() << ": " << summary.utterances << " utterances, "
            << summary.instances << " phone instances, " << summary.substituted
            << " substituted\n";
  return 0;
}

int RunPrepare(const PrepareOptions &o) {
  RequirePath(o.corpus, "--corpus");
  const ClassMap class_map = ClassMap::Load(ClassMapPath(o.corpus, o.class_map));
  const Corpus corpus = LoadCorpus(o.corpus, class_map);

  std::set<std::string> train(o.train.begin(), o.train.end());
  std::set<std::string> validation(o.validation.begin(), o.validation.end());
  std::set<std::string> test(o.test.begin(), o.test.end());
  const bool explicit_split = !train.empty() || !validation.empty() || !test.empty();
  if (o.train_only && explicit_split) {
    throw UsageError("--train-only cannot be combined with explicit speaker lists");
  }
  const std::set<std::string> speakers = corpus.Speakers();
  if (o.train_only) {
    train = speakers;
  } else if (!explicit_split) {
    if (o.validation_count < 1 || o.test_count < 0) {
      throw UsageError("--val-count must be >= 1 and --test-count >= 0");
    }
    std::vector<std::string> order(speakers.begin(), speakers.end());
    if (order.size() < static_cast<std::size_t>(o.validation_count + o.test_count + 1)) {
      throw SplitError("corpus has " + std::to_string(order.size()) +
                       " speakers, too few for the requested split");
    }
    Rng rng(o.common.seed);
    rng.Shuffle(order);
    std::size_t i = 0;
    for (int n = 0; n < o.test_count; ++n) test.insert(order[i++]);
    for (int n = 0; n < o.validation_count; ++n) validation.insert(order[i++]);
    for (; i < order.size(); ++i) train.insert(order[i]);
  }
  const CorpusSplit split = SplitCorpus(corpus, train, validation, test);

  RunDir dir("prepare", o.common.out, o.common.force);
  ordered_json cfg = CommonJson("prepare", o.common);
  cfg["corpus"] = fs::absolute(o.corpus).lexically_normal().string();
  cfg["per_class_cap"] = o.balance.per_class_cap;
  cfg["perturbation_limit_ms"] = o.balance.perturbation_limit_ms;
  cfg["train_speakers"] = train;
  cfg["validation_speakers"] = validation;
  cfg["test_speakers"] = test;
  dir.WriteConfig(cfg);

  const MfccConfig mfcc;
  std::optional<FeatureCache> cache;
  if (!o.cache.empty()) cache.emplace(o.cache, mfcc);
  const FeatureCache *cache_ptr = cache ? &*cache : nullptr;

  const SampleFactory train_factory(split.train, mfcc, {}, cache_ptr);
  const auto plan = PlanBalancedSet(split.train.instances, o.balance, o.common.seed);
  ClassCounts train_counts{};
  {
    SampleWriter writer(dir / "train.smp");
    for (const auto &req : plan) {
      const Sample s = train_factory.Build(req.instance, req.perturbation_ms);
      ++train_counts[ClassIndex(s.label)];
      writer.Write(s);
    }
    writer.Close();
  }
  const auto write_all = [&](const Corpus &part, const fs::path &path) {
    ClassCounts counts{};
    SampleWriter writer(path);
    if (!part.instances.empty()) {
      const SampleFactory factory(part, mfcc, {}, cache_ptr);
      for (std::size_t i = 0; i < part.instances.size(); ++i) {
        const Sample s = factory.Build(i, 0.0);
        ++counts[ClassIndex(s.label)];
        writer.Write(s);
      }
    }
    writer.Close();
    return counts;
  };
  const ClassCounts val_counts = write_all(split.validation, dir / "val.smp");
  const ClassCounts test_counts = write_all(split.test, dir / "test.smp");

  ordered_json info;
  info["dropped_no_parallel"] = corpus.dropped_no_parallel;
  info["train"] = {{"speakers", train}, {"samples", Total(train_counts)},
                   {"classes", CountsJson(train_counts)}};
  info["validation"] = {{"speakers", validation}, {"samples", Total(val_counts)},
                        {"classes", CountsJson(val_counts)}};
  info["test"] = {{"speakers", test}, {"samples", Total(test_counts)},
                  {"classes", CountsJson(test_counts)}};
  WriteTextFile(dir / "split.json", info.dump(2) + "\n");
  std::cout << "samples: train " << Total(train_counts) << ", validation " << Total(val_counts)
            << ", test " << Total(test_counts) << "\n";
  return 0;
}

int RunTrain(const TrainOptions &o, bool finetune) {
  const std::string command = finetune ? "finetune" : "train";
  const nnet::TrainMode mode = nnet::ParseTrainMode(finetune ? "finetune" : o.mode);
  if (!finetune && mode == nnet::TrainMode::kFinetune) {
    throw UsageError("use the finetune command to continue from a checkpoint");
  }
  if (!finetune && !o.checkpoint.empty()) {
    throw UsageError("--checkpoint is only accepted by finetune");
  }
  if (finetune) RequirePath(o.checkpoint, "--checkpoint");
  if (o.data.empty()) throw UsageError("--data is required");
  if (mode == nnet::TrainMode::kScratch && o.data.size() > 1) {
    throw UsageError("several --data directories need --mode pooled");
  }
  for (const auto &d : o.data) RequirePath(d, "--data");

  nnet::TrainConfig config = nnet::TrainConfig::Defaults(mode);
  config.seed = o.common.seed;
  if (o.learning_rate) config.learning_rate = *o.learning_rate;
  if (o.epochs) config.epochs = *o.epochs;
  if (o.minibatch) config.minibatch = *o.minibatch;
  if (o.l2_weight) config.l2_weight = *o.l2_weight;
  config.Validate();

  std::vector<Sample> train;
  for (const auto &d : o.data) {
    std::vector<Sample> part = LoadSamples(fs::path(d) / "train.smp");
    train.insert(train.end(), std::make_move_iterator(part.begin()),
                 std::make_move_iterator(part.end()));
  }
  const std::vector<Sample> validation = LoadSamples(fs::path(o.data.front()) / "val.smp");
  if (train.empty()) throw InputError("no training samples in " + o.data.front());
  if (validation.empty()) throw InputError("no validation samples in " + o.data.front());

  std::optional<nnet::ModelState> pretrained;
  nnet::ArchitectureConfig arch;
  if (finetune) {
    pretrained = nnet::LoadCheckpoint(o.checkpoint);
    arch = pretrained->arch();
  } else {
    const Sample &s = train.front();
    arch.ultrasound_channels = s.ultrasound_frames;
    arch.ultrasound_rows = s.ultrasound_rows;
    arch.ultrasound_cols = s.ultrasound_cols;
    arch.audio_frames = s.audio_frames;
    arch.audio_dim = s.audio_dim;
  }
  if (o.arch.conv1_filters) arch.conv1_filters = *o.arch.conv1_filters;
  if (o.arch.conv2_filters) arch.conv2_filters = *o.arch.conv2_filters;
  if (o.arch.audio_fc) arch.audio_fc = *o.arch.audio_fc;
  if (o.arch.hidden1) arch.hidden1 = *o.arch.hidden1;
  if (o.arch.hidden2) arch.hidden2 = *o.arch.hidden2;
  arch.Validate();

  RunDir dir(command, o.common.out, o.common.force);
  ordered_json cfg = CommonJson(command, o.common);
  cfg["mode"] = nnet::TrainModeName(mode);
  ordered_json data = ordered_json::array();
  for (const auto &d : o.data) data.push_back(fs::absolute(d).lexically_normal().string());
  cfg["data"] = data;
  if (finetune) cfg["checkpoint"] = fs::absolute(o.checkpoint).lexically_normal().string();
  cfg["learning_rate"] = config.learning_rate;
  cfg["epochs"] = config.epochs;
  cfg["minibatch"] = config.minibatch;
  cfg["l2_weight"] = config.l2_weight;
  cfg["architecture"] = arch.Canonical();
  dir.WriteConfig(cfg);

  const auto progress = [](const nnet::EpochRecord &r) {
    std::cerr << "epoch " << r.epoch << " loss " << FormatReal(r.train_loss, 4)
              << " val_accuracy " << FormatReal(r.val_accuracy, 4) << "\n";
  };
  std::optional<nnet::TrainResult> trained;
  try {
    trained = finetune ? nnet::Finetune(*pretrained, arch, train, validation, config, progress)
                      : nnet::Train(nnet::ModelState::Initialize(arch, config.seed), train,
                                    validation, config, progress);
  } catch (const DivergenceError &e) {
    WriteTextFile(dir / "epochs.csv", e.log_csv());
    throw;
  }
  const nnet::TrainResult &result = *trained;
  nnet::SaveCheckpoint(result.model, dir / "model.ckpt");
  WriteTextFile(dir / "epochs.csv", nnet::EpochLogCsv(result.log));

  ordered_json summary;
  summary["best_epoch"] = result.model.meta.epoch;
  summary["validation_accuracy"] = result.model.meta.validation_accuracy;
  summary["train_samples"] = train.size();
  summary["validation_samples"] = validation.size();
  summary["parameters"] = result.model.NumParameters();
  summary["fingerprint"] = HexDigest(arch.Fingerprint());
  WriteTextFile(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << "best epoch " << result.model.meta.epoch << ", validation accuracy "
            << FormatReal(result.model.meta.validation_accuracy, 4) << "\n";
  return 0;
}

int RunScore(const ScoreOptions &o) {
  RequirePath(o.checkpoint, "--checkpoint");
  RequirePath(o.corpus, "--corpus");
  if (!o.preset.empty() && !o.expected.empty()) {
    throw UsageError("--preset and --expected are mutually exclusive");
  }
  if (o.preset.empty() && o.expected.empty()) throw UsageError("--preset or --expected is required");
  if (!o.truth.empty() && !o.ratings.empty()) {
    throw UsageError("--truth and --ratings are mutually exclusive");
  }
  if (!o.ratings.empty()) RequirePath(o.ratings, "--ratings");
  if (!std::isfinite(o.k)) throw UsageError("--k must be finite");

  ArticulationClass expected;
  std::optional<ArticulationClass> competing;
  if (!o.preset.empty()) {
    const ScorePreset preset = ParsePreset(o.preset);
    expected = preset.expected;
    competing = preset.competing;
  } else {
    expected = ParseClassOrThrow(o.expected);
    if (!o.competing.empty() && o.competing != "auto") {
      competing = ParseClassOrThrow(o.competing);
    }
  }

  const nnet::ModelState model = nnet::LoadCheckpoint(o.checkpoint);
  const ClassMap class_map = ClassMap::Load(ClassMapPath(o.corpus, o.class_map));
  Corpus corpus = LoadCorpus(o.corpus, class_map);
  const std::set<std::string> speakers(o.speakers.begin(), o.speakers.end());
  std::erase_if(corpus.instances, [&](const PhoneInstance &p) {
    return p.cls != expected || (!speakers.empty() && !speakers.count(p.speaker_id));
  });
  if (corpus.instances.empty()) {
    throw InputError("no " + std::string(ClassName(expected)) + " instances to score");
  }

  // Expert side: synthetic truth or rated clear cases.
  std::map<std::string, int> b_expert;
  std::map<std::string, double> s_c;
  std::size_t excluded = 0;
  std::string expert_source = "none";
  if (!o.ratings.empty()) {
    expert_source = "ratings";
    const auto first = FirstRatings(o.ratings, o.annotator);
    for (const auto &[item, r] : first) {
      s_c[item] = CombinedExpertScore(r);
      if (auto label = ClearCaseLabel(r)) b_expert[item] = *label;
    }
  } else {
    const fs::path truth_path = o.truth.empty() ? fs::path(o.corpus) / "truth.tsv" : fs::path(o.truth);
    if (!o.truth.empty() && !fs::exists(truth_path)) {
      throw UsageError("--truth: " + o.truth + " does not exist");
    }
    if (fs::exists(truth_path)) {
      expert_source = "truth";
      for (const auto &row : ParseTruth(ReadTextFile(truth_path), truth_path.string())) {
        b_expert[ItemId(row.utterance_id, row.phone_index)] = row.rendered != row.labeled ? 1 : 0;
      }
    }
  }
  if (expert_source == "ratings") {
    std::erase_if(corpus.instances, [&](const PhoneInstance &p) {
      const bool keep = b_expert.count(ItemId(p.utterance_id, p.phone_index)) > 0;
      if (!keep) ++excluded;
      return !keep;
    });
    if (corpus.instances.empty()) throw InputError("no rated clear cases to score");
  }

  RunDir dir("score", o.common.out, o.common.force);
  ordered_json cfg = CommonJson("score", o.common);
  cfg["checkpoint"] = fs::absolute(o.checkpoint).lexically_normal().string();
  cfg["corpus"] = fs::absolute(o.corpus).lexically_normal().string();
  cfg["expected"] = std::string(ClassName(expected));
  cfg["competing"] = competing ? std::string(ClassName(*competing)) : "auto";
  cfg["k"] = o.k;
  cfg["speakers"] = speakers;
  cfg["expert"] = expert_source;
  dir.WriteConfig(cfg);

  const SampleFactory factory(corpus);
  const std::vector<Sample> samples = BuildAllSamples(factory);
  const std::vector<nnet::Posterior> posteriors = nnet::InferAll(model, samples);

  std::vector<ScoreRecord> records;
  records.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto &p = samples[i].provenance;
    const ModelScore ms = ComputeModelScore(posteriors[i], expected, competing);
    ScoreRecord r;
    r.utterance_id = p.utterance_id;
    r.phone_index = p.phone_index;
    r.speaker = p.speaker_id;
    r.expected = expected;
    r.competing = ms.competing;
    r.s_m = ms.s_m;
    r.k = o.k;
    r.b_model = Binarize(ms.s_m, o.k);
    const std::string id = ItemId(p.utterance_id, p.phone_index);
    if (auto it = s_c.find(id); it != s_c.end()) r.s_c = it->second;
    if (auto it = b_expert.find(id); it != b_expert.end()) r.b_expert = it->second;
    records.push_back(std::move(r));
  }
  WriteTextFile(dir / "scores.csv", ScoreCsv(records));

  ordered_json summary;
  summary["scored"] = records.size();
  summary["excluded"] = excluded;
  summary["flagged"] = std::count_if(records.begin(), records.end(),
                                     [](const ScoreRecord &r) { return r.b_model == 1; });
  const bool all_labelled = std::all_of(records.begin(), records.end(),
                                        [](const ScoreRecord &r) { return r.b_expert.has_value(); });
  if (expert_source != "none" && all_labelled) {
    summary["detection"] = ordered_json::parse(DetectionJson(MakeDetectionReport(records)));
  }
  WriteTextFile(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << "scored " << records.size() << " instances";
  if (excluded) std::cout << ", excluded " << excluded << " unclear ratings";
  std::cout << "\n";
  return 0;
}

int RunEvaluate(const EvaluateOptions &o) {
  if (o.data.empty() && o.scores.empty()) throw UsageError("--data or --scores is required");
  if (!o.data.empty()) {
    RequirePath(o.checkpoint, "--checkpoint");
    RequirePath(o.data, "--data");
  } else if (!o.checkpoint.empty()) {
    throw UsageError("--checkpoint needs --data");
  }
  if (!o.scores.empty()) RequirePath(o.scores, "--scores");
  if (!o.ratings.empty()) {
    RequirePath(o.ratings, "--ratings");
    if (o.scores.empty()) throw UsageError("--ratings needs --scores");
  }

  std::optional<nnet::ModelState> model;
  std::vector<Sample> test;
  if (!o.data.empty()) {
    model = nnet::LoadCheckpoint(o.checkpoint);
    test = LoadSamples(fs::path(o.data) / "test.smp");
  }
  std::vector<ScoreRecord> records;
  std::size_t unlabelled = 0;
  if (!o.scores.empty()) {
    const fs::path csv = fs::is_directory(o.scores) ? fs::path(o.scores) / "scores.csv"
                                                    : fs::path(o.scores);
    std::map<std::string, ExpertRating> rated;
    if (!o.ratings.empty()) rated = FirstRatings(o.ratings, o.annotator);
    for (auto &r : ParseScoreCsv(ReadTextFile(csv), csv.string())) {
      if (!o.ratings.empty()) {
        r.s_c.reset();
        r.b_expert.reset();
        if (auto it = rated.find(ItemId(r.utterance_id, r.phone_index)); it != rated.end()) {
          r.s_c = CombinedExpertScore(it->second);
          if (auto label = ClearCaseLabel(it->second)) r.b_expert = *label;
        }
      }
      if (r.b_expert) {
        records.push_back(std::move(r));
      } else {
        ++unlabelled;
      }
    }
  }

  RunDir dir("evaluate", o.common.out, o.common.force);
  ordered_json cfg = CommonJson("evaluate", o.common);
  if (model) {
    cfg["checkpoint"] = fs::absolute(o.checkpoint).lexically_normal().string();
    cfg["data"] = fs::absolute(o.data).lexically_normal().string();
  }
  if (!o.scores.empty()) cfg["scores"] = fs::absolute(o.scores).lexically_normal().string();
  if (!o.ratings.empty()) {
    cfg["ratings"] = fs::absolute(o.ratings).lexically_normal().string();
    cfg["annotator"] = o.annotator;
  }
  dir.WriteConfig(cfg);

  if (model) {
    const ClassificationReport report = ClassifyReport(*model, test);
    WriteTextFile(dir / "classification.json", ClassificationJson(report));
    WriteTextFile(dir / "classification.txt", ClassificationText(report));
    std::cout << ClassificationText(report);
  }
  if (!o.scores.empty()) {
    const DetectionReport detection = MakeDetectionReport(records);
    ordered_json j = ordered_json::parse(DetectionJson(detection));
    j["excluded"] = unlabelled;
    WriteTextFile(dir / "detection.json", j.dump(2) + "\n");
    WriteTextFile(dir / "detection.txt", DetectionText(detection));
    const std::vector<SpeakerRow> speakers = PerSpeakerReport(records);
    WriteTextFile(dir / "speakers.json", SpeakerJson(speakers));
    WriteTextFile(dir / "speakers.txt", SpeakerText(speakers));
    std::cout << DetectionText(detection) << SpeakerText(speakers);
  }
  return 0;
}

int RunSweep(const SweepOptions &o) {
  RequirePath(o.scores, "--scores");
  const std::vector<double> grid = MakeGrid(o.k_min, o.k_max, o.k_step);
  const fs::path csv =
      fs::is_directory(o.scores) ? fs::path(o.scores) / "scores.csv" : fs::path(o.scores);
  std::vector<ScoreRecord> records = ParseScoreCsv(ReadTextFile(csv), csv.string());
  std::erase_if(records, [](const ScoreRecord &r) { return !r.b_expert; });
  const std::vector<SweepPoint> sweep = ThresholdSweep(records, grid);

  RunDir dir("sweep", o.common.out, o.common.force);
  ordered_json cfg = CommonJson("sweep", o.common);
  cfg["scores"] = fs::absolute(o.scores).lexically_normal().string();
  cfg["k_min"] = o.k_min;
  cfg["k_max"] = o.k_max;
  cfg["k_step"] = o.k_step;
  dir.WriteConfig(cfg);
  WriteTextFile(dir / "sweep.csv", SweepCsv(sweep));
  std::cout << "sweep over " << grid.size() << " thresholds, " << records.size() << " items\n";
  return 0;
}

namespace {

ordered_json AlphaJson(const RatingMatrix &m) {
  ordered_json j;
  j["scale"] = std::string(ScaleName(m.scale));
  try {
    const AlphaResult a = KrippendorffAlpha(m);
    j["alpha"] = a.alpha;
    j["band"] = a.band;
    j["items"] = a.n_items;
    j["values"] = a.n_values;
  } catch (const Error &e) {
    j["alpha"] = nullptr;
    j["error"] = e.kind();
    j["message"] = e.what();
  }
  return j;
}

ordered_json GridJson(const KappaGrid &g) {
  ordered_json j;
  j["annotators"] = g.annotators;
  ordered_json rows = ordered_json::array();
  for (const auto &row : g.cells) {
    ordered_json cells = ordered_json::array();
    for (const auto &c : row) {
      ordered_json cell;
      cell["kappa"] = c.kappa ? ordered_json(*c.kappa) : ordered_json(nullptr);
      cell["n"] = c.n;
      cell["band"] = c.band;
      cell["flag"] = c.flag;
      cell["color"] = c.color;
      cells.push_back(cell);
    }
    rows.push_back(cells);
  }
  j["cells"] = rows;
  return j;
}

std::string AgreementText(const ordered_json &report, const KappaGrid &grid) {
  std::string out = "measure         scale     alpha     band\n";
  for (const auto &[name, a] : report["alpha"].items()) {
    std::string line = name;
    line.resize(16, ' ');
    std::string scale = a["scale"].get<std::string>();
    scale.resize(10, ' ');
    line += scale;
    if (a["alpha"].is_null()) {
      line += "-         " + a["error"].get<std::string>();
    } else {
      std::string v = FormatReal(a["alpha"].get<double>(), 4);
      v.resize(10, ' ');
      line += v + a["band"].get<std::string>();
    }
    out += line + "\n";
  }
  out += "\nkappa";
  for (const auto &a : grid.annotators) out += "\t" + a;
  out += "\n";
  for (std::size_t i = 0; i < grid.annotators.size(); ++i) {
    out += grid.annotators[i];
    for (const auto &c : grid.cells[i]) {
      out += "\t" + (c.kappa ? FormatReal(*c.kappa, 3) : (c.flag.empty() ? "-" : c.flag));
    }
    out += "\n";
  }
  return out;
}

std::optional<ExpertRating> AsRating(const RatingEntry &e) {
  ExpertRating r;
  if (e.value != std::round(e.value)) return std::nullopt;
  r.primary = static_cast<int>(e.value);
  r.secondary = e.secondary;
  try {
    r.Validate();
  } catch (const ValidationError &) {
    return std::nullopt;
  }
  return r;
}

}  // namespace

int RunAgreement(const AgreementOptions &o) {
  RequirePath(o.ratings, "--ratings");
  const RatingsTable table = ParseRatingsCsv(ReadTextFile(o.ratings), o.ratings);
  const Scale scale = ParseScale(o.scale);

  ordered_json report;
  report["ratings"] = table.entries.size();
  ordered_json alpha = ordered_json::object();
  std::function<std::optional<int>(const RatingEntry &)> label_of;
  std::size_t unclear = 0;
  if (table.has_secondary_column) {
    alpha["primary"] = AlphaJson(BuildMatrix(table.entries, Scale::kOrdinal,
                                             [](const RatingEntry &e) -> std::optional<double> {
                                               return e.value;
                                             }));
    alpha["combined"] = AlphaJson(BuildMatrix(table.entries, Scale::kInterval,
                                              [](const RatingEntry &e) -> std::optional<double> {
                                                auto r = AsRating(e);
                                                if (!r) return std::nullopt;
                                                return CombinedExpertScore(*r);
                                              }));
    label_of = [](const RatingEntry &e) -> std::optional<int> {
      auto r = AsRating(e);
      return r ? ClearCaseLabel(*r) : std::nullopt;
    };
    alpha["binary"] = AlphaJson(BuildMatrix(table.entries, Scale::kNominal,
                                            [&](const RatingEntry &e) -> std::optional<double> {
                                              auto l = label_of(e);
                                              if (!l) return std::nullopt;
                                              return *l;
                                            }));
    for (const auto &e : table.entries) {
      if (e.occurrence == 1 && !label_of(e)) ++unclear;
    }
    report["unclear_excluded"] = unclear;
  } else {
    alpha["value"] = AlphaJson(BuildMatrix(table.entries, scale,
                                           [](const RatingEntry &e) -> std::optional<double> {
                                             return e.value;
                                           }));
    label_of = [](const RatingEntry &e) -> std::optional<int> {
      if (e.value != std::round(e.value)) return std::nullopt;
      return static_cast<int>(e.value);
    };
  }
  report["alpha"] = alpha;
  const KappaGrid grid = PairwiseKappaGrid(table.entries, label_of);
  report["kappa"] = GridJson(grid);

  RunDir dir("agreement", o.common.out, o.common.force);
  ordered_json cfg = CommonJson("agreement", o.common);
  cfg["ratings"] = fs::absolute(o.ratings).lexically_normal().string();
  cfg["scale"] = table.has_secondary_column ? "two-part" : std::string(ScaleName(scale));
  dir.WriteConfig(cfg);
  WriteTextFile(dir / "agreement.json", report.dump(2) + "\n");
  const std::string text = AgreementText(report, grid);
  WriteTextFile(dir / "agreement.txt", text);
  std::cout << text;
  return 0;
}

}  // namespace uti::cli
