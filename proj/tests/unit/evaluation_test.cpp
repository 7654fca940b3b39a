// tests/unit/evaluation_test.cpp

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

#include <json.hpp>

#include "test_util.hpp"
#include "uti/agreement.hpp"
#include "uti/error.hpp"
#include "uti/evaluation.hpp"
#include "uti/nnet/train.hpp"
#include "uti/rng.hpp"

namespace uti {
namespace {

using C = ArticulationClass;

TEST(Classification, AllCorrect) {
  const std::vector<C> truth = {C::kVelar, C::kLabial, C::kVelar};
  const auto r = MakeClassificationReport(truth, truth);
  EXPECT_EQ(r.global_accuracy, 1.0);
  EXPECT_EQ(r.per_class_accuracy[ClassIndex(C::kVelar)], 1.0);
  EXPECT_EQ(r.per_class_accuracy[ClassIndex(C::kLabial)], 1.0);
  EXPECT_FALSE(r.per_class_accuracy[ClassIndex(C::kRhotic)].has_value());
}

TEST(Classification, WeightedGlobalAccuracy) {
  std::vector<C> truth, pred;
  for (int i = 0; i < 10; ++i) {
    truth.push_back(C::kDental);
    pred.push_back(C::kDental);
  }
  for (int i = 0; i < 30; ++i) {
    truth.push_back(C::kLateral);
    pred.push_back(i % 2 ? C::kLateral : C::kPalatal);
  }
  const auto r = MakeClassificationReport(truth, pred);
  EXPECT_EQ(r.per_class_accuracy[ClassIndex(C::kDental)], 1.0);
  EXPECT_EQ(r.per_class_accuracy[ClassIndex(C::kLateral)], 0.5);
  EXPECT_DOUBLE_EQ(r.global_accuracy, 0.625);
  EXPECT_EQ(r.confusion[ClassIndex(C::kLateral)][ClassIndex(C::kPalatal)], 15u);
}

TEST(Classification, GlobalEqualsFractionCorrect) {
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + rng.Below(200);
    std::vector<C> truth(n), pred(n);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = ClassFromIndex(rng.Below(9));
      pred[i] = rng.Bernoulli(0.6) ? truth[i] : ClassFromIndex(rng.Below(9));
      correct += truth[i] == pred[i];
    }
    const auto r = MakeClassificationReport(truth, pred);
    double weighted = 0.0;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      if (r.per_class_accuracy[c]) weighted += *r.per_class_accuracy[c] * r.counts[c];
    }
    EXPECT_NEAR(r.global_accuracy, static_cast<double>(correct) / n, 1e-15);
    EXPECT_NEAR(weighted / n, r.global_accuracy, 1e-12);
  }
}

TEST(Classification, EmptyInputThrows) {
  EXPECT_THROW(MakeClassificationReport({}, {}), InputError);
}

TEST(Classification, ModelReportMatchesRecount) {
  const auto arch = test::TinyArchitecture();
  Rng rng(3);
  std::vector<Sample> samples;
  for (int i = 0; i < 45; ++i) samples.push_back(test::RandomSample(arch, ClassFromIndex(i % 9), rng));
  nnet::TrainConfig cfg;
  cfg.epochs = 3;
  cfg.minibatch = 16;
  cfg.l2_weight = 0.0;
  cfg.learning_rate = 0.05;
  const auto trained = nnet::Train(nnet::ModelState::Initialize(arch, 1), samples, samples, cfg);
  const auto report = ClassifyReport(trained.model, samples);
  const auto post = nnet::InferAll(trained.model, samples);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) correct += nnet::Predict(post[i]) == samples[i].label;
  EXPECT_EQ(report.total, 45u);
  EXPECT_DOUBLE_EQ(report.global_accuracy, static_cast<double>(correct) / 45.0);
}

TEST(Detection, HandCount) {
  const std::vector<int> expert = {1, 1, 0, 0}, model = {1, 0, 1, 0};
  const auto r = MakeDetectionReport(model, expert);
  EXPECT_EQ(r.tp, 1u);
  EXPECT_EQ(r.fp, 1u);
  EXPECT_EQ(r.fn, 1u);
  EXPECT_EQ(r.tn, 1u);
  EXPECT_EQ(r.precision, 0.5);
  EXPECT_EQ(r.recall, 0.5);
  EXPECT_EQ(r.f1, 0.5);
  EXPECT_EQ(r.accuracy, 0.5);
}

TEST(Detection, PerfectAgreement) {
  const std::vector<int> labels = {0, 1, 0, 0, 1};
  const auto r = MakeDetectionReport(labels, labels);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_EQ(r.f1, 1.0);
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_TRUE(r.flags.empty());
}

TEST(Detection, UndefinedMetricsAreFlagged) {
  const std::vector<int> expert = {1, 0, 1}, none = {0, 0, 0};
  auto r = MakeDetectionReport(none, expert);
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_FALSE(r.precision.has_value());
  EXPECT_FALSE(r.f1.has_value());
  EXPECT_NE(std::find(r.flags.begin(), r.flags.end(), "precision-undefined"), r.flags.end());

  r = MakeDetectionReport(expert, none);
  EXPECT_FALSE(r.recall.has_value());
  EXPECT_NE(std::find(r.flags.begin(), r.flags.end(), "recall-undefined"), r.flags.end());

  const auto j = nlohmann::json::parse(DetectionJson(r));
  EXPECT_TRUE(j["recall"].is_null());
}

TEST(Detection, Errors) {
  EXPECT_THROW(MakeDetectionReport(std::vector<int>{}, std::vector<int>{}), InputError);
  EXPECT_THROW(MakeDetectionReport(std::vector<int>{0}, std::vector<int>{0, 1}), InputError);
  EXPECT_THROW(MakeDetectionReport(std::vector<int>{2}, std::vector<int>{0}), InputError);
  std::vector<ScoreRecord> missing(1);
  EXPECT_THROW(MakeDetectionReport(missing), InputError);
}

ScoreRecord Record(const std::string &speaker, double s_m, int b_expert, double k = 0.0) {
  ScoreRecord r;
  r.utterance_id = speaker + "_u";
  r.speaker = speaker;
  r.s_m = s_m;
  r.k = k;
  r.b_model = s_m > k ? 0 : 1;
  r.b_expert = b_expert;
  return r;
}

TEST(PerSpeaker, DegenerateMarginalsGiveLowKappa) {
  // Expert: all errors. Model: 80% errors. Accuracy 0.8 but kappa 0.
  std::vector<ScoreRecord> records;
  for (int i = 0; i < 10; ++i) records.push_back(Record("kid", i < 8 ? -1.0 : 1.0, 1));
  const auto rows = PerSpeakerReport(records);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].detection.accuracy, 0.8);
  ASSERT_TRUE(rows[0].kappa.has_value());
  EXPECT_LE(*rows[0].kappa, 0.0);
  EXPECT_GT(*rows[0].detection.f1, 0.85);
}

TEST(PerSpeaker, RowsMatchDirectKappa) {
  Rng rng(5);
  std::vector<ScoreRecord> records;
  for (int i = 0; i < 60; ++i) {
    const std::string who = i % 2 ? "b" : "a";
    records.push_back(Record(who, rng.Normal(), static_cast<int>(rng.Below(2))));
  }
  const auto rows = PerSpeakerReport(records);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].speaker, "a");
  EXPECT_EQ(rows[1].speaker, "b");
  for (const auto &row : rows) {
    std::vector<int> m, e;
    for (const auto &r : records) {
      if (r.speaker == row.speaker) {
        m.push_back(r.b_model);
        e.push_back(*r.b_expert);
      }
    }
    EXPECT_EQ(row.detection.n, m.size());
    EXPECT_EQ(row.detection.tp + row.detection.fp + row.detection.fn + row.detection.tn, m.size());
    EXPECT_DOUBLE_EQ(*row.kappa, CohenKappa(e, m).kappa);
  }
}

TEST(PerSpeaker, PerfectMatchAndConstantFlag) {
  std::vector<ScoreRecord> records = {Record("p", -1, 1), Record("p", 1, 0), Record("q", 1, 0),
                                      Record("q", 2, 0)};
  const auto rows = PerSpeakerReport(records);
  EXPECT_EQ(rows[0].kappa, 1.0);
  EXPECT_FALSE(rows[1].kappa.has_value());
  EXPECT_EQ(rows[1].kappa_flag, "perfect-constant");
}

TEST(Sweep, ExtremesMonotoneAndRecompute) {
  Rng rng(6);
  std::vector<ScoreRecord> records;
  for (int i = 0; i < 80; ++i) {
    const int err = static_cast<int>(rng.Below(2));
    records.push_back(Record("s" + std::to_string(i % 3), rng.Normal(err ? -1.0 : 1.0, 1.0), err));
  }
  double lo = 1e9, hi = -1e9;
  for (const auto &r : records) {
    lo = std::min(lo, r.s_m);
    hi = std::max(hi, r.s_m);
  }
  const auto grid = MakeGrid(-4.0, 4.0, 0.1);
  ASSERT_EQ(grid.size(), 81u);
  const auto sweep = ThresholdSweep(records, grid);
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    if (i > 0) {
      EXPECT_GE(*sweep[i].report.recall, *sweep[i - 1].report.recall);
    }
    std::vector<int> m, e;
    for (const auto &r : records) {
      m.push_back(Binarize(r.s_m, sweep[i].k));
      e.push_back(*r.b_expert);
    }
    const auto direct = MakeDetectionReport(m, e);
    EXPECT_EQ(sweep[i].report.tp, direct.tp);
    EXPECT_EQ(sweep[i].report.fp, direct.fp);
    EXPECT_EQ(sweep[i].report.precision, direct.precision);
  }
  const auto below = ThresholdSweep(records, std::vector<double>{lo - 1.0});
  EXPECT_EQ(below[0].report.recall, 0.0);
  EXPECT_FALSE(below[0].report.precision.has_value());
  const auto above = ThresholdSweep(records, std::vector<double>{hi + 1.0});
  EXPECT_EQ(above[0].report.recall, 1.0);

  // The k = 0 entry equals the detection report of records binarized at 0.
  const auto at_zero = MakeDetectionReport(records);
  const auto &p = sweep[40];
  EXPECT_NEAR(p.k, 0.0, 1e-12);
  EXPECT_EQ(p.report.tp, at_zero.tp);
  EXPECT_EQ(p.report.tn, at_zero.tn);
}

TEST(Sweep, GridValidationAndCsv) {
  EXPECT_THROW(MakeGrid(1.0, 0.0, 0.1), InputError);
  EXPECT_THROW(MakeGrid(0.0, 1.0, 0.0), InputError);
  std::vector<ScoreRecord> records = {Record("a", 0.5, 0)};
  const std::vector<double> unsorted = {0.0, -1.0};
  EXPECT_THROW(ThresholdSweep(records, unsorted), InputError);
  EXPECT_THROW(ThresholdSweep(records, std::vector<double>{}), InputError);
  const auto csv = SweepCsv(ThresholdSweep(records, std::vector<double>{0.0}));
  EXPECT_EQ(csv, "k,precision,recall,f1,accuracy\n0.000000,,,,1.000000\n");
}

}  // namespace
}  // namespace uti
