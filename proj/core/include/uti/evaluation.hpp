// core/include/uti/evaluation.hpp

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

#ifndef UTI_EVALUATION_HPP_
#define UTI_EVALUATION_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uti/articulation.hpp"
#include "uti/nnet/model.hpp"
#include "uti/scoring.hpp"

namespace uti {

struct ClassificationReport {
  std::array<std::size_t, kNumClasses> counts{};
  std::array<std::size_t, kNumClasses> correct{};
  /// Absent for classes without samples.
  std::array<std::optional<double>, kNumClasses> per_class_accuracy{};
  /// confusion[truth][predicted]
  std::array<std::array<std::size_t, kNumClasses>, kNumClasses> confusion{};
  std::size_t total = 0;
  double global_accuracy = 0.0;
};

/// Throws InputError on empty or unequal inputs.
ClassificationReport MakeClassificationReport(std::span<const ArticulationClass> truth,
                                              std::span<const ArticulationClass> predicted);
/// Argmax predictions of `model` over `samples`.
ClassificationReport ClassifyReport(const nnet::ModelState &model,
                                    const std::vector<Sample> &samples);

std::string ClassificationJson(const ClassificationReport &r);
std::string ClassificationText(const ClassificationReport &r);

/// Error (b = 1) is the positive class.
struct DetectionReport {
  std::size_t n = 0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::optional<double> precision;  // absent with no predicted errors
  std::optional<double> recall;     // absent with no expert errors
  std::optional<double> f1;         // absent when P or R is absent
  double accuracy = 0.0;
  std::vector<std::string> flags;   // e.g. "precision-undefined"
};

/// Throws InputError on empty input, unequal lengths or labels other than 0/1.
DetectionReport MakeDetectionReport(std::span<const int> b_model, std::span<const int> b_expert);
/// Uses records' b_model and b_expert; every record must carry b_expert.
DetectionReport MakeDetectionReport(std::span<const ScoreRecord> records);

struct SpeakerRow {
  std::string speaker;
  DetectionReport detection;
  std::optional<double> kappa;
  std::string kappa_band;
  std::string kappa_flag;  // "perfect-constant" when undefined
};

/// One row per speaker, sorted by speaker id.
std::vector<SpeakerRow> PerSpeakerReport(std::span<const ScoreRecord> records);

struct SweepPoint {
  double k = 0.0;
  DetectionReport report;
};

/// Re-binarizes s_m at every k of an ascending, non-empty grid.
std::vector<SweepPoint> ThresholdSweep(std::span<const ScoreRecord> records,
                                       std::span<const double> grid);
/// `lo, lo + step, ..., hi` computed as lo + i * step.
std::vector<double> MakeGrid(double lo, double hi, double step);

std::string DetectionJson(const DetectionReport &r);
std::string DetectionText(const DetectionReport &r);
std::string SpeakerJson(std::span<const SpeakerRow> rows);
std::string SpeakerText(std::span<const SpeakerRow> rows);
/// Header `k,precision,recall,f1,accuracy`; absent values are empty.
std::string SweepCsv(std::span<const SweepPoint> sweep);

}  // namespace uti

#endif  // UTI_EVALUATION_HPP_
