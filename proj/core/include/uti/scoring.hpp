// core/include/uti/scoring.hpp

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

#ifndef UTI_SCORING_HPP_
#define UTI_SCORING_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uti/articulation.hpp"
#include "uti/nnet/model.hpp"

namespace uti {

/// Probabilities are floored here before taking logs, which caps |s_m| at
/// about 27.6.
inline constexpr double kProbabilityFloor = 1e-12;

struct ModelScore {
  double s_m = 0.0;
  ArticulationClass competing = ArticulationClass::kAlveolar;
};

/// s_m = ln p(expected) - ln p(competing). Without a competing class the
/// most probable class other than `expected` is used, first in class order
/// on ties. Throws ValidationError when expected == competing or the
/// posterior has negative or non-finite entries.
ModelScore ComputeModelScore(const nnet::Posterior &posterior, ArticulationClass expected,
                             std::optional<ArticulationClass> competing = std::nullopt);

struct ExpertRating {
  int primary = 5;
  std::optional<int> secondary;
  std::string comment;

  /// Throws ValidationError unless 1 <= primary, secondary <= 5 and the
  /// secondary score is present exactly when primary <= 3.
  void Validate() const;
  bool operator==(const ExpertRating &) const = default;
};

/// s_c = ln s_p - ln s_s, with s_s = 1 when there is no secondary score.
double CombinedExpertScore(const ExpertRating &rating);

/// 0 (correct) when s > k, 1 (error) otherwise. Throws ValidationError for a
/// non-finite score.
int Binarize(double s, double k = 0.0);

/// Expert label for clear cases only: 0 for s_p in {4, 5}, 1 for s_p in
/// {1, 2} with s_s in {4, 5}, nothing otherwise.
std::optional<int> ClearCaseLabel(const ExpertRating &rating);

struct ClearCaseSelection {
  std::vector<std::size_t> kept;   // indices into the input
  std::vector<int> b_expert;       // parallel to kept
  std::size_t excluded = 0;
};
ClearCaseSelection SelectClearCases(std::span<const ExpertRating> ratings);

struct ScorePreset {
  std::string name;
  ArticulationClass expected;
  ArticulationClass competing;
};
ScorePreset VelarFrontingPreset();
ScorePreset GlidingPreset();
/// "velar-fronting" or "gliding"; throws InputError otherwise.
ScorePreset ParsePreset(std::string_view name);

struct ScoreRecord {
  std::string utterance_id;
  int phone_index = 0;
  std::string speaker;
  ArticulationClass expected = ArticulationClass::kVelar;
  ArticulationClass competing = ArticulationClass::kAlveolar;
  double s_m = 0.0;
  std::optional<double> s_c;
  double k = 0.0;
  int b_model = 0;
  std::optional<int> b_expert;
  bool operator==(const ScoreRecord &) const = default;
};

/// Header `utt_id,phone_index,speaker,expected,competing,s_m,s_c,k,b_model,b_expert`;
/// absent values are empty fields. Reals use 9 decimals.
std::string ScoreCsv(std::span<const ScoreRecord> records);
std::vector<ScoreRecord> ParseScoreCsv(std::string_view text, const std::string &source);

}  // namespace uti

#endif  // UTI_SCORING_HPP_
