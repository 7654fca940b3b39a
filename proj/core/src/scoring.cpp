// core/src/scoring.cpp

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

#include "uti/scoring.hpp"

#include <cmath>

#include "uti/error.hpp"
#include "uti/text_io.hpp"

namespace uti {

ModelScore ComputeModelScore(const nnet::Posterior &posterior, ArticulationClass expected,
                             std::optional<ArticulationClass> competing) {
  for (double p : posterior) {
    if (!std::isfinite(p) || p < 0.0) throw ValidationError("posterior has an invalid entry");
  }
  const std::size_t y = ClassIndex(expected);
  std::size_t c;
  if (competing) {
    if (*competing == expected) {
      throw ValidationError("expected and competing class are both " +
                            std::string(ClassName(expected)));
    }
    c = ClassIndex(*competing);
  } else {
    c = y == 0 ? 1 : 0;
    for (std::size_t q = 0; q < kNumClasses; ++q) {
      if (q != y && posterior[q] > posterior[c]) c = q;
    }
  }
  const double py = std::max(posterior[y], kProbabilityFloor);
  const double pc = std::max(posterior[c], kProbabilityFloor);
  return {std::log(py) - std::log(pc), ClassFromIndex(c)};
}

void ExpertRating::Validate() const {
  if (primary < 1 || primary > 5) {
    throw ValidationError("primary score " + std::to_string(primary) + " outside 1-5");
  }
  if (secondary && (*secondary < 1 || *secondary > 5)) {
    throw ValidationError("secondary score " + std::to_string(*secondary) + " outside 1-5");
  }
  if (primary <= 3 && !secondary) throw ValidationError("secondary required");
  if (primary >= 4 && secondary) throw ValidationError("secondary forbidden");
}

double CombinedExpertScore(const ExpertRating &rating) {
  rating.Validate();
  return std::log(static_cast<double>(rating.primary)) -
         std::log(static_cast<double>(rating.secondary.value_or(1)));
}

int Binarize(double s, double k) {
  if (!std::isfinite(s)) throw ValidationError("cannot binarize a non-finite score");
  return s > k ? 0 : 1;
}

std::optional<int> ClearCaseLabel(const ExpertRating &rating) {
  if (rating.primary >= 4) return 0;
  if (rating.primary <= 2 && rating.secondary && *rating.secondary >= 4) return 1;
  return std::nullopt;
}

ClearCaseSelection SelectClearCases(std::span<const ExpertRating> ratings) {
  ClearCaseSelection out;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    if (const auto label = ClearCaseLabel(ratings[i])) {
      out.kept.push_back(i);
      out.b_expert.push_back(*label);
    } else {
      ++out.excluded;
    }
  }
  return out;
}

ScorePreset VelarFrontingPreset() {
  return {"velar-fronting", ArticulationClass::kVelar, ArticulationClass::kAlveolar};
}

ScorePreset GlidingPreset() {
  return {"gliding", ArticulationClass::kRhotic, ArticulationClass::kLabiovelar};
}

ScorePreset ParsePreset(std::string_view name) {
  if (name == "velar-fronting") return VelarFrontingPreset();
  if (name == "gliding") return GlidingPreset();
  throw InputError("unknown scoring preset '" + std::string(name) + "'");
}

namespace {
const std::vector<std::string> kScoreHeader = {"utt_id",    "phone_index", "speaker", "expected",
                                               "competing", "s_m",         "s_c",     "k",
                                               "b_model",   "b_expert"};
}

std::string ScoreCsv(std::span<const ScoreRecord> records) {
  std::string out = CsvRow(kScoreHeader);
  for (const auto &r : records) {
    out += CsvRow({r.utterance_id, std::to_string(r.phone_index), r.speaker,
                   std::string(ClassName(r.expected)), std::string(ClassName(r.competing)),
                   FormatReal(r.s_m, 9), r.s_c ? FormatReal(*r.s_c, 9) : "", FormatReal(r.k, 9),
                   std::to_string(r.b_model), r.b_expert ? std::to_string(*r.b_expert) : ""});
  }
  return out;
}

std::vector<ScoreRecord> ParseScoreCsv(std::string_view text, const std::string &source) {
  const auto rows = ParseCsv(text);
  if (rows.empty() || rows[0] != kScoreHeader) {
    throw InputError(source + ": missing score CSV header");
  }
  std::vector<ScoreRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto &f = rows[i];
    const std::string where = source + ":" + std::to_string(i + 1);
    if (f.size() != kScoreHeader.size()) throw InputError(where + ": expected 10 fields");
    ScoreRecord r;
    r.utterance_id = f[0];
    r.phone_index = static_cast<int>(ParseInt(f[1], where + " phone_index"));
    r.speaker = f[2];
    r.expected = ParseClassOrThrow(f[3]);
    r.competing = ParseClassOrThrow(f[4]);
    r.s_m = ParseDouble(f[5], where + " s_m");
    if (!f[6].empty()) r.s_c = ParseDouble(f[6], where + " s_c");
    r.k = ParseDouble(f[7], where + " k");
    r.b_model = static_cast<int>(ParseInt(f[8], where + " b_model"));
    if (!f[9].empty()) r.b_expert = static_cast<int>(ParseInt(f[9], where + " b_expert"));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace uti
