// core/include/uti/agreement.hpp

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

#ifndef UTI_AGREEMENT_HPP_
#define UTI_AGREEMENT_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uti {

enum class Scale { kNominal, kOrdinal, kInterval };
std::string_view ScaleName(Scale s);
/// Throws InputError on unknown names.
Scale ParseScale(std::string_view name);

/// annotators x items grid of optional values.
struct RatingMatrix {
  std::vector<std::vector<std::optional<double>>> values;
  Scale scale = Scale::kNominal;

  std::size_t annotators() const { return values.size(); }
  std::size_t items() const { return values.empty() ? 0 : values[0].size(); }
};

struct AlphaResult {
  double alpha = 0.0;
  std::size_t n_items = 0;   // items with at least two ratings
  std::size_t n_values = 0;  // pairable values
  std::string band;
};

/// "reliable" above 0.8, "moderately reliable" in [0.667, 0.8], "unreliable"
/// below.
std::string AlphaBand(double alpha);

/// Krippendorff's alpha from the coincidence matrix. Items with fewer than
/// two ratings are ignored. Throws InputError when no item has two ratings
/// or rows have different lengths, DegenerateDataError when the expected
/// disagreement is zero.
AlphaResult KrippendorffAlpha(const RatingMatrix &m);

struct KappaResult {
  double kappa = 0.0;
  std::size_t n = 0;
  double observed = 0.0;  // p_o
  double expected = 0.0;  // p_e
  std::string band;
};

/// Landis-Koch levels: poor (<= 0), slight, fair, moderate, substantial,
/// almost perfect (upper bounds 0.2, 0.4, 0.6, 0.8, 1).
std::string KappaBand(double kappa);

/// Cohen's kappa over categorical labels. Throws InputError on empty or
/// unequal inputs and UndefinedKappaError when chance agreement is 1.
KappaResult CohenKappa(std::span<const int> a, std::span<const int> b);

/// One row of the ratings CSV.
struct RatingEntry {
  std::string annotator;
  std::string item;
  double value = 0.0;
  int occurrence = 1;
  std::optional<int> secondary;
};

/// Reads `annotator,item,value[,occurrence]` with optional further columns;
/// a `secondary` column, when present, is picked up by name.
struct RatingsTable {
  std::vector<RatingEntry> entries;
  bool has_secondary_column = false;
};
RatingsTable ParseRatingsCsv(std::string_view text, const std::string &source);

/// Builds the annotator x item matrix from first occurrences, with a
/// per-entry value function; entries mapped to nullopt are left missing.
/// Annotators and items are sorted.
RatingMatrix BuildMatrix(std::span<const RatingEntry> entries, Scale scale,
                         const std::function<std::optional<double>(const RatingEntry &)> &value_of);

struct KappaCell {
  std::optional<double> kappa;
  std::size_t n = 0;
  std::string band;   // empty when kappa is absent
  std::string flag;   // "absent", "perfect-constant" or empty
  std::string color;  // hex colour of the band
};

struct KappaGrid {
  std::vector<std::string> annotators;  // sorted
  std::vector<std::vector<KappaCell>> cells;
};

/// Band colours, red (poor) to green (almost perfect); grey when absent.
std::string KappaBandColor(const std::string &band);

/// Off-diagonal: kappa between two annotators' first ratings on common
/// items. Diagonal: kappa between an annotator's first and second ratings of
/// their duplicated items. `label_of` maps an entry to its category or
/// nullopt to exclude it.
KappaGrid PairwiseKappaGrid(std::span<const RatingEntry> entries,
                            const std::function<std::optional<int>(const RatingEntry &)> &label_of);

}  // namespace uti

#endif  // UTI_AGREEMENT_HPP_
