// core/src/agreement.cpp

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

#include "uti/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "uti/error.hpp"
#include "uti/text_io.hpp"

namespace uti {

std::string_view ScaleName(Scale s) {
  switch (s) {
    case Scale::kNominal: return "nominal";
    case Scale::kOrdinal: return "ordinal";
    case Scale::kInterval: return "interval";
  }
  return "nominal";
}

Scale ParseScale(std::string_view name) {
  if (name == "nominal") return Scale::kNominal;
  if (name == "ordinal") return Scale::kOrdinal;
  if (name == "interval") return Scale::kInterval;
  throw InputError("unknown scale '" + std::string(name) + "'");
}

std::string AlphaBand(double alpha) {
  if (alpha > 0.8) return "reliable";
  if (alpha >= 0.667) return "moderately reliable";
  return "unreliable";
}

AlphaResult KrippendorffAlpha(const RatingMatrix &m) {
  const std::size_t n_items = m.items();
  for (const auto &row : m.values) {
    if (row.size() != n_items) throw InputError("rating matrix rows differ in length");
  }
  // Distinct pairable values, sorted; coincidences are indexed by rank.
  std::vector<double> levels;
  std::vector<std::vector<double>> units;
  for (std::size_t u = 0; u < n_items; ++u) {
    std::vector<double> unit;
    for (const auto &row : m.values) {
      if (row[u]) unit.push_back(*row[u]);
    }
    if (unit.size() < 2) continue;
    for (double v : unit) {
      if (!std::isfinite(v)) throw InputError("non-finite rating value");
      levels.push_back(v);
    }
    units.push_back(std::move(unit));
  }
  if (units.empty()) throw InputError("alpha needs at least one item with two ratings");
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const std::size_t V = levels.size();
  auto rank = [&](double v) {
    return static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), v) -
                                    levels.begin());
  };

  std::vector<double> o(V * V, 0.0);
  std::size_t n_values = 0;
  for (const auto &unit : units) {
    const double w = 1.0 / static_cast<double>(unit.size() - 1);
    for (std::size_t i = 0; i < unit.size(); ++i) {
      for (std::size_t j = 0; j < unit.size(); ++j) {
        if (i != j) o[rank(unit[i]) * V + rank(unit[j])] += w;
      }
    }
    n_values += unit.size();
  }
  std::vector<double> marg(V, 0.0);
  for (std::size_t c = 0; c < V; ++c) {
    for (std::size_t k = 0; k < V; ++k) marg[c] += o[c * V + k];
  }
  const double n = static_cast<double>(n_values);

  std::vector<double> cumulative(V + 1, 0.0);
  for (std::size_t g = 0; g < V; ++g) cumulative[g + 1] = cumulative[g] + marg[g];
  auto delta = [&](std::size_t c, std::size_t k) -> double {
    switch (m.scale) {
      case Scale::kNominal: return c == k ? 0.0 : 1.0;
      case Scale::kInterval: {
        const double d = levels[c] - levels[k];
        return d * d;
      }
      case Scale::kOrdinal: {
        const std::size_t lo = std::min(c, k), hi = std::max(c, k);
        const double s = cumulative[hi + 1] - cumulative[lo] - (marg[c] + marg[k]) / 2.0;
        return s * s;
      }
    }
    return 0.0;
  };

  double observed = 0.0, expected = 0.0;
  for (std::size_t c = 0; c < V; ++c) {
    for (std::size_t k = 0; k < V; ++k) {
      if (c == k) continue;
      const double d = delta(c, k);
      observed += o[c * V + k] * d;
      expected += marg[c] * marg[k] * d;
    }
  }
  if (expected == 0.0) {
    throw DegenerateDataError("expected disagreement is zero; alpha is undefined");
  }
  AlphaResult r;
  r.alpha = 1.0 - (n - 1.0) * observed / expected;
  r.n_items = units.size();
  r.n_values = n_values;
  r.band = AlphaBand(r.alpha);
  return r;
}

std::string KappaBand(double kappa) {
  if (kappa <= 0.0) return "poor";
  if (kappa <= 0.2) return "slight";
  if (kappa <= 0.4) return "fair";
  if (kappa <= 0.6) return "moderate";
  if (kappa <= 0.8) return "substantial";
  return "almost perfect";
}

KappaResult CohenKappa(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) {
    throw InputError("kappa inputs differ in length (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw InputError("kappa needs at least one paired rating");
  std::map<int, std::pair<long long, long long>> counts;
  long long agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++counts[a[i]].first;
    ++counts[b[i]].second;
    agree += a[i] == b[i];
  }
  const long long N = static_cast<long long>(a.size());
  long long chance = 0;
  for (const auto &[label, c] : counts) chance += c.first * c.second;
  if (chance == N * N) {
    throw UndefinedKappaError("chance agreement is 1; kappa is undefined");
  }
  KappaResult r;
  r.n = a.size();
  r.observed = static_cast<double>(agree) / static_cast<double>(N);
  r.expected = static_cast<double>(chance) / (static_cast<double>(N) * static_cast<double>(N));
  r.kappa = (r.observed - r.expected) / (1.0 - r.expected);
  r.band = KappaBand(r.kappa);
  return r;
}

RatingsTable ParseRatingsCsv(std::string_view text, const std::string &source) {
  const auto rows = ParseCsv(text);
  if (rows.empty()) throw InputError(source + ": empty ratings file");
  const auto &header = rows[0];
  if (header.size() < 3 || header[0] != "annotator" || header[1] != "item" ||
      header[2] != "value") {
    throw InputError(source + ": header must start with annotator,item,value");
  }
  std::optional<std::size_t> occ_col, sec_col;
  for (std::size_t i = 3; i < header.size(); ++i) {
    if (header[i] == "occurrence") occ_col = i;
    if (header[i] == "secondary") sec_col = i;
  }
  RatingsTable table;
  table.has_secondary_column = sec_col.has_value();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto &f = rows[r];
    const std::string where = source + ":" + std::to_string(r + 1);
    if (f.size() != header.size()) {
      throw InputError(where + ": expected " + std::to_string(header.size()) + " fields");
    }
    RatingEntry e;
    e.annotator = f[0];
    e.item = f[1];
    e.value = ParseDouble(f[2], where + " value");
    if (occ_col && !f[*occ_col].empty()) {
      e.occurrence = static_cast<int>(ParseInt(f[*occ_col], where + " occurrence"));
      if (e.occurrence < 1) throw InputError(where + ": occurrence must be >= 1");
    }
    if (sec_col && !f[*sec_col].empty()) {
      e.secondary = static_cast<int>(ParseInt(f[*sec_col], where + " secondary"));
    }
    table.entries.push_back(std::move(e));
  }
  return table;
}

RatingMatrix BuildMatrix(std::span<const RatingEntry> entries, Scale scale,
                         const std::function<std::optional<double>(const RatingEntry &)> &value_of) {
  std::set<std::string> annotators, items;
  for (const auto &e : entries) {
    annotators.insert(e.annotator);
    items.insert(e.item);
  }
  const std::vector<std::string> a_list(annotators.begin(), annotators.end());
  const std::vector<std::string> i_list(items.begin(), items.end());
  auto index = [](const std::vector<std::string> &v, const std::string &key) {
    return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), key) - v.begin());
  };
  RatingMatrix m;
  m.scale = scale;
  m.values.assign(a_list.size(), std::vector<std::optional<double>>(i_list.size()));
  for (const auto &e : entries) {
    if (e.occurrence != 1) continue;
    auto &cell = m.values[index(a_list, e.annotator)][index(i_list, e.item)];
    if (cell) continue;  // first rating wins
    cell = value_of(e);
  }
  return m;
}

std::string KappaBandColor(const std::string &band) {
  if (band == "poor") return "#d73027";
  if (band == "slight") return "#fc8d59";
  if (band == "fair") return "#fee08b";
  if (band == "moderate") return "#d9ef8b";
  if (band == "substantial") return "#91cf60";
  if (band == "almost perfect") return "#1a9850";
  return "#bdbdbd";
}

namespace {

KappaCell MakeCell(const std::vector<int> &a, const std::vector<int> &b) {
  KappaCell cell;
  cell.n = a.size();
  if (a.empty()) {
    cell.flag = "absent";
  } else {
    try {
      const auto k = CohenKappa(a, b);
      cell.kappa = k.kappa;
      cell.band = k.band;
    } catch (const UndefinedKappaError &) {
      cell.flag = UndefinedKappaError::kFlag;
    }
  }
  cell.color = KappaBandColor(cell.band);
  return cell;
}

}  // namespace

KappaGrid PairwiseKappaGrid(std::span<const RatingEntry> entries,
                            const std::function<std::optional<int>(const RatingEntry &)> &label_of) {
  // annotator -> item -> occurrence -> label (first entry per occurrence wins)
  std::map<std::string, std::map<std::string, std::map<int, std::optional<int>>>> by;
  for (const auto &e : entries) {
    auto &slot = by[e.annotator][e.item];
    if (!slot.count(e.occurrence)) slot[e.occurrence] = label_of(e);
  }
  KappaGrid grid;
  for (const auto &[name, items] : by) grid.annotators.push_back(name);
  const std::size_t A = grid.annotators.size();
  grid.cells.assign(A, std::vector<KappaCell>(A));
  for (std::size_t i = 0; i < A; ++i) {
    const auto &ri = by[grid.annotators[i]];
    for (std::size_t j = 0; j < A; ++j) {
      std::vector<int> a, b;
      if (i == j) {
        for (const auto &[item, occ] : ri) {
          auto first = occ.find(1), second = occ.find(2);
          if (first == occ.end() || second == occ.end()) continue;
          if (!first->second || !second->second) continue;
          a.push_back(*first->second);
          b.push_back(*second->second);
        }
      } else {
        const auto &rj = by[grid.annotators[j]];
        for (const auto &[item, occ] : ri) {
          auto other = rj.find(item);
          if (other == rj.end()) continue;
          auto x = occ.find(1), y = other->second.find(1);
          if (x == occ.end() || y == other->second.end()) continue;
          if (!x->second || !y->second) continue;
          a.push_back(*x->second);
          b.push_back(*y->second);
        }
      }
      grid.cells[i][j] = MakeCell(a, b);
    }
  }
  return grid;
}

}  // namespace uti
