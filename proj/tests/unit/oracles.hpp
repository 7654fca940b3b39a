// tests/unit/oracles.hpp

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

#ifndef UTI_TESTS_ORACLES_HPP_
#define UTI_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "uti/agreement.hpp"
#include "uti/nnet/model.hpp"
#include "uti/rng.hpp"

namespace uti::oracle {

using Matrix = std::vector<std::vector<std::optional<double>>>;

// Definitional pairwise alpha: every ordered pair of values within an item
// for D_o (weighted 1/(m_u - 1)), every ordered pair of pairable values
// overall for D_e.
inline double BruteAlpha(const Matrix &m, Scale scale) {
  std::vector<std::vector<double>> units;
  for (std::size_t u = 0; u < m[0].size(); ++u) {
    std::vector<double> vals;
    for (const auto &row : m) {
      if (row[u]) vals.push_back(*row[u]);
    }
    if (vals.size() >= 2) units.push_back(vals);
  }
  std::vector<double> all;
  for (const auto &u : units) all.insert(all.end(), u.begin(), u.end());
  const double n = static_cast<double>(all.size());
  std::map<double, double> counts;
  for (double v : all) counts[v] += 1.0;

  auto delta = [&](double a, double b) -> double {
    switch (scale) {
      case Scale::kNominal:
        return a == b ? 0.0 : 1.0;
      case Scale::kInterval:
        return (a - b) * (a - b);
      case Scale::kOrdinal: {
        const double lo = std::min(a, b), hi = std::max(a, b);
        double sum = 0.0;
        for (const auto &[v, c] : counts) {
          if (v >= lo && v <= hi) sum += c;
        }
        sum -= (counts[lo] + counts[hi]) / 2.0;
        return sum * sum;
      }
    }
    return 0.0;
  };

  double d_o = 0.0;
  for (const auto &u : units) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      for (std::size_t j = 0; j < u.size(); ++j) {
        if (i != j) s += delta(u[i], u[j]);
      }
    }
    d_o += s / (static_cast<double>(u.size()) - 1.0);
  }
  d_o /= n;
  double d_e = 0.0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = 0; j < all.size(); ++j) {
      if (i != j) d_e += delta(all[i], all[j]);
    }
  }
  d_e /= n * (n - 1.0);
  return 1.0 - d_o / d_e;
}

inline Matrix RandomMatrix(Rng &rng, std::size_t annotators, std::size_t items, int levels,
                    double missing) {
  Matrix m(annotators, std::vector<std::optional<double>>(items));
  for (std::size_t u = 0; u < items; ++u) {
    const int truth = 1 + static_cast<int>(rng.Below(levels));
    for (std::size_t a = 0; a < annotators; ++a) {
      if (rng.Bernoulli(missing)) continue;
      const int v = rng.Bernoulli(0.6) ? truth : 1 + static_cast<int>(rng.Below(levels));
      m[a][u] = v;
    }
  }
  return m;
}

inline double BruteKappa(const std::vector<int> &a, const std::vector<int> &b) {
  const double n = static_cast<double>(a.size());
  double agree = 0.0;
  std::set<int> cats(a.begin(), a.end());
  cats.insert(b.begin(), b.end());
  for (std::size_t i = 0; i < a.size(); ++i) agree += a[i] == b[i];
  double pe = 0.0;
  for (int c : cats) {
    pe += (std::count(a.begin(), a.end(), c) / n) * (std::count(b.begin(), b.end(), c) / n);
  }
  const double po = agree / n;
  return (po - pe) / (1.0 - pe);
}

inline std::vector<Sample> RandomBatch(const nnet::ArchitectureConfig &a, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Sample> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(test::RandomSample(a, ClassFromIndex(static_cast<std::size_t>(i) % kNumClasses), rng));
  }
  return out;
}

// Central differences on a double-precision copy of a tiny network.
// Coordinates whose perturbation flips a ReLU or a pooling choice are
// skipped; the loss is not differentiable across those kinks.
struct FdReport {
  int checked = 0;
  double worst = 0.0;
  std::vector<std::string> failures;   // coordinates with relative error >= 1e-4
  std::vector<std::string> uncovered;  // tensors with no checkable coordinate
};

inline FdReport FiniteDifferenceCheck(int batch_size, double eps, int per_tensor) {
  using namespace uti::nnet;
  const auto arch = test::TinyArchitecture();
  auto model = ModelState::Initialize(arch, 21).Cast<double>();
  // Non-trivial batch-norm affine and biases so their gradients are exercised.
  Rng rng(22);
  for (auto &v : model.param(kBnGamma).data) v = rng.Uniform(0.5, 1.5);
  for (auto &v : model.param(kBnBeta).data) v = rng.Uniform(-0.2, 0.2);
  for (ParamIndex i : {kConv1Bias, kConv2Bias, kAudioBias, kFc1Bias, kFc2Bias, kOutBias}) {
    for (auto &v : model.param(i).data) v = rng.Uniform(-0.1, 0.1);
  }
  const auto batch = RandomBatch(arch, batch_size, 23);
  const auto ptrs = Pointers(batch);
  const double l2 = 0.1;
  const auto base = ComputeLossAndGradients(model, Batch(ptrs), l2, true);

  FdReport report;
  for (std::size_t t = 0; t < kNumParams; ++t) {
    auto &data = model.params()[t].data;
    int done = 0;
    for (int attempt = 0; attempt < 400 && done < per_tensor; ++attempt) {
      const std::size_t j = rng.Below(data.size());
      const double saved = data[j];
      data[j] = saved + eps;
      const auto plus = ComputeLossAndGradients(model, Batch(ptrs), l2, true);
      data[j] = saved - eps;
      const auto minus = ComputeLossAndGradients(model, Batch(ptrs), l2, true);
      data[j] = saved;
      if (plus.activation_signature != base.activation_signature ||
          minus.activation_signature != base.activation_signature) {
        continue;
      }
      const double numeric = (plus.loss - minus.loss) / (2 * eps);
      const double analytic = base.gradients[t][j];
      const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
      const double rel = std::abs(numeric - analytic) / scale;
      if (!(rel < 1e-4)) {
        report.failures.push_back(model.params()[t].name + "[" + std::to_string(j) + "] analytic " +
                                  std::to_string(analytic) + " numeric " + std::to_string(numeric));
      }
      report.worst = std::max(report.worst, rel);
      ++done;
    }
    if (done == 0) report.uncovered.push_back(model.params()[t].name);
    report.checked += done;
  }
  return report;
}

}  // namespace uti::oracle

#endif  // UTI_TESTS_ORACLES_HPP_
