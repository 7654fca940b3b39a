// core/src/evaluation.cpp

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

#include "uti/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include <json.hpp>

#include "uti/agreement.hpp"
#include "uti/error.hpp"
#include "uti/nnet/train.hpp"
#include "uti/text_io.hpp"

namespace uti {
namespace {

using nlohmann::ordered_json;

ordered_json Opt(const std::optional<double> &v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::string OptText(const std::optional<double> &v, int precision = 4) {
  return v ? FormatReal(*v, precision) : "n/a";
}

std::string Pad(const std::string &s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string PadRight(const std::string &s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

ordered_json DetectionToJson(const DetectionReport &r) {
  ordered_json j;
  j["n"] = r.n;
  j["precision"] = Opt(r.precision);
  j["recall"] = Opt(r.recall);
  j["f1"] = Opt(r.f1);
  j["accuracy"] = r.accuracy;
  j["confusion"] = {{"tp", r.tp}, {"fp", r.fp}, {"fn", r.fn}, {"tn", r.tn}};
  j["flags"] = r.flags;
  return j;
}

}  // namespace

ClassificationReport MakeClassificationReport(std::span<const ArticulationClass> truth,
                                              std::span<const ArticulationClass> predicted) {
  if (truth.size() != predicted.size()) throw InputError("truth and prediction counts differ");
  if (truth.empty()) throw InputError("classification report over an empty sample set");
  ClassificationReport r;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto t = ClassIndex(truth[i]);
    const auto p = ClassIndex(predicted[i]);
    ++r.counts[t];
    ++r.confusion[t][p];
    if (t == p) ++r.correct[t];
  }
  r.total = truth.size();
  double weighted = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (r.counts[c] == 0) continue;
    const double acc = static_cast<double>(r.correct[c]) / static_cast<double>(r.counts[c]);
    r.per_class_accuracy[c] = acc;
    weighted += acc * static_cast<double>(r.counts[c]);
  }
  r.global_accuracy = weighted / static_cast<double>(r.total);
  return r;
}

ClassificationReport ClassifyReport(const nnet::ModelState &model,
                                    const std::vector<Sample> &samples) {
  if (samples.empty()) throw InputError("classification report over an empty sample set");
  const auto post = nnet::InferAll(model, samples);
  std::vector<ArticulationClass> truth, predicted;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    truth.push_back(samples[i].label);
    predicted.push_back(nnet::Predict(post[i]));
  }
  return MakeClassificationReport(truth, predicted);
}

std::string ClassificationJson(const ClassificationReport &r) {
  ordered_json j;
  ordered_json per = ordered_json::object();
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    per[std::string(ClassName(ClassFromIndex(c)))] = {{"count", r.counts[c]},
                                                      {"correct", r.correct[c]},
                                                      {"accuracy", Opt(r.per_class_accuracy[c])}};
  }
  j["per_class"] = per;
  j["total"] = r.total;
  j["global_accuracy"] = r.global_accuracy;
  ordered_json conf = ordered_json::array();
  for (const auto &row : r.confusion) conf.push_back(row);
  j["confusion"] = conf;
  j["confusion_order"] = ordered_json::array();
  for (auto c : kAllClasses) j["confusion_order"].push_back(std::string(ClassName(c)));
  return j.dump(2) + "\n";
}

std::string ClassificationText(const ClassificationReport &r) {
  std::string out = PadRight("class", 16) + Pad("n", 8) + Pad("accuracy", 10) + "\n";
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    out += PadRight(std::string(ClassName(ClassFromIndex(c))), 16) +
           Pad(std::to_string(r.counts[c]), 8) + Pad(OptText(r.per_class_accuracy[c]), 10) + "\n";
  }
  out += PadRight("global", 16) + Pad(std::to_string(r.total), 8) +
         Pad(FormatReal(r.global_accuracy, 4), 10) + "\n";
  return out;
}

DetectionReport MakeDetectionReport(std::span<const int> b_model, std::span<const int> b_expert) {
  if (b_model.size() != b_expert.size()) throw InputError("model and expert label counts differ");
  if (b_model.empty()) throw InputError("detection report over an empty record set");
  DetectionReport r;
  r.n = b_model.size();
  for (std::size_t i = 0; i < r.n; ++i) {
    const int m = b_model[i], e = b_expert[i];
    if ((m != 0 && m != 1) || (e != 0 && e != 1)) throw InputError("binary labels must be 0 or 1");
    if (m && e) ++r.tp;
    else if (m && !e) ++r.fp;
    else if (!m && e) ++r.fn;
    else ++r.tn;
  }
  if (r.tp + r.fp > 0) {
    r.precision = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
  } else {
    r.flags.push_back("precision-undefined");
  }
  if (r.tp + r.fn > 0) {
    r.recall = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  } else {
    r.flags.push_back("recall-undefined");
  }
  if (r.precision && r.recall) {
    const double s = *r.precision + *r.recall;
    r.f1 = s > 0.0 ? 2.0 * *r.precision * *r.recall / s : 0.0;
  } else {
    r.flags.push_back("f1-undefined");
  }
  r.accuracy = static_cast<double>(r.tp + r.tn) / static_cast<double>(r.n);
  return r;
}

DetectionReport MakeDetectionReport(std::span<const ScoreRecord> records) {
  std::vector<int> m, e;
  for (const auto &r : records) {
    if (!r.b_expert) {
      throw InputError("record " + r.utterance_id + ":" + std::to_string(r.phone_index) +
                       " has no expert label");
    }
    m.push_back(r.b_model);
    e.push_back(*r.b_expert);
  }
  return MakeDetectionReport(m, e);
}

std::vector<SpeakerRow> PerSpeakerReport(std::span<const ScoreRecord> records) {
  std::map<std::string, std::vector<ScoreRecord>> groups;
  for (const auto &r : records) groups[r.speaker].push_back(r);
  std::vector<SpeakerRow> rows;
  for (const auto &[speaker, recs] : groups) {
    SpeakerRow row;
    row.speaker = speaker;
    row.detection = MakeDetectionReport(recs);
    std::vector<int> m, e;
    for (const auto &r : recs) {
      m.push_back(r.b_model);
      e.push_back(*r.b_expert);
    }
    try {
      const auto k = CohenKappa(m, e);
      row.kappa = k.kappa;
      row.kappa_band = k.band;
    } catch (const UndefinedKappaError &) {
      row.kappa_flag = UndefinedKappaError::kFlag;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SweepPoint> ThresholdSweep(std::span<const ScoreRecord> records,
                                       std::span<const double> grid) {
  if (grid.empty()) throw InputError("threshold grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end())) throw InputError("threshold grid is not ascending");
  std::vector<SweepPoint> out;
  std::vector<int> m(records.size()), e(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].b_expert) throw InputError("sweep record without expert label");
    e[i] = *records[i].b_expert;
  }
  for (double k : grid) {
    for (std::size_t i = 0; i < records.size(); ++i) m[i] = Binarize(records[i].s_m, k);
    out.push_back({k, MakeDetectionReport(m, e)});
  }
  return out;
}

std::vector<double> MakeGrid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw InputError("grid needs lo <= hi and a positive step");
  std::vector<double> g;
  const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
  for (long long i = 0; i <= n; ++i) g.push_back(lo + static_cast<double>(i) * step);
  return g;
}

std::string DetectionJson(const DetectionReport &r) { return DetectionToJson(r).dump(2) + "\n"; }

std::string DetectionText(const DetectionReport &r) {
  std::string out = Pad("n", 6) + Pad("precision", 11) + Pad("recall", 9) + Pad("f1", 9) +
                    Pad("accuracy", 10) + "\n";
  out += Pad(std::to_string(r.n), 6) + Pad(OptText(r.precision), 11) + Pad(OptText(r.recall), 9) +
         Pad(OptText(r.f1), 9) + Pad(FormatReal(r.accuracy, 4), 10) + "\n";
  out += "confusion (rows expert, cols model; 1 = error)\n";
  out += "        model=0  model=1\n";
  out += "expert=0" + Pad(std::to_string(r.tn), 9) + Pad(std::to_string(r.fp), 9) + "\n";
  out += "expert=1" + Pad(std::to_string(r.fn), 9) + Pad(std::to_string(r.tp), 9) + "\n";
  return out;
}

std::string SpeakerJson(std::span<const SpeakerRow> rows) {
  ordered_json arr = ordered_json::array();
  for (const auto &row : rows) {
    ordered_json j;
    j["speaker"] = row.speaker;
    j["detection"] = DetectionToJson(row.detection);
    j["kappa"] = Opt(row.kappa);
    j["kappa_band"] = row.kappa_band;
    j["kappa_flag"] = row.kappa_flag;
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

std::string SpeakerText(std::span<const SpeakerRow> rows) {
  std::string out = PadRight("speaker", 12) + Pad("N", 6) + Pad("precision", 11) + Pad("recall", 9) +
                    Pad("f1", 9) + Pad("accuracy", 10) + Pad("kappa", 9) + "  confusion tn/fp/fn/tp\n";
  for (const auto &row : rows) {
    const auto &d = row.detection;
    const std::string kappa = row.kappa ? FormatReal(*row.kappa, 4) : row.kappa_flag;
    out += PadRight(row.speaker, 12) + Pad(std::to_string(d.n), 6) + Pad(OptText(d.precision), 11) +
           Pad(OptText(d.recall), 9) + Pad(OptText(d.f1), 9) + Pad(FormatReal(d.accuracy, 4), 10) +
           Pad(kappa, 9) + "  " + std::to_string(d.tn) + "/" + std::to_string(d.fp) + "/" +
           std::to_string(d.fn) + "/" + std::to_string(d.tp) + "\n";
  }
  return out;
}

std::string SweepCsv(std::span<const SweepPoint> sweep) {
  std::string out = "k,precision,recall,f1,accuracy\n";
  auto opt = [](const std::optional<double> &v) { return v ? FormatReal(*v, 6) : std::string(); };
  for (const auto &p : sweep) {
    out += FormatReal(p.k, 6) + "," + opt(p.report.precision) + "," + opt(p.report.recall) + "," +
           opt(p.report.f1) + "," + FormatReal(p.report.accuracy, 6) + "\n";
  }
  return out;
}

}  // namespace uti
