// core/src/annotation/session.cpp

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

#include "uti/annotation/session.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>
#include <tuple>

#include <json.hpp>

#include "uti/digest.hpp"
#include "uti/error.hpp"
#include "uti/rng.hpp"
#include "uti/text_io.hpp"

namespace uti::annotation {
namespace {

using nlohmann::json;

json ItemToJson(const ManifestItem &m) {
  return {{"item_id", m.item_id},
          {"utterance_id", m.utterance_id},
          {"phone_index", m.phone_index},
          {"target", m.target},
          {"substitution", m.substitution}};
}

ManifestItem ItemFromJson(const json &j) {
  ManifestItem m;
  m.item_id = j.at("item_id").get<std::string>();
  m.utterance_id = j.at("utterance_id").get<std::string>();
  m.phone_index = j.at("phone_index").get<int>();
  m.target = j.value("target", "");
  m.substitution = j.value("substitution", "");
  return m;
}

std::string UtcNow() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::vector<SessionItem> BuildSessionItems(const std::vector<ManifestItem> &manifest,
                                           std::uint64_t seed, double duplicate_fraction) {
  Rng rng(seed);
  std::vector<SessionItem> items;
  for (const auto &m : manifest) items.push_back({m, 1});
  rng.Shuffle(items);
  const auto n_dup = static_cast<std::size_t>(
      std::lround(duplicate_fraction * static_cast<double>(manifest.size())));
  // Choose which items repeat, then insert each repeat after its original.
  std::vector<std::size_t> picks(items.size());
  for (std::size_t i = 0; i < picks.size(); ++i) picks[i] = i;
  rng.Shuffle(picks);
  picks.resize(std::min(n_dup, picks.size()));
  std::vector<std::string> chosen;
  for (std::size_t p : picks) chosen.push_back(items[p].item.item_id);
  for (const auto &id : chosen) {
    const auto it = std::find_if(items.begin(), items.end(),
                                 [&](const SessionItem &s) { return s.item.item_id == id; });
    const auto orig = static_cast<std::size_t>(it - items.begin());
    SessionItem dup{it->item, 2};
    const std::size_t slots = items.size() - orig;  // positions orig+1 .. size
    const std::size_t at = orig + 1 + rng.Below(slots);
    items.insert(items.begin() + static_cast<std::ptrdiff_t>(at), std::move(dup));
  }
  return items;
}

std::uint64_t ManifestDigest(const std::vector<ManifestItem> &manifest) {
  json arr = json::array();
  for (const auto &m : manifest) arr.push_back(ItemToJson(m));
  return Digest64(arr.dump());
}

std::string MakeSessionId(const std::string &annotator, std::uint64_t seed) {
  return HexDigest(Digest64(annotator + "\n" + std::to_string(seed)));
}

AnnotationStore::AnnotationStore(std::filesystem::path data_dir, int playback_cap, Clock clock)
    : playback_cap_(playback_cap), clock_(clock ? std::move(clock) : Clock(UtcNow)) {
  if (playback_cap_ < 1) throw InputError("playback cap must be >= 1");
  std::filesystem::create_directories(data_dir);
  log_path_ = data_dir / "records.jsonl";
  Replay();
}

void AnnotationStore::Replay() {
  if (!std::filesystem::exists(log_path_)) return;
  std::string text = ReadTextFile(log_path_);
  if (!text.empty() && text.back() != '\n') {
    // A torn final line from an interrupted append is dropped so the next
    // append starts on a fresh line.
    const auto keep = text.rfind('\n');
    text.resize(keep == std::string::npos ? 0 : keep + 1);
    std::filesystem::resize_file(log_path_, text.size());
  }
  const auto lines = SplitLines(text);
  std::size_t i = 0;
  try {
  for (; i < lines.size(); ++i) {
    if (Trim(lines[i]).empty()) continue;
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::exception &) {
      throw IngestionError(log_path_.string() + ":" + std::to_string(i + 1) + ": corrupt record");
    }
    const std::string type = j.at("type").get<std::string>();
    if (type == "session") {
      Session s;
      s.id = j.at("session_id").get<std::string>();
      s.annotator = j.at("annotator").get<std::string>();
      s.seed = j.at("seed").get<std::uint64_t>();
      s.manifest_digest = std::stoull(j.at("manifest_digest").get<std::string>(), nullptr, 16);
      for (const auto &e : j.at("items")) {
        s.items.push_back({ItemFromJson(e), e.at("occurrence").get<int>()});
      }
      s.audio_fetches.assign(s.items.size(), 0);
      sessions_[s.id] = std::move(s);
    } else if (type == "rating") {
      StoredRating r;
      r.session_id = j.at("session_id").get<std::string>();
      r.annotator = j.at("annotator").get<std::string>();
      r.item_id = j.at("item_id").get<std::string>();
      r.occurrence = j.at("occurrence").get<int>();
      r.primary = j.at("primary").get<int>();
      if (!j.at("secondary").is_null()) r.secondary = j.at("secondary").get<int>();
      r.comment = j.at("comment").get<std::string>();
      r.playbacks = j.at("playbacks").get<int>();
      r.timestamp = j.at("timestamp").get<std::string>();
      auto it = sessions_.find(r.session_id);
      if (it == sessions_.end()) throw IngestionError("rating for unknown session " + r.session_id);
      ApplyRating(it->second, r);
    } else if (type == "fetch") {
      auto it = sessions_.find(j.at("session_id").get<std::string>());
      const auto pos = j.at("position").get<std::size_t>();
      if (it != sessions_.end() && pos >= 1 && pos <= it->second.items.size()) {
        ++it->second.audio_fetches[pos - 1];
      }
    }
  }
} catch (const json::exception &e) {
    throw IngestionError(log_path_.string() + ":" + std::to_string(i + 1) + ": " + e.what());
  }
}

void AnnotationStore::Append(const std::string &line) {
  std::ofstream out(log_path_, std::ios::app | std::ios::binary);
  out << line << '\n';
  out.flush();
  if (!out) throw InputError("cannot append to " + log_path_.string());
}

void AnnotationStore::ApplyRating(Session &s, const StoredRating &r) {
  ++s.cursor;
  ratings_.push_back(r);
}

AnnotationStore::Created AnnotationStore::CreateSession(const std::string &annotator,
                                                        const std::vector<ManifestItem> &manifest,
                                                        std::uint64_t seed) {
  if (annotator.empty()) throw InputError("annotator id is empty");
  if (manifest.empty()) throw InputError("manifest is empty");
  std::set<std::string> ids;
  for (const auto &m : manifest) {
    if (m.item_id.empty()) throw InputError("manifest item without an id");
    if (!ids.insert(m.item_id).second) throw InputError("manifest repeats item " + m.item_id);
  }
  const std::string id = MakeSessionId(annotator, seed);
  const std::uint64_t digest = ManifestDigest(manifest);
  std::lock_guard lock(mu_);
  if (auto it = sessions_.find(id); it != sessions_.end()) {
    if (it->second.manifest_digest != digest) {
      throw ConflictError("session " + id + " already exists with a different manifest");
    }
    return {id, false};
  }
  Session s;
  s.id = id;
  s.annotator = annotator;
  s.seed = seed;
  s.manifest_digest = digest;
  s.items = BuildSessionItems(manifest, seed);
  s.audio_fetches.assign(s.items.size(), 0);
  json items = json::array();
  for (const auto &it : s.items) {
    json e = ItemToJson(it.item);
    e["occurrence"] = it.occurrence;
    items.push_back(e);
  }
  json ev = {{"type", "session"},        {"session_id", id},
             {"annotator", annotator},   {"seed", seed},
             {"manifest_digest", HexDigest(digest)}, {"items", items}};
  Append(ev.dump());
  sessions_[id] = std::move(s);
  return {id, true};
}

Session AnnotationStore::GetSession(const std::string &session_id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw NotFoundError("unknown session " + session_id);
  return it->second;
}

std::optional<SessionItem> AnnotationStore::Next(const std::string &session_id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw NotFoundError("unknown session " + session_id);
  const Session &s = it->second;
  if (s.complete()) return std::nullopt;
  return s.items[s.cursor];
}

SubmitResult AnnotationStore::Submit(const std::string &session_id, const RatingSubmission &r) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw NotFoundError("unknown session " + session_id);
  Session &s = it->second;
  for (std::size_t p = 0; p < s.cursor; ++p) {
    if (s.items[p].item.item_id == r.item_id && s.items[p].occurrence == r.occurrence) {
      return {false, "already rated"};
    }
  }
  if (s.complete()) return {false, "session complete"};
  const SessionItem &cur = s.items[s.cursor];
  if (cur.item.item_id != r.item_id || cur.occurrence != r.occurrence) {
    return {false, "out of order"};
  }
  if (r.primary < 1 || r.primary > 5 || (r.secondary && (*r.secondary < 1 || *r.secondary > 5))) {
    return {false, "invalid score"};
  }
  if (r.primary <= 3 && !r.secondary) return {false, "secondary required"};
  if (r.primary >= 4 && r.secondary) return {false, "secondary forbidden"};
  if (r.playbacks < 0) return {false, "invalid playbacks"};
  if (r.playbacks > playback_cap_) return {false, "playback limit"};

  StoredRating stored{session_id, s.annotator, r.item_id, r.occurrence, r.primary, r.secondary,
                      r.comment,  r.playbacks, clock_()};
  json ev = {{"type", "rating"},
             {"session_id", stored.session_id},
             {"annotator", stored.annotator},
             {"item_id", stored.item_id},
             {"occurrence", stored.occurrence},
             {"primary", stored.primary},
             {"secondary", stored.secondary ? json(*stored.secondary) : json(nullptr)},
             {"comment", stored.comment},
             {"playbacks", stored.playbacks},
             {"timestamp", stored.timestamp}};
  Append(ev.dump());
  ApplyRating(s, stored);
  return {true, ""};
}

bool AnnotationStore::RegisterAudioFetch(const std::string &session_id, std::size_t position) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw NotFoundError("unknown session " + session_id);
  Session &s = it->second;
  if (position < 1 || position > s.items.size()) {
    throw NotFoundError("session " + session_id + " has no item " + std::to_string(position));
  }
  if (s.audio_fetches[position - 1] >= playback_cap_) return false;
  Append(json{{"type", "fetch"}, {"session_id", session_id}, {"position", position}}.dump());
  ++s.audio_fetches[position - 1];
  return true;
}

std::vector<StoredRating> AnnotationStore::Ratings() const {
  std::lock_guard lock(mu_);
  return ratings_;
}

std::string AnnotationStore::ExportCsv(const std::optional<std::string> &annotator,
                                       const std::optional<std::string> &session) const {
  std::vector<StoredRating> rows;
  {
    std::lock_guard lock(mu_);
    for (const auto &r : ratings_) {
      if (annotator && r.annotator != *annotator) continue;
      if (session && r.session_id != *session) continue;
      rows.push_back(r);
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const StoredRating &a, const StoredRating &b) {
    return std::tie(a.annotator, a.session_id, a.item_id, a.occurrence) <
           std::tie(b.annotator, b.session_id, b.item_id, b.occurrence);
  });
  std::string out = std::string(kExportHeader) + "\n";
  for (const auto &r : rows) {
    out += CsvRow({r.annotator, r.item_id, std::to_string(r.primary), std::to_string(r.occurrence),
                   r.secondary ? std::to_string(*r.secondary) : "", r.session_id,
                   std::to_string(r.playbacks), r.timestamp, r.comment});
  }
  return out;
}

}  // namespace uti::annotation
