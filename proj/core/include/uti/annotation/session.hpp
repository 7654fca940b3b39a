// core/include/uti/annotation/session.hpp

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

#ifndef UTI_ANNOTATION_SESSION_HPP_
#define UTI_ANNOTATION_SESSION_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace uti::annotation {

inline constexpr double kDuplicateFraction = 0.2;
inline constexpr int kDefaultPlaybackCap = 6;

struct ManifestItem {
  std::string item_id;
  std::string utterance_id;
  int phone_index = 0;
  std::string target;        // prompt: the phone the child was asked to say
  std::string substitution;  // prompt: the expected substitution
  bool operator==(const ManifestItem &) const = default;
};

struct SessionItem {
  ManifestItem item;
  int occurrence = 1;  // 2 for injected duplicates
  bool operator==(const SessionItem &) const = default;
};

/// Seeded shuffle of the manifest followed by round(0.2 * N) duplicates of
/// distinct items, each inserted at a random position after its original.
std::vector<SessionItem> BuildSessionItems(const std::vector<ManifestItem> &manifest,
                                           std::uint64_t seed,
                                           double duplicate_fraction = kDuplicateFraction);

std::uint64_t ManifestDigest(const std::vector<ManifestItem> &manifest);
std::string MakeSessionId(const std::string &annotator, std::uint64_t seed);

struct Session {
  std::string id;
  std::string annotator;
  std::uint64_t seed = 0;
  std::uint64_t manifest_digest = 0;
  std::vector<SessionItem> items;
  std::size_t cursor = 0;  // number of accepted ratings
  std::vector<int> audio_fetches;  // per position

  bool complete() const { return cursor >= items.size(); }
};

struct RatingSubmission {
  std::string item_id;
  int occurrence = 1;
  int primary = 0;
  std::optional<int> secondary;
  std::string comment;
  int playbacks = 0;
};

struct StoredRating {
  std::string session_id;
  std::string annotator;
  std::string item_id;
  int occurrence = 1;
  int primary = 0;
  std::optional<int> secondary;
  std::string comment;
  int playbacks = 0;
  std::string timestamp;
};

struct SubmitResult {
  bool accepted = false;
  std::string reason;  // set when rejected
};

/// Ratings CSV header shared with the agreement module.
inline constexpr const char *kExportHeader =
    "annotator,item,value,occurrence,secondary,session,playbacks,timestamp,comment";

/// Sessions and ratings backed by an append-only JSON-lines log
/// (`records.jsonl` in the data directory) that is replayed on open.
/// All public methods are thread-safe.
class AnnotationStore {
 public:
  using Clock = std::function<std::string()>;

  explicit AnnotationStore(std::filesystem::path data_dir, int playback_cap = kDefaultPlaybackCap,
                           Clock clock = {});

  struct Created {
    std::string session_id;
    bool created = false;  // false when an identical session already existed
  };
  /// Idempotent per (annotator, seed, manifest). Throws InputError for an
  /// empty manifest or repeated item ids, ConflictError when the session id
  /// exists with a different manifest.
  Created CreateSession(const std::string &annotator, const std::vector<ManifestItem> &manifest,
                        std::uint64_t seed);

  /// Copy of the session; throws NotFoundError.
  Session GetSession(const std::string &session_id) const;

  /// Cursor item, or nullopt when the session is complete.
  std::optional<SessionItem> Next(const std::string &session_id) const;

  SubmitResult Submit(const std::string &session_id, const RatingSubmission &rating);

  /// Counts an audio fetch for a 1-based position. Returns false without
  /// counting once the cap is reached. Throws NotFoundError.
  bool RegisterAudioFetch(const std::string &session_id, std::size_t position);

  std::vector<StoredRating> Ratings() const;
  /// Sorted by annotator, session, item, occurrence; filters match exactly.
  std::string ExportCsv(const std::optional<std::string> &annotator = std::nullopt,
                        const std::optional<std::string> &session = std::nullopt) const;

  int playback_cap() const { return playback_cap_; }

 private:
  void Replay();
  void Append(const std::string &line);
  void ApplyRating(Session &s, const StoredRating &r);

  std::filesystem::path log_path_;
  int playback_cap_;
  Clock clock_;
  mutable std::mutex mu_;
  std::map<std::string, Session> sessions_;
  std::vector<StoredRating> ratings_;
};

}  // namespace uti::annotation

#endif  // UTI_ANNOTATION_SESSION_HPP_
