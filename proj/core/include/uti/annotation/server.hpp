// core/include/uti/annotation/server.hpp

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

#ifndef UTI_ANNOTATION_SERVER_HPP_
#define UTI_ANNOTATION_SERVER_HPP_

#include <filesystem>
#include <memory>
#include <string>

#include "uti/annotation/session.hpp"
#include "uti/corpus.hpp"

namespace uti::annotation {

/// key=value file: `host`, `port`, `data_dir`, `playback_cap`, `corpus`,
/// `class_map` (defaults to <corpus>/classmap.tsv).
struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "annotation-data";
  int playback_cap = kDefaultPlaybackCap;
  std::filesystem::path corpus;
  std::filesystem::path class_map;

  static ServiceConfig Parse(const std::string &text, const std::string &source);
  static ServiceConfig Load(const std::filesystem::path &path);
};

/// HTTP/JSON front end:
///   POST /sessions                          create (idempotent) a session
///   GET  /sessions/{id}/next                current item or completion
///   POST /sessions/{id}/ratings             submit the current item's rating
///   GET  /sessions/{id}/media/{pos}/{asset} audio.wav, spectrogram.png,
///                                           meta.json, frame-<k>.png
///   GET  /export/ratings.csv                ratings, optional filters
/// POST requests carry the annotator in the X-Annotator-Id header.
class AnnotationServer {
 public:
  AnnotationServer(std::shared_ptr<AnnotationStore> store, std::shared_ptr<const Corpus> corpus);
  ~AnnotationServer();
  AnnotationServer(const AnnotationServer &) = delete;
  AnnotationServer &operator=(const AnnotationServer &) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port.
  int Bind(const std::string &host, int port);
  /// Serves until Stop(); blocks.
  void Serve();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace uti::annotation

#endif  // UTI_ANNOTATION_SERVER_HPP_
