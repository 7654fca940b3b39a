// tools/serve.cpp

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

#include <csignal>
#include <iostream>
#include <memory>
#include <thread>

#include <pthread.h>

#include "commands.hpp"
#include "run_dir.hpp"
#include "uti/annotation/server.hpp"
#include "uti/annotation/session.hpp"
#include "uti/corpus.hpp"

namespace uti::cli {

int RunServe(const ServeOptions &o) {
  annotation::ServiceConfig cfg;
  if (!o.config.empty()) {
    if (!std::filesystem::exists(o.config)) throw UsageError("--config: " + o.config + " does not exist");
    cfg = annotation::ServiceConfig::Load(o.config);
  }
  if (o.host) cfg.host = *o.host;
  if (o.port) cfg.port = *o.port;
  if (o.data_dir) cfg.data_dir = *o.data_dir;
  if (o.playback_cap) cfg.playback_cap = *o.playback_cap;
  if (o.corpus) {
    cfg.corpus = *o.corpus;
    if (!o.config.empty()) cfg.class_map.clear();
  }
  if (cfg.corpus.empty()) throw UsageError("--corpus (or corpus= in --config) is required");
  if (!std::filesystem::exists(cfg.corpus)) {
    throw UsageError("corpus " + cfg.corpus.string() + " does not exist");
  }
  if (cfg.class_map.empty()) cfg.class_map = cfg.corpus / "classmap.tsv";

  // Signals are taken synchronously by a dedicated thread; block them before
  // the server starts its workers so they inherit the mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto corpus = std::make_shared<const Corpus>(LoadCorpus(cfg.corpus, ClassMap::Load(cfg.class_map)));
  auto store = std::make_shared<annotation::AnnotationStore>(cfg.data_dir, cfg.playback_cap);
  annotation::AnnotationServer server(store, corpus);
  const int port = server.Bind(cfg.host, cfg.port);
  std::cout << "listening on " << cfg.host << ":" << port << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.Stop();
  });
  server.Serve();
  // Serve only returns after Stop, which only the waiter calls.
  waiter.join();
  std::cout << "stopped" << std::endl;
  return 0;
}

}  // namespace uti::cli
