// core/src/annotation/server.cpp

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

#include "uti/annotation/server.hpp"

#include <httplib.h>

#include <map>
#include <regex>

#include <json.hpp>

#include "uti/annotation/media.hpp"
#include "uti/error.hpp"
#include "uti/text_io.hpp"

namespace uti::annotation {
namespace {

using nlohmann::json;

constexpr const char *kAnnotatorHeader = "X-Annotator-Id";

void SendJson(httplib::Response &res, int status, const json &body) {
  res.status = status;
  res.set_content(body.dump() + "\n", "application/json; charset=utf-8");
}

void SendError(httplib::Response &res, int status, const std::string &message) {
  SendJson(res, status, {{"error", message}});
}

int StatusFor(const Error &e) {
  if (dynamic_cast<const NotFoundError *>(&e)) return 404;
  if (dynamic_cast<const ConflictError *>(&e)) return 409;
  if (dynamic_cast<const RenderError *>(&e)) return 422;
  return 400;
}

// Runs a handler, mapping library errors and malformed JSON to responses.
template <class F>
void Guard(httplib::Response &res, F &&f) {
  try {
    f();
  } catch (const Error &e) {
    SendError(res, StatusFor(e), e.what());
  } catch (const json::exception &e) {
    SendError(res, 400, std::string("bad request body: ") + e.what());
  }
}

}  // namespace

ServiceConfig ServiceConfig::Parse(const std::string &text, const std::string &source) {
  ServiceConfig c;
  for (const auto &[key, value] : ParseKeyValue(text, source)) {
    if (key == "host") c.host = value;
    else if (key == "port") c.port = static_cast<int>(ParseInt(value, source + " port"));
    else if (key == "data_dir") c.data_dir = value;
    else if (key == "playback_cap") c.playback_cap = static_cast<int>(ParseInt(value, source + " playback_cap"));
    else if (key == "corpus") c.corpus = value;
    else if (key == "class_map") c.class_map = value;
    else throw InputError(source + ": unknown key '" + key + "'");
  }
  if (c.port < 0 || c.port > 65535) throw InputError(source + ": port out of range");
  if (c.playback_cap < 1) throw InputError(source + ": playback_cap must be >= 1");
  if (c.class_map.empty() && !c.corpus.empty()) c.class_map = c.corpus / "classmap.tsv";
  return c;
}

ServiceConfig ServiceConfig::Load(const std::filesystem::path &path) {
  return Parse(ReadTextFile(path), path.string());
}

struct AnnotationServer::Impl {
  std::shared_ptr<AnnotationStore> store;
  std::shared_ptr<const Corpus> corpus;
  std::map<std::pair<std::string, int>, const PhoneInstance *> instances;
  httplib::Server http;

  const PhoneInstance &Instance(const ManifestItem &m) const {
    auto it = instances.find({m.utterance_id, m.phone_index});
    if (it == instances.end()) {
      throw NotFoundError("no phone " + std::to_string(m.phone_index) + " in utterance " +
                          m.utterance_id);
    }
    return *it->second;
  }

  void Routes();
  void CreateSession(const httplib::Request &req, httplib::Response &res);
  void Next(const httplib::Request &req, httplib::Response &res);
  void Rate(const httplib::Request &req, httplib::Response &res);
  void Media(const httplib::Request &req, httplib::Response &res);
  void Export(const httplib::Request &req, httplib::Response &res);
};

void AnnotationServer::Impl::Routes() {
  http.Post("/sessions", [this](const auto &req, auto &res) {
    Guard(res, [&] { CreateSession(req, res); });
  });
  http.Get(R"(/sessions/([^/]+)/next)", [this](const auto &req, auto &res) {
    Guard(res, [&] { Next(req, res); });
  });
  http.Post(R"(/sessions/([^/]+)/ratings)", [this](const auto &req, auto &res) {
    Guard(res, [&] { Rate(req, res); });
  });
  http.Get(R"(/sessions/([^/]+)/media/([^/]+)/([^/]+))", [this](const auto &req, auto &res) {
    Guard(res, [&] { Media(req, res); });
  });
  http.Get("/export/ratings.csv", [this](const auto &req, auto &res) {
    Guard(res, [&] { Export(req, res); });
  });
}

void AnnotationServer::Impl::CreateSession(const httplib::Request &req, httplib::Response &res) {
  const std::string annotator = req.get_header_value(kAnnotatorHeader);
  if (annotator.empty()) return SendError(res, 400, "missing X-Annotator-Id header");
  const json body = json::parse(req.body);
  const auto seed = body.at("seed").get<std::uint64_t>();
  std::vector<ManifestItem> manifest;
  for (const auto &e : body.at("items")) {
    ManifestItem m;
    m.item_id = e.at("item_id").get<std::string>();
    m.utterance_id = e.at("utterance_id").get<std::string>();
    m.phone_index = e.at("phone_index").get<int>();
    m.target = e.value("target", "");
    m.substitution = e.value("substitution", "");
    if (corpus) Instance(m);  // every item must resolve to a phone
    manifest.push_back(std::move(m));
  }
  const auto created = store->CreateSession(annotator, manifest, seed);
  const auto session = store->GetSession(created.session_id);
  SendJson(res, created.created ? 201 : 200,
           {{"session_id", created.session_id},
            {"created", created.created},
            {"items", session.items.size()},
            {"duplicates", session.items.size() - manifest.size()}});
}

void AnnotationServer::Impl::Next(const httplib::Request &req, httplib::Response &res) {
  const std::string id = req.matches[1];
  const auto session = store->GetSession(id);
  if (session.complete()) {
    return SendJson(res, 200, {{"session_id", id}, {"state", "complete"},
                               {"total", session.items.size()}});
  }
  const auto &cur = session.items[session.cursor];
  const std::size_t position = session.cursor + 1;
  const std::string base = "/sessions/" + id + "/media/" + std::to_string(position) + "/";
  json item = {{"item_id", cur.item.item_id},
               {"utterance_id", cur.item.utterance_id},
               {"phone_index", cur.item.phone_index},
               {"target", cur.item.target},
               {"substitution", cur.item.substitution},
               {"occurrence", cur.occurrence}};
  json media = {{"audio", base + "audio.wav"},
                {"spectrogram", base + "spectrogram.png"},
                {"meta", base + "meta.json"},
                {"audio_fetches_left",
                 store->playback_cap() - session.audio_fetches[session.cursor]}};
  SendJson(res, 200, {{"session_id", id}, {"state", "active"}, {"position", position},
                      {"total", session.items.size()}, {"item", item}, {"media", media}});
}

void AnnotationServer::Impl::Rate(const httplib::Request &req, httplib::Response &res) {
  const std::string id = req.matches[1];
  const std::string annotator = req.get_header_value(kAnnotatorHeader);
  if (annotator.empty()) return SendError(res, 400, "missing X-Annotator-Id header");
  const auto session = store->GetSession(id);
  if (session.annotator != annotator) {
    return SendError(res, 403, "session belongs to another annotator");
  }
  const json body = json::parse(req.body);
  RatingSubmission r;
  r.item_id = body.at("item_id").get<std::string>();
  r.occurrence = body.value("occurrence", 1);
  r.primary = body.at("primary").get<int>();
  if (body.contains("secondary") && !body.at("secondary").is_null()) {
    r.secondary = body.at("secondary").get<int>();
  }
  r.comment = body.value("comment", "");
  r.playbacks = body.value("playbacks", 0);
  const auto result = store->Submit(id, r);
  if (!result.accepted) {
    return SendJson(res, 422, {{"status", "rejected"}, {"reason", result.reason}});
  }
  const auto after = store->GetSession(id);
  SendJson(res, 200, {{"status", "accepted"},
                      {"state", after.complete() ? "complete" : "active"},
                      {"rated", after.cursor},
                      {"total", after.items.size()}});
}

void AnnotationServer::Impl::Media(const httplib::Request &req, httplib::Response &res) {
  const std::string id = req.matches[1];
  const std::string pos_text = req.matches[2];
  const std::string asset = req.matches[3];
  if (!corpus) throw NotFoundError("service has no corpus configured");
  const auto session = store->GetSession(id);
  const auto position = static_cast<std::size_t>(ParseInt(pos_text, "media position"));
  if (position < 1 || position > session.items.size()) {
    throw NotFoundError("session " + id + " has no item " + pos_text);
  }
  const auto &item = session.items[position - 1].item;
  const PhoneInstance &inst = Instance(item);
  static const std::regex frame_re(R"(frame-(\d+)\.png)");
  std::smatch m;
  if (asset == "audio.wav") {
    if (!store->RegisterAudioFetch(id, position)) {
      return SendError(res, 429, "playback limit");
    }
    const auto bundle = RenderMedia(inst, corpus->utterance(inst.utterance_id));
    res.set_content(std::string(bundle.wav.begin(), bundle.wav.end()), "audio/wav");
  } else if (asset == "spectrogram.png") {
    const auto bundle = RenderMedia(inst, corpus->utterance(inst.utterance_id));
    res.set_content(std::string(bundle.spectrogram_png.begin(), bundle.spectrogram_png.end()),
                    "image/png");
  } else if (asset == "meta.json") {
    const auto bundle = RenderMedia(inst, corpus->utterance(inst.utterance_id));
    res.set_content(bundle.meta_json, "application/json; charset=utf-8");
  } else if (std::regex_match(asset, m, frame_re)) {
    const auto bundle = RenderMedia(inst, corpus->utterance(inst.utterance_id));
    const auto k = static_cast<std::size_t>(std::stoull(m[1]));
    if (k >= bundle.frames.size()) throw NotFoundError("no frame " + m[1].str());
    res.set_content(std::string(bundle.frames[k].png.begin(), bundle.frames[k].png.end()),
                    "image/png");
  } else {
    throw NotFoundError("unknown asset '" + asset + "'");
  }
}

void AnnotationServer::Impl::Export(const httplib::Request &req, httplib::Response &res) {
  std::optional<std::string> annotator, session;
  if (req.has_param("annotator")) annotator = req.get_param_value("annotator");
  if (req.has_param("session")) session = req.get_param_value("session");
  res.set_content(store->ExportCsv(annotator, session), "text/csv; charset=utf-8");
}

AnnotationServer::AnnotationServer(std::shared_ptr<AnnotationStore> store,
                                   std::shared_ptr<const Corpus> corpus)
    : impl_(std::make_unique<Impl>()) {
  impl_->store = std::move(store);
  impl_->corpus = std::move(corpus);
  if (impl_->corpus) {
    for (const auto &inst : impl_->corpus->instances) {
      impl_->instances[{inst.utterance_id, inst.phone_index}] = &inst;
    }
  }
  impl_->Routes();
}

AnnotationServer::~AnnotationServer() { Stop(); }

int AnnotationServer::Bind(const std::string &host, int port) {
  if (port == 0) {
    const int bound = impl_->http.bind_to_any_port(host);
    if (bound < 0) throw InputError("cannot bind " + host);
    return bound;
  }
  if (!impl_->http.bind_to_port(host, port)) {
    throw InputError("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void AnnotationServer::Serve() { impl_->http.listen_after_bind(); }

void AnnotationServer::Stop() {
  if (impl_) impl_->http.stop();
}

}  // namespace uti::annotation
