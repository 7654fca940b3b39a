// tests/unit/annotation_server_test.cpp

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

#include <gtest/gtest.h>

#include <httplib.h>
#include <json.hpp>

#include <thread>

#include "test_util.hpp"
#include "uti/annotation/server.hpp"
#include "uti/audio.hpp"
#include "uti/error.hpp"
#include "uti/synth.hpp"

namespace uti::annotation {
namespace {

using nlohmann::json;

class ServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    SyntheticSpec spec;
    spec.speakers = 1;
    spec.utterances_per_speaker = 2;
    spec.phones_per_utterance = 4;
    GenerateSyntheticCorpus(spec, 11, corpus_dir_.path());
    corpus_ = std::make_shared<const Corpus>(
        LoadCorpus(corpus_dir_.path(), ClassMap::Load(corpus_dir_.path() / "classmap.tsv")));
    store_ = std::make_shared<AnnotationStore>(data_dir_.path(), 2);
    server_ = std::make_unique<AnnotationServer>(store_, corpus_);
    port_ = server_->Bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_->Serve(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    for (int tries = 0; tries < 100 && !client_->Get("/export/ratings.csv"); ++tries) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }

  void TearDown() override {
    server_->Stop();
    thread_.join();
  }

  json Manifest() const {
    json items = json::array();
    for (const auto &inst : corpus_->instances) {
      items.push_back({{"item_id", inst.utterance_id + ":" + std::to_string(inst.phone_index)},
                       {"utterance_id", inst.utterance_id},
                       {"phone_index", inst.phone_index},
                       {"target", inst.phone_label},
                       {"substitution", "t"}});
    }
    return {{"seed", 3}, {"items", items}};
  }

  httplib::Result Post(const std::string &path, const json &body, const std::string &who = "ann") {
    httplib::Headers h;
    if (!who.empty()) h.emplace("X-Annotator-Id", who);
    return client_->Post(path, h, body.dump(), "application/json");
  }

  test::TempDir corpus_dir_{"srv_corpus"};
  test::TempDir data_dir_{"srv_data"};
  std::shared_ptr<const Corpus> corpus_;
  std::shared_ptr<AnnotationStore> store_;
  std::unique_ptr<AnnotationServer> server_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(ServerTest, FullSessionOverHttp) {
  const json manifest = Manifest();
  const std::size_t n = manifest["items"].size();
  ASSERT_GT(n, 0u);

  auto res = Post("/sessions", manifest);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  const json created = json::parse(res->body);
  const std::string id = created["session_id"];
  EXPECT_EQ(created["items"].get<std::size_t>(), n + created["duplicates"].get<std::size_t>());

  res = Post("/sessions", manifest);
  EXPECT_EQ(res->status, 200);
  EXPECT_FALSE(json::parse(res->body)["created"].get<bool>());

  std::size_t rated = 0;
  while (true) {
    res = client_->Get("/sessions/" + id + "/next");
    ASSERT_EQ(res->status, 200);
    const json next = json::parse(res->body);
    if (next["state"] == "complete") break;
    EXPECT_EQ(next["position"].get<std::size_t>(), rated + 1);

    if (rated == 0) {
      const std::string audio = next["media"]["audio"];
      auto wav = client_->Get(audio);
      ASSERT_EQ(wav->status, 200);
      EXPECT_EQ(wav->get_header_value("Content-Type"), "audio/wav");
      const std::vector<std::uint8_t> bytes(wav->body.begin(), wav->body.end());
      EXPECT_GT(DecodeWav(bytes, "http").samples.size(), 0u);
      EXPECT_EQ(client_->Get(audio)->status, 200);
      EXPECT_EQ(client_->Get(audio)->status, 429);

      auto meta = client_->Get(next["media"]["meta"].get<std::string>());
      ASSERT_EQ(meta->status, 200);
      const json m = json::parse(meta->body);
      ASSERT_GT(m["frames"].size(), 0u);
      auto frame = client_->Get("/sessions/" + id + "/media/1/" + m["frames"][0]["asset"].get<std::string>());
      EXPECT_EQ(frame->status, 200);
      EXPECT_EQ(frame->body.substr(1, 3), "PNG");
      auto spec = client_->Get(next["media"]["spectrogram"].get<std::string>());
      EXPECT_EQ(spec->get_header_value("Content-Type"), "image/png");
      EXPECT_EQ(client_->Get("/sessions/" + id + "/media/1/frame-9999.png")->status, 404);
      EXPECT_EQ(client_->Get("/sessions/" + id + "/media/1/nope.bin")->status, 404);

      // Out of order and invalid ratings are rejected with a reason.
      auto bad = Post("/sessions/" + id + "/ratings",
                      {{"item_id", next["item"]["item_id"]}, {"occurrence", 1}, {"primary", 3}});
      EXPECT_EQ(bad->status, 422);
      EXPECT_EQ(json::parse(bad->body)["reason"], "secondary required");
      auto foreign = Post("/sessions/" + id + "/ratings",
                          {{"item_id", next["item"]["item_id"]}, {"primary", 5}}, "intruder");
      EXPECT_EQ(foreign->status, 403);
    }

    const json rating = {{"item_id", next["item"]["item_id"]},
                         {"occurrence", next["item"]["occurrence"]},
                         {"primary", rated % 2 ? 5 : 2},
                         {"secondary", rated % 2 ? json(nullptr) : json(4)},
                         {"playbacks", 1}};
    res = Post("/sessions/" + id + "/ratings", rating);
    ASSERT_EQ(res->status, 200) << res->body;
    EXPECT_EQ(json::parse(res->body)["rated"].get<std::size_t>(), ++rated);
  }
  EXPECT_EQ(rated, created["items"].get<std::size_t>());

  res = client_->Get("/export/ratings.csv?annotator=ann");
  ASSERT_EQ(res->status, 200);
  EXPECT_EQ(res->body, store_->ExportCsv("ann"));
  EXPECT_EQ(std::count(res->body.begin(), res->body.end(), '\n'), static_cast<long>(rated + 1));
}

TEST_F(ServerTest, ErrorStatuses) {
  EXPECT_EQ(Post("/sessions", Manifest(), "")->status, 400);
  EXPECT_EQ(Post("/sessions", json{{"seed", 1}})->status, 400);
  auto res = client_->Post("/sessions", {{"X-Annotator-Id", "ann"}}, "{oops", "application/json");
  EXPECT_EQ(res->status, 400);

  json bad_item = Manifest();
  bad_item["items"][0]["phone_index"] = 999;
  EXPECT_EQ(Post("/sessions", bad_item)->status, 404);

  EXPECT_EQ(client_->Get("/sessions/missing/next")->status, 404);
  const std::string id = json::parse(Post("/sessions", Manifest())->body)["session_id"];
  json other = Manifest();
  other["items"].erase(0);
  EXPECT_EQ(Post("/sessions", other)->status, 409);
  EXPECT_EQ(client_->Get("/sessions/" + id + "/media/0/audio.wav")->status, 404);
  EXPECT_EQ(client_->Get("/export/ratings.csv?annotator=nobody")->body,
            std::string(kExportHeader) + "\n");
}

TEST(ServiceConfigFile, ParsesAndValidates) {
  const auto c = ServiceConfig::Parse("host = 0.0.0.0\nport = 9000\ncorpus = /data/c\n", "cfg");
  EXPECT_EQ(c.host, "0.0.0.0");
  EXPECT_EQ(c.port, 9000);
  EXPECT_EQ(c.class_map, std::filesystem::path("/data/c/classmap.tsv"));
  EXPECT_EQ(c.playback_cap, kDefaultPlaybackCap);
  EXPECT_THROW(ServiceConfig::Parse("colour = red\n", "cfg"), InputError);
  EXPECT_THROW(ServiceConfig::Parse("port = 70000\n", "cfg"), InputError);
  EXPECT_THROW(ServiceConfig::Parse("playback_cap = 0\n", "cfg"), InputError);
}

}  // namespace
}  // namespace uti::annotation
