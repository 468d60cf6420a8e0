// tests/unit/review_test.cc

// Copyright 2026  EGRA Toolkit Authors

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

#include <doctest.h>

#include <set>
#include <thread>

#include <json.hpp>

#include "egra/review.h"
#include "egra/rng.h"
#include "egra/synth.h"
#include "test_support.h"

// after Eigen: resolv.h defines _res
#include <httplib.h>

using namespace egra;
using namespace egra::review;
using nlohmann::json;
using egra::testing::TempDir;

namespace {

// Uniform synthetic corpus with opaque ids, so ids cannot leak scenarios.
std::shared_ptr<const Corpus> opaque_corpus(std::size_t per_stratum) {
  Corpus base = synth::make_uniform_corpus(per_stratum, 1.0);
  std::vector<Recording> rs = base.recordings();
  Rng rng(1);
  rng.shuffle(rs);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    rs[i].id = "rec" + std::to_string(1000 + i);
    rs[i].audio_path = rs[i].id + ".wav";
  }
  return std::make_shared<const Corpus>(base.questions(), rs);
}

struct LiveServer {
  std::shared_ptr<ReviewSession> session;
  std::unique_ptr<ReviewServer> server;
  std::thread thread;
  int port = 0;

  LiveServer(std::shared_ptr<ReviewSession> s, const std::filesystem::path& audio_root) : session(std::move(s)) {
    server = std::make_unique<ReviewServer>(session, audio_root);
    port = server->bind_any_port();
    thread = std::thread([this] { server->listen_after_bind(); });
    server->wait_until_ready();
  }
  ~LiveServer() {
    server->stop();
    thread.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

json get_json(httplib::Client& c, const std::string& path) {
  auto res = c.Get(path);
  REQUIRE(res);
  REQUIRE(res->status == 200);
  return json::parse(res->body);
}

int post_judgment(httplib::Client& c, const std::string& id, const std::string& verdict, json* body = nullptr) {
  auto res = c.Post("/api/judgment", json{{"recording_id", id}, {"verdict", verdict}}.dump(), "application/json");
  REQUIRE(res);
  if (body) *body = json::parse(res->body);
  return res->status;
}

}  // namespace

TEST_CASE("session: sampling, progress and done") {
  auto corpus = opaque_corpus(12);
  ReviewSession s(corpus, {3, 1, {}});
  CHECK(s.validation_set().size() == 40);
  CHECK(ReviewSession(corpus, {3, 10, {}}).validation_set().size() == 400);
  CHECK_THROWS_AS(ReviewSession(corpus, {3, 13, {}}), Error);
  auto first = s.next();
  REQUIRE(first);
  CHECK(first->recording_id == s.validation_set()[0]);
  CHECK(first->audio_url == "/api/audio/" + first->recording_id);
  auto p = s.post_judgment(first->recording_id, "correct");
  CHECK(p.judged == 1);
  CHECK(p.total == 40);
  p = s.post_judgment(first->recording_id, "incorrect");
  CHECK(p.judged == 1);
  CHECK(s.judgments().size() == 2);
  CHECK(s.next()->recording_id == s.validation_set()[1]);
  for (const auto& id : s.validation_set()) s.post_judgment(id, "correct");
  CHECK_FALSE(s.next());
  CHECK(s.progress().done);
  CHECK_THROWS_AS(s.post_judgment("not-there", "correct"), NotFoundError);
  CHECK_THROWS_AS(s.post_judgment(s.validation_set()[0], "maybe"), InvalidArgumentError);
}

TEST_CASE("session: judged ahead of cursor are skipped") {
  ReviewSession s(opaque_corpus(5), {0, 1, {}});
  s.post_judgment(s.validation_set()[1], "correct");
  CHECK(s.progress().cursor == 0);
  s.post_judgment(s.validation_set()[0], "correct");
  CHECK(s.progress().cursor == 2);
}

TEST_CASE("session: log replay survives restart and rejects foreign ids") {
  TempDir dir;
  auto corpus = opaque_corpus(5);
  SessionOptions o{9, 1, dir / "log.jsonl"};
  std::vector<std::string> set;
  {
    ReviewSession s(corpus, o);
    set = s.validation_set();
    for (std::size_t i = 0; i < 7; ++i) s.post_judgment(set[i], i % 2 ? "incorrect" : "correct");
    s.post_judgment(set[0], "incorrect");
  }
  ReviewSession again(corpus, o);
  CHECK(again.validation_set() == set);
  CHECK(again.progress().judged == 7);
  CHECK(again.judgments().size() == 8);
  CHECK(latest_verdicts(again.judgments()).at(set[0]) == Verdict::kIncorrect);
  testing::write_text(dir / "foreign.jsonl", judgment_line({"elsewhere", Verdict::kCorrect, "t"}) + "\n");
  CHECK_THROWS_AS(ReviewSession(corpus, {9, 1, dir / "foreign.jsonl"}), Error);
}

TEST_CASE("agreement: empty denominators are null; live equals offline") {
  auto corpus = opaque_corpus(5);
  ReviewSession s(corpus, {2, 1, {}});
  json empty = s.agreement().to_json();
  for (const auto& row : empty["rows"]) CHECK(row["rate"].is_null());
  for (std::size_t i = 0; i < 13; ++i) s.post_judgment(s.validation_set()[i], i % 3 ? "correct" : "incorrect");
  auto live = s.agreement();
  auto offline = agreement_report(*corpus, s.judgments());
  CHECK(live.to_json() == offline.to_json());
  // denominators are judged-and-retained counts
  std::size_t retained_consensus = 0;
  for (const auto& [id, v] : latest_verdicts(s.judgments()))
    retained_consensus += consensus_label(corpus->recording(id).labels).has_value();
  CHECK(live.rows[1].agreement.retained == retained_consensus);
  CHECK(live.rows[0].agreement.retained == 13);
}

TEST_CASE("HTTP API: blinding, judgments, errors, audio and agreement") {
  TempDir dir;
  auto corpus = opaque_corpus(5);
  synth::write_tone_audio(*corpus, dir.path(), 4);
  auto session = std::make_shared<ReviewSession>(corpus, SessionOptions{5, 1, dir / "log.jsonl"});
  LiveServer live(session, dir.path());
  auto c = live.client();

  json info = get_json(c, "/api/session");
  CHECK(info["total"] == 40);
  CHECK(info["judged"] == 0);
  CHECK(info["session_id"] == session->id());

  json next = get_json(c, "/api/next");
  std::set<std::string> keys;
  for (auto it = next.begin(); it != next.end(); ++it) keys.insert(it.key());
  CHECK(keys == std::set<std::string>{"done", "recording_id", "question_text", "audio_url", "index", "total"});
  std::string text = next.dump();
  for (const char* leak : {"correct", "Correct", "label", "marker", "scenario", "verdict"})
    CHECK_MESSAGE(text.find(leak) == std::string::npos, leak);

  auto audio = c.Get(next["audio_url"].get<std::string>());
  REQUIRE(audio);
  CHECK(audio->status == 200);
  CHECK(audio->body.substr(0, 4) == "RIFF");
  CHECK(c.Get("/api/audio/rec9999")->status == 404);

  json ack;
  CHECK(post_judgment(c, next["recording_id"], "correct", &ack) == 200);
  CHECK(ack["judged"] == 1);
  CHECK(post_judgment(c, next["recording_id"], "incorrect", &ack) == 200);
  CHECK(ack["judged"] == 1);
  CHECK(post_judgment(c, "nope", "correct") == 404);
  CHECK(post_judgment(c, next["recording_id"], "perhaps") == 400);
  CHECK(c.Post("/api/judgment", "{oops", "application/json")->status == 400);
  CHECK(c.Post("/api/judgment", "{\"recording_id\": 3}", "application/json")->status == 400);

  json agreement = get_json(c, "/api/agreement");
  CHECK(agreement == agreement_report(*corpus, read_judgments(dir / "log.jsonl")).to_json());
  CHECK(agreement["rows"].size() == 4);

  for (const auto& id : session->validation_set()) post_judgment(c, id, "correct");
  CHECK(get_json(c, "/api/next")["done"] == true);
}

TEST_CASE("HTTP API: acknowledged judgments survive a server restart") {
  TempDir dir;
  auto corpus = opaque_corpus(5);
  SessionOptions o{6, 1, dir / "log.jsonl"};
  std::vector<std::string> set;
  {
    auto session = std::make_shared<ReviewSession>(corpus, o);
    set = session->validation_set();
    LiveServer live(session, dir.path());
    auto c = live.client();
    for (std::size_t i = 0; i < 10; ++i) CHECK(post_judgment(c, set[i], "incorrect") == 200);
  }
  auto session = std::make_shared<ReviewSession>(corpus, o);
  LiveServer live(session, dir.path());
  auto c = live.client();
  json info = get_json(c, "/api/session");
  CHECK(info["judged"] == 10);
  CHECK(get_json(c, "/api/next")["recording_id"] == set[10]);
}

TEST_CASE("HTTP API: concurrent readers while judging") {
  auto corpus = opaque_corpus(5);
  auto session = std::make_shared<ReviewSession>(corpus, SessionOptions{8, 1, {}});
  LiveServer live(session, ".");
  std::atomic<bool> stop{false};
  std::atomic<int> reads{0};
  std::thread reader([&] {
    auto c = live.client();
    while (!stop) {
      auto res = c.Get("/api/agreement");
      if (res && res->status == 200) ++reads;
    }
  });
  auto c = live.client();
  for (const auto& id : session->validation_set()) CHECK(post_judgment(c, id, "correct") == 200);
  stop = true;
  reader.join();
  CHECK(reads > 0);
  CHECK(session->progress().done);
}
