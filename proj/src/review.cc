// src/review.cc

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

#include "egra/review.h"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>

#include <unistd.h>

#include <httplib.h>

#include "egra/rng.h"

namespace egra::review {

using nlohmann::json;

namespace {

std::string utc_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json count_json(const AgreementCount& c) {
  auto rate = c.rate_or_null();
  return {{"agreed", c.agreed}, {"judged", c.retained}, {"rate", rate ? json(*rate) : json(nullptr)}};
}

void append_line(const std::filesystem::path& path, const std::string& line) {
  std::FILE* f = std::fopen(path.c_str(), "a");
  if (!f) throw Error("cannot open judgment log " + path.string());
  bool ok = std::fputs((line + "\n").c_str(), f) >= 0 && std::fflush(f) == 0 && ::fsync(fileno(f)) == 0;
  ok = std::fclose(f) == 0 && ok;
  if (!ok) throw Error("failed to persist judgment to " + path.string());
}

}  // namespace

json AgreementReport::to_json() const {
  json rows_json = json::array();
  for (const auto& r : rows) {
    json row = count_json(r.agreement);
    row["policy"] = policy_key(r.policy);
    row["condition"] = policy_display_name(r.policy);
    row["recordings"] = r.retained;
    row["share"] = report::format_share(r.retained, r.total);
    rows_json.push_back(std::move(row));
  }
  json per_q = json::object();
  for (const auto& [policy, questions] : per_question) {
    json qs = json::object();
    for (const auto& [q, c] : questions) qs[q] = count_json(c);
    per_q[std::string(policy_key(policy))] = std::move(qs);
  }
  return {{"judged", judged}, {"rows", std::move(rows_json)}, {"per_question", std::move(per_q)}};
}

AgreementReport agreement_report(const Corpus& corpus, std::span<const ExpertJudgment> judgments) {
  AgreementReport r;
  r.rows = report::agreement_table(corpus, judgments);
  r.per_question = report::agreement_per_question(corpus, judgments);
  r.judged = latest_verdicts(judgments).size();
  return r;
}

ReviewSession::ReviewSession(std::shared_ptr<const Corpus> corpus, SessionOptions options)
    : corpus_(std::move(corpus)), options_(std::move(options)) {
  if (!corpus_) throw InvalidArgumentError("review session needs a corpus");
  order_ = sample_validation_set(*corpus_, options_.per_scenario, options_.seed);
  for (std::size_t i = 0; i < order_.size(); ++i) position_[order_[i]] = i;

  SeedHasher h(options_.seed);
  for (const auto& id : order_) h.add(id);
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h.finish();
  id_ = os.str();

  if (!options_.log_path.empty() && std::filesystem::exists(options_.log_path)) {
    for (auto& j : read_judgments(options_.log_path)) {
      if (!contains(j.recording_id))
        throw Error("judgment log " + options_.log_path.string() + " references '" + j.recording_id +
                    "', which is not in this session's validation set (different seed or corpus?)");
      latest_[j.recording_id] = j.verdict;
      history_.push_back(std::move(j));
    }
  }
}

bool ReviewSession::contains(const std::string& recording_id) const {
  return position_.count(recording_id) > 0;
}

std::size_t ReviewSession::cursor_locked() const {
  std::size_t i = 0;
  while (i < order_.size() && latest_.count(order_[i])) ++i;
  return i;
}

Progress ReviewSession::progress_locked() const {
  Progress p;
  p.judged = latest_.size();
  p.total = order_.size();
  p.cursor = cursor_locked();
  p.done = p.judged == p.total;
  return p;
}

Progress ReviewSession::progress() const {
  std::shared_lock lock(mu_);
  return progress_locked();
}

std::optional<NextItem> ReviewSession::next() const {
  std::shared_lock lock(mu_);
  std::size_t cursor = cursor_locked();
  if (cursor == order_.size()) return std::nullopt;
  const Recording& r = corpus_->recording(order_[cursor]);
  return NextItem{r.id, corpus_->question(r.question_id).text, "/api/audio/" + r.id, cursor, order_.size()};
}

Progress ReviewSession::post_judgment(const std::string& recording_id, std::string_view verdict_text) {
  Verdict verdict = verdict_from_string(verdict_text);
  if (!contains(recording_id))
    throw NotFoundError("recording '" + recording_id + "' is not in the validation set");
  ExpertJudgment j{recording_id, verdict, utc_now()};
  std::unique_lock lock(mu_);
  if (!options_.log_path.empty()) append_line(options_.log_path, judgment_line(j));
  latest_[recording_id] = verdict;
  history_.push_back(std::move(j));
  return progress_locked();
}

AgreementReport ReviewSession::agreement() const {
  std::shared_lock lock(mu_);
  return agreement_report(*corpus_, history_);
}

std::vector<ExpertJudgment> ReviewSession::judgments() const {
  std::shared_lock lock(mu_);
  return history_;
}

struct ReviewServer::Impl {
  std::shared_ptr<ReviewSession> session;
  std::filesystem::path audio_root;
  httplib::Server server;
};

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json progress_json(const Progress& p) {
  return {{"judged", p.judged}, {"total", p.total}, {"cursor", p.cursor}, {"done", p.done}};
}

}  // namespace

ReviewServer::ReviewServer(std::shared_ptr<ReviewSession> session, std::filesystem::path audio_root,
                           std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>()) {
  impl_->session = std::move(session);
  impl_->audio_root = std::move(audio_root);
  auto& srv = impl_->server;
  Impl* self = impl_.get();

  srv.Get("/api/session", [self](const httplib::Request&, httplib::Response& res) {
    json body = progress_json(self->session->progress());
    body["session_id"] = self->session->id();
    send_json(res, body);
  });

  srv.Get("/api/next", [self](const httplib::Request&, httplib::Response& res) {
    auto item = self->session->next();
    if (!item) {
      send_json(res, {{"done", true}, {"total", self->session->validation_set().size()}});
      return;
    }
    send_json(res, {{"done", false},
                    {"recording_id", item->recording_id},
                    {"question_text", item->question_text},
                    {"audio_url", item->audio_url},
                    {"index", item->index},
                    {"total", item->total}});
  });

  srv.Get(R"(/api/audio/(.+))", [self](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!self->session->contains(id)) {
      send_json(res, {{"error", "unknown recording '" + id + "'"}}, 404);
      return;
    }
    const Recording& r = self->session->corpus().recording(id);
    std::ifstream in(self->audio_root / r.audio_path, std::ios::binary);
    if (!in) {
      send_json(res, {{"error", "audio file missing for '" + id + "'"}}, 404);
      return;
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    res.set_content(std::move(bytes), "audio/wav");
  });

  srv.Post("/api/judgment", [self](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception&) {
      send_json(res, {{"error", "request body is not JSON"}}, 400);
      return;
    }
    if (!body.is_object() || !body.contains("recording_id") || !body["recording_id"].is_string() ||
        !body.contains("verdict") || !body["verdict"].is_string()) {
      send_json(res, {{"error", "expected {recording_id: string, verdict: string}"}}, 400);
      return;
    }
    try {
      auto p = self->session->post_judgment(body["recording_id"].get<std::string>(),
                                            body["verdict"].get<std::string>());
      json ack = progress_json(p);
      ack["ok"] = true;
      send_json(res, ack);
    } catch (const NotFoundError& e) {
      send_json(res, {{"error", e.what()}}, 404);
    } catch (const InvalidArgumentError& e) {
      send_json(res, {{"error", e.what()}}, 400);
    } catch (const Error& e) {
      send_json(res, {{"error", e.what()}}, 500);
    }
  });

  srv.Get("/api/agreement", [self](const httplib::Request&, httplib::Response& res) {
    send_json(res, self->session->agreement().to_json());
  });

  if (static_dir) srv.set_mount_point("/", static_dir->string());
}

ReviewServer::~ReviewServer() { stop(); }

int ReviewServer::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool ReviewServer::bind(const std::string& host, int port) { return impl_->server.bind_to_port(host, port); }

bool ReviewServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void ReviewServer::stop() {
  if (impl_) impl_->server.stop();
}

void ReviewServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace egra::review
