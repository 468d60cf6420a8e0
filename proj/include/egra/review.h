// include/egra/review.h

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

#ifndef EGRA_REVIEW_H_
#define EGRA_REVIEW_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "egra/consensus.h"
#include "egra/corpus.h"
#include "egra/report.h"

// Expert validation workflow: a blinded, shuffled review session with an
// append-only judgment log, and its HTTP front.
namespace egra::review {

struct SessionOptions {
  std::uint64_t seed = 0;
  std::size_t per_scenario = 10;
  std::filesystem::path log_path;  // append-only judgment log; empty keeps judgments in memory
};

/// What the expert sees for one item. Carries no marker label or scenario.
struct NextItem {
  std::string recording_id;
  std::string question_text;
  std::string audio_url;
  std::size_t index = 0;
  std::size_t total = 0;
};

struct Progress {
  std::size_t judged = 0;
  std::size_t total = 0;
  std::size_t cursor = 0;
  bool done = false;
};

/// Table-1-shaped agreement summary, overall and per question.
struct AgreementReport {
  std::vector<report::Table1Row> rows;
  report::QuestionAgreement per_question;
  std::size_t judged = 0;

  nlohmann::json to_json() const;
};

/// Offline computation shared with the live endpoint.
AgreementReport agreement_report(const Corpus& corpus, std::span<const ExpertJudgment> judgments);

class ReviewSession {
 public:
  /// Samples the validation set and replays any judgments already in the log.
  ReviewSession(std::shared_ptr<const Corpus> corpus, SessionOptions options);
  ReviewSession(const ReviewSession&) = delete;
  ReviewSession& operator=(const ReviewSession&) = delete;

  const std::string& id() const { return id_; }
  const std::vector<std::string>& validation_set() const { return order_; }
  const Corpus& corpus() const { return *corpus_; }

  std::optional<NextItem> next() const;
  Progress progress() const;
  bool contains(const std::string& recording_id) const;

  /// Appends to the log before acknowledging. Re-judging overwrites the
  /// earlier verdict. Throws NotFoundError / InvalidArgumentError.
  Progress post_judgment(const std::string& recording_id, std::string_view verdict);

  AgreementReport agreement() const;
  /// Full history, in arrival order.
  std::vector<ExpertJudgment> judgments() const;

 private:
  Progress progress_locked() const;
  std::size_t cursor_locked() const;

  std::shared_ptr<const Corpus> corpus_;
  SessionOptions options_;
  std::string id_;
  std::vector<std::string> order_;
  std::map<std::string, std::size_t> position_;
  mutable std::shared_mutex mu_;
  std::vector<ExpertJudgment> history_;
  std::map<std::string, Verdict> latest_;
};

/// HTTP JSON API over one session:
///   GET  /api/session, GET /api/next, GET /api/audio/{id},
///   POST /api/judgment {recording_id, verdict}, GET /api/agreement
class ReviewServer {
 public:
  ReviewServer(std::shared_ptr<ReviewSession> session, std::filesystem::path audio_root,
               std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~ReviewServer();

  /// Binds to an OS-chosen port and returns it.
  int bind_any_port(const std::string& host = "127.0.0.1");
  bool bind(const std::string& host, int port);
  /// Serves until stop(); call after a bind.
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace egra::review

#endif  // EGRA_REVIEW_H_
