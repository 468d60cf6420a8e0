// src/asr_baseline.cc

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

#include "egra/asr_baseline.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <memory>

#include <json.hpp>

namespace egra {

namespace {

bool is_space(unsigned char c) { return c < 0x80 && std::isspace(c); }
bool is_punct(unsigned char c) { return c < 0x80 && std::ispunct(c); }

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

}  // namespace

std::string normalize_transcript(std::string_view text) {
  std::size_t begin = 0, end = text.size();
  auto trim = [](unsigned char c) { return is_space(c) || is_punct(c); };
  while (begin < end && trim(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && trim(static_cast<unsigned char>(text[end - 1]))) --end;

  std::string out;
  out.reserve(end - begin);
  bool pending_space = false;
  for (std::size_t i = begin; i < end; ++i) {
    auto c = static_cast<unsigned char>(text[i]);
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
  }
  return out;
}

AccuracyReport exact_match_accuracy(std::span<const TranscriptRecord> records) {
  if (records.empty()) throw InvalidArgumentError("no transcript records to score");
  std::vector<QuestionAccuracy> rows;
  auto row_for = [&](const std::string& expected) -> QuestionAccuracy& {
    for (auto& r : rows)
      if (r.expected_text == expected) return r;
    rows.push_back({expected, 0, 0});
    return rows.back();
  };
  for (const auto& q : standard_questions()) {
    bool present = std::any_of(records.begin(), records.end(),
                               [&](const TranscriptRecord& r) { return r.expected_text == q.text; });
    if (present) row_for(q.text);
  }

  AccuracyReport report;
  for (const auto& rec : records) {
    auto& row = row_for(rec.expected_text);
    const bool match = normalize_transcript(rec.transcript) == normalize_transcript(rec.expected_text);
    ++row.samples;
    ++report.samples;
    if (match) {
      ++row.correct;
      ++report.correct;
    }
  }
  report.per_question = std::move(rows);
  return report;
}

ReplayTranscriber ReplayTranscriber::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("transcript file not found: " + path.string());
  std::map<std::string, std::string> transcripts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      transcripts[j.at("recording_id").get<std::string>()] = j.at("transcript").get<std::string>();
    } catch (const std::exception& e) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return ReplayTranscriber(std::move(transcripts));
}

std::string ReplayTranscriber::transcribe(const Recording& recording) {
  auto it = transcripts_.find(recording.id);
  if (it == transcripts_.end()) throw NotFoundError("no replayed transcript for '" + recording.id + "'");
  return it->second;
}

std::string CommandTranscriber::transcribe(const Recording& recording) {
  const std::string cmd = command_ + " " + shell_quote(checkpoint_) + " " +
                          shell_quote((audio_root_ / recording.audio_path).string());
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) throw Error("cannot start transcriber command");
  std::string out;
  std::array<char, 512> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe.get())) out.append(buf.data(), n);
  int status = pclose(pipe.release());
  if (status != 0) throw Error("transcriber exited with status " + std::to_string(status));
  return out;
}

BaselineRun run_baseline(const Corpus& corpus, const RetainedSet& retained, Transcriber& transcriber) {
  BaselineRun run;
  for (const auto& item : retained.items) {
    if (item.label != Verdict::kCorrect) continue;
    const Recording& r = corpus.recording(item.recording_id);
    TranscriptRecord rec{r.id, corpus.question(r.question_id).text, ""};
    try {
      rec.transcript = transcriber.transcribe(r);
    } catch (const std::exception& e) {
      run.failures.push_back(r.id + ": " + e.what());
    }
    run.records.push_back(std::move(rec));
  }
  return run;
}

}  // namespace egra
