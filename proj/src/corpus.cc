// src/corpus.cc

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

#include "egra/corpus.h"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "egra/consensus.h"

namespace egra {

using nlohmann::json;

std::string_view to_string(QuestionKind kind) {
  switch (kind) {
    case QuestionKind::kLetter: return "letter";
    case QuestionKind::kWord: return "word";
    case QuestionKind::kConsonantCluster: return "consonant_cluster";
  }
  return "?";
}

const std::vector<Question>& standard_questions() {
  static const std::vector<Question> questions = {
      {"d", "d", QuestionKind::kLetter},
      {"v", "v", QuestionKind::kLetter},
      {"n", "n", QuestionKind::kLetter},
      {"ewe", "ewe", QuestionKind::kWord},
      {"hayi", "hayi", QuestionKind::kWord},
      {"hl", "hl", QuestionKind::kConsonantCluster},
      {"inja", "inja", QuestionKind::kWord},
      {"kude", "kude", QuestionKind::kWord},
      {"molo", "molo", QuestionKind::kWord},
      {"ng", "ng", QuestionKind::kConsonantCluster},
  };
  return questions;
}

namespace {

// Per-recording invariants that do not depend on the rest of the corpus.
void check_recording(const Recording& r) {
  if (r.id.empty()) throw Error("recording with empty id");
  if (r.labels.size() > kMarkersPerRecording)
    throw Error("recording '" + r.id + "' has " + std::to_string(r.labels.size()) +
                " labels (at most 3 allowed)");
  std::unordered_set<std::string> markers;
  for (const auto& l : r.labels)
    if (!markers.insert(l.marker_id).second)
      throw Error("recording '" + r.id + "' has two labels from marker '" + l.marker_id + "'");
  if (!(r.duration_s > 0.0))
    throw Error("recording '" + r.id + "' has non-positive duration");
  if (r.sample_rate_hz <= 0)
    throw Error("recording '" + r.id + "' has non-positive sample rate");
}

Recording recording_from_json(const json& j) {
  Recording r;
  r.id = j.at("id").get<std::string>();
  r.question_id = j.at("question").get<std::string>();
  r.audio_path = j.at("audio").get<std::string>();
  r.duration_s = j.at("duration_s").get<double>();
  r.sample_rate_hz = j.at("sample_rate_hz").get<int>();
  if (auto it = j.find("labels"); it != j.end()) {
    for (const auto& l : *it) {
      MarkerLabel label;
      label.marker_id = l.at("marker").get<std::string>();
      label.verdict = verdict_from_string(l.at("verdict").get<std::string>());
      r.labels.push_back(std::move(label));
    }
  }
  if (auto it = j.find("collected_at"); it != j.end() && !it->is_null())
    r.collected_at = it->get<std::string>();
  if (auto it = j.find("grade"); it != j.end() && !it->is_null())
    r.grade = it->get<int>();
  return r;
}

}  // namespace

Corpus::Corpus(std::vector<Question> questions, std::vector<Recording> recordings)
    : questions_(std::move(questions)), recordings_(std::move(recordings)) {
  for (std::size_t i = 0; i < questions_.size(); ++i) {
    const auto& q = questions_[i];
    if (q.text.empty()) throw Error("question '" + q.id + "' has empty text");
    if (!question_index_.emplace(q.id, i).second)
      throw Error("duplicate question id '" + q.id + "'");
  }
  by_id_.reserve(recordings_.size());
  for (std::size_t i = 0; i < recordings_.size(); ++i) {
    const auto& r = recordings_[i];
    check_recording(r);
    if (!has_question(r.question_id))
      throw Error("recording '" + r.id + "' references unknown question id '" +
                  r.question_id + "'");
    if (!by_id_.emplace(r.id, i).second)
      throw Error("duplicate recording id '" + r.id + "'");
  }
}

const Recording* Corpus::find(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &recordings_[it->second];
}

const Recording& Corpus::recording(const std::string& id) const {
  if (const auto* r = find(id)) return *r;
  throw NotFoundError("unknown recording id '" + id + "'");
}

bool Corpus::has_question(const std::string& id) const {
  return question_index_.count(id) > 0;
}

const Question& Corpus::question(const std::string& id) const {
  auto it = question_index_.find(id);
  if (it == question_index_.end()) throw NotFoundError("unknown question id '" + id + "'");
  return questions_[it->second];
}

std::size_t Corpus::label_count() const {
  std::size_t n = 0;
  for (const auto& r : recordings_) n += r.labels.size();
  return n;
}

Corpus parse_manifest(std::istream& in, const std::string& source_name) {
  const auto& questions = standard_questions();
  std::unordered_set<std::string> known;
  for (const auto& q : questions) known.insert(q.id);

  std::vector<Recording> recordings;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source_name + ":" + std::to_string(line_no) + ": ";
    Recording r;
    try {
      r = recording_from_json(json::parse(line));
      check_recording(r);
    } catch (const json::exception& e) {
      throw Error(where + "malformed manifest line: " + e.what());
    } catch (const Error& e) {
      throw Error(where + e.what());
    }
    if (!known.count(r.question_id))
      throw Error(where + "unknown question id '" + r.question_id + "'");
    if (!seen.insert(r.id).second)
      throw Error(where + "duplicate recording id '" + r.id + "'");
    recordings.push_back(std::move(r));
  }
  return Corpus(questions, std::move(recordings));
}

Corpus load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("manifest not found: " + path.string());
  return parse_manifest(in, path.string());
}

std::string manifest_line(const Recording& r) {
  json j;
  j["id"] = r.id;
  j["question"] = r.question_id;
  j["audio"] = r.audio_path;
  j["duration_s"] = r.duration_s;
  j["sample_rate_hz"] = r.sample_rate_hz;
  j["labels"] = json::array();
  for (const auto& l : r.labels)
    j["labels"].push_back({{"marker", l.marker_id}, {"verdict", to_string(l.verdict)}});
  if (r.collected_at) j["collected_at"] = *r.collected_at;
  if (r.grade) j["grade"] = *r.grade;
  return j.dump();
}

void write_manifest(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& r : corpus.recordings()) out << manifest_line(r) << '\n';
}

CorpusLocation open_corpus(const std::filesystem::path& dir_or_manifest) {
  if (std::filesystem::is_directory(dir_or_manifest))
    return {load_manifest(dir_or_manifest / kManifestFileName), dir_or_manifest};
  return {load_manifest(dir_or_manifest), dir_or_manifest.parent_path()};
}

Waveform ingest_audio(const Recording& recording, const std::filesystem::path& audio_root) {
  try {
    return canonicalize(read_wav(audio_root / recording.audio_path));
  } catch (const NotFoundError&) {
    throw;
  } catch (const Error& e) {
    throw Error("recording '" + recording.id + "': " + e.what());
  }
}

DistributionSummary summarize_distribution(const Corpus& corpus) {
  DistributionSummary summary;
  for (const auto& q : corpus.questions()) summary.counts[q.id] = {};
  for (const auto& r : corpus.recordings()) {
    if (!r.fully_labeled()) {
      summary.excluded.push_back(r.id);
      continue;
    }
    auto scenario = classify_scenario(r.labels);
    ++summary.counts[r.question_id][static_cast<std::size_t>(scenario)];
  }
  return summary;
}

}  // namespace egra
