// include/egra/corpus.h

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

#ifndef EGRA_CORPUS_H_
#define EGRA_CORPUS_H_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "egra/audio.h"
#include "egra/common.h"

namespace egra {

enum class QuestionKind { kLetter, kWord, kConsonantCluster };

std::string_view to_string(QuestionKind kind);

struct Question {
  std::string id;
  std::string text;
  QuestionKind kind = QuestionKind::kWord;
};

/// The ten assessed items, in a fixed order used for all reporting.
const std::vector<Question>& standard_questions();

struct MarkerLabel {
  std::string marker_id;
  Verdict verdict = Verdict::kCorrect;
};

inline constexpr std::size_t kMarkersPerRecording = 3;

struct Recording {
  std::string id;
  std::string question_id;
  std::string audio_path;  // relative to the audio root
  double duration_s = 0.0;
  int sample_rate_hz = 0;
  std::vector<MarkerLabel> labels;
  std::optional<std::string> collected_at;
  std::optional<int> grade;

  bool fully_labeled() const { return labels.size() == kMarkersPerRecording; }
};

/// Immutable, validated set of questions and recordings.
class Corpus {
 public:
  Corpus() = default;
  /// Validates every invariant and throws egra::Error on the first violation.
  Corpus(std::vector<Question> questions, std::vector<Recording> recordings);

  const std::vector<Question>& questions() const { return questions_; }
  const std::vector<Recording>& recordings() const { return recordings_; }
  std::size_t size() const { return recordings_.size(); }

  const Recording& recording(const std::string& id) const;  // throws NotFoundError
  const Recording* find(const std::string& id) const;
  const Question& question(const std::string& id) const;
  bool has_question(const std::string& id) const;
  std::size_t label_count() const;

 private:
  std::vector<Question> questions_;
  std::vector<Recording> recordings_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::size_t> question_index_;
};

/// Parses a line-delimited JSON manifest against the standard questions.
Corpus load_manifest(const std::filesystem::path& path);
Corpus parse_manifest(std::istream& in, const std::string& source_name = "<manifest>");

/// One manifest line for `r`.
std::string manifest_line(const Recording& r);
void write_manifest(const std::filesystem::path& path, const Corpus& corpus);

inline constexpr const char* kManifestFileName = "manifest.jsonl";

/// A corpus directory (`manifest.jsonl` + audio paths relative to the
/// directory) or a bare manifest file (audio relative to its parent).
struct CorpusLocation {
  Corpus corpus;
  std::filesystem::path audio_root;
};
CorpusLocation open_corpus(const std::filesystem::path& dir_or_manifest);

/// Reads the recording's audio from `audio_root` and canonicalizes it.
Waveform ingest_audio(const Recording& recording, const std::filesystem::path& audio_root);

struct DistributionSummary {
  /// question id -> counts indexed by ScenarioClass
  std::map<std::string, std::array<std::size_t, 4>> counts;
  std::vector<std::string> excluded;  // recordings without exactly three labels
};

/// Per-question scenario counts over fully labeled recordings.
DistributionSummary summarize_distribution(const Corpus& corpus);

}  // namespace egra

#endif  // EGRA_CORPUS_H_
