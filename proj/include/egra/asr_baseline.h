// include/egra/asr_baseline.h

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

#ifndef EGRA_ASR_BASELINE_H_
#define EGRA_ASR_BASELINE_H_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "egra/consensus.h"
#include "egra/corpus.h"

namespace egra {

/// Lowercases ASCII letters, trims surrounding whitespace and ASCII
/// punctuation, and collapses inner whitespace runs to one space. Non-ASCII
/// bytes pass through untouched.
std::string normalize_transcript(std::string_view text);

struct TranscriptRecord {
  std::string recording_id;
  std::string expected_text;
  std::string transcript;
};

struct QuestionAccuracy {
  std::string expected_text;
  std::size_t samples = 0;
  std::size_t correct = 0;
  double accuracy() const { return samples ? static_cast<double>(correct) / static_cast<double>(samples) : 0.0; }
};

struct AccuracyReport {
  std::vector<QuestionAccuracy> per_question;  // standard question order, then first appearance
  std::size_t samples = 0;
  std::size_t correct = 0;
  double overall() const { return samples ? static_cast<double>(correct) / static_cast<double>(samples) : 0.0; }
};

/// Exact match after normalization, per expected text and overall.
AccuracyReport exact_match_accuracy(std::span<const TranscriptRecord> records);

/// Speech-to-text backend used for the baseline.
class Transcriber {
 public:
  virtual ~Transcriber() = default;
  virtual std::string transcribe(const Recording& recording) = 0;
};

/// Replays transcripts recorded earlier: line-delimited JSON
/// {"recording_id": ..., "transcript": ...}.
class ReplayTranscriber final : public Transcriber {
 public:
  explicit ReplayTranscriber(std::map<std::string, std::string> transcripts)
      : transcripts_(std::move(transcripts)) {}
  static ReplayTranscriber from_file(const std::filesystem::path& path);

  std::string transcribe(const Recording& recording) override;

 private:
  std::map<std::string, std::string> transcripts_;
};

/// Runs `<command> <checkpoint-id> <wav-path>` per recording and takes its
/// stdout as the transcript.
class CommandTranscriber final : public Transcriber {
 public:
  CommandTranscriber(std::string command, std::string checkpoint_id, std::filesystem::path audio_root)
      : command_(std::move(command)), checkpoint_(std::move(checkpoint_id)), audio_root_(std::move(audio_root)) {}

  std::string transcribe(const Recording& recording) override;

 private:
  std::string command_;
  std::string checkpoint_;
  std::filesystem::path audio_root_;
};

struct BaselineRun {
  std::vector<TranscriptRecord> records;
  std::vector<std::string> failures;  // "<recording id>: <reason>"
};

/// Transcribes every consensus-correct recording in `retained`. A failing
/// transcription is logged and kept as an empty transcript.
BaselineRun run_baseline(const Corpus& corpus, const RetainedSet& retained, Transcriber& transcriber);

}  // namespace egra

#endif  // EGRA_ASR_BASELINE_H_
