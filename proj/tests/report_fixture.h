// tests/report_fixture.h

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

// Fixtures behind the committed golden tables and the baseline replay.

#ifndef EGRA_TESTS_REPORT_FIXTURE_H_
#define EGRA_TESTS_REPORT_FIXTURE_H_

#include <cctype>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "egra/asr_baseline.h"
#include "egra/consensus.h"
#include "egra/harness.h"
#include "egra/metrics.h"
#include "egra/report.h"
#include "egra/synth.h"

namespace egra::testing {

inline std::filesystem::path golden_dir() { return EGRA_GOLDEN_DIR; }

/// Baseline transcription counts per question: (samples, exact matches).
inline const std::map<std::string, std::pair<std::size_t, std::size_t>>& baseline_counts() {
  static const std::map<std::string, std::pair<std::size_t, std::size_t>> kCounts = {
      {"d", {503, 28}},     {"ewe", {689, 282}}, {"hayi", {688, 40}}, {"hl", {423, 1}},   {"v", {796, 4}},
      {"n", {1139, 8}},     {"molo", {709, 177}}, {"kude", {557, 64}}, {"ng", {538, 2}},  {"inja", {691, 195}}};
  return kCounts;
}

/// Replayed transcripts for a release-shaped corpus: within each question the
/// first `matches` consensus-correct recordings transcribe exactly, the rest
/// come back as a different word.
inline ReplayTranscriber baseline_replay(const Corpus& corpus) {
  std::map<std::string, std::string> transcripts;
  std::map<std::string, std::size_t> used;
  for (const auto& item : apply_policy(corpus, ConsensusPolicy::kConsensus).items) {
    if (item.label != Verdict::kCorrect) continue;
    const auto& q = corpus.question(item.question_id);
    bool hit = used[q.id]++ < baseline_counts().at(q.id).second;
    // capitalized and punctuated on purpose: normalization must absorb it
    std::string text = q.text;
    text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
    transcripts[item.recording_id] = hit ? text + "." : "umm " + q.text + "o";
  }
  return ReplayTranscriber(std::move(transcripts));
}

/// Expert verdicts on the default 400-item validation set agreeing with the
/// majority on 85 AllCorrect, 70 MostlyCorrect, 55 MostlyIncorrect and 85
/// AllIncorrect items.
inline std::vector<ExpertJudgment> validation_judgments(const Corpus& corpus) {
  auto set = sample_validation_set(corpus, 10, 0);
  return synth::judgments_with_agreement(corpus, set, {85, 70, 55, 85});
}

inline std::vector<CostReport> cost_fixture() {
  CostReport tiny{"tiny", "x86_64, 1 core", 1000, {2.5, 3.5}, {0.01, 0.03}};
  CostReport ref{"hubert", "reference gpu", 1000, {343.0, 343.0}, {0.44, 0.44}};
  return {tiny, ref};
}

/// Every table built from the committed fixtures.
inline report::Tables golden_tables() {
  report::Tables t;
  Corpus corpus = synth::make_corpus(synth::released_counts(), 1.0);
  t.agreement = report::agreement_table(corpus, validation_judgments(corpus));
  t.cost = cost_fixture();
  auto samples = read_samples(golden_dir() / "fixture_results.jsonl");
  t.top_k = rank_top_k(aggregate(samples), 5);
  auto replay = baseline_replay(corpus);
  auto run = run_baseline(corpus, apply_policy(corpus, ConsensusPolicy::kConsensus), replay);
  t.asr = exact_match_accuracy(run.records);
  return t;
}

}  // namespace egra::testing

#endif  // EGRA_TESTS_REPORT_FIXTURE_H_
