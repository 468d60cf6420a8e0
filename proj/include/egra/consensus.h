// include/egra/consensus.h

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

#ifndef EGRA_CONSENSUS_H_
#define EGRA_CONSENSUS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egra/corpus.h"

namespace egra {

/// Which marking scenarios are kept for training, and with what label.
enum class ConsensusPolicy { kAll, kConsensus, kConsensusPlusOneIncorrect, kConsensusPlusOneCorrect };

inline constexpr std::array<ConsensusPolicy, 4> kAllPolicies = {
    ConsensusPolicy::kAll, ConsensusPolicy::kConsensus,
    ConsensusPolicy::kConsensusPlusOneIncorrect, ConsensusPolicy::kConsensusPlusOneCorrect};

/// CLI spelling: all | consensus | consensus+1i | consensus+1c
std::string_view policy_key(ConsensusPolicy p);
/// Human-readable condition name, e.g. "Consensus & one incorrect".
std::string_view policy_display_name(ConsensusPolicy p);
ConsensusPolicy parse_policy(std::string_view key);

/// Maps three verdicts from distinct markers to their agreement pattern.
ScenarioClass classify_scenario(std::span<const MarkerLabel> labels);

/// The unanimous verdict, or nullopt when the markers disagree.
std::optional<Verdict> consensus_label(std::span<const MarkerLabel> labels);

/// Training label a policy assigns to a scenario, or nullopt if dropped.
std::optional<Verdict> policy_label(ScenarioClass scenario, ConsensusPolicy policy);

struct LabeledRecording {
  std::string recording_id;
  std::string question_id;
  Verdict label = Verdict::kCorrect;
};

struct RetainedSet {
  ConsensusPolicy policy = ConsensusPolicy::kConsensus;
  std::vector<LabeledRecording> items;  // corpus order
  std::size_t considered = 0;           // fully labeled recordings examined
};

/// Keeps the recordings a policy retains, each with its training label.
/// Recordings without exactly three labels are skipped.
RetainedSet apply_policy(const Corpus& corpus, ConsensusPolicy policy);

/// Stratified blind sample: `per_scenario` recordings from each
/// (question, scenario) stratum, so 4 * per_scenario per question, returned
/// in one shuffled order. Throws when a stratum is understocked.
std::vector<std::string> sample_validation_set(const Corpus& corpus, std::size_t per_scenario,
                                               std::uint64_t seed);

struct ExpertJudgment {
  std::string recording_id;
  Verdict verdict = Verdict::kCorrect;
  std::string judged_at;
};

/// Latest verdict per recording; later entries override earlier ones.
std::map<std::string, Verdict> latest_verdicts(std::span<const ExpertJudgment> judgments);

std::vector<ExpertJudgment> read_judgments(const std::filesystem::path& path);
std::string judgment_line(const ExpertJudgment& j);

struct AgreementCount {
  std::size_t agreed = 0;
  std::size_t retained = 0;  // judged recordings the policy keeps

  /// agreed / retained; throws on an empty denominator.
  double rate() const;
  std::optional<double> rate_or_null() const {
    return retained == 0 ? std::nullopt : std::optional<double>(rate());
  }
};

/// Agreement between the expert and the policy label over the judged
/// recordings the policy retains. Throws when nothing is retained.
AgreementCount agreement_rate(const Corpus& corpus, std::span<const ExpertJudgment> judgments,
                              ConsensusPolicy policy);

/// Same tally as agreement_rate without the empty-denominator check.
AgreementCount tally_agreement(const Corpus& corpus, const std::map<std::string, Verdict>& verdicts,
                               ConsensusPolicy policy, const std::string* question = nullptr);

/// agreement_rate grouped by question. Every question with at least one
/// judged recording gets an entry; throws if no question has a denominator.
std::map<std::string, AgreementCount> agreement_by_question(
    const Corpus& corpus, std::span<const ExpertJudgment> judgments, ConsensusPolicy policy);

}  // namespace egra

#endif  // EGRA_CONSENSUS_H_
