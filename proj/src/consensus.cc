// src/consensus.cc

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

#include "egra/consensus.h"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "egra/rng.h"

namespace egra {

using nlohmann::json;

std::string_view policy_key(ConsensusPolicy p) {
  switch (p) {
    case ConsensusPolicy::kAll: return "all";
    case ConsensusPolicy::kConsensus: return "consensus";
    case ConsensusPolicy::kConsensusPlusOneIncorrect: return "consensus+1i";
    case ConsensusPolicy::kConsensusPlusOneCorrect: return "consensus+1c";
  }
  return "?";
}

std::string_view policy_display_name(ConsensusPolicy p) {
  switch (p) {
    case ConsensusPolicy::kAll: return "All data";
    case ConsensusPolicy::kConsensus: return "Consensus";
    case ConsensusPolicy::kConsensusPlusOneIncorrect: return "Consensus & one incorrect";
    case ConsensusPolicy::kConsensusPlusOneCorrect: return "Consensus & one correct";
  }
  return "?";
}

ConsensusPolicy parse_policy(std::string_view key) {
  for (auto p : kAllPolicies)
    if (policy_key(p) == key) return p;
  throw InvalidArgumentError("unknown consensus policy '" + std::string(key) +
                             "' (expected all|consensus|consensus+1i|consensus+1c)");
}

namespace {

void require_three_distinct(std::span<const MarkerLabel> labels) {
  if (labels.size() != kMarkersPerRecording)
    throw InvalidArgumentError("expected exactly 3 marker labels, got " +
                               std::to_string(labels.size()));
  if (labels[0].marker_id == labels[1].marker_id || labels[0].marker_id == labels[2].marker_id ||
      labels[1].marker_id == labels[2].marker_id)
    throw InvalidArgumentError("marker labels must come from three distinct markers");
}

}  // namespace

ScenarioClass classify_scenario(std::span<const MarkerLabel> labels) {
  require_three_distinct(labels);
  auto incorrect = std::count_if(labels.begin(), labels.end(), [](const MarkerLabel& l) {
    return l.verdict == Verdict::kIncorrect;
  });
  return static_cast<ScenarioClass>(incorrect);
}

std::optional<Verdict> consensus_label(std::span<const MarkerLabel> labels) {
  switch (classify_scenario(labels)) {
    case ScenarioClass::kAllCorrect: return Verdict::kCorrect;
    case ScenarioClass::kAllIncorrect: return Verdict::kIncorrect;
    default: return std::nullopt;
  }
}

std::optional<Verdict> policy_label(ScenarioClass scenario, ConsensusPolicy policy) {
  switch (scenario) {
    case ScenarioClass::kAllCorrect: return Verdict::kCorrect;
    case ScenarioClass::kAllIncorrect: return Verdict::kIncorrect;
    case ScenarioClass::kMostlyCorrect:
      if (policy == ConsensusPolicy::kAll || policy == ConsensusPolicy::kConsensusPlusOneIncorrect)
        return Verdict::kCorrect;
      return std::nullopt;
    case ScenarioClass::kMostlyIncorrect:
      if (policy == ConsensusPolicy::kAll || policy == ConsensusPolicy::kConsensusPlusOneCorrect)
        return Verdict::kIncorrect;
      return std::nullopt;
  }
  return std::nullopt;
}

RetainedSet apply_policy(const Corpus& corpus, ConsensusPolicy policy) {
  RetainedSet out;
  out.policy = policy;
  for (const auto& r : corpus.recordings()) {
    if (!r.fully_labeled()) continue;
    ++out.considered;
    if (auto label = policy_label(classify_scenario(r.labels), policy))
      out.items.push_back({r.id, r.question_id, *label});
  }
  return out;
}

std::vector<std::string> sample_validation_set(const Corpus& corpus, std::size_t per_scenario,
                                               std::uint64_t seed) {
  if (per_scenario == 0) throw InvalidArgumentError("per_scenario must be positive");

  std::map<std::string, std::array<std::vector<std::string>, kScenarioCount>> strata;
  for (const auto& r : corpus.recordings()) {
    if (!r.fully_labeled()) continue;
    strata[r.question_id][static_cast<std::size_t>(classify_scenario(r.labels))].push_back(r.id);
  }

  std::vector<std::string> chosen;
  chosen.reserve(corpus.questions().size() * kScenarioCount * per_scenario);
  for (const auto& q : corpus.questions()) {
    for (std::size_t s = 0; s < kScenarioCount; ++s) {
      const auto& stratum = strata[q.id][s];
      if (stratum.size() < per_scenario)
        throw Error("validation stratum (" + q.id + ", " +
                    std::string(to_string(static_cast<ScenarioClass>(s))) + ") has " +
                    std::to_string(stratum.size()) + " recordings, needs " +
                    std::to_string(per_scenario));
      Rng rng(SeedHasher(seed).add(q.id).add(static_cast<std::int64_t>(s)).finish());
      auto picked = rng.sample(stratum, per_scenario);
      chosen.insert(chosen.end(), picked.begin(), picked.end());
    }
  }
  Rng order(SeedHasher(seed).add("presentation-order").finish());
  order.shuffle(chosen);
  return chosen;
}

std::map<std::string, Verdict> latest_verdicts(std::span<const ExpertJudgment> judgments) {
  std::map<std::string, Verdict> out;
  for (const auto& j : judgments) out[j.recording_id] = j.verdict;
  return out;
}

std::vector<ExpertJudgment> read_judgments(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("judgments file not found: " + path.string());
  std::vector<ExpertJudgment> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = json::parse(line);
      ExpertJudgment e;
      e.recording_id = j.at("recording_id").get<std::string>();
      e.verdict = verdict_from_string(j.at("verdict").get<std::string>());
      if (auto it = j.find("judged_at"); it != j.end() && it->is_string())
        e.judged_at = it->get<std::string>();
      out.push_back(std::move(e));
    } catch (const std::exception& e) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string judgment_line(const ExpertJudgment& j) {
  return json{{"recording_id", j.recording_id},
              {"verdict", to_string(j.verdict)},
              {"judged_at", j.judged_at}}
      .dump();
}

double AgreementCount::rate() const {
  if (retained == 0) throw Error("agreement rate undefined: no judged recording is retained");
  return static_cast<double>(agreed) / static_cast<double>(retained);
}

AgreementCount tally_agreement(const Corpus& corpus, const std::map<std::string, Verdict>& verdicts,
                               ConsensusPolicy policy, const std::string* question) {
  AgreementCount count;
  for (const auto& [id, verdict] : verdicts) {
    const Recording& r = corpus.recording(id);
    if (question && r.question_id != *question) continue;
    if (!r.fully_labeled())
      throw Error("judged recording '" + id + "' does not carry three marker labels");
    auto label = policy_label(classify_scenario(r.labels), policy);
    if (!label) continue;
    ++count.retained;
    if (*label == verdict) ++count.agreed;
  }
  return count;
}

AgreementCount agreement_rate(const Corpus& corpus, std::span<const ExpertJudgment> judgments,
                              ConsensusPolicy policy) {
  AgreementCount count = tally_agreement(corpus, latest_verdicts(judgments), policy);
  if (count.retained == 0)
    throw Error("agreement rate undefined: no judged recording is retained by policy '" +
                std::string(policy_key(policy)) + "'");
  return count;
}

std::map<std::string, AgreementCount> agreement_by_question(
    const Corpus& corpus, std::span<const ExpertJudgment> judgments, ConsensusPolicy policy) {
  auto verdicts = latest_verdicts(judgments);
  std::map<std::string, AgreementCount> out;
  std::size_t total_retained = 0;
  for (const auto& q : corpus.questions()) {
    bool judged = std::any_of(verdicts.begin(), verdicts.end(), [&](const auto& kv) {
      return corpus.recording(kv.first).question_id == q.id;
    });
    if (!judged) continue;
    out[q.id] = tally_agreement(corpus, verdicts, policy, &q.id);
    total_retained += out[q.id].retained;
  }
  if (total_retained == 0)
    throw Error("agreement rate undefined: no judged recording is retained by policy '" +
                std::string(policy_key(policy)) + "'");
  return out;
}

}  // namespace egra
