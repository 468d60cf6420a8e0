// include/egra/experiments.h

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

#ifndef EGRA_EXPERIMENTS_H_
#define EGRA_EXPERIMENTS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "egra/consensus.h"

namespace egra {

/// Consensus-labeled recording ids per question, split by label. Built from
/// the output of apply_policy(corpus, kConsensus).
class LabeledPool {
 public:
  LabeledPool() = default;
  explicit LabeledPool(const RetainedSet& retained);

  const std::vector<std::string>& positives(const std::string& question) const;
  const std::vector<std::string>& negatives(const std::string& question) const;
  std::vector<std::string> questions() const;

 private:
  std::map<std::string, std::pair<std::vector<std::string>, std::vector<std::string>>> by_question_;
  std::vector<std::string> empty_;
};

inline constexpr std::size_t kTestPerClass = 50;

struct TestSplit {
  std::string question_id;
  std::vector<std::string> positive_ids;
  std::vector<std::string> negative_ids;
  std::uint64_t seed = 0;
};

/// Uniform draw without replacement of `per_class` positives and negatives.
TestSplit make_test_split(const LabeledPool& pool, const std::string& question,
                          std::uint64_t seed, std::size_t per_class = kTestPerClass);

struct TrainConfig {
  std::size_t n_correct = 50;
  std::size_t n_incorrect = 50;
  std::vector<std::string> question_set;
  std::uint64_t seed = 0;
};

struct TrainingItem {
  std::string recording_id;
  std::string question_id;
  Verdict label = Verdict::kCorrect;
  bool operator==(const TrainingItem&) const = default;
};

/// Per question in the config, n_correct positives and n_incorrect negatives
/// drawn from what remains after removing `excluded` ids.
std::vector<TrainingItem> make_train_sample(const LabeledPool& pool, const TrainConfig& config,
                                            const std::set<std::string>& excluded);

/// Seeded disjoint partition of `questions` into groups of `set_size`; the
/// last group is smaller when the sizes do not divide evenly.
std::vector<std::vector<std::string>> make_question_sets(std::vector<std::string> questions,
                                                         std::size_t set_size, std::uint64_t seed);

using GridCell = std::pair<std::size_t, std::size_t>;  // (n_correct, n_incorrect)

/// {50,100,200,300} x {50,100,200,300}.
std::vector<GridCell> full_grid();
/// "full" or a comma list of CxI cells such as "50x50,300x200".
std::vector<GridCell> parse_grid(const std::string& spec);

struct PlanOptions {
  std::vector<std::string> models;
  std::vector<std::size_t> set_sizes = {1};
  std::vector<GridCell> grid = full_grid();
  std::size_t n_replicates = 5;
  std::uint64_t base_seed = 0;
  std::size_t test_per_class = kTestPerClass;
};

struct PlannedRun {
  std::string model_id;
  std::size_t set_size = 1;
  std::size_t n_correct = 0;
  std::size_t n_incorrect = 0;
  std::vector<std::string> question_set;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::vector<TrainingItem> train;
  std::vector<TestSplit> test;  // one per question in question_set

  std::string key() const;  // stable directory-safe identifier
};

struct ExperimentPlan {
  std::vector<PlannedRun> runs;
};

/// Full cross product models x question groups x grid x replicates. Test
/// splits are drawn once per (replicate, question) and shared by every run of
/// that replicate; training samples exclude them.
ExperimentPlan plan_experiments(const LabeledPool& pool, const std::vector<std::string>& questions,
                                const PlanOptions& options);

/// Closed-form run count for a plan over `n_questions` questions.
std::size_t expected_run_count(std::size_t n_questions, const PlanOptions& options);

nlohmann::json to_json(const ExperimentPlan& plan);
ExperimentPlan plan_from_json(const nlohmann::json& j);
void write_plan(const std::filesystem::path& path, const ExperimentPlan& plan);
ExperimentPlan read_plan(const std::filesystem::path& path);

}  // namespace egra

#endif  // EGRA_EXPERIMENTS_H_
