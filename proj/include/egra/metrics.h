// include/egra/metrics.h

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

#ifndef EGRA_METRICS_H_
#define EGRA_METRICS_H_

#include <array>
#include <compare>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "egra/common.h"
#include "egra/experiments.h"
#include "egra/stats.h"

namespace egra {

/// A class of the multi-question label space: (question, verdict).
struct ClassLabel {
  std::string question_id;
  Verdict verdict = Verdict::kCorrect;
  bool operator==(const ClassLabel&) const = default;
};

struct ConfusionMatrix {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  std::size_t total() const { return tp + tn + fp + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Tallies the positive event "label is (question, correct)" over a test
/// split. Both maps must cover exactly the same recording ids.
ConfusionMatrix confusion(const std::map<std::string, ClassLabel>& predictions,
                          const std::map<std::string, ClassLabel>& ground_truth,
                          const std::string& question);

struct Rates {
  double de = 0.0;   // (tp + tn) / total
  double fpr = 0.0;  // fp / (fp + tn)
  double fnr = 0.0;  // fn / (tp + fn)
};

/// Throws when any denominator is zero.
Rates rates(const ConfusionMatrix& cm);

enum class Metric { kDe = 0, kFpr = 1, kFnr = 2 };
inline constexpr std::array<Metric, 3> kAllMetrics = {Metric::kDe, Metric::kFpr, Metric::kFnr};
std::string_view to_string(Metric m);
/// DE is better when higher, FPR/FNR when lower.
bool higher_is_better(Metric m);

struct ConfigKey {
  std::string model_id;
  std::size_t set_size = 0;
  std::size_t n_correct = 0;
  std::size_t n_incorrect = 0;
  auto operator<=>(const ConfigKey&) const = default;
};

struct MetricSample {
  std::string question_id;
  ConfigKey config;
  std::size_t replicate = 0;
  ConfusionMatrix cm;
  Rates rates;

  double value(Metric m) const;
};

nlohmann::json to_json(const MetricSample& s);
MetricSample metric_sample_from_json(const nlohmann::json& j);
void write_samples(const std::filesystem::path& path, std::span<const MetricSample> samples);
std::vector<MetricSample> read_samples(const std::filesystem::path& path);

/// One MetricSample per question of a planned run.
std::vector<MetricSample> evaluate_run(const PlannedRun& run,
                                       const std::map<std::string, ClassLabel>& predictions);

/// Which MetricSample fields form the group key.
struct GroupBy {
  bool model = true;
  bool set_size = true;
  bool counts = true;
  bool question = false;

  static GroupBy config() { return {}; }
  static GroupBy config_and_question() { return {true, true, true, true}; }
};

struct GroupKey {
  ConfigKey config;  // fields not grouped on are left empty / zero
  std::string question_id;
  auto operator<=>(const GroupKey&) const = default;
};

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // population
};

struct Aggregate {
  GroupKey key;
  std::size_t n = 0;
  std::array<MetricSummary, 3> summary;      // indexed by Metric
  std::array<std::vector<double>, 3> values; // raw samples, indexed by Metric

  const MetricSummary& operator[](Metric m) const { return summary[static_cast<std::size_t>(m)]; }
  const std::vector<double>& samples(Metric m) const { return values[static_cast<std::size_t>(m)]; }
};

/// Mean and population std per group, groups in key order.
std::vector<Aggregate> aggregate(std::span<const MetricSample> samples, GroupBy group_by = GroupBy::config());

inline constexpr double kSignificanceLevel = 0.05;

struct RankedRow {
  Aggregate aggregate;
  std::array<bool, 3> highlight{};  // not significantly different from the column best
  std::array<double, 3> p_value{};  // Welch p against the column best
};

/// Per model, the k best configurations by mean `metric`, models in key
/// order. Highlighting compares each cell with the best cell of its column
/// across the whole table.
std::vector<RankedRow> rank_top_k(const std::vector<Aggregate>& aggregates, std::size_t k = 5,
                                  Metric metric = Metric::kDe);

struct QuestionDistribution {
  std::string model_id;
  std::string question_id;
  stats::BoxStats de;
};

/// DE distribution per (model, question) over the selected configurations.
std::vector<QuestionDistribution> per_question_breakdown(std::span<const MetricSample> samples,
                                                         std::span<const ConfigKey> selected);

}  // namespace egra

#endif  // EGRA_METRICS_H_
