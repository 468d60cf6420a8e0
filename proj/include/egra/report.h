// include/egra/report.h

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

#ifndef EGRA_REPORT_H_
#define EGRA_REPORT_H_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egra/asr_baseline.h"
#include "egra/consensus.h"
#include "egra/corpus.h"
#include "egra/harness.h"
#include "egra/metrics.h"
#include "egra/stats.h"

namespace egra::report {

enum class FigureKind {
  kFprFnrScatter,
  kDeBoxplotLimited,
  kPerQuestionBoxplot,
  kDistributionBars,
  kAgreementBars,
};

std::string_view to_string(FigureKind kind);
FigureKind parse_figure_kind(std::string_view name);

/// Every figure writes `<stem>.svg` and the numbers behind it as `<stem>.csv`.
struct FigureFiles {
  std::filesystem::path svg;
  std::filesystem::path csv;
};

struct ScatterDot {
  ConfigKey config;
  double fpr = 0.0, fnr = 0.0, de = 0.0;
  double pooled_std = 0.0;  // sqrt((std_fpr^2 + std_fnr^2) / 2)
  double radius = 0.0;      // dot area grows linearly with pooled_std
  bool best_de = false;     // argmax mean DE within its model
};

struct ScatterFigure {
  FigureFiles files;
  std::vector<ScatterDot> dots;
};

inline constexpr double kMinDotArea = 12.0;         // px^2 at zero spread
inline constexpr double kDotAreaPerStd = 4000.0;    // px^2 per unit pooled std

/// One dot per configuration at (mean FPR, mean FNR).
ScatterFigure render_scatter(const std::vector<Aggregate>& aggregates, const std::filesystem::path& stem);

struct BoxGroup {
  std::string label;
  stats::BoxStats box;
};

struct BoxFigure {
  FigureFiles files;
  std::vector<BoxGroup> groups;
};

/// DE boxes per question-set size over samples trained with 50 or 100
/// examples per class. `model` restricts to one backbone when non-empty.
BoxFigure render_limited_data_boxplot(std::span<const MetricSample> samples, const std::string& model,
                                      const std::filesystem::path& stem);

BoxFigure render_per_question_boxplot(std::span<const QuestionDistribution> distributions,
                                      const std::filesystem::path& stem);

FigureFiles render_distribution_bars(const Corpus& corpus, const DistributionSummary& summary,
                                     const std::filesystem::path& stem);

struct Table1Row {
  ConsensusPolicy policy = ConsensusPolicy::kAll;
  AgreementCount agreement;       // over judged recordings
  std::size_t retained = 0;       // corpus recordings kept by the policy
  std::size_t total = 0;          // fully labeled corpus recordings
};

/// Rows in the order All, Consensus, +one incorrect, +one correct.
std::vector<Table1Row> agreement_table(const Corpus& corpus, std::span<const ExpertJudgment> judgments);

using QuestionAgreement = std::map<ConsensusPolicy, std::map<std::string, AgreementCount>>;
QuestionAgreement agreement_per_question(const Corpus& corpus, std::span<const ExpertJudgment> judgments);

FigureFiles render_agreement_bars(const Corpus& corpus, const QuestionAgreement& agreement,
                                  const std::filesystem::path& stem);

/// "85.1" for 12747 of 14971: one decimal, truncated.
std::string format_share(std::size_t part, std::size_t total);
/// Fraction in [0,1] as a percentage with two decimals, e.g. "92.22".
std::string format_percent(double fraction);
std::string format_fixed(double value, int decimals);

struct Tables {
  std::vector<Table1Row> agreement;
  std::vector<CostReport> cost;
  std::vector<RankedRow> top_k;
  std::optional<AccuracyReport> asr;
};

struct TableFiles {
  std::filesystem::path agreement, cost, top_k, asr;
};

/// Writes table1_agreement.csv, table2_cost.csv, table3_top_k.csv and
/// table4_asr.csv. Missing inputs produce header-only files.
TableFiles export_tables(const Tables& tables, const std::filesystem::path& out_dir);

std::string agreement_csv(std::span<const Table1Row> rows);
std::string cost_csv(std::span<const CostReport> rows);
std::string top_k_csv(std::span<const RankedRow> rows);
std::string asr_csv(const std::optional<AccuracyReport>& report);

}  // namespace egra::report

#endif  // EGRA_REPORT_H_
