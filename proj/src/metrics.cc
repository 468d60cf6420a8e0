// src/metrics.cc

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

#include "egra/metrics.h"

#include <algorithm>
#include <fstream>

#include "egra/corpus.h"

namespace egra {

using nlohmann::json;

ConfusionMatrix confusion(const std::map<std::string, ClassLabel>& predictions,
                          const std::map<std::string, ClassLabel>& ground_truth,
                          const std::string& question) {
  if (predictions.size() != ground_truth.size())
    throw InvalidArgumentError("predictions cover " + std::to_string(predictions.size()) +
                               " recordings, ground truth " + std::to_string(ground_truth.size()));
  ConfusionMatrix cm;
  auto p = predictions.begin();
  for (const auto& [id, truth] : ground_truth) {
    if (p->first != id)
      throw InvalidArgumentError("prediction and ground-truth id sets differ (at '" + id + "')");
    const bool truth_pos = truth.question_id == question && truth.verdict == Verdict::kCorrect;
    const bool pred_pos = p->second.question_id == question && p->second.verdict == Verdict::kCorrect;
    if (truth_pos && pred_pos) ++cm.tp;
    else if (truth_pos) ++cm.fn;
    else if (pred_pos) ++cm.fp;
    else ++cm.tn;
    ++p;
  }
  return cm;
}

Rates rates(const ConfusionMatrix& cm) {
  if (cm.fp + cm.tn == 0) throw Error("FPR undefined: no negative ground truth (fp + tn = 0)");
  if (cm.tp + cm.fn == 0) throw Error("FNR undefined: no positive ground truth (tp + fn = 0)");
  Rates r;
  r.de = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
  r.fpr = static_cast<double>(cm.fp) / static_cast<double>(cm.fp + cm.tn);
  r.fnr = static_cast<double>(cm.fn) / static_cast<double>(cm.tp + cm.fn);
  return r;
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::kDe: return "de";
    case Metric::kFpr: return "fpr";
    case Metric::kFnr: return "fnr";
  }
  return "?";
}

bool higher_is_better(Metric m) { return m == Metric::kDe; }

double MetricSample::value(Metric m) const {
  switch (m) {
    case Metric::kDe: return rates.de;
    case Metric::kFpr: return rates.fpr;
    case Metric::kFnr: return rates.fnr;
  }
  return 0.0;
}

json to_json(const MetricSample& s) {
  return {{"model", s.config.model_id},
          {"set_size", s.config.set_size},
          {"n_correct", s.config.n_correct},
          {"n_incorrect", s.config.n_incorrect},
          {"replicate", s.replicate},
          {"question", s.question_id},
          {"tp", s.cm.tp},
          {"tn", s.cm.tn},
          {"fp", s.cm.fp},
          {"fn", s.cm.fn},
          {"de", s.rates.de},
          {"fpr", s.rates.fpr},
          {"fnr", s.rates.fnr}};
}

MetricSample metric_sample_from_json(const json& j) {
  MetricSample s;
  s.config.model_id = j.at("model").get<std::string>();
  s.config.set_size = j.at("set_size").get<std::size_t>();
  s.config.n_correct = j.at("n_correct").get<std::size_t>();
  s.config.n_incorrect = j.at("n_incorrect").get<std::size_t>();
  s.replicate = j.at("replicate").get<std::size_t>();
  s.question_id = j.at("question").get<std::string>();
  s.cm = {j.at("tp").get<std::size_t>(), j.at("tn").get<std::size_t>(), j.at("fp").get<std::size_t>(),
          j.at("fn").get<std::size_t>()};
  // rates are recomputed so the store cannot drift from its counts
  s.rates = rates(s.cm);
  return s;
}

void write_samples(const std::filesystem::path& path, std::span<const MetricSample> samples) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& s : samples) out << to_json(s).dump() << '\n';
}

std::vector<MetricSample> read_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("results file not found: " + path.string());
  std::vector<MetricSample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(metric_sample_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<MetricSample> evaluate_run(const PlannedRun& run,
                                       const std::map<std::string, ClassLabel>& predictions) {
  std::vector<MetricSample> out;
  for (const auto& split : run.test) {
    std::map<std::string, ClassLabel> truth, pred;
    auto add = [&](const std::string& id, Verdict v) {
      truth[id] = {split.question_id, v};
      auto it = predictions.find(id);
      if (it == predictions.end())
        throw NotFoundError("run " + run.key() + ": no prediction for test recording '" + id + "'");
      pred[id] = it->second;
    };
    for (const auto& id : split.positive_ids) add(id, Verdict::kCorrect);
    for (const auto& id : split.negative_ids) add(id, Verdict::kIncorrect);

    MetricSample s;
    s.question_id = split.question_id;
    s.config = {run.model_id, run.set_size, run.n_correct, run.n_incorrect};
    s.replicate = run.replicate;
    s.cm = confusion(pred, truth, split.question_id);
    s.rates = rates(s.cm);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Aggregate> aggregate(std::span<const MetricSample> samples, GroupBy group_by) {
  if (samples.empty()) throw InvalidArgumentError("cannot aggregate an empty sample set");
  std::map<GroupKey, Aggregate> groups;
  for (const auto& s : samples) {
    GroupKey key;
    if (group_by.model) key.config.model_id = s.config.model_id;
    if (group_by.set_size) key.config.set_size = s.config.set_size;
    if (group_by.counts) {
      key.config.n_correct = s.config.n_correct;
      key.config.n_incorrect = s.config.n_incorrect;
    }
    if (group_by.question) key.question_id = s.question_id;
    auto& agg = groups[key];
    agg.key = key;
    ++agg.n;
    for (auto m : kAllMetrics) agg.values[static_cast<std::size_t>(m)].push_back(s.value(m));
  }
  std::vector<Aggregate> out;
  out.reserve(groups.size());
  for (auto& [_, agg] : groups) {
    for (auto m : kAllMetrics) {
      const auto& v = agg.values[static_cast<std::size_t>(m)];
      agg.summary[static_cast<std::size_t>(m)] = {stats::mean(v), stats::population_std(v)};
    }
    out.push_back(std::move(agg));
  }
  return out;
}

std::vector<RankedRow> rank_top_k(const std::vector<Aggregate>& aggregates, std::size_t k, Metric metric) {
  if (k == 0) throw InvalidArgumentError("k must be positive");
  std::map<std::string, std::vector<const Aggregate*>> by_model;
  for (const auto& a : aggregates) {
    if (a.n < 2)
      throw Error("configuration of model '" + a.key.config.model_id +
                  "' has fewer than 2 samples; significance test undefined");
    by_model[a.key.config.model_id].push_back(&a);
  }

  std::vector<RankedRow> rows;
  for (auto& [model, aggs] : by_model) {
    if (aggs.size() < k)
      throw Error("model '" + model + "' has " + std::to_string(aggs.size()) +
                  " configurations, fewer than k = " + std::to_string(k));
    std::stable_sort(aggs.begin(), aggs.end(), [&](const Aggregate* a, const Aggregate* b) {
      double x = (*a)[metric].mean, y = (*b)[metric].mean;
      return higher_is_better(metric) ? x > y : x < y;
    });
    for (std::size_t i = 0; i < k; ++i) rows.push_back({*aggs[i], {}, {}});
  }

  for (auto m : kAllMetrics) {
    const auto col = static_cast<std::size_t>(m);
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      double x = rows[i].aggregate[m].mean, y = rows[best].aggregate[m].mean;
      if (higher_is_better(m) ? x > y : x < y) best = i;
    }
    for (auto& row : rows) {
      auto w = stats::welch_test(row.aggregate.samples(m), rows[best].aggregate.samples(m));
      row.p_value[col] = w.p;
      row.highlight[col] = w.p > kSignificanceLevel;
    }
  }
  return rows;
}

namespace {

std::size_t question_rank(const std::string& id) {
  const auto& qs = standard_questions();
  for (std::size_t i = 0; i < qs.size(); ++i)
    if (qs[i].id == id) return i;
  return qs.size();
}

}  // namespace

std::vector<QuestionDistribution> per_question_breakdown(std::span<const MetricSample> samples,
                                                         std::span<const ConfigKey> selected) {
  if (selected.empty()) throw InvalidArgumentError("empty configuration selection");
  std::vector<std::string> model_order;
  for (const auto& c : selected)
    if (std::find(model_order.begin(), model_order.end(), c.model_id) == model_order.end())
      model_order.push_back(c.model_id);

  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for (const auto& s : samples)
    if (std::find(selected.begin(), selected.end(), s.config) != selected.end())
      groups[{s.config.model_id, s.question_id}].push_back(s.rates.de);
  if (groups.empty()) throw Error("no samples match the selected configurations");

  std::vector<QuestionDistribution> out;
  for (auto& [key, values] : groups) out.push_back({key.first, key.second, stats::box_stats(values)});
  std::stable_sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
    auto ma = std::find(model_order.begin(), model_order.end(), a.model_id) - model_order.begin();
    auto mb = std::find(model_order.begin(), model_order.end(), b.model_id) - model_order.begin();
    if (ma != mb) return ma < mb;
    auto qa = question_rank(a.question_id), qb = question_rank(b.question_id);
    return qa != qb ? qa < qb : a.question_id < b.question_id;
  });
  return out;
}

}  // namespace egra
