// tests/acceptance/acceptance.cc

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

// Acceptance suite. Each criterion prints one PASS/FAIL line with its
// measured numbers; the process exits non-zero when any selected criterion
// fails. Run with no arguments for all criteria, or name some:
//   egra_acceptance consensus_arithmetic ranking_welch
//   egra_acceptance --list

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "egra/asr_baseline.h"
#include "egra/consensus.h"
#include "egra/encoder.h"
#include "egra/experiments.h"
#include "egra/harness.h"
#include "egra/metrics.h"
#include "egra/nn.h"
#include "egra/report.h"
#include "egra/rng.h"
#include "egra/stats.h"
#include "egra/synth.h"
#include "report_fixture.h"
#include "test_support.h"

using namespace egra;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

struct Criterion {
  std::string name;
  double limit_s;
  std::function<void(Outcome&)> run;
};

std::string pct(double fraction) { return report::format_percent(fraction); }

// ---------------------------------------------------------------------------

void consensus_arithmetic(Outcome& out) {
  testing::TempDir dir;
  Corpus synthetic = synth::make_corpus(synth::released_counts(), 1.0);
  write_manifest(dir / "labels.jsonl", synthetic);
  Corpus corpus = load_manifest(dir / "labels.jsonl");

  struct Want {
    ConsensusPolicy policy;
    std::size_t retained;
    const char* share;
  };
  const Want wants[] = {{ConsensusPolicy::kAll, 14971, "100.0"},
                        {ConsensusPolicy::kConsensus, 12747, "85.1"},
                        {ConsensusPolicy::kConsensusPlusOneIncorrect, 14235, "95.0"},
                        {ConsensusPolicy::kConsensusPlusOneCorrect, 13483, "90.0"}};
  for (const auto& w : wants) {
    RetainedSet kept = apply_policy(corpus, w.policy);
    std::string share = report::format_share(kept.items.size(), kept.considered);
    out.detail << policy_key(w.policy) << " " << kept.items.size() << " (" << share << "%) ";
    out.expect(kept.items.size() == w.retained && share == w.share && kept.considered == 14971,
               std::string(policy_key(w.policy)));
  }
  out.expect(corpus.label_count() == 44913, "label count");
}

void metric_oracle(Outcome& out) {
  Rng rng(1001);
  const std::vector<std::string> qs = {"d", "ewe", "hl", "ng"};
  std::size_t fixtures = 0, mismatches = 0;
  for (; fixtures < 2000; ++fixtures) {
    const std::string& q = qs[rng.uniform_index(qs.size())];
    std::map<std::string, ClassLabel> truth, pred;
    for (int i = 0; i < 100; ++i) {
      std::string id = "x" + std::to_string(rng.next_u64() % 1000000) + "_" + std::to_string(i);
      truth[id] = {q, i < 50 ? Verdict::kCorrect : Verdict::kIncorrect};
      // bias towards the right answer so all four cells are populated
      if (rng.uniform() < 0.6) {
        pred[id] = truth[id];
      } else {
        pred[id] = {qs[rng.uniform_index(qs.size())], rng.uniform_index(2) ? Verdict::kCorrect : Verdict::kIncorrect};
      }
    }
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
    for (const auto& [id, t] : truth) {
      const ClassLabel& p = pred.at(id);
      const bool actual = t.question_id == q && t.verdict == Verdict::kCorrect;
      const bool said = p.question_id == q && p.verdict == Verdict::kCorrect;
      tp += actual && said;
      tn += !actual && !said;
      fp += !actual && said;
      fn += actual && !said;
    }
    ConfusionMatrix cm = confusion(pred, truth, q);
    Rates r = rates(cm);
    const double de = static_cast<double>(tp + tn) / 100.0;
    const double fpr = static_cast<double>(fp) / static_cast<double>(fp + tn);
    const double fnr = static_cast<double>(fn) / static_cast<double>(fn + tp);
    if (!(cm == ConfusionMatrix{tp, tn, fp, fn}) || r.de != de || r.fpr != fpr || r.fnr != fnr) ++mismatches;
  }
  out.detail << fixtures << " fixtures, " << mismatches << " mismatches";
  out.expect(mismatches == 0, "brute-force tally");
}

void balance_disjointness(Outcome& out) {
  std::map<std::string, synth::ScenarioCounts> counts;
  for (const auto& q : standard_questions()) counts[q.id] = {420, 3, 3, 410};
  Corpus corpus = synth::make_corpus(counts, 1.0);
  LabeledPool pool(apply_policy(corpus, ConsensusPolicy::kConsensus));
  std::vector<std::string> questions;
  for (const auto& q : standard_questions()) questions.push_back(q.id);

  Rng rng(77);
  std::size_t runs = 0, splits = 0, bad_split = 0, overlap = 0, replan_diff = 0;
  const std::vector<std::size_t> sizes = {1, 3, 5, 10};
  const auto grid = full_grid();
  for (int p = 0; p < 100; ++p) {
    PlanOptions o;
    o.models = {"tiny"};
    if (rng.uniform_index(2)) o.models.push_back("other/ckpt");
    o.set_sizes = {sizes[rng.uniform_index(sizes.size())]};
    o.grid = rng.sample(grid, 1 + rng.uniform_index(2));
    o.n_replicates = 1 + rng.uniform_index(5);
    o.base_seed = rng.next_u64();
    ExperimentPlan plan = plan_experiments(pool, questions, o);
    for (const auto& run : plan.runs) {
      ++runs;
      std::set<std::string> test;
      for (const auto& t : run.test) {
        ++splits;
        std::set<std::string> here(t.positive_ids.begin(), t.positive_ids.end());
        here.insert(t.negative_ids.begin(), t.negative_ids.end());
        if (t.positive_ids.size() != 50 || t.negative_ids.size() != 50 || here.size() != 100) ++bad_split;
        test.insert(here.begin(), here.end());
      }
      for (const auto& item : run.train) overlap += test.count(item.recording_id);
    }
    if (to_json(plan_experiments(pool, questions, o)).dump() != to_json(plan).dump()) ++replan_diff;
  }
  out.detail << "100 plans, " << runs << " runs, " << splits << " splits; unbalanced " << bad_split
             << ", train/test overlaps " << overlap << ", replans differing " << replan_diff;
  out.expect(bad_split == 0, "50/50 splits");
  out.expect(overlap == 0, "train/test disjoint");
  out.expect(replan_diff == 0, "bit-identical replan");
}

void harness_learnability(Outcome& out) {
  auto make_set = [](std::size_t per_class, std::uint64_t seed, const std::string& prefix) {
    Rng rng(seed);
    std::vector<TrainExample> set;
    for (std::size_t i = 0; i < per_class; ++i) {
      for (auto [verdict, freq] : {std::pair{Verdict::kCorrect, 440.0}, std::pair{Verdict::kIncorrect, 1320.0}}) {
        synth::ToneSpec spec{freq, 1.0, 0.4, 0.3};
        set.push_back({prefix + std::to_string(set.size()), "d", verdict,
                       canonicalize({synth::tone(spec, rng), kCanonicalRateHz, 1})});
      }
    }
    return set;
  };
  auto train = make_set(50, 1, "train");
  auto test = make_set(20, 2, "test");
  TrainHyperparams hp;  // defaults: batch 4 x accumulation 2
  hp.learning_rate = 1e-3;
  hp.total_steps = 1000;
  TinyEncoder encoder(7);
  LabelSpace labels({"d"});

  auto evaluate = [&](const Classifier& c, std::vector<std::size_t>* classes) {
    std::map<std::string, ClassLabel> truth, pred;
    for (const auto& ex : test) {
      Prediction p = c.predict(ex.waveform);
      if (classes) classes->push_back(p.class_index);
      truth[ex.recording_id] = {ex.question_id, ex.label};
      pred[ex.recording_id] = {p.question_id, p.verdict};
    }
    return rates(confusion(pred, truth, "d"));
  };

  FineTuneResult a = fine_tune(encoder, train, labels, hp, 11);
  std::vector<std::size_t> classes_a, classes_b;
  Rates r = evaluate(a.classifier, &classes_a);
  FineTuneResult b = fine_tune(encoder, train, labels, hp, 11);
  evaluate(b.classifier, &classes_b);
  const bool deterministic = a.log.step_loss == b.log.step_loss && classes_a == classes_b;
  out.detail << "steps " << hp.total_steps << ", lr " << hp.learning_rate << ", loss " << a.log.initial_loss
             << " -> " << a.log.final_loss << ", held-out DE " << r.de << ", deterministic "
             << (deterministic ? "yes" : "no");
  out.expect(r.de >= 0.95, "DE >= 0.95");
  out.expect(deterministic, "same seed, same run");
}

void gradient_check(Outcome& out) {
  Rng rng(4242);
  nn::ClassifierHead head(32, {64, 32}, 6, rng);
  const double h = 1e-5;
  double worst = 0.0;
  for (int probe = 0; probe < 10; ++probe) {
    nn::Matrix frames(5 + probe, 32);
    for (Eigen::Index i = 0; i < frames.size(); ++i) frames(i) = rng.normal();
    const std::size_t target = rng.uniform_index(6);
    for (auto* p : head.parameters()) p->zero_grad();
    nn::ClassifierHead::Tape tape;
    nn::RowVector g = nn::softmax(head.logits(frames, &tape));
    g(static_cast<Eigen::Index>(target)) -= 1.0;
    head.backward(tape, g);
    // one random coordinate of every parameter tensor
    for (auto* p : head.parameters()) {
      auto i = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(p->value.size())));
      const double orig = p->value(i);
      p->value(i) = orig + h;
      const double up = nn::cross_entropy(head.logits(frames), target);
      p->value(i) = orig - h;
      const double down = nn::cross_entropy(head.logits(frames), target);
      p->value(i) = orig;
      const double numeric = (up - down) / (2 * h);
      const double err = std::abs(p->grad(i) - numeric) / std::max({std::abs(p->grad(i)), std::abs(numeric), 1e-7});
      worst = std::max(worst, err);
    }
  }
  out.detail << "10 probes, worst relative error " << worst;
  out.expect(worst < 1e-4, "relative error < 1e-4");
}

void asr_baseline(Outcome& out) {
  Corpus corpus = synth::make_corpus(synth::released_counts(), 1.0);
  auto replay = testing::baseline_replay(corpus);
  auto run = run_baseline(corpus, apply_policy(corpus, ConsensusPolicy::kConsensus), replay);
  AccuracyReport report = exact_match_accuracy(run.records);
  const std::map<std::string, double> target = {{"d", 5.57},    {"ewe", 40.93}, {"hayi", 5.81}, {"hl", 0.24},
                                                   {"v", 0.50},    {"n", 0.70},    {"molo", 24.96}, {"kude", 11.49},
                                                   {"ng", 0.37},   {"inja", 28.22}};
  std::size_t within = 0;
  for (const auto& q : report.per_question) {
    const double got = std::round(10000.0 * q.accuracy()) / 100.0;
    const bool ok = std::abs(got - target.at(q.expected_text)) <= 0.01 + 1e-9 &&
                    q.samples == testing::baseline_counts().at(q.expected_text).first;
    within += ok;
    out.expect(ok, q.expected_text + " " + pct(q.accuracy()));
  }
  const double overall = 100.0 * report.overall();
  out.detail << within << "/10 questions within 0.01 pp (e.g. ewe "
             << pct(report.per_question[3].accuracy()) << "%, hl " << pct(report.per_question[5].accuracy())
             << "%); overall " << pct(report.overall()) << "% (" << report.correct << "/" << report.samples
             << ") vs target 6.91% ";
  out.expect(std::abs(overall - 6.91) <= 0.01, "overall 6.91%");
}

void ranking_welch(Outcome& out) {
  // independent two-sided t tail: Simpson integration of the t density
  auto t_tail = [](double t, double df) {
    auto f = [df](double x) {
      return std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI) *
             std::pow(1 + x * x / df, -(df + 1) / 2);
    };
    const int n = 4000;
    const double b = std::min(std::abs(t), 60.0), h = b / n;
    double s = f(0) + f(b);
    for (int i = 1; i < n; ++i) s += f(i * h) * (i % 2 ? 4 : 2);
    return std::max(0.0, 1.0 - 2.0 * s * h / 3);
  };
  auto welch_p = [&](const std::vector<double>& a, const std::vector<double>& b) {
    auto mv = [](const std::vector<double>& x) {
      double m = 0, v = 0;
      for (double e : x) m += e;
      m /= static_cast<double>(x.size());
      for (double e : x) v += (e - m) * (e - m);
      return std::pair{m, v / static_cast<double>(x.size() - 1)};
    };
    auto [ma, va] = mv(a);
    auto [mb, vb] = mv(b);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double se2 = va / na + vb / nb;
    if (se2 == 0) return ma == mb ? 1.0 : 0.0;
    const double t = (ma - mb) / std::sqrt(se2);
    const double df = se2 * se2 / ((va / na) * (va / na) / (na - 1) + (vb / nb) * (vb / nb) / (nb - 1));
    return t_tail(t, df);
  };

  Rng rng(5150);
  std::size_t trials = 0, order_bad = 0, flag_bad = 0, self_bad = 0, borderline = 0;
  for (; trials < 20; ++trials) {
    std::vector<MetricSample> samples;
    for (const std::string model : {"m1", "m2", "m3"}) {
      for (const auto& [nc, ni] : full_grid()) {
        const double mean_de = 0.6 + 0.35 * rng.uniform(), spread = 0.01 + 0.08 * rng.uniform();
        for (std::size_t r = 0; r < 50; ++r) {
          MetricSample s;
          s.question_id = "d";
          s.config = {model, 1, nc, ni};
          s.replicate = r;
          s.rates.de = mean_de + spread * rng.normal();
          s.rates.fpr = 0.2 + 0.05 * rng.normal();
          s.rates.fnr = 0.2 + 0.05 * rng.normal();
          samples.push_back(s);
        }
      }
    }
    auto aggs = aggregate(samples);
    auto rows = rank_top_k(aggs, 5);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& key = rows[i].aggregate.key.config;
      // k-th best mean of this model, recomputed
      std::vector<double> means;
      for (const auto& a : aggs)
        if (a.key.config.model_id == key.model_id) means.push_back(a[Metric::kDe].mean);
      std::sort(means.rbegin(), means.rend());
      if (rows[i].aggregate[Metric::kDe].mean != means[i % 5]) ++order_bad;
    }
    for (auto m : kAllMetrics) {
      const auto col = static_cast<std::size_t>(m);
      std::size_t best = 0;
      for (std::size_t i = 1; i < rows.size(); ++i) {
        const double x = rows[i].aggregate[m].mean, y = rows[best].aggregate[m].mean;
        if (higher_is_better(m) ? x > y : x < y) best = i;
      }
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const double p = welch_p(rows[i].aggregate.samples(m), rows[best].aggregate.samples(m));
        if (std::abs(p - kSignificanceLevel) < 1e-6) {
          ++borderline;
          continue;
        }
        if ((p > kSignificanceLevel) != rows[i].highlight[col]) ++flag_bad;
        if (i == best && (rows[i].p_value[col] != 1.0 || !rows[i].highlight[col])) ++self_bad;
      }
    }
  }
  std::vector<double> same;
  for (int i = 0; i < 50; ++i) same.push_back(0.8 + 0.05 * rng.normal());
  const double self_p = stats::welch_test(same, same).p;
  out.detail << trials << " tables x 15 rows; order errors " << order_bad << ", highlight disagreements "
             << flag_bad << ", self-comparison p " << self_p << " (column bests off " << self_bad << ")";
  out.expect(order_bad == 0, "order by mean DE");
  out.expect(flag_bad == 0, "highlighting matches independent Welch");
  out.expect(self_p == 1.0 && self_bad == 0, "self p = 1");
}

void validation_sampling(Outcome& out) {
  Corpus corpus = synth::make_uniform_corpus(25, 1.0);
  auto a = sample_validation_set(corpus, 10, 2024);
  auto b = sample_validation_set(corpus, 10, 2024);
  std::map<std::pair<std::string, ScenarioClass>, std::size_t> per;
  for (const auto& id : a) {
    const Recording& r = corpus.recording(id);
    ++per[{r.question_id, classify_scenario(r.labels)}];
  }
  bool ten_each = per.size() == 40;
  for (const auto& [_, n] : per) ten_each = ten_each && n == 10;
  const std::set<std::string> unique(a.begin(), a.end());
  out.detail << a.size() << " ids, " << unique.size() << " distinct, " << per.size() << " strata, reproducible "
             << (a == b ? "yes" : "no");
  out.expect(a.size() == 400 && unique.size() == 400, "400 distinct ids");
  out.expect(ten_each, "10 per (question, scenario)");
  out.expect(a == b, "reproducible per seed");
}

void report_goldens(Outcome& out) {
  testing::TempDir dir;
  auto files = report::export_tables(testing::golden_tables(), dir.path());
  auto samples = read_samples(testing::golden_dir() / "fixture_results.jsonl");
  auto scatter = report::render_scatter(aggregate(samples), dir / "fpr_fnr_scatter");
  const std::vector<std::pair<std::filesystem::path, std::string>> pairs = {
      {files.agreement, "table1_agreement.csv"}, {files.cost, "table2_cost.csv"},
      {files.top_k, "table3_top_k.csv"},         {files.asr, "table4_asr.csv"},
      {scatter.files.csv, "fpr_fnr_scatter.csv"}};
  std::size_t identical = 0;
  for (const auto& [got, golden] : pairs) {
    const bool same = testing::read_text(got) == testing::read_text(testing::golden_dir() / golden);
    identical += same;
    out.expect(same, golden);
  }
  out.detail << identical << "/" << pairs.size() << " files byte-identical";
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> kAll = {
      {"consensus_arithmetic", 1.0, consensus_arithmetic},
      {"metric_oracle", 10.0, metric_oracle},
      {"balance_disjointness", 30.0, balance_disjointness},
      {"harness_learnability", 600.0, harness_learnability},
      {"gradient_check", 10.0, gradient_check},
      {"asr_baseline", 1.0, asr_baseline},
      {"ranking_welch", 5.0, ranking_welch},
      {"validation_sampling", 1.0, validation_sampling},
      {"report_goldens", 5.0, report_goldens},
  };
  return kAll;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> selected(argv + 1, argv + argc);
  if (selected.size() == 1 && selected[0] == "--list") {
    for (const auto& c : criteria()) std::cout << c.name << "\n";
    return 0;
  }
  for (const auto& name : selected) {
    bool known = false;
    for (const auto& c : criteria()) known = known || c.name == name;
    if (!known) {
      std::cerr << "unknown criterion '" << name << "' (see --list)\n";
      return 2;
    }
  }
  int failures = 0;
  for (const auto& c : criteria()) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.name) == selected.end()) continue;
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << "[exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= c.limit_s) {
      out.pass = false;
      out.detail << "[over time limit]";
    }
    char timing[64];
    std::snprintf(timing, sizeof timing, "(%.3f s, limit %.0f s)", secs, c.limit_s);
    std::cout << (out.pass ? "PASS " : "FAIL ") << c.name << " " << timing << ": " << out.detail.str() << std::endl;
    failures += !out.pass;
  }
  return failures == 0 ? 0 : 1;
}
