// tests/unit/metrics_test.cc

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

#include <doctest.h>

#include <cmath>

#include "egra/metrics.h"
#include "egra/rng.h"
#include "test_support.h"

using namespace egra;

namespace {

struct Fixture {
  std::map<std::string, ClassLabel> truth, pred;
};

// Balanced 100-item split for question "d"; predictions may name any of
// three questions.
Fixture random_fixture(Rng& rng) {
  const std::vector<std::string> qs = {"d", "v", "n"};
  Fixture f;
  for (int i = 0; i < 100; ++i) {
    std::string id = "r" + std::to_string(i);
    f.truth[id] = {"d", i < 50 ? Verdict::kCorrect : Verdict::kIncorrect};
    f.pred[id] = {qs[rng.uniform_index(3)], rng.uniform_index(2) ? Verdict::kCorrect : Verdict::kIncorrect};
  }
  return f;
}

MetricSample sample(const std::string& model, std::size_t nc, double de, std::size_t rep, const std::string& q = "d") {
  MetricSample s;
  s.question_id = q;
  s.config = {model, 1, nc, 50};
  s.replicate = rep;
  s.rates.de = de;
  s.rates.fpr = 1 - de;
  s.rates.fnr = (1 - de) / 2;
  return s;
}

}  // namespace

TEST_CASE("confusion: constant and oracle predictors") {
  Rng rng(1);
  Fixture f = random_fixture(rng);
  auto all_pos = f.pred;
  for (auto& [id, l] : all_pos) l = {"d", Verdict::kCorrect};
  CHECK(confusion(all_pos, f.truth, "d") == ConfusionMatrix{50, 0, 50, 0});
  CHECK(confusion(f.truth, f.truth, "d") == ConfusionMatrix{50, 50, 0, 0});
}

TEST_CASE("confusion: brute-force tally on random fixtures") {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    Fixture f = random_fixture(rng);
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
    for (const auto& [id, t] : f.truth) {
      const auto& p = f.pred.at(id);
      bool truth_pos = t.question_id == "d" && t.verdict == Verdict::kCorrect;
      bool pred_pos = p.question_id == "d" && p.verdict == Verdict::kCorrect;
      if (truth_pos && pred_pos) ++tp;
      if (!truth_pos && !pred_pos) ++tn;
      if (!truth_pos && pred_pos) ++fp;
      if (truth_pos && !pred_pos) ++fn;
    }
    CHECK(confusion(f.pred, f.truth, "d") == ConfusionMatrix{tp, tn, fp, fn});
  }
}

TEST_CASE("confusion: mismatched id sets") {
  Rng rng(3);
  Fixture f = random_fixture(rng);
  auto fewer = f.pred;
  fewer.erase("r7");
  CHECK_THROWS_AS(confusion(fewer, f.truth, "d"), InvalidArgumentError);
  fewer["zz"] = {"d", Verdict::kCorrect};
  CHECK_THROWS_AS(confusion(fewer, f.truth, "d"), InvalidArgumentError);
}

TEST_CASE("rates") {
  Rates r = rates({50, 50, 0, 0});
  CHECK(r.de == 1.0);
  CHECK(r.fpr == 0.0);
  CHECK(r.fnr == 0.0);
  Rates s = rates({46, 45, 5, 4});
  CHECK(s.de == doctest::Approx(0.91));
  CHECK(s.fpr == doctest::Approx(0.10));
  CHECK(s.fnr == doctest::Approx(0.08));
  CHECK_THROWS_AS(rates({10, 0, 0, 5}), Error);
  CHECK_THROWS_AS(rates({0, 10, 5, 0}), Error);
}

TEST_CASE("aggregate") {
  std::vector<MetricSample> two = {sample("m", 50, 0.9, 0), sample("m", 50, 0.7, 1)};
  auto a = aggregate(two);
  REQUIRE(a.size() == 1);
  CHECK(a[0].n == 2);
  CHECK(a[0][Metric::kDe].mean == doctest::Approx(0.8));
  CHECK(a[0][Metric::kDe].std == doctest::Approx(0.1));

  std::vector<MetricSample> same(5, sample("m", 50, 0.6, 0));
  CHECK(aggregate(same)[0][Metric::kDe].std == 0.0);

  Rng rng(4);
  std::vector<MetricSample> many;
  std::vector<double> des;
  for (int i = 0; i < 50; ++i) {
    double de = 0.5 + 0.4 * rng.uniform();
    des.push_back(de);
    many.push_back(sample("m", 100, de, i % 5, i % 2 ? "d" : "v"));
  }
  double m = 0;
  for (double x : des) m += x / des.size();
  double var = 0;
  for (double x : des) var += (x - m) * (x - m) / des.size();
  auto b = aggregate(many);
  REQUIRE(b.size() == 1);
  CHECK(b[0][Metric::kDe].mean == doctest::Approx(m).epsilon(1e-12));
  CHECK(b[0][Metric::kDe].std == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
  CHECK(aggregate(many, GroupBy::config_and_question()).size() == 2);
  CHECK_THROWS_AS(aggregate(std::vector<MetricSample>{}), InvalidArgumentError);
}

TEST_CASE("rank_top_k: ordering, self comparison and separation") {
  Rng rng(6);
  std::vector<MetricSample> samples;
  const double means[] = {0.9, 0.5, 0.7, 0.88, 0.6, 0.8};
  for (std::size_t c = 0; c < 6; ++c)
    for (int i = 0; i < 50; ++i) samples.push_back(sample("m", 50 * (c + 1), means[c] + 0.01 * rng.normal(), i));
  auto rows = rank_top_k(aggregate(samples), 5);
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(rows[i - 1].aggregate[Metric::kDe].mean >= rows[i].aggregate[Metric::kDe].mean);
  CHECK(rows[0].aggregate.key.config.n_correct == 50);
  CHECK(rows[0].p_value[0] == 1.0);
  CHECK(rows[0].highlight[0]);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK_FALSE(rows[i].highlight[0]);
  CHECK_THROWS_AS(rank_top_k(aggregate(samples), 7), Error);
  CHECK_THROWS_AS(rank_top_k(aggregate(samples), 0), InvalidArgumentError);
}

TEST_CASE("metric samples JSON round trip") {
  testing::TempDir dir;
  MetricSample s;
  s.question_id = "hayi";
  s.config = {"tiny", 3, 300, 200};
  s.replicate = 4;
  s.cm = {46, 45, 5, 4};
  s.rates = rates(s.cm);
  write_samples(dir / "r.jsonl", std::vector<MetricSample>{s});
  auto back = read_samples(dir / "r.jsonl");
  REQUIRE(back.size() == 1);
  CHECK(back[0].cm == s.cm);
  CHECK(back[0].config == s.config);
  CHECK(back[0].rates.de == s.rates.de);
  CHECK_THROWS_AS(read_samples(dir / "none.jsonl"), NotFoundError);
}

TEST_CASE("evaluate_run") {
  PlannedRun run;
  run.model_id = "tiny";
  run.question_set = {"d", "v"};
  run.n_correct = run.n_incorrect = 50;
  std::map<std::string, ClassLabel> preds;
  for (const auto& q : run.question_set) {
    TestSplit t;
    t.question_id = q;
    for (int i = 0; i < 3; ++i) {
      t.positive_ids.push_back(q + "p" + std::to_string(i));
      t.negative_ids.push_back(q + "n" + std::to_string(i));
      preds[q + "p" + std::to_string(i)] = {q, Verdict::kCorrect};
      // negatives predicted as the other question's positive class
      preds[q + "n" + std::to_string(i)] = {q == "d" ? "v" : "d", Verdict::kCorrect};
    }
    run.test.push_back(t);
  }
  auto s = evaluate_run(run, preds);
  REQUIRE(s.size() == 2);
  CHECK(s[0].cm == ConfusionMatrix{3, 3, 0, 0});
  preds.erase("vp1");
  CHECK_THROWS_AS(evaluate_run(run, preds), NotFoundError);
}

TEST_CASE("per_question_breakdown") {
  std::vector<MetricSample> samples = {sample("m", 50, 0.8, 0, "d"), sample("m", 50, 0.6, 1, "d"),
                                       sample("m", 100, 0.7, 0, "d"), sample("m", 50, 0.9, 0, "v"),
                                       sample("x", 50, 0.1, 0, "d")};
  std::vector<ConfigKey> sel = {{"m", 1, 50, 50}};
  auto d = per_question_breakdown(samples, sel);
  REQUIRE(d.size() == 2);
  CHECK(d[0].question_id == "d");
  CHECK(d[0].de.n == 2);
  CHECK(d[0].de.median == doctest::Approx(0.7));
  CHECK(d[1].de.q1 == d[1].de.q3);
  CHECK_THROWS_AS(per_question_breakdown(samples, {}), InvalidArgumentError);
}
