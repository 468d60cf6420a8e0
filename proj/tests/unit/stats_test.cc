// tests/unit/stats_test.cc

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

#include <algorithm>
#include <cmath>

#include "egra/common.h"
#include "egra/rng.h"
#include "egra/stats.h"

using namespace egra;
using namespace egra::stats;

namespace {

// Two-sided Student-t tail by Simpson integration of the density; slow but
// independent of the library implementation.
double t_two_sided(double t, double df) {
  auto density = [df](double x) {
    return std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI) *
           std::pow(1 + x * x / df, -(df + 1) / 2);
  };
  const double a = 0, b = std::abs(t);
  const int n = 20000;
  const double h = (b - a) / n;
  double s = density(a) + density(b);
  for (int i = 1; i < n; ++i) s += density(a + i * h) * (i % 2 ? 4 : 2);
  return 1.0 - 2.0 * (s * h / 3);
}

}  // namespace

TEST_CASE("mean, std and variance") {
  std::vector<double> xs = {0.9, 0.7};
  CHECK(mean(xs) == doctest::Approx(0.8));
  CHECK(population_std(xs) == doctest::Approx(0.1));
  CHECK(sample_variance(xs) == doctest::Approx(0.02));
  std::vector<double> same(7, 0.42);
  CHECK(population_std(same) == 0.0);
  CHECK_THROWS_AS(mean({}), InvalidArgumentError);
  CHECK_THROWS_AS(sample_variance(std::vector<double>{1.0}), InvalidArgumentError);
}

TEST_CASE("quantiles and box stats against a sort oracle") {
  CHECK(box_stats({0.5}).q1 == 0.5);
  CHECK(box_stats({0.5}).q3 == 0.5);
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v;
    std::size_t n = 1 + rng.uniform_index(40);
    for (std::size_t i = 0; i < n; ++i) v.push_back(rng.uniform_index(2) ? 0.2 + 0.01 * rng.normal() : 0.9 + 0.01 * rng.normal());
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    auto oracle = [&](double q) {
      double pos = q * (n - 1);
      std::size_t lo = static_cast<std::size_t>(std::floor(pos));
      std::size_t hi = std::min(lo + 1, n - 1);
      return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
    };
    BoxStats b = box_stats(v);
    CHECK(b.n == n);
    CHECK(b.min == sorted.front());
    CHECK(b.max == sorted.back());
    CHECK(b.q1 == doctest::Approx(oracle(0.25)));
    CHECK(b.median == doctest::Approx(oracle(0.5)));
    CHECK(b.q3 == doctest::Approx(oracle(0.75)));
    double iqr = b.q3 - b.q1;
    std::size_t outliers = 0;
    for (double x : sorted) {
      bool out = x < b.q1 - 1.5 * iqr || x > b.q3 + 1.5 * iqr;
      outliers += out;
      if (!out) {
        CHECK(x >= b.whisker_low);
        CHECK(x <= b.whisker_high);
      }
    }
    CHECK(b.outliers.size() == outliers);
  }
  CHECK_THROWS_AS(box_stats({}), InvalidArgumentError);
}

TEST_CASE("Welch test against an independent computation") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a, b;
    std::size_t na = 3 + rng.uniform_index(30), nb = 3 + rng.uniform_index(30);
    double shift = 0.3 * rng.normal();
    for (std::size_t i = 0; i < na; ++i) a.push_back(rng.normal());
    for (std::size_t i = 0; i < nb; ++i) b.push_back(shift + 2 * rng.normal());
    double ma = 0, mb = 0;
    for (double x : a) ma += x / na;
    for (double x : b) mb += x / nb;
    double va = 0, vb = 0;
    for (double x : a) va += (x - ma) * (x - ma) / (na - 1);
    for (double x : b) vb += (x - mb) * (x - mb) / (nb - 1);
    double se2 = va / na + vb / nb;
    double t = (ma - mb) / std::sqrt(se2);
    double df = se2 * se2 / ((va / na) * (va / na) / (na - 1) + (vb / nb) * (vb / nb) / (nb - 1));
    WelchResult r = welch_test(a, b);
    CHECK(r.t == doctest::Approx(t).epsilon(1e-12));
    CHECK(r.df == doctest::Approx(df).epsilon(1e-12));
    CHECK(r.p == doctest::Approx(t_two_sided(t, df)).epsilon(1e-6));
  }
}

TEST_CASE("Welch edge cases") {
  std::vector<double> a = {0.9, 0.8, 0.85, 0.95};
  CHECK(welch_test(a, a).p == 1.0);
  std::vector<double> c1(5, 0.5), c2(5, 0.5), c3(5, 0.6);
  CHECK(welch_test(c1, c2).p == 1.0);
  CHECK(welch_test(c1, c3).p == 0.0);
  CHECK_THROWS_AS(welch_test(std::vector<double>{1.0}, a), InvalidArgumentError);
}
