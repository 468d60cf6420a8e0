// include/egra/stats.h

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

#ifndef EGRA_STATS_H_
#define EGRA_STATS_H_

#include <span>
#include <vector>

namespace egra::stats {

double mean(std::span<const double> xs);
/// Population standard deviation (divides by n).
double population_std(std::span<const double> xs);
/// Unbiased sample variance (divides by n - 1).
double sample_variance(std::span<const double> xs);

/// Linear-interpolation quantile on sorted data (position (n-1)q).
double quantile_sorted(std::span<const double> sorted, double q);

struct BoxStats {
  std::size_t n = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  double whisker_low = 0, whisker_high = 0;  // furthest points within 1.5 IQR
  std::vector<double> outliers;
};

BoxStats box_stats(std::vector<double> values);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

/// Two-sided Welch unequal-variance t-test. Needs at least two values per
/// side. When both sides have zero variance the result is p = 1 for equal
/// means and p = 0 otherwise.
WelchResult welch_test(std::span<const double> a, std::span<const double> b);

}  // namespace egra::stats

#endif  // EGRA_STATS_H_
