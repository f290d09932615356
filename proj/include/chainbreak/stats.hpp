// Copyright 2026 The chainbreak Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace chainbreak::stats {

enum class TestKind { kKs, kChiSquare };

std::string_view to_string(TestKind kind);

struct GofResult {
  TestKind test = TestKind::kKs;
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// Right-continuous empirical CDF.
class Ecdf {
 public:
  explicit Ecdf(std::span<const double> samples);

  double operator()(double x) const;
  std::size_t size() const noexcept { return sorted_.size(); }
  const std::vector<double>& sorted() const noexcept { return sorted_; }

 private:
  std::vector<double> sorted_;
};

/// sup_x |F_n(x) - F(x)|, taken over both one-sided discrepancies at each
/// sample point. Rejects an empty sample.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

/// P(K > lambda) for the Kolmogorov distribution, alternating series with at
/// most 100 terms.
double kolmogorov_survival(double lambda);

/// One-sample KS test with the asymptotic p-value Q(sqrt(n) D).
GofResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Pearson chi-square against cell probabilities, d - 1 degrees of freedom.
/// Needs at least 50 observations and expected count >= 5 in every cell.
GofResult chisq_position_test(std::span<const long long> counts, std::span<const double> probs);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval at the given two-sided confidence level.
Interval proportion_ci(long long successes, long long n, double level);

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // unbiased
double standard_error(std::span<const double> x);
double quantile(std::span<const double> x, double p);  // linear interpolation between order statistics
double median(std::span<const double> x);

}  // namespace chainbreak::stats
