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

#include "chainbreak/stats.hpp"

#include "chainbreak/errors.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace chainbreak::stats {

std::string_view to_string(TestKind kind) { return kind == TestKind::kKs ? "ks" : "chisq"; }

Ecdf::Ecdf(std::span<const double> samples) : sorted_(samples.begin(), samples.end()) {
  require(!sorted_.empty(), Errc::kInvalidArgument, "ECDF of an empty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  require(!samples.empty(), Errc::kInvalidArgument, "KS test on an empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double above = (static_cast<double>(i) + 1.0) / n - f;
    const double below = f - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  return d;
}

double kolmogorov_survival(double lambda) {
  // Below 0.2 the survival function equals 1 to within 1e-13.
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-10 * std::abs(sum) || term < 1e-300) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

GofResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf) {
  GofResult r;
  r.test = TestKind::kKs;
  r.n = samples.size();
  r.statistic = ks_statistic(samples, cdf);
  r.p_value = kolmogorov_survival(std::sqrt(static_cast<double>(r.n)) * r.statistic);
  return r;
}

GofResult chisq_position_test(std::span<const long long> counts, std::span<const double> probs) {
  require(counts.size() == probs.size() && counts.size() >= 2, Errc::kInvalidArgument,
          "counts and probabilities must have the same length >= 2");
  long long total = 0;
  for (long long c : counts) {
    require(c >= 0, Errc::kInvalidArgument, "negative count");
    total += c;
  }
  require(total >= 50, Errc::kExpectedCount, "chi-square needs at least 50 observations, got " + std::to_string(total));
  const double prob_sum = std::accumulate(probs.begin(), probs.end(), 0.0);
  require(std::abs(prob_sum - 1.0) < 1e-9, Errc::kInvalidArgument, "cell probabilities must sum to 1");

  double x2 = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = probs[i] * static_cast<double>(total);
    require(expected >= 5.0, Errc::kExpectedCount,
            "expected count " + std::to_string(expected) + " in cell " + std::to_string(i + 1) +
                " is below 5; merge adjacent cells before testing");
    const double diff = static_cast<double>(counts[i]) - expected;
    x2 += diff * diff / expected;
  }
  GofResult r;
  r.test = TestKind::kChiSquare;
  r.n = static_cast<std::size_t>(total);
  r.statistic = x2;
  const boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
  r.p_value = x2 <= 0.0 ? 1.0 : boost::math::cdf(boost::math::complement(dist, x2));
  return r;
}

Interval proportion_ci(long long successes, long long n, double level) {
  require(n >= 1 && successes >= 0 && successes <= n, Errc::kInvalidArgument,
          "proportion interval needs 0 <= successes <= n and n >= 1");
  require(level > 0.0 && level < 1.0, Errc::kInvalidArgument, "confidence level must lie in (0, 1)");
  const double z = boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * level);
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  Interval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
  if (successes == 0) ci.lo = 0.0;
  if (successes == n) ci.hi = 1.0;
  return ci;
}

double mean(std::span<const double> x) {
  require(!x.empty(), Errc::kInvalidArgument, "mean of an empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  require(x.size() >= 2, Errc::kInvalidArgument, "variance needs at least two samples");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

double standard_error(std::span<const double> x) {
  return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

double quantile(std::span<const double> x, double p) {
  require(!x.empty(), Errc::kInvalidArgument, "quantile of an empty sample");
  require(p >= 0.0 && p <= 1.0, Errc::kInvalidArgument, "quantile level must lie in [0, 1]");
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double pos = p * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return s[lo] + frac * (s[hi] - s[lo]);
}

double median(std::span<const double> x) { return quantile(x, 0.5); }

}  // namespace chainbreak::stats
