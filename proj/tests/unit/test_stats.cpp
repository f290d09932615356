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
#include "chainbreak/sampler.hpp"

#include "test_support.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace chainbreak;
using namespace chainbreak::stats;
using chainbreak::testing::code_of;
using Catch::Matchers::WithinAbs;

namespace {
double uniform_cdf(double x) { return std::clamp(x, 0.0, 1.0); }
double exp_cdf(double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); }
}  // namespace

TEST_CASE("ECDF is a right-continuous step function", "[stats]") {
  const std::vector<double> x{3.0, 1.0, 2.0, 2.0};
  const Ecdf f(x);
  CHECK(f.size() == 4);
  CHECK(f(0.5) == 0.0);
  CHECK(f(1.0) == 0.25);
  CHECK(f(1.999) == 0.25);
  CHECK(f(2.0) == 0.75);
  CHECK(f(3.0) == 1.0);
  CHECK(f(1e9) == 1.0);
  CHECK(code_of([] { Ecdf(std::vector<double>{}); }) == Errc::kInvalidArgument);
}

TEST_CASE("KS statistic on hand-checked samples", "[stats]") {
  const std::vector<double> x{0.1, 0.5, 0.9};
  CHECK_THAT(ks_statistic(x, uniform_cdf), WithinAbs(0.7 / 3.0, 1e-15));

  for (int n : {1, 7, 100, 1000}) {
    std::vector<double> strat(n);
    for (int i = 0; i < n; ++i) strat[i] = -std::log1p(-(i + 0.5) / n);  // exponential quantiles
    CHECK_THAT(ks_statistic(strat, exp_cdf), WithinAbs(0.5 / n, 1e-12));
  }
  CHECK(code_of([] { ks_test(std::vector<double>{}, uniform_cdf); }) == Errc::kInvalidArgument);
}

TEST_CASE("KS is invariant under increasing transforms", "[stats]") {
  RngStream rng(3);
  std::vector<double> x(500);
  for (auto& v : x) v = rng.uniform();
  std::vector<double> y(x.size());
  std::transform(x.begin(), x.end(), y.begin(), [](double v) { return std::exp(3.0 * v); });
  const double dx = ks_statistic(x, uniform_cdf);
  const double dy = ks_statistic(y, [](double v) { return uniform_cdf(std::log(v) / 3.0); });
  CHECK_THAT(dx, WithinAbs(dy, 1e-12));
}

TEST_CASE("Kolmogorov survival function", "[stats]") {
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(0.1) == 1.0);
  CHECK_THAT(kolmogorov_survival(1.3581), WithinAbs(0.05, 1e-4));
  CHECK_THAT(kolmogorov_survival(1.6276), WithinAbs(0.01, 1e-4));
  double prev = 1.0;
  for (double l = 0.05; l < 4.0; l += 0.05) {
    const double p = kolmogorov_survival(l);
    CHECK(p <= prev);
    CHECK(p >= 0.0);
    prev = p;
  }
}

TEST_CASE("KS p-values are calibrated on exponential samples", "[stats]") {
  const int seeds = 1000;
  int accepted = 0;
  std::vector<double> x(10000);
  for (int s = 0; s < seeds; ++s) {
    RngStream rng(static_cast<std::uint64_t>(s) * 7919u + 1u);
    for (auto& v : x) v = -std::log(rng.uniform());
    const GofResult r = ks_test(x, exp_cdf);
    REQUIRE(r.n == x.size());
    REQUIRE(r.test == TestKind::kKs);
    if (r.p_value > 0.001) ++accepted;
  }
  CHECK(accepted >= static_cast<int>(0.998 * seeds));
}

TEST_CASE("chi-square position test", "[stats]") {
  const std::vector<double> p3{0.25, 0.5, 0.25};
  const GofResult perfect = chisq_position_test(std::vector<long long>{25, 50, 25}, p3);
  CHECK(perfect.statistic == 0.0);
  CHECK(perfect.p_value == 1.0);
  CHECK(perfect.test == TestKind::kChiSquare);
  CHECK(chisq_position_test(std::vector<long long>{50, 50}, std::vector<double>{0.5, 0.5}).statistic == 0.0);

  const GofResult off = chisq_position_test(std::vector<long long>{30, 40, 30}, p3);
  CHECK_THAT(off.statistic, WithinAbs(4.0, 1e-12));
  CHECK_THAT(off.p_value, WithinAbs(std::exp(-2.0), 1e-12));  // chi-square with 2 dof
  CHECK(off.n == 100);

  // Proportional counts (and only those) give zero.
  CHECK(chisq_position_test(std::vector<long long>{250, 500, 250}, p3).statistic == 0.0);
  CHECK(chisq_position_test(std::vector<long long>{251, 499, 250}, p3).statistic > 0.0);

  CHECK(code_of([&] { chisq_position_test(std::vector<long long>{5, 10, 5}, p3); }) == Errc::kExpectedCount);
  CHECK(code_of([] {
          chisq_position_test(std::vector<long long>{96, 4}, std::vector<double>{0.97, 0.03});
        }) == Errc::kExpectedCount);
  CHECK(code_of([&] { chisq_position_test(std::vector<long long>{50, 50}, p3); }) == Errc::kInvalidArgument);
}

TEST_CASE("Wilson proportion intervals", "[stats]") {
  const Interval mid = proportion_ci(50, 100, 0.95);
  CHECK_THAT(mid.lo, WithinAbs(0.404, 5e-4));
  CHECK_THAT(mid.hi, WithinAbs(0.596, 5e-4));
  CHECK_THAT(mid.lo + mid.hi, WithinAbs(1.0, 1e-14));
  CHECK(proportion_ci(0, 40, 0.95).lo == 0.0);
  CHECK(proportion_ci(40, 40, 0.95).hi == 1.0);
  CHECK(proportion_ci(0, 40, 0.95).hi > 0.0);
  CHECK(code_of([] { proportion_ci(5, 4, 0.95); }) == Errc::kInvalidArgument);
  CHECK(code_of([] { proportion_ci(1, 4, 1.0); }) == Errc::kInvalidArgument);

  SECTION("coverage on simulated Bernoulli data") {
    const int n = 200;
    const int reps = 10000;
    for (double p : {0.1, 0.25, 0.5}) {
      RngStream rng(static_cast<std::uint64_t>(p * 1000));
      int covered = 0;
      for (int r = 0; r < reps; ++r) {
        long long k = 0;
        for (int i = 0; i < n; ++i) k += rng.uniform() < p ? 1 : 0;
        const Interval ci = proportion_ci(k, n, 0.95);
        if (ci.lo <= p && p <= ci.hi) ++covered;
      }
      const double coverage = static_cast<double>(covered) / reps;
      CHECK(coverage >= 0.93);
      CHECK(coverage <= 0.97);
    }
  }
}

TEST_CASE("summary statistics", "[stats]") {
  const std::vector<double> x{4.0, 1.0, 3.0, 2.0};
  CHECK(mean(x) == 2.5);
  CHECK_THAT(variance(x), WithinAbs(5.0 / 3.0, 1e-15));
  CHECK_THAT(standard_error(x), WithinAbs(std::sqrt(5.0 / 12.0), 1e-15));
  CHECK(median(x) == 2.5);
  CHECK(quantile(x, 0.0) == 1.0);
  CHECK(quantile(x, 1.0) == 4.0);
  CHECK_THAT(quantile(x, 0.25), WithinAbs(1.75, 1e-15));
  CHECK(median(std::vector<double>{5.0, 1.0, 3.0}) == 3.0);
  CHECK(code_of([] { mean(std::vector<double>{}); }) == Errc::kInvalidArgument);
  CHECK(code_of([] { variance(std::vector<double>{1.0}); }) == Errc::kInvalidArgument);
  CHECK(code_of([&] { quantile(x, 1.5); }) == Errc::kInvalidArgument);
  CHECK(to_string(TestKind::kKs) == "ks");
  CHECK(to_string(TestKind::kChiSquare) == "chisq");
}
