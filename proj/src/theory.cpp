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

#include "chainbreak/theory.hpp"

#include "chainbreak/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace chainbreak {

namespace {

constexpr double kFastRatio = 0.1;
constexpr double kModerateRatio = 10.0;
constexpr double kVerySlowQ = 10.0;
constexpr double kModerateQ = 0.1;
constexpr double kMinSigmaV = 0.19;

const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

void check_dimension(int d) {
  require(d >= 2, Errc::kInvalidDimension, "d must be >= 2, got " + std::to_string(d));
}

double slope(int d, int i) {
  return (i == 1 || i == d) ? static_cast<double>(d) / (d - 1) : 2.0 * d / (d - 1);
}

}  // namespace

RegimeConstants chain_constants(int d, double sigma, double epsilon) {
  check_dimension(d);
  require(std::isfinite(sigma) && sigma >= 0.0 && std::isfinite(epsilon) && epsilon >= 0.0,
          Errc::kInvalidArgument, "sigma and epsilon must be finite and >= 0");
  RegimeConstants c;
  c.d = d;
  c.sigma = sigma;
  c.epsilon = epsilon;
  c.v2 = (d - 1.0) / (2.0 * d);
  c.v = std::sqrt(c.v2);
  c.gamma = std::sqrt(static_cast<double>(d) * (d - 1));
  c.A.resize(d);
  c.a.resize(d);
  for (int i = 1; i <= d; ++i) {
    c.A[i - 1] = slope(d, i);
    c.a[i - 1] = c.v * d * c.A[i - 1] / kSqrt2Pi;
  }
  c.a0 = 2.0 * c.v * d * d / kSqrt2Pi;
  c.b = std::numbers::sqrt2 / (c.v * d);
  if (epsilon > 0.0) c.t_star = d / epsilon;
  c.mu = 2.0 * (1.0 - std::cos(std::numbers::pi / d));
  return c;
}

std::string_view to_string(RegimeTag tag) {
  switch (tag) {
    case RegimeTag::kFast:
      return "fast";
    case RegimeTag::kModerate:
      return "moderate";
    case RegimeTag::kVerySlow:
      return "very_slow";
    case RegimeTag::kTransitional:
      return "transitional";
  }
  return "transitional";
}

RegimeTag regime_from_string(std::string_view name) {
  if (name == "fast") return RegimeTag::kFast;
  if (name == "moderate") return RegimeTag::kModerate;
  if (name == "very_slow") return RegimeTag::kVerySlow;
  if (name == "transitional") return RegimeTag::kTransitional;
  fail(Errc::kInvalidArgument, "unknown regime '" + std::string(name) + "'");
}

Regime classify_regime(double sigma, double epsilon) {
  require(std::isfinite(sigma) && sigma >= 0.0 && std::isfinite(epsilon) && epsilon >= 0.0,
          Errc::kInvalidArgument, "sigma and epsilon must be finite and >= 0");
  require(sigma > 0.0 || epsilon > 0.0, Errc::kNoDriving, "sigma and epsilon are both zero");
  constexpr double inf = std::numeric_limits<double>::infinity();
  Regime r;
  if (epsilon == 0.0) {
    r.ratio = inf;
    r.q = inf;
    r.tag = RegimeTag::kVerySlow;
    return r;
  }
  r.ratio = sigma / epsilon;
  r.q = sigma * sigma * std::abs(std::log(epsilon));
  if (sigma == 0.0 || r.ratio < kFastRatio) {
    r.tag = RegimeTag::kFast;
  } else if (r.q > kVerySlowQ) {
    r.tag = RegimeTag::kVerySlow;
  } else if (r.ratio > kModerateRatio && r.q < kModerateQ) {
    r.tag = RegimeTag::kModerate;
  } else {
    r.tag = RegimeTag::kTransitional;
  }
  return r;
}

Vector position_law(int d) {
  check_dimension(d);
  Vector p(d, 1.0 / (d - 1));
  p.front() = 0.5 / (d - 1);
  p.back() = 0.5 / (d - 1);
  return p;
}

DeterministicBreak deterministic_break(int d, double epsilon) {
  check_dimension(d);
  require(std::isfinite(epsilon) && epsilon > 0.0, Errc::kInvalidArgument,
          "deterministic break time needs epsilon > 0");
  const double t_star = d / epsilon;
  DeterministicBreak out;
  out.tau = t_star - (d - 1.0) * (2.0 * d - 1.0) / 6.0;
  out.per_bond.resize(d);
  for (int i = 1; i <= d; ++i) {
    out.per_bond[i - 1] = t_star + (static_cast<double>(d) * d - 1.0) / 6.0 - i * (i - 1.0) / 2.0;
  }
  return out;
}

double very_slow_normalizer(int d, double sigma, std::optional<int> bond) {
  check_dimension(d);
  require(std::isfinite(sigma) && sigma > 0.0, Errc::kInvalidArgument, "very slow normalizer needs sigma > 0");
  const double sv = sigma * std::sqrt((d - 1.0) / (2.0 * d));
  require(sv >= kMinSigmaV, Errc::kOutOfRange,
          "sigma * v = " + std::to_string(sv) + " is below 0.19; the exponential time scale is out of reach");
  double rate = 2.0 * d;
  if (bond) {
    require(*bond >= 1 && *bond <= d, Errc::kInvalidArgument, "bond index must lie in 1..d");
    rate = slope(d, *bond);
  }
  return sv * std::exp(0.5 / (sv * sv)) * kSqrt2Pi / rate;
}

ModerateNormalization moderate_normalization(int d, double sigma, double epsilon) {
  check_dimension(d);
  require(std::isfinite(sigma) && std::isfinite(epsilon) && epsilon > 0.0 && sigma > epsilon,
          Errc::kInvalidArgument, "moderate normalization needs sigma > epsilon > 0");
  const RegimeConstants c = chain_constants(d, sigma, epsilon);
  ModerateNormalization n;
  n.h = epsilon / sigma;
  n.psi = std::log(1.0 / n.h);
  n.t_star = d / epsilon;
  n.offset = c.gamma * std::sqrt(n.psi) / n.h;
  n.center = n.t_star - n.offset;
  n.scale = 1.0 / (n.h * std::sqrt(n.psi));
  n.a = c.a;
  n.a0 = c.a0;
  n.b = c.b;
  return n;
}

double gumbel_cdf(double a, double b, double r) {
  require(a > 0.0 && b > 0.0, Errc::kInvalidArgument, "Gumbel parameters must be positive");
  return std::exp(-a * std::exp(-b * r));
}

double gumbel_pdf(double a, double b, double r) {
  require(a > 0.0 && b > 0.0, Errc::kInvalidArgument, "Gumbel parameters must be positive");
  const double inner = a * std::exp(-b * r);
  return b * inner * std::exp(-inner);
}

double gumbel_quantile(double a, double b, double p) {
  require(a > 0.0 && b > 0.0, Errc::kInvalidArgument, "Gumbel parameters must be positive");
  require(p > 0.0 && p < 1.0, Errc::kInvalidArgument, "quantile level must lie in (0, 1)");
  return std::log(a / -std::log(p)) / b;
}

double gumbel_median(double a, double b) { return gumbel_quantile(a, b, 0.5); }

double exponential_cdf(double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); }

PickandsEstimate pickands_tail(double v, double A, double alpha, double H_alpha, double x, double t) {
  require(v > 0.0 && A > 0.0 && H_alpha > 0.0, Errc::kInvalidArgument, "v, A and H_alpha must be positive");
  require(alpha > 0.0 && alpha <= 2.0, Errc::kInvalidArgument, "alpha must lie in (0, 2]");
  require(t >= 0.0, Errc::kInvalidArgument, "interval length must be >= 0");
  const double u = x / v;
  PickandsEstimate est;
  est.value = std::pow(A, 1.0 / alpha) * H_alpha / kSqrt2Pi * t * std::pow(u, 2.0 / alpha - 1.0) *
              std::exp(-0.5 * u * u);
  est.valid = u >= 2.0 && est.value <= 0.5;
  return est;
}

Eigen::MatrixXd transient_covariance(int d, double sigma, double t) {
  require(t >= 0.0, Errc::kInvalidArgument, "time must be >= 0");
  const SpectralData s = spectral_data(d);
  const auto n = static_cast<Eigen::Index>(s.lambdas.size());
  Eigen::VectorXd weights(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lambda = s.lambdas[j];
    weights(j) = sigma * sigma * -std::expm1(2.0 * lambda * t) / (-2.0 * lambda);
  }
  return s.eigvecs.transpose() * weights.asDiagonal() * s.eigvecs;
}

Eigen::MatrixXd stationary_covariance(int d, double sigma) {
  const SpectralData s = spectral_data(d);
  const auto n = static_cast<Eigen::Index>(s.lambdas.size());
  Eigen::VectorXd weights(n);
  for (Eigen::Index j = 0; j < n; ++j) weights(j) = sigma * sigma / (-2.0 * s.lambdas[j]);
  return s.eigvecs.transpose() * weights.asDiagonal() * s.eigvecs;
}

}  // namespace chainbreak
