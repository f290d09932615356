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

// Closed-form limit laws for the break time and break position.
//
// Three pulling regimes are distinguished by sigma/eps and q = sigma^2 |ln eps|:
//   fast       sigma/eps -> 0: the last bond breaks at t* - (d-1)(2d-1)/6;
//   moderate   eps/sigma -> 0, q -> 0: t* - tau is a deterministic offset plus
//              a Gumbel fluctuation on scale (sigma/eps)/sqrt(ln(sigma/eps));
//   very slow  q -> infinity (or eps = 0): tau is exponential on the scale
//              sigma v exp((sigma v)^{-2}/2).
// In both noisy regimes the break position has weight 1/(d-1) on interior
// bonds and 1/(2(d-1)) on the two end bonds.

#pragma once

#include "chainbreak/chain_model.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <string_view>

namespace chainbreak {

struct RegimeConstants {
  int d = 0;
  double sigma = 0.0;
  double epsilon = 0.0;
  double v2 = 0.0;     // (d-1)/(2d), stationary variance of a normalised bond
  double v = 0.0;
  double gamma = 0.0;  // sqrt(d(d-1)) = sqrt(2) d v
  Vector A;            // local covariance slopes: d/(d-1) at the ends, 2d/(d-1) inside
  Vector a;            // Gumbel prefactors v d A_i / sqrt(2 pi)
  double a0 = 0.0;     // sum of a = 2 v d^2 / sqrt(2 pi)
  double b = 0.0;      // Gumbel rate sqrt(2)/(v d)
  std::optional<double> t_star;  // d / eps, only when eps > 0
  double mu = 0.0;     // 2(1 - cos(pi/d))
};

RegimeConstants chain_constants(int d, double sigma, double epsilon);

enum class RegimeTag { kFast, kModerate, kVerySlow, kTransitional };

std::string_view to_string(RegimeTag tag);
RegimeTag regime_from_string(std::string_view name);

struct Regime {
  RegimeTag tag = RegimeTag::kTransitional;
  double ratio = 0.0;  // sigma / eps (infinite when eps = 0)
  double q = 0.0;      // sigma^2 |ln eps| (infinite when eps = 0)
};

/// Thresholds: fast iff sigma/eps < 0.1 (or sigma = 0); very slow iff
/// q > 10 (or eps = 0); moderate iff sigma/eps > 10 and q < 0.1; anything
/// else is transitional, where no limit law is known.
Regime classify_regime(double sigma, double epsilon);

/// Asymptotic break-position probabilities for the noisy regimes.
Vector position_law(int d);

struct DeterministicBreak {
  double tau = 0.0;
  Vector per_bond;  // t* + (d^2-1)/6 - i(i-1)/2, i = 1..d
};

DeterministicBreak deterministic_break(int d, double epsilon);

/// Scale theta with tau / theta asymptotically standard exponential:
/// theta = sigma v exp((sigma v)^{-2}/2) sqrt(2 pi) / (2d) for the chain,
/// or with A_bond in place of 2d for a single bond (1-based). Rejects
/// sigma v < 0.19, where the time scale is far beyond simulation reach.
double very_slow_normalizer(int d, double sigma, std::optional<int> bond = std::nullopt);

struct ModerateNormalization {
  double h = 0.0;       // eps / sigma
  double psi = 0.0;     // ln(1/h)
  double t_star = 0.0;
  double offset = 0.0;  // gamma sqrt(psi) / h
  double center = 0.0;  // t* - offset
  double scale = 0.0;   // 1 / (h sqrt(psi))
  Vector a;
  double a0 = 0.0;
  double b = 0.0;

  /// h sqrt(psi) (t* - tau - offset) = (center - tau) / scale; converges to a
  /// Gumbel(a0, b) variable.
  double statistic(double tau) const { return (center - tau) / scale; }
};

/// Requires sigma/eps > 1 (so that psi > 0).
ModerateNormalization moderate_normalization(int d, double sigma, double epsilon);

/// P(chi <= r) = exp(-a exp(-b r)).
double gumbel_cdf(double a, double b, double r);
double gumbel_pdf(double a, double b, double r);
double gumbel_quantile(double a, double b, double p);
double gumbel_median(double a, double b);

double exponential_cdf(double x);

struct PickandsEstimate {
  double value = 0.0;
  // False when the asymptotic form is outside its domain (value > 0.5 or x/v < 2).
  bool valid = false;
};

/// Asymptotic P(max_{[0,t]} W > x) for a stationary Gaussian process with
/// covariance v^2 (1 - A |s|^alpha + o(|s|^alpha)):
/// A^{1/alpha} H_alpha / sqrt(2 pi) * t * (x/v)^{2/alpha - 1} * exp(-(x/v)^2 / 2).
PickandsEstimate pickands_tail(double v, double A, double alpha, double H_alpha, double x, double t);

/// Cov(Y_t) = sigma^2 (-2A)^{-1} (I - exp(2At)) for the chain started at rest.
Eigen::MatrixXd transient_covariance(int d, double sigma, double t);

/// sigma^2 (-2A)^{-1}, the t -> infinity limit of transient_covariance.
Eigen::MatrixXd stationary_covariance(int d, double sigma);

}  // namespace chainbreak
