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

#include "chainbreak/chain_model.hpp"

#include "chainbreak/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace chainbreak {

namespace {

void check_dimension(int d) {
  require(d >= 2, Errc::kInvalidDimension,
          "d must be >= 2 (a chain needs at least one mobile particle), got " + std::to_string(d));
}

Eigen::VectorXd to_eigen(const Vector& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

Eigen::MatrixXd interaction_matrix(int d) {
  check_dimension(d);
  const int n = d - 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = -2.0;
    if (i + 1 < n) {
      a(i, i + 1) = 1.0;
      a(i + 1, i) = 1.0;
    }
  }
  return a;
}

Eigen::MatrixXd increment_matrix(int d) {
  check_dimension(d);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d - 1);
  for (int i = 0; i < d; ++i) {
    if (i < d - 1) g(i, i) = 1.0;
    if (i >= 1) g(i, i - 1) = -1.0;
  }
  return g;
}

SpectralData spectral_data(int d) {
  check_dimension(d);
  const int n = d - 1;
  const double pi = std::numbers::pi;
  SpectralData s;
  s.d = d;
  s.lambdas.resize(n);
  s.eigvecs.resize(n, n);
  const double norm = std::sqrt(2.0 / d);
  for (int j = 1; j <= n; ++j) {
    s.lambdas[j - 1] = -2.0 * (1.0 - std::cos(j * pi / d));
    for (int k = 1; k <= n; ++k) s.eigvecs(j - 1, k - 1) = norm * std::sin(j * k * pi / d);
  }
  s.mu = 2.0 * (1.0 - std::cos(pi / d));

  // The sine basis is a closed form for tridiagonal Toeplitz matrices; check it anyway.
  const Eigen::MatrixXd a = interaction_matrix(d);
  double residual = 0.0;
  for (int j = 0; j < n; ++j) {
    const Eigen::VectorXd q = s.eigvecs.row(j).transpose();
    residual = std::max(residual, (a * q - s.lambdas[j] * q).cwiseAbs().maxCoeff());
  }
  require(residual <= 1e-10, Errc::kInternal,
          "eigenvector residual " + std::to_string(residual) + " exceeds 1e-10");
  return s;
}

ChainModel build_chain(int d, double sigma, double epsilon, double threshold) {
  check_dimension(d);
  require(std::isfinite(sigma) && sigma >= 0.0, Errc::kInvalidArgument, "sigma must be finite and >= 0");
  require(std::isfinite(epsilon) && epsilon >= 0.0, Errc::kInvalidArgument,
          "epsilon must be finite and >= 0");
  require(std::isfinite(threshold) && threshold > 1.0, Errc::kInvalidThreshold,
          "threshold must exceed the initial bond length 1");
  require(sigma > 0.0 || epsilon > 0.0, Errc::kNoDriving,
          "sigma and epsilon are both zero: the chain never breaks");

  ChainModel m;
  m.d = d;
  m.sigma = sigma;
  m.epsilon = epsilon;
  m.threshold = threshold;
  m.spectral = spectral_data(d);

  const double dd = d;
  m.h.resize(d - 1);
  for (int i = 1; i <= d - 1; ++i) m.h[i - 1] = i * (static_cast<double>(i) * i - dd * dd) / (6.0 * dd);

  m.delta.resize(d);
  for (int i = 1; i <= d; ++i) {
    const double hi = (i < d) ? m.h[i - 1] : 0.0;
    const double hprev = (i > 1) ? m.h[i - 2] : 0.0;
    m.delta[i - 1] = hi - hprev;
  }

  const Eigen::VectorXd h_eig = m.spectral.eigvecs * to_eigen(m.h);
  m.h_eig.assign(h_eig.data(), h_eig.data() + h_eig.size());
  m.bond_map = increment_matrix(d) * m.spectral.eigvecs.transpose();
  return m;
}

Eigen::MatrixXd expm_interaction(const SpectralData& spectral, double t) {
  const auto n = static_cast<Eigen::Index>(spectral.lambdas.size());
  Eigen::VectorXd decay(n);
  for (Eigen::Index j = 0; j < n; ++j) decay(j) = std::exp(spectral.lambdas[j] * t);
  return spectral.eigvecs.transpose() * decay.asDiagonal() * spectral.eigvecs;
}

Vector drift_transient(const ChainModel& model, double t) {
  require(t >= 0.0, Errc::kInvalidArgument, "time must be >= 0");
  const auto n = static_cast<Eigen::Index>(model.h_eig.size());
  Eigen::VectorXd z_eig(n);
  for (Eigen::Index j = 0; j < n; ++j) z_eig(j) = -std::exp(model.spectral.lambdas[j] * t) * model.h_eig[j];
  const Eigen::VectorXd z = model.spectral.eigvecs.transpose() * z_eig;
  return Vector(z.data(), z.data() + z.size());
}

Vector deterministic_delta(const ChainModel& model, double t) {
  Vector out = drift_transient(model, t);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += model.h[i];
  // exp(0 A) = I up to rounding in Q^T Q; pin the initial condition exactly.
  if (t == 0.0) std::fill(out.begin(), out.end(), 0.0);
  return out;
}

Vector drift_transient_bound(const ChainModel& model, int grid_points) {
  require(grid_points >= 2, Errc::kInvalidArgument, "grid_points must be >= 2");
  const double t_end = 40.0 / model.spectral.mu;
  Vector sup(model.d - 1, 0.0);
  for (int k = 0; k < grid_points; ++k) {
    const Vector z = drift_transient(model, t_end * k / (grid_points - 1));
    for (std::size_t i = 0; i < z.size(); ++i) sup[i] = std::max(sup[i], std::abs(z[i]));
  }
  return sup;
}

Eigen::MatrixXd stationary_gap_covariance(const SpectralData& spectral, double t) {
  const auto n = static_cast<Eigen::Index>(spectral.lambdas.size());
  Eigen::VectorXd weights(n);
  const double lag = std::abs(t);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lambda = spectral.lambdas[j];
    weights(j) = 0.5 * std::exp(lambda * lag) / (-lambda);
  }
  const Eigen::MatrixXd gq = increment_matrix(spectral.d) * spectral.eigvecs.transpose();
  return gq * weights.asDiagonal() * gq.transpose();
}

Eigen::MatrixXd stationary_gap_covariance(const ChainModel& model, double t) {
  return stationary_gap_covariance(model.spectral, t);
}

}  // namespace chainbreak
