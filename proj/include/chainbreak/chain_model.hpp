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

// Static description of a pulled harmonic chain of d+1 Brownian particles.
//
// Particle 0 is pinned at the origin, particle d moves as d + eps*t, and the
// d-1 interior particles relax towards their neighbours with unit stiffness
// under noise of amplitude sigma. Bond i is the gap X^i - X^{i-1}; all bonds
// start at length 1 and the chain breaks when a bond first reaches the
// threshold.
//
// Everything linear-algebraic lives here: the interaction matrix A (d-1 x d-1,
// tridiagonal -2/1), the increment matrix G (d x d-1, maps interior
// displacements to bond increments), the closed-form spectral decomposition
// of A, the deterministic drift correction Delta_t = h + Z_t and the
// stationary covariance of the normalised bond fluctuations.

#pragma once

#include <Eigen/Dense>

#include <vector>

namespace chainbreak {

using Vector = std::vector<double>;

inline constexpr double kDefaultThreshold = 2.0;

struct SpectralData {
  int d = 0;
  // lambdas[j-1] = -2(1 - cos(j pi / d)), j = 1..d-1; all strictly negative.
  Vector lambdas;
  // Orthonormal; row j-1 is the eigenvector q_j, q_j(k) = sqrt(2/d) sin(j k pi / d).
  Eigen::MatrixXd eigvecs;
  // Slowest relaxation rate min_j |lambda_j| = 2(1 - cos(pi / d)).
  double mu = 0.0;
};

struct ChainModel {
  int d = 0;
  double sigma = 0.0;
  double epsilon = 0.0;
  double threshold = kDefaultThreshold;
  SpectralData spectral;
  // h[i-1] = i(i^2 - d^2) / (6d), i = 1..d-1: the long-time limit of Delta_t.
  Vector h;
  // delta[i-1] = h_i - h_{i-1} with h_0 = h_d = 0, i = 1..d.
  Vector delta;
  // h expressed in the eigenbasis (Q h); Z_t in that basis is -exp(lambda t) * h_eig.
  Vector h_eig;
  // G Q^T, the map from eigen-coordinates straight to bond increments (d x d-1).
  Eigen::MatrixXd bond_map;
};

/// Validates the parameters and assembles every derived quantity.
/// Throws Error with kInvalidDimension (d < 2), kInvalidThreshold
/// (threshold <= 1), kNoDriving (sigma == epsilon == 0) or kInvalidArgument
/// (negative or non-finite sigma/epsilon).
ChainModel build_chain(int d, double sigma, double epsilon, double threshold = kDefaultThreshold);

Eigen::MatrixXd interaction_matrix(int d);

// Rows are bonds 1..d, columns interior particles 1..d-1:
// G(i, j) = 1 if i == j, -1 if i == j + 1 (1-based), so (G y)_i = y_i - y_{i-1}.
Eigen::MatrixXd increment_matrix(int d);

SpectralData spectral_data(int d);

// exp(tA) through the known spectrum.
Eigen::MatrixXd expm_interaction(const SpectralData& spectral, double t);

/// Delta_t = h - exp(tA) h, length d-1. Requires t >= 0.
Vector deterministic_delta(const ChainModel& model, double t);

/// Z_t = Delta_t - h = -exp(tA) h, length d-1.
Vector drift_transient(const ChainModel& model, double t);

/// sup_t |Z_t^i| evaluated on a uniform grid over [0, t_end]. Z decays like
/// exp(-mu t), so t_end = 40 / mu is ample.
Vector drift_transient_bound(const ChainModel& model, int grid_points = 4001);

/// E[V_0 V_t^T] = 1/2 G (-A)^{-1} exp(|t| A) G^T for the stationary
/// normalised bond process (d x d). Diagonal at t = 0 is v^2 = (d-1)/(2d).
Eigen::MatrixXd stationary_gap_covariance(const ChainModel& model, double t);
Eigen::MatrixXd stationary_gap_covariance(const SpectralData& spectral, double t);

}  // namespace chainbreak
