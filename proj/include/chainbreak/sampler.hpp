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

#include "chainbreak/chain_model.hpp"

#include <cstdint>

namespace chainbreak {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 output mix: xor-shift 30, multiply, xor-shift 27, multiply, xor-shift 31.
constexpr std::uint64_t splitmix64_finalize(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based SplitMix64 stream. One stream per trajectory; never shared.
/// Output depends only on the seed, so sequences are identical on every
/// platform (normal variates additionally rely on the host libm log/sqrt).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next_u64() noexcept {
    state_ += kGoldenGamma;
    return splitmix64_finalize(state_);
  }

  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  // Marsaglia polar method; the second variate of each pair is cached.
  double normal() noexcept;

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline double standard_normal(RngStream& rng) noexcept { return rng.normal(); }

/// Coordinates of the interior displacement Y_t in the eigenbasis (w = Q Y).
struct EigenState {
  Vector w;
  double t = 0.0;
};

EigenState zero_initial(const ChainModel& model);

/// Draws w_j = sigma (-2 lambda_j)^{-1/2} xi_j, the stationary law of the OU
/// system. Rejects sigma == 0 (degenerate law; use zero_initial).
EigenState stationary_initial(const ChainModel& model, RngStream& rng);

/// Exact OU transition over dt: w_j <- e^{lambda_j dt} w_j + s_j xi_j with
/// s_j^2 = sigma^2 (1 - e^{2 lambda_j dt}) / (-2 lambda_j). Rejects dt <= 0.
EigenState exact_step(const EigenState& state, double dt, const ChainModel& model, RngStream& rng);

/// exact_step with the per-coordinate coefficients computed once; used by the
/// simulators, where dt is fixed for the whole trajectory.
class OuPropagator {
 public:
  OuPropagator(const ChainModel& model, double dt);

  void advance(EigenState& state, RngStream& rng) const noexcept;

  double dt() const noexcept { return dt_; }
  const Vector& decay() const noexcept { return decay_; }
  const Vector& noise_scale() const noexcept { return noise_; }

 private:
  double dt_;
  Vector decay_;
  Vector noise_;
};

/// Y = Q^T w, the interior displacements in particle coordinates.
Vector to_particle_coordinates(const ChainModel& model, const EigenState& state);

/// One explicit Euler-Maruyama step of dY = A Y dt + sigma dB in particle
/// coordinates. Reference stepper only. Requires dt * max|lambda| < 0.5.
Vector em_step(const Vector& y, double dt, const ChainModel& model, RngStream& rng);

}  // namespace chainbreak
