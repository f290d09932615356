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
#include "chainbreak/sampler.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace chainbreak {

enum class InitialMode { kZero, kStationary };

struct SimConfig {
  double dt = 0.01;
  double t_max = 1.0e6;
  InitialMode initial_mode = InitialMode::kZero;
  bool record_trace = false;
  // Keep every k-th grid point in the trace.
  int trace_every = 100;
  // Linear interpolation of the crossing time between bracketing grid points.
  bool refine_crossing = false;
  // Also test for a level crossing between grid points using the Brownian
  // bridge crossing probability exp(-2 a b / (s^2 dt)), where a and b are the
  // distances to the level at the two grid points and s^2 the bond's noise
  // variance rate. Without it, excursions between grid points are missed and
  // break times are biased late by a factor that grows with the level.
  bool bridge_correction = true;

  bool operator==(const SimConfig&) const = default;
};

void validate(const SimConfig& cfg);

struct TracePoint {
  double t = 0.0;
  Vector gaps;
};

struct BreakResult {
  double break_time = 0.0;
  int break_bond = 0;  // 1..d; 0 when censored
  bool censored = false;
  std::uint64_t steps = 0;
  std::vector<TracePoint> trace;
};

/// Time after which the mean bond length reaches the threshold:
/// d (threshold - 1) / eps, which equals t* = d / eps at the default threshold.
double break_horizon(const ChainModel& model);

/// Bond lengths X^i_t - X^{i-1}_t for i = 1..d:
/// (eps t + d)/d + eps (delta_i + Z^i_t - Z^{i-1}_t) + (G Q^T w)_i.
Vector gaps(const ChainModel& model, const EigenState& state);

/// Runs one trajectory of the full chain from the configured initial state
/// and reports the first grid time at which some bond reaches the threshold.
/// Ties within a step go to the smallest bond index.
BreakResult simulate_break(const ChainModel& model, const SimConfig& cfg, std::uint64_t seed);

/// Stationary surrogate: the bond fluctuations sigma*V_t are simulated from
/// the stationary law without drift, and the break is the first time some
/// bond exceeds threshold - 1 (fixed level) or threshold - 1 - eps t / d
/// (moving level, which is (t* - t)/t* at the default threshold).
BreakResult simulate_stationary_level(const ChainModel& model, const SimConfig& cfg, std::uint64_t seed,
                                      bool moving_level);

/// CSV with header t,gap_1,...,gap_d.
void write_trace_csv(const BreakResult& result, int d, std::ostream& out);

}  // namespace chainbreak
