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

#include "chainbreak/simulator.hpp"

#include "chainbreak/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace chainbreak {

namespace {

enum class Surface { kFullChain, kStationaryFixed, kStationaryMoving };

// Beyond this exponent the bridge crossing probability is below 1e-17 and the
// uniform draw is skipped.
constexpr double kBridgeCutoff = 40.0;

// Bridge uniforms are keyed by (seed, step, bond) rather than drawn from the
// trajectory stream, so the Gaussian path never depends on the level and a
// lower threshold can only move the detected break earlier.
constexpr std::uint64_t kBridgeSalt = 0xD1B54A32D192ED03ULL;

double bridge_uniform(std::uint64_t key, std::uint64_t step, int bond, int d) {
  const std::uint64_t counter = step * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(bond) + 1;
  const std::uint64_t bits = splitmix64_finalize(key + counter * kGoldenGamma);
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

class BondTracker {
 public:
  BondTracker(const ChainModel& model, Surface surface)
      : model_(model), surface_(surface), d_(model.d), n_(model.d - 1) {
    map_.resize(static_cast<std::size_t>(d_) * n_);
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < n_; ++j) map_[static_cast<std::size_t>(i) * n_ + j] = model.bond_map(i, j);
    transient_.assign(n_, 1.0);
    coords_.resize(n_);
    values_.resize(d_);
    previous_.resize(d_);
    // Noise on bond i is sigma (B^i - B^{i-1}) with B^0 = B^d = 0.
    variance_rate_.resize(d_);
    for (int i = 0; i < d_; ++i) {
      const int terms = (i > 0 ? 1 : 0) + (i < d_ - 1 ? 1 : 0);
      variance_rate_[i] = model.sigma * model.sigma * terms;
    }
  }

  // Advances the deterministic transient factors exp(lambda t) by one step.
  void step_transient(const Vector& decay) {
    for (int j = 0; j < n_; ++j) transient_[j] *= decay[j];
  }

  double level(double t) const {
    switch (surface_) {
      case Surface::kFullChain:
        return model_.threshold;
      case Surface::kStationaryFixed:
        return model_.threshold - 1.0;
      case Surface::kStationaryMoving:
        return model_.threshold - 1.0 - model_.epsilon * t / d_;
    }
    return model_.threshold;
  }

  // Bond values on the crossing surface at time t, written into values_.
  void evaluate(const EigenState& state) {
    const double eps = model_.epsilon;
    if (surface_ == Surface::kFullChain) {
      for (int j = 0; j < n_; ++j) coords_[j] = state.w[j] - eps * transient_[j] * model_.h_eig[j];
    } else {
      for (int j = 0; j < n_; ++j) coords_[j] = state.w[j];
    }
    const double base = surface_ == Surface::kFullChain ? (eps * state.t + d_) / d_ : 0.0;
    for (int i = 0; i < d_; ++i) {
      double acc = 0.0;
      const double* row = &map_[static_cast<std::size_t>(i) * n_];
      for (int j = 0; j < n_; ++j) acc += row[j] * coords_[j];
      values_[i] = surface_ == Surface::kFullChain ? base + eps * model_.delta[i] + acc : acc;
    }
  }

  void remember() { previous_ = values_; }

  const Vector& values() const { return values_; }
  const Vector& previous() const { return previous_; }
  double variance_rate(int i) const { return variance_rate_[i]; }

 private:
  const ChainModel& model_;
  Surface surface_;
  int d_;
  int n_;
  std::vector<double> map_;
  Vector transient_;
  Vector coords_;
  Vector values_;
  Vector previous_;
  Vector variance_rate_;
};

BreakResult run(const ChainModel& model, const SimConfig& cfg, std::uint64_t seed, Surface surface) {
  validate(cfg);
  RngStream rng(seed);
  EigenState state = cfg.initial_mode == InitialMode::kStationary ? stationary_initial(model, rng)
                                                                   : zero_initial(model);
  const OuPropagator propagator(model, cfg.dt);
  BondTracker bonds(model, surface);
  const bool bridge = cfg.bridge_correction && model.sigma > 0.0;
  const std::uint64_t bridge_key = splitmix64_finalize(seed ^ kBridgeSalt);

  BreakResult result;
  auto record = [&](double t, const Vector& v) {
    result.trace.push_back(TracePoint{t, v});
  };

  bonds.evaluate(state);
  if (cfg.record_trace) record(0.0, bonds.values());
  {
    const double lvl = bonds.level(0.0);
    for (int i = 0; i < model.d; ++i) {
      if (bonds.values()[i] >= lvl) {
        result.break_time = 0.0;
        result.break_bond = i + 1;
        return result;
      }
    }
  }

  const auto max_steps = static_cast<std::uint64_t>(std::ceil(cfg.t_max / cfg.dt));
  for (std::uint64_t k = 1; k <= max_steps; ++k) {
    bonds.remember();
    const double t_prev = state.t;
    propagator.advance(state, rng);
    state.t = static_cast<double>(k) * cfg.dt;
    bonds.step_transient(propagator.decay());
    bonds.evaluate(state);
    result.steps = k;
    const double lvl_prev = bonds.level(t_prev);
    const double lvl = bonds.level(state.t);
    const Vector& now = bonds.values();
    const Vector& before = bonds.previous();

    int hit = 0;
    bool on_grid = false;
    for (int i = 0; i < model.d; ++i) {
      if (now[i] >= lvl) {
        hit = i + 1;
        on_grid = true;
        break;
      }
      if (bridge) {
        const double a = lvl_prev - before[i];
        const double b = lvl - now[i];
        const double exponent = 2.0 * a * b / (bonds.variance_rate(i) * cfg.dt);
        if (exponent < kBridgeCutoff && bridge_uniform(bridge_key, k, i, model.d) < std::exp(-exponent)) {
          hit = i + 1;
          break;
        }
      }
    }
    if (cfg.record_trace && (k % static_cast<std::uint64_t>(cfg.trace_every) == 0 || hit != 0)) {
      record(state.t, now);
    }
    if (hit != 0) {
      const int i = hit - 1;
      double t_break = state.t;
      if (cfg.refine_crossing) {
        if (on_grid) {
          // Solve g_prev + (g_now - g_prev) s = L_prev + (L_now - L_prev) s.
          const double gap_before = lvl_prev - before[i];
          const double slope = (now[i] - before[i]) - (lvl - lvl_prev);
          const double s = slope > 0.0 ? gap_before / slope : 1.0;
          t_break = t_prev + cfg.dt * std::clamp(s, 0.0, 1.0);
        } else {
          t_break = t_prev + 0.5 * cfg.dt;
        }
      }
      result.break_time = t_break;
      result.break_bond = hit;
      return result;
    }
  }
  result.censored = true;
  result.break_time = state.t;
  result.break_bond = 0;
  return result;
}

}  // namespace

void validate(const SimConfig& cfg) {
  require(std::isfinite(cfg.dt) && cfg.dt > 0.0, Errc::kInvalidArgument, "sim.dt must be > 0");
  require(std::isfinite(cfg.t_max) && cfg.t_max > cfg.dt, Errc::kInvalidArgument, "sim.t_max must exceed sim.dt");
  require(cfg.trace_every >= 1, Errc::kInvalidArgument, "sim.trace_every must be >= 1");
}

double break_horizon(const ChainModel& model) {
  if (model.epsilon <= 0.0) return std::numeric_limits<double>::infinity();
  return model.d * (model.threshold - 1.0) / model.epsilon;
}

Vector gaps(const ChainModel& model, const EigenState& state) {
  require(state.w.size() == static_cast<std::size_t>(model.d - 1), Errc::kInvalidArgument,
          "state dimension does not match the model");
  const Vector z = drift_transient(model, state.t);
  const Vector y = to_particle_coordinates(model, state);
  const double eps = model.epsilon;
  Vector out(model.d);
  for (int i = 1; i <= model.d; ++i) {
    const double z_i = i < model.d ? z[i - 1] : 0.0;
    const double z_prev = i > 1 ? z[i - 2] : 0.0;
    const double y_i = i < model.d ? y[i - 1] : 0.0;
    const double y_prev = i > 1 ? y[i - 2] : 0.0;
    out[i - 1] = (eps * state.t + model.d) / model.d + eps * (model.delta[i - 1] + z_i - z_prev) + (y_i - y_prev);
  }
  return out;
}

BreakResult simulate_break(const ChainModel& model, const SimConfig& cfg, std::uint64_t seed) {
  return run(model, cfg, seed, Surface::kFullChain);
}

BreakResult simulate_stationary_level(const ChainModel& model, const SimConfig& cfg, std::uint64_t seed,
                                      bool moving_level) {
  require(model.sigma > 0.0, Errc::kInvalidArgument, "stationary level crossing needs sigma > 0");
  require(cfg.initial_mode == InitialMode::kStationary, Errc::kInvalidArgument,
          "stationary level crossing needs initial_mode = stationary");
  require(!moving_level || model.epsilon > 0.0, Errc::kInvalidArgument, "moving level needs epsilon > 0");
  return run(model, cfg, seed, moving_level ? Surface::kStationaryMoving : Surface::kStationaryFixed);
}

void write_trace_csv(const BreakResult& result, int d, std::ostream& out) {
  out << "t";
  for (int i = 1; i <= d; ++i) out << ",gap_" << i;
  out << '\n';
  out.precision(17);
  for (const auto& p : result.trace) {
    out << p.t;
    for (double g : p.gaps) out << ',' << g;
    out << '\n';
  }
}

}  // namespace chainbreak
