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

#include "chainbreak/sampler.hpp"

#include "chainbreak/errors.hpp"

#include <cmath>

namespace chainbreak {

double RngStream::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

EigenState zero_initial(const ChainModel& model) { return EigenState{Vector(model.d - 1, 0.0), 0.0}; }

EigenState stationary_initial(const ChainModel& model, RngStream& rng) {
  require(model.sigma > 0.0, Errc::kInvalidArgument,
          "stationary start needs sigma > 0; use zero_initial for the deterministic chain");
  EigenState s{Vector(model.d - 1), 0.0};
  for (std::size_t j = 0; j < s.w.size(); ++j) {
    s.w[j] = model.sigma / std::sqrt(-2.0 * model.spectral.lambdas[j]) * rng.normal();
  }
  return s;
}

OuPropagator::OuPropagator(const ChainModel& model, double dt) : dt_(dt) {
  require(std::isfinite(dt) && dt > 0.0, Errc::kInvalidArgument, "dt must be > 0");
  const std::size_t n = model.spectral.lambdas.size();
  decay_.resize(n);
  noise_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double lambda = model.spectral.lambdas[j];
    decay_[j] = std::exp(lambda * dt);
    noise_[j] = model.sigma * std::sqrt(-std::expm1(2.0 * lambda * dt) / (-2.0 * lambda));
  }
}

void OuPropagator::advance(EigenState& state, RngStream& rng) const noexcept {
  for (std::size_t j = 0; j < decay_.size(); ++j) {
    state.w[j] = decay_[j] * state.w[j] + noise_[j] * rng.normal();
  }
  state.t += dt_;
}

EigenState exact_step(const EigenState& state, double dt, const ChainModel& model, RngStream& rng) {
  require(state.w.size() == model.spectral.lambdas.size(), Errc::kInvalidArgument,
          "state dimension does not match the model");
  const OuPropagator step(model, dt);
  EigenState next = state;
  step.advance(next, rng);
  return next;
}

Vector to_particle_coordinates(const ChainModel& model, const EigenState& state) {
  const auto n = static_cast<Eigen::Index>(state.w.size());
  const Eigen::VectorXd y =
      model.spectral.eigvecs.transpose() * Eigen::Map<const Eigen::VectorXd>(state.w.data(), n);
  return Vector(y.data(), y.data() + y.size());
}

Vector em_step(const Vector& y, double dt, const ChainModel& model, RngStream& rng) {
  require(std::isfinite(dt) && dt > 0.0, Errc::kInvalidArgument, "dt must be > 0");
  const double fastest = -model.spectral.lambdas.back();
  require(dt * fastest < 0.5, Errc::kStability,
          "Euler-Maruyama step violates dt * max|lambda| < 0.5");
  require(y.size() == static_cast<std::size_t>(model.d - 1), Errc::kInvalidArgument,
          "state dimension does not match the model");
  const std::size_t n = y.size();
  const double noise = model.sigma * std::sqrt(dt);
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? y[i - 1] : 0.0;
    const double right = i + 1 < n ? y[i + 1] : 0.0;
    const double drift = left - 2.0 * y[i] + right;
    out[i] = y[i] + drift * dt + noise * rng.normal();
  }
  return out;
}

}  // namespace chainbreak
