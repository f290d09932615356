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

#include "chainbreak/verify.hpp"

#include "chainbreak/chain_model.hpp"
#include "chainbreak/harness.hpp"
#include "chainbreak/simulator.hpp"
#include "chainbreak/stats.hpp"
#include "chainbreak/theory.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <numeric>
#include <sstream>

namespace chainbreak {

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

// Worst deviation over the d range; detail names the dimension where it occurs.
struct Worst {
  double value = 0.0;
  int at = 0;
  void update(double v, int d) {
    if (v > value) {
      value = v;
      at = d;
    }
  }
  std::string describe() const {
    std::ostringstream s;
    s << "max deviation " << value << " at d=" << at;
    return s.str();
  }
};

CheckResult check(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    auto [ok, detail] = body();
    return {name, ok, detail};
  } catch (const std::exception& e) {
    return {name, false, std::string("threw: ") + e.what()};
  }
}

}  // namespace

std::vector<CheckResult> run_invariant_suite() {
  std::vector<CheckResult> out;

  out.push_back(check("chain: G^T G = -A, d=2..50", [] {
    Worst w;
    for (int d = 2; d <= 50; ++d) {
      const Eigen::MatrixXd g = increment_matrix(d);
      w.update(max_abs(g.transpose() * g + interaction_matrix(d)), d);
    }
    return std::pair{w.value <= 1e-12, w.describe()};
  }));

  out.push_back(check("chain: G (-A)^-1 G^T = I - P_eta/d, d=2..50", [] {
    Worst w;
    for (int d = 2; d <= 50; ++d) {
      const Eigen::MatrixXd g = increment_matrix(d);
      const Eigen::MatrixXd inv = (-interaction_matrix(d)).llt().solve(Eigen::MatrixXd::Identity(d - 1, d - 1));
      const Eigen::MatrixXd expected =
          Eigen::MatrixXd::Identity(d, d) - Eigen::MatrixXd::Constant(d, d, 1.0 / d);
      w.update(max_abs(g * inv * g.transpose() - expected), d);
    }
    return std::pair{w.value <= 1e-12, w.describe()};
  }));

  out.push_back(check("chain: A h = nu and sum(delta) = 0, d=2..50", [] {
    Worst w;
    for (int d = 2; d <= 50; ++d) {
      const ChainModel m = build_chain(d, 0.1, 0.01);
      const Eigen::VectorXd h = Eigen::Map<const Eigen::VectorXd>(m.h.data(), d - 1);
      Eigen::VectorXd nu(d - 1);
      for (int i = 1; i < d; ++i) nu(i - 1) = static_cast<double>(i) / d;
      w.update(max_abs(interaction_matrix(d) * h - nu), d);
      w.update(std::abs(std::accumulate(m.delta.begin(), m.delta.end(), 0.0)), d);
    }
    return std::pair{w.value <= 1e-12, w.describe()};
  }));

  out.push_back(check("chain: eigenpairs and orthonormality, d=2..50", [] {
    Worst residual;
    Worst ortho;
    for (int d = 2; d <= 50; ++d) {
      const SpectralData s = spectral_data(d);
      const Eigen::MatrixXd a = interaction_matrix(d);
      for (int j = 0; j < d - 1; ++j) {
        const Eigen::VectorXd q = s.eigvecs.row(j).transpose();
        residual.update((a * q - s.lambdas[j] * q).cwiseAbs().maxCoeff(), d);
      }
      ortho.update(max_abs(s.eigvecs * s.eigvecs.transpose() - Eigen::MatrixXd::Identity(d - 1, d - 1)), d);
    }
    return std::pair{residual.value <= 1e-10 && ortho.value <= 1e-12,
                     "residual: " + residual.describe() + "; QQ^T: " + ortho.describe()};
  }));

  out.push_back(check("chain: stationary bond covariance at lag 0, d=2..50", [] {
    Worst w;
    for (int d = 2; d <= 50; ++d) {
      const Eigen::MatrixXd c = stationary_gap_covariance(spectral_data(d), 0.0);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          const double expected = i == j ? (d - 1.0) / (2.0 * d) : -1.0 / (2.0 * d);
          w.update(std::abs(c(i, j) - expected), d);
        }
    }
    return std::pair{w.value <= 1e-12, w.describe()};
  }));

  out.push_back(check("chain: pairwise mixing bound |C(theta)|/v^2 <= exp(-mu theta), d=2..10", [] {
    double worst = -1.0;
    for (int d = 2; d <= 10; ++d) {
      const SpectralData s = spectral_data(d);
      const double v2 = (d - 1.0) / (2.0 * d);
      for (double theta : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        const double lhs = max_abs(stationary_gap_covariance(s, theta)) / v2;
        worst = std::max(worst, lhs - std::exp(-s.mu * theta));
      }
    }
    std::ostringstream msg;
    msg << "max excess " << worst;
    return std::pair{worst <= 1e-9, msg.str()};
  }));

  out.push_back(check("chain: Delta' + nu = A Delta (central differences)", [] {
    double worst = 0.0;
    for (int d = 2; d <= 10; ++d) {
      const ChainModel m = build_chain(d, 0.0, 0.01);
      const Eigen::MatrixXd a = interaction_matrix(d);
      for (double t : {0.05, 0.3, 1.0, 2.5, 7.0}) {
        const double step = 1e-4;
        const Vector up = deterministic_delta(m, t + step);
        const Vector dn = deterministic_delta(m, t - step);
        const Vector mid = deterministic_delta(m, t);
        const Eigen::VectorXd md = Eigen::Map<const Eigen::VectorXd>(mid.data(), d - 1);
        const Eigen::VectorXd rhs = a * md;
        for (int i = 0; i < d - 1; ++i) {
          const double deriv = (up[i] - dn[i]) / (2.0 * step);
          worst = std::max(worst, std::abs(deriv + (i + 1.0) / d - rhs(i)));
        }
      }
    }
    std::ostringstream msg;
    msg << "max residual " << worst;
    return std::pair{worst <= 1e-8, msg.str()};
  }));

  out.push_back(check("theory: a0 = sum a_i, gamma = sqrt(2) d v, per-bond minimum at d, d=2..50 (relative)", [] {
    Worst w;
    bool argmin_ok = true;
    bool law_ok = true;
    for (int d = 2; d <= 50; ++d) {
      const RegimeConstants c = chain_constants(d, 0.1, 0.01);
      w.update(std::abs(c.a0 - std::accumulate(c.a.begin(), c.a.end(), 0.0)) / c.a0, d);
      w.update(std::abs(c.gamma - std::sqrt(2.0) * d * c.v) / c.gamma, d);
      const DeterministicBreak det = deterministic_break(d, 0.01);
      const auto it = std::min_element(det.per_bond.begin(), det.per_bond.end());
      argmin_ok = argmin_ok && (it - det.per_bond.begin()) == d - 1;
      w.update(std::abs(det.per_bond.back() - det.tau) / det.tau, d);
      const Vector p = position_law(d);
      law_ok = law_ok && std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) <= 1e-12;
      for (int i = 0; i < d; ++i) law_ok = law_ok && p[i] == p[d - 1 - i];
    }
    return std::pair{w.value <= 1e-12 && argmin_ok && law_ok,
                     w.describe() + (argmin_ok ? "" : "; argmin not at d") + (law_ok ? "" : "; position law")};
  }));

  out.push_back(check("theory: limit CDFs monotone with matching derivatives", [] {
    double worst = 0.0;
    bool monotone = true;
    const double a = 4.146;
    const double b = 0.8165;
    double prev_g = 0.0;
    double prev_e = 0.0;
    for (double r = -3.0; r <= 8.0; r += 0.25) {
      const double g = gumbel_cdf(a, b, r);
      const double e = exponential_cdf(r);
      monotone = monotone && g >= prev_g && e >= prev_e && g <= 1.0 && e <= 1.0;
      prev_g = g;
      prev_e = e;
      const double step = 1e-5;
      const double dg = (gumbel_cdf(a, b, r + step) - gumbel_cdf(a, b, r - step)) / (2 * step);
      worst = std::max(worst, std::abs(dg - gumbel_pdf(a, b, r)));
      if (r > 0.01) {
        const double de = (exponential_cdf(r + step) - exponential_cdf(r - step)) / (2 * step);
        worst = std::max(worst, std::abs(de - std::exp(-r)));
      }
    }
    std::ostringstream msg;
    msg << "max derivative mismatch " << worst;
    return std::pair{monotone && worst <= 1e-6, msg.str()};
  }));

  out.push_back(check("harness: derive_seed reference vector", [] {
    const bool ok = derive_seed(0, 0) == 0xE220A8397B1DCDAFULL && derive_seed(0, 1) != derive_seed(0, 0);
    return std::pair{ok, std::string("derive_seed(0,0) = 0xE220A8397B1DCDAF")};
  }));

  out.push_back(check("stats: KS and chi-square reference values", [] {
    const std::vector<double> u{0.1, 0.5, 0.9};
    const double d = stats::ks_statistic(u, [](double x) { return std::clamp(x, 0.0, 1.0); });
    const std::vector<long long> counts{30, 40, 30};
    const std::vector<double> probs{0.25, 0.5, 0.25};
    const double x2 = stats::chisq_position_test(counts, probs).statistic;
    const stats::Interval ci = stats::proportion_ci(50, 100, 0.95);
    const bool ok = std::abs(d - 0.7 / 3.0) < 1e-12 && std::abs(x2 - 4.0) < 1e-12 &&
                    std::abs(ci.lo - 0.4038) < 1e-3 && std::abs(ci.hi - 0.5962) < 1e-3;
    std::ostringstream msg;
    msg << "D=" << d << " X2=" << x2 << " wilson=(" << ci.lo << ", " << ci.hi << ")";
    return std::pair{ok, msg.str()};
  }));

  out.push_back(check("simulator: deterministic break times", [] {
    SimConfig cfg;
    cfg.dt = 0.01;
    cfg.t_max = 250.0;
    const BreakResult r4 = simulate_break(build_chain(4, 0.0, 0.02), cfg, 1);
    cfg.t_max = 25.0;
    const BreakResult r2 = simulate_break(build_chain(2, 0.0, 0.1), cfg, 1);
    const bool ok = r4.break_bond == 4 && std::abs(r4.break_time - 196.5) <= 0.05 && r2.break_bond == 2 &&
                    std::abs(r2.break_time - 19.5) <= 0.1;
    std::ostringstream msg;
    msg << "d=4: bond " << r4.break_bond << " at " << r4.break_time << "; d=2: bond " << r2.break_bond << " at "
        << r2.break_time;
    return std::pair{ok, msg.str()};
  }));

  out.push_back(check("simulator: bond lengths telescope to d + eps t", [] {
    const ChainModel m = build_chain(5, 0.3, 0.05);
    RngStream rng(7);
    EigenState s = stationary_initial(m, rng);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
      s = exact_step(s, 0.05, m, rng);
      const Vector g = gaps(m, s);
      worst = std::max(worst, std::abs(std::accumulate(g.begin(), g.end(), 0.0) - (m.d + m.epsilon * s.t)));
    }
    std::ostringstream msg;
    msg << "max deviation " << worst;
    return std::pair{worst <= 1e-10, msg.str()};
  }));

  out.push_back(check("simulator: same seed, same trajectory", [] {
    const ChainModel m = build_chain(3, 0.2, 0.01);
    SimConfig cfg;
    cfg.t_max = 400.0;
    const BreakResult a = simulate_break(m, cfg, 99);
    const BreakResult b = simulate_break(m, cfg, 99);
    return std::pair{a.break_time == b.break_time && a.break_bond == b.break_bond && a.steps == b.steps,
                     std::string("seed 99")};
  }));

  return out;
}

}  // namespace chainbreak
