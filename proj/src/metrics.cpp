// Copyright 2026 The advopt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "advopt/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "advopt/kernels.hpp"

namespace advopt {

double success_rate(const Classifier& target, std::span<const PointVec> inputs,
                    std::span<const std::size_t> labels) {
  if (inputs.empty()) throw UsageError("success_rate: empty set");
  require_same_dim(inputs.size(), labels.size(), "success_rate labels");
  std::size_t fooled = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (predict(target, inputs[i]) != labels[i]) ++fooled;
  }
  return static_cast<double>(fooled) / static_cast<double>(inputs.size());
}

double ald_inf(std::span<const PointVec> adversarial,
               std::span<const PointVec> anchors) {
  if (adversarial.empty()) throw UsageError("ald_inf: empty set");
  require_same_dim(adversarial.size(), anchors.size(), "ald_inf pairs");
  double total = 0.0;
  for (std::size_t i = 0; i < adversarial.size(); ++i) {
    require_same_dim(adversarial[i].dim(), anchors[i].dim(), "ald_inf");
    total += kernels::linf_distance(adversarial[i], anchors[i]);
  }
  return total / static_cast<double>(adversarial.size());
}

double convergence_gap(const Oracle& oracle, const FeasibleBox& box,
                       std::span<const double> x) {
  const auto opt = oracle.optimum(box);
  if (!opt) {
    throw UsageError("convergence_gap: oracle has no closed-form optimum");
  }
  const double gap = opt->value - oracle.loss(x);
  if (gap < 0.0) {
    if (gap < -1e-12) {
      throw OracleError("convergence_gap: point beats the claimed optimum");
    }
    return 0.0;
  }
  return gap;
}

RateFit rate_exponent(std::span<const std::pair<double, double>> gaps) {
  std::vector<double> lx;
  std::vector<double> ly;
  double prev_t = -INFINITY;
  for (const auto& [t, gap] : gaps) {
    if (!(t > prev_t)) throw UsageError("rate_exponent: T must increase");
    prev_t = t;
    if (!(t > 0.0)) throw UsageError("rate_exponent: T must be positive");
    if (gap > 0.0) {
      lx.push_back(std::log(t));
      ly.push_back(std::log(gap));
    }
  }
  if (lx.size() < 4) {
    throw UsageError("rate_exponent: need at least 4 points with gap > 0");
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  RateFit fit;
  fit.points = lx.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

ConvergenceCurve measure_convergence(const AttackMethod& method,
                                     const Oracle& oracle,
                                     const FeasibleBox& box,
                                     std::span<const std::size_t> checkpoints,
                                     std::uint64_t seed) {
  if (checkpoints.empty()) throw UsageError("measure_convergence: no checkpoints");
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) ||
      std::adjacent_find(checkpoints.begin(), checkpoints.end()) !=
          checkpoints.end() ||
      checkpoints.front() == 0) {
    throw UsageError("measure_convergence: checkpoints must increase from 1");
  }
  ConvergenceCurve curve;
  std::size_t next = 0;
  auto observer = [&](const AttackState& state, std::span<const double> avg) {
    if (next < checkpoints.size() && state.t == checkpoints[next]) {
      ConvergencePoint p;
      p.t = state.t;
      p.gap_average = convergence_gap(oracle, box, avg);
      p.gap_last = convergence_gap(oracle, box, state.x());
      curve.points.push_back(p);
      ++next;
    }
  };
  curve.trace = run_attack(method, oracle, box, checkpoints.back(), seed, observer);
  return curve;
}

}  // namespace advopt
