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

#ifndef ADVOPT_METRICS_HPP
#define ADVOPT_METRICS_HPP

#include <span>
#include <utility>
#include <vector>

#include "advopt/core.hpp"
#include "advopt/optimizers.hpp"
#include "advopt/oracles.hpp"

namespace advopt {

/// Fraction of inputs whose predicted class differs from the true label.
double success_rate(const Classifier& target, std::span<const PointVec> inputs,
                    std::span<const std::size_t> labels);

/// Mean over samples of ||adv - anchor||_inf, in coordinate units.
double ald_inf(std::span<const PointVec> adversarial,
               std::span<const PointVec> anchors);

/// J* - J(x), using the oracle's closed-form optimum over `box`. Negative
/// values within 1e-12 are reported as 0.
double convergence_gap(const Oracle& oracle, const FeasibleBox& box,
                       std::span<const double> x);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;  ///< points with gap > 0 that entered the fit
};

/// Least squares of log(gap) on log(T). Points with gap <= 0 are dropped;
/// fewer than 4 remaining is a UsageError, as is a non-increasing T.
RateFit rate_exponent(std::span<const std::pair<double, double>> gaps);

struct ConvergencePoint {
  std::size_t t = 0;
  double gap_average = 0.0;  ///< gap at the running average x_bar_t
  double gap_last = 0.0;     ///< gap at the iterate x_t
};

struct ConvergenceCurve {
  std::vector<ConvergencePoint> points;
  RunTrace trace;
};

/// One run of max(checkpoints) steps; the gaps are read at each checkpoint.
/// Valid for anytime schedules (the run does not know T in advance).
ConvergenceCurve measure_convergence(const AttackMethod& method,
                                     const Oracle& oracle,
                                     const FeasibleBox& box,
                                     std::span<const std::size_t> checkpoints,
                                     std::uint64_t seed = 0);

}  // namespace advopt

#endif  // ADVOPT_METRICS_HPP
