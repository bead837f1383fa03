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

#ifndef ADVOPT_VERIFY_HPP
#define ADVOPT_VERIFY_HPP

/** \file verify.hpp
 * Theory checks run by `advopt verify`. Each returns one CheckResult with
 * the measured quantity and the threshold it was held to.
 */

#include <cstdint>
#include <string>
#include <vector>

namespace advopt {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// sign_as_matrix(g, 0) == sign(g) exactly on `count` random vectors.
CheckResult check_sign_identity(std::uint64_t seed, std::size_t count = 10000);

/// AdaMI with beta = 0 follows MI-FGSM on MLP oracles (relative 1e-6 where
/// |g_i| >= 1e-4), `runs` samples, T = 10.
CheckResult check_beta0_reduction(std::uint64_t seed, std::size_t runs = 50);

/// ||g_t||_2 <= 1 + mu / (1 - lambda) for every momentum method, for
/// (mu, lambda) = (1, 0.999) and (1, 0.5), t <= `steps`.
CheckResult check_momentum_bound(std::uint64_t seed, std::size_t steps = 10000);

/// AdaMI with alpha / sqrt(t) on a 10-D concave quadratic: fitted slope of
/// log gap(x_bar_T) over T in {100, 400, 1600, 6400}.
CheckResult check_convergence_rate(std::uint64_t seed);

/// Every iterate of every method is a box member with ALD_inf <= eps + 1e-12.
CheckResult check_feasibility(std::uint64_t seed);

/// I-FGSM on J(x) = -x^2/2 from 0.9 with alpha = 0.1 cycles without settling
/// below gap alpha^2/8; AdaMI with alpha / sqrt(t) gets below it by T = 1e4.
CheckResult check_sign_oscillation();

/// Analytic gradients of every built-in oracle against central differences.
CheckResult check_gradients(std::uint64_t seed, std::size_t points = 100);

struct GradientCheckStats {
  std::string oracle;
  std::size_t points = 0;
  double max_rel_error = 0.0;
  double mean_rel_error = 0.0;
  double max_grad_l1 = 0.0;  ///< over 1e4 uniform points of the oracle's box
};

/// Quadratic, linear and MLP oracles, `points` random inputs each, h = 1e-5.
/// MLP inputs with any |preactivation| <= 1e-3 are redrawn.
std::vector<GradientCheckStats> gradient_check_suite(std::uint64_t seed,
                                                     std::size_t points = 100);

/// A small attack experiment executed twice gives identical output.
CheckResult check_determinism(std::uint64_t seed);

std::vector<CheckResult> run_verify_suite(std::uint64_t seed);

}  // namespace advopt

#endif  // ADVOPT_VERIFY_HPP
