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

#ifndef ADVOPT_CORE_HPP
#define ADVOPT_CORE_HPP

/** \file core.hpp
 * Value types shared by every optimizer: points, the feasible L-infinity box,
 * step and momentum schedules, hyperparameters, per-run state and the oracle
 * interface.
 *
 * Sign convention: attacks *ascend* the oracle's loss. An oracle returns
 * J(x) and its gradient; every step rule moves along +gradient.
 */

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace advopt {

inline constexpr const char* kVersion = "1.0.0";

/// Raised on precondition violations (bad dimensions, t = 0, unknown names).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an oracle returns something unusable (wrong size, NaN).
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat coordinate vector of dimension d. Images are flattened row-major.
class PointVec {
 public:
  PointVec() = default;
  explicit PointVec(std::size_t dim, double fill = 0.0) : data_(dim, fill) {}
  PointVec(std::initializer_list<double> values) : data_(values) {}
  explicit PointVec(std::vector<double> values) : data_(std::move(values)) {}
  explicit PointVec(std::span<const double> values)
      : data_(values.begin(), values.end()) {}

  std::size_t dim() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  std::span<const double> view() const noexcept { return data_; }
  std::span<double> view() noexcept { return data_; }
  operator std::span<const double>() const noexcept { return data_; }

  const std::vector<double>& values() const noexcept { return data_; }

  bool all_finite() const noexcept;

  friend bool operator==(const PointVec&, const PointVec&) = default;

 private:
  std::vector<double> data_;
};

/// The feasible region Q: the L-infinity ball of radius epsilon around
/// `anchor`, intersected with the global value range [value_lo, value_hi].
///
/// Per-coordinate bounds are precomputed once; membership and projection
/// both read them, so a projected point always tests as a member.
class FeasibleBox {
 public:
  FeasibleBox(PointVec anchor, double epsilon, double value_lo = 0.0,
              double value_hi = 1.0);

  const PointVec& anchor() const noexcept { return anchor_; }
  double epsilon() const noexcept { return epsilon_; }
  double value_lo() const noexcept { return value_lo_; }
  double value_hi() const noexcept { return value_hi_; }
  std::size_t dim() const noexcept { return anchor_.dim(); }

  /// max(value_lo, anchor_i - epsilon)
  std::span<const double> lower() const noexcept { return lower_; }
  /// min(value_hi, anchor_i + epsilon)
  std::span<const double> upper() const noexcept { return upper_; }

  bool contains(std::span<const double> z) const;

 private:
  PointVec anchor_;
  double epsilon_;
  double value_lo_;
  double value_hi_;
  std::vector<double> lower_;
  std::vector<double> upper_;
};

bool box_membership(const FeasibleBox& box, std::span<const double> z);

// ---------------------------------------------------------------------------
// Schedules
// ---------------------------------------------------------------------------

struct ConstantStep {
  double alpha;
};

/// alpha_t = alpha / sqrt(t)
struct InvSqrtStep {
  double alpha;
};

using StepSchedule = std::variant<ConstantStep, InvSqrtStep>;

struct ConstantMomentum {
  double mu;
};

/// mu_t = mu * lambda^(t-1)
struct GeometricMomentum {
  double mu;
  double lambda;
};

using MomentumSchedule = std::variant<ConstantMomentum, GeometricMomentum>;

/// Value at iteration t >= 1. Throws UsageError for t = 0 or invalid params.
double schedule_value(const StepSchedule& s, std::size_t t);
double schedule_value(const MomentumSchedule& s, std::size_t t);

/// The alpha (or mu) the schedule was built from.
double base_value(const StepSchedule& s) noexcept;

void validate(const StepSchedule& s);
void validate(const MomentumSchedule& s);

std::string describe(const StepSchedule& s);
std::string describe(const MomentumSchedule& s);

struct HyperParams {
  StepSchedule step = ConstantStep{(8.0 / 255.0) / 10.0};
  MomentumSchedule momentum = GeometricMomentum{1.0, 0.999};
  double beta = 0.9;
  double delta = 1e-20;
  std::size_t steps = 10;

  /// Checks 0 <= beta <= 1, delta > 0, steps >= 1 and both schedules.
  void validate() const;
};

/// Defaults used by the experiments: epsilon = 8/255, T = 10,
/// alpha = epsilon / T, delta = 1e-20, mu = 1, lambda = 0.999.
HyperParams default_hyperparams(double epsilon = 8.0 / 255.0,
                                std::size_t steps = 10);

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

struct Evaluation {
  double loss = 0.0;
  PointVec gradient;
};

/// Closed-form maximizer of an oracle over a particular box.
struct Optimum {
  PointVec point;
  double value = 0.0;
};

/// Loss-and-gradient evaluator. Implementations must be safe for concurrent
/// const calls and deterministic for a fixed input.
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual std::size_t dim() const = 0;
  virtual Evaluation evaluate(std::span<const double> x) const = 0;

  virtual double loss(std::span<const double> x) const {
    return evaluate(x).loss;
  }

  /// Known maximizer over `box`, if the problem admits one in closed form.
  virtual std::optional<Optimum> optimum(const FeasibleBox& /*box*/) const {
    return std::nullopt;
  }
};

/// Calls oracle.evaluate and checks dimension and finiteness of the result.
Evaluation checked_evaluate(const Oracle& oracle, std::span<const double> x);

// ---------------------------------------------------------------------------
// Per-run state
// ---------------------------------------------------------------------------

/// Iterate x_t, momentum g_t, adaptive diagonal v_t and the number of
/// completed steps. Owned by exactly one run.
///
/// The oracle evaluation at the current iterate is cached, so the driver's
/// per-step record and the next step's gradient share one oracle call.
class AttackState {
 public:
  AttackState() = default;
  explicit AttackState(PointVec x0);

  const PointVec& x() const noexcept { return x_; }
  void move_to(PointVec x);

  PointVec g;
  PointVec v;
  std::size_t t = 0;

  /// Evaluation at x(), computed on first use after each move.
  const Evaluation& evaluation(const Oracle& oracle) const;
  bool has_cached_evaluation() const noexcept { return cached_.has_value(); }

 private:
  PointVec x_;
  mutable std::optional<Evaluation> cached_;
};

void require_same_dim(std::size_t a, std::size_t b, const char* what);

}  // namespace advopt

#endif  // ADVOPT_CORE_HPP
