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

#include "advopt/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "advopt/kernels.hpp"

namespace advopt {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_step_index(std::size_t t) {
  if (t == 0) throw UsageError("schedule index t must be >= 1");
}

}  // namespace

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw UsageError(os.str());
  }
}

bool PointVec::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

// --- FeasibleBox ------------------------------------------------------------

FeasibleBox::FeasibleBox(PointVec anchor, double epsilon, double value_lo,
                         double value_hi)
    : anchor_(std::move(anchor)),
      epsilon_(epsilon),
      value_lo_(value_lo),
      value_hi_(value_hi) {
  if (anchor_.empty()) throw UsageError("FeasibleBox: empty anchor");
  if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) {
    throw UsageError("FeasibleBox: epsilon must be a finite positive number");
  }
  if (!(value_lo_ < value_hi_)) {
    throw UsageError("FeasibleBox: value_lo must be < value_hi");
  }
  if (!anchor_.all_finite()) throw UsageError("FeasibleBox: non-finite anchor");
  lower_.resize(anchor_.dim());
  upper_.resize(anchor_.dim());
  for (std::size_t i = 0; i < anchor_.dim(); ++i) {
    const double a = anchor_[i];
    if (a < value_lo_ || a > value_hi_) {
      throw UsageError("FeasibleBox: anchor coordinate outside value range");
    }
    lower_[i] = std::max(value_lo_, a - epsilon_);
    upper_[i] = std::min(value_hi_, a + epsilon_);
  }
}

bool FeasibleBox::contains(std::span<const double> z) const {
  require_same_dim(z.size(), dim(), "box_membership");
  return kernels::within(z, lower_, upper_);
}

bool box_membership(const FeasibleBox& box, std::span<const double> z) {
  return box.contains(z);
}

// --- Schedules --------------------------------------------------------------

void validate(const StepSchedule& s) {
  const double a = base_value(s);
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw UsageError("step schedule: alpha must be a finite positive number");
  }
}

void validate(const MomentumSchedule& s) {
  std::visit(Overloaded{
                 [](const ConstantMomentum& m) {
                   if (!(m.mu > 0.0) || !std::isfinite(m.mu)) {
                     throw UsageError("momentum schedule: mu must be > 0");
                   }
                 },
                 [](const GeometricMomentum& m) {
                   if (!(m.mu > 0.0) || !std::isfinite(m.mu)) {
                     throw UsageError("momentum schedule: mu must be > 0");
                   }
                   if (!(m.lambda > 0.0 && m.lambda < 1.0)) {
                     throw UsageError(
                         "momentum schedule: lambda must lie in (0, 1)");
                   }
                 },
             },
             s);
}

double base_value(const StepSchedule& s) noexcept {
  return std::visit([](const auto& v) { return v.alpha; }, s);
}

double schedule_value(const StepSchedule& s, std::size_t t) {
  require_step_index(t);
  validate(s);
  return std::visit(
      Overloaded{
          [](const ConstantStep& c) { return c.alpha; },
          [t](const InvSqrtStep& c) {
            return c.alpha / std::sqrt(static_cast<double>(t));
          },
      },
      s);
}

double schedule_value(const MomentumSchedule& s, std::size_t t) {
  require_step_index(t);
  validate(s);
  return std::visit(
      Overloaded{
          [](const ConstantMomentum& m) { return m.mu; },
          [t](const GeometricMomentum& m) {
            return m.mu * std::pow(m.lambda, static_cast<double>(t - 1));
          },
      },
      s);
}

std::string describe(const StepSchedule& s) {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const ConstantStep& c) { os << "constant(" << c.alpha << ")"; },
                 [&](const InvSqrtStep& c) { os << "invsqrt(" << c.alpha << ")"; },
             },
             s);
  return os.str();
}

std::string describe(const MomentumSchedule& s) {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const ConstantMomentum& m) { os << "constant(" << m.mu << ")"; },
                 [&](const GeometricMomentum& m) {
                   os << "geometric(" << m.mu << "," << m.lambda << ")";
                 },
             },
             s);
  return os.str();
}

void HyperParams::validate() const {
  advopt::validate(step);
  advopt::validate(momentum);
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw UsageError("beta must lie in [0, 1]");
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw UsageError("delta must be a finite positive number");
  }
  if (steps < 1) throw UsageError("iteration budget T must be >= 1");
}

HyperParams default_hyperparams(double epsilon, std::size_t steps) {
  if (steps < 1) throw UsageError("iteration budget T must be >= 1");
  HyperParams p;
  p.step = ConstantStep{epsilon / static_cast<double>(steps)};
  p.momentum = GeometricMomentum{1.0, 0.999};
  p.beta = 0.9;
  p.delta = 1e-20;
  p.steps = steps;
  return p;
}

// --- Oracle helpers ---------------------------------------------------------

Evaluation checked_evaluate(const Oracle& oracle, std::span<const double> x) {
  require_same_dim(x.size(), oracle.dim(), "oracle input");
  Evaluation e = oracle.evaluate(x);
  if (e.gradient.dim() != x.size()) {
    throw OracleError("oracle returned a gradient of the wrong dimension");
  }
  if (!std::isfinite(e.loss) || !e.gradient.all_finite()) {
    throw OracleError("oracle returned a non-finite loss or gradient");
  }
  return e;
}

// --- AttackState ------------------------------------------------------------

AttackState::AttackState(PointVec x0)
    : g(x0.dim(), 0.0), v(x0.dim(), 0.0), x_(std::move(x0)) {}

void AttackState::move_to(PointVec x) {
  require_same_dim(x.dim(), x_.dim(), "AttackState::move_to");
  x_ = std::move(x);
  cached_.reset();
}

const Evaluation& AttackState::evaluation(const Oracle& oracle) const {
  if (!cached_) cached_ = checked_evaluate(oracle, x_);
  return *cached_;
}

}  // namespace advopt
