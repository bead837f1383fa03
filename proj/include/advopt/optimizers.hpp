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

#ifndef ADVOPT_OPTIMIZERS_HPP
#define ADVOPT_OPTIMIZERS_HPP

/** \file optimizers.hpp
 * Step rules for box-constrained loss ascent and the driver that runs any of
 * them for T iterations.
 *
 * Every *_step function advances an AttackState by one iteration in place:
 * it reads the (cached) oracle evaluation at state.x(), updates g and v as
 * the rule requires, moves x and increments state.t. All rules except I-FGSM
 * and MI/NI-FGSM scale their direction coordinate-wise and then project onto
 * the box; the sign-based rules clip as well, so every iterate is feasible.
 *
 * Rule summary (grad = gradient at x, n(grad) = grad / ||grad||_1):
 *
 *   pgm       x' = P(x + a_t grad)
 *   adagrad   v = running mean of grad^2,  x' = P(x + a/sqrt(t) (v+d)^-1/2 grad)
 *   fgsm      x' = P(x + eps sign(grad))             (one shot)
 *   ifgsm     x' = P(x + a sign(grad))
 *   pgd       ifgsm from a uniform random start in the box
 *   l1ema     v = b v + (1-b)|grad|,  x' = P(x + a_t (v+d)^-1 grad)
 *   mifgsm    g = m_t g + n(grad),  x' = P(x + a sign(g))
 *   nifgsm    as mifgsm with grad taken at x + a g
 *   adamig    g as mifgsm, v = b v + (1-b) grad^2, x' = P(x + a_t (v+d)^-1/2 g)
 *   adami     g as mifgsm, v = b v + (1-b) g^2,    x' = P(x + a_t (v+d)^-1/2 g)
 *   adani     adami's scaling around the nifgsm momentum (see ada_wrap)
 */

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "advopt/core.hpp"
#include "advopt/rng.hpp"

namespace advopt {

enum class MethodKind {
  kPgm,
  kAdaGrad,
  kFgsm,
  kIfgsm,
  kPgd,
  kL1Ema,
  kMiFgsm,
  kNiFgsm,
  kAdaMiG,
  kAdaMi,
  kAdaWrapped,
};

/// Step-dependent scalars handed to a direction rule.
struct StepContext {
  std::size_t step = 1;  ///< 1-based index of the step being taken
  double alpha = 0.0;
  double mu = 0.0;
};

/// Produces the next momentum vector g' from the current state. Must not
/// modify the state; ada_wrap stores the result into state.g.
using DirectionRule = std::function<PointVec(
    const AttackState&, const Oracle&, const StepContext&)>;

/// g' = mu_t g + n(grad(x))
DirectionRule mi_direction_rule();
/// g' = mu_t g + n(grad(x + alpha_t g))
DirectionRule ni_direction_rule();

struct AttackMethod {
  MethodKind kind = MethodKind::kAdaMi;
  HyperParams params;
  DirectionRule rule;  ///< only used by kAdaWrapped
  std::string name;
};

AttackMethod make_method(MethodKind kind, HyperParams params);

/// Builds a method from its CLI name ("adami", "mifgsm", "adani", ...).
/// Throws UsageError naming the valid methods otherwise.
AttackMethod make_method(std::string_view name, HyperParams params);

/// Wraps a momentum rule with the momentum-based adaptive scaling: v is the
/// EMA of g'^2 and the step is a_t (v+d)^-1/2 g' followed by projection.
/// ada_wrap(mi_direction_rule(), ...) reproduces AdaMI step for step.
AttackMethod ada_wrap(DirectionRule rule, double beta, double delta,
                      HyperParams params = {}, std::string name = "ada-wrapped");

const std::vector<std::string>& method_names();
std::string method_name(MethodKind kind);
bool uses_momentum(MethodKind kind);

// --- single steps -----------------------------------------------------------

/// grad / ||grad||_1, or zero when ||grad||_1 < 1e-12.
PointVec normalized_gradient(std::span<const double> grad);

/// (v + delta)^-1/2 * grad with v_i = grad_i^2. With delta = 0 this is
/// sign(grad) (0 maps to 0).
PointVec sign_as_matrix(std::span<const double> grad, double delta);

void pgm_step(AttackState& state, const Oracle& oracle, const FeasibleBox& box,
              double alpha_t);

/// Running mean after t terms: v_prev + (grad^2 - v_prev) / t.
PointVec adagrad_update_v(std::span<const double> v_prev,
                          std::span<const double> grad, std::size_t t);

/// Uses t = state.t + 1 for both the running mean and the alpha / sqrt(t)
/// factor; `alpha` is the base step.
void adagrad_step(AttackState& state, const Oracle& oracle,
                  const FeasibleBox& box, double alpha, double delta);

/// One-shot attack from x with step box.epsilon().
PointVec fgsm(std::span<const double> x, const Oracle& oracle,
              const FeasibleBox& box);

void ifgsm_step(AttackState& state, const Oracle& oracle,
                const FeasibleBox& box, double alpha);

/// clip(anchor + u). u has one entry per coordinate.
PointVec pgd_init(const FeasibleBox& box, std::span<const double> u);
/// clip(anchor + u) with u ~ Uniform[-eps, eps]^d.
PointVec pgd_init(const FeasibleBox& box, Rng& rng);

inline void pgd_step(AttackState& state, const Oracle& oracle,
                     const FeasibleBox& box, double alpha) {
  ifgsm_step(state, oracle, box, alpha);
}

void l1ema_step(AttackState& state, const Oracle& oracle,
                const FeasibleBox& box, double alpha_t, double beta,
                double delta);

void mi_step(AttackState& state, const Oracle& oracle, const FeasibleBox& box,
             double alpha, double mu_t);

/// The lookahead point x + alpha g is evaluated as is, without projection.
void ni_step(AttackState& state, const Oracle& oracle, const FeasibleBox& box,
             double alpha, double mu_t);

void adamig_step(AttackState& state, const Oracle& oracle,
                 const FeasibleBox& box, double alpha_t, double mu_t,
                 double beta, double delta);

void adami_step(AttackState& state, const Oracle& oracle,
                const FeasibleBox& box, double alpha_t, double mu_t,
                double beta, double delta);

void ada_wrapped_step(const DirectionRule& rule, AttackState& state,
                      const Oracle& oracle, const FeasibleBox& box,
                      const StepContext& ctx, double beta, double delta);

/// Takes step number state.t + 1 of `method`, reading alpha_t and mu_t from
/// its schedules.
void apply_step(const AttackMethod& method, AttackState& state,
                const Oracle& oracle, const FeasibleBox& box);

// --- full runs --------------------------------------------------------------

struct TraceRecord {
  std::size_t t = 0;
  double loss = 0.0;           ///< J(x_t)
  double grad_norm = 0.0;      ///< ||grad J(x_t)||_2
  double ald_inf = 0.0;        ///< ||x_t - anchor||_inf
  double step_size = 0.0;      ///< ||x_t - x_{t-1}||_inf
  double momentum_norm = 0.0;  ///< ||g_t||_2, 0 for rules without momentum
};

struct RunTrace {
  std::vector<TraceRecord> records;
  PointVec x_initial;
  PointVec x_final;
  PointVec x_average;  ///< (1/T) sum_{t=1..T} x_t
};

/// Called after every step with the state and the running average so far.
using StepObserver =
    std::function<void(const AttackState&, std::span<const double>)>;

/// Raised when the oracle fails mid-run; carries the records made so far.
class AttackAborted : public std::runtime_error {
 public:
  AttackAborted(const std::string& what, RunTrace partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const RunTrace& partial() const noexcept { return partial_; }

 private:
  RunTrace partial_;
};

/// Runs `method` from the box anchor (PGD: from a random start drawn from
/// `seed`) for `steps` iterations; FGSM always takes exactly one.
RunTrace run_attack(const AttackMethod& method, const Oracle& oracle,
                    const FeasibleBox& box, std::size_t steps,
                    std::uint64_t seed, const StepObserver& observer = {});

}  // namespace advopt

#endif  // ADVOPT_OPTIMIZERS_HPP
