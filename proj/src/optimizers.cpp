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

#include "advopt/optimizers.hpp"

#include <cmath>
#include <sstream>

#include "advopt/kernels.hpp"
#include "advopt/projection.hpp"

namespace advopt {

namespace {

constexpr double kL1Guard = 1e-12;

double inverse_l1(std::span<const double> grad) {
  const double l1 = kernels::l1_norm(grad);
  return l1 < kL1Guard ? 0.0 : 1.0 / l1;
}

void finish_step(AttackState& state, const FeasibleBox& box, PointVec x) {
  project_in_place(box, x.view());
  state.move_to(std::move(x));
  ++state.t;
}

// x + scale * dir, projected.
void move_along(AttackState& state, const FeasibleBox& box, double scale,
                std::span<const double> dir) {
  PointVec x = state.x();
  kernels::axpy(scale, dir, x.view());
  finish_step(state, box, std::move(x));
}

void move_along_sign(AttackState& state, const FeasibleBox& box, double alpha,
                     std::span<const double> dir) {
  PointVec s(dir.size());
  kernels::sign(dir, s.view());
  move_along(state, box, alpha, s);
}

void check_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw UsageError("beta must lie in [0, 1]");
  }
}

void check_delta(double delta) {
  if (!(delta > 0.0)) throw UsageError("delta must be > 0");
}

struct NamedKind {
  const char* name;
  MethodKind kind;
};

constexpr NamedKind kCatalog[] = {
    {"pgm", MethodKind::kPgm},       {"adagrad", MethodKind::kAdaGrad},
    {"fgsm", MethodKind::kFgsm},     {"ifgsm", MethodKind::kIfgsm},
    {"pgd", MethodKind::kPgd},       {"l1ema", MethodKind::kL1Ema},
    {"mifgsm", MethodKind::kMiFgsm}, {"nifgsm", MethodKind::kNiFgsm},
    {"adamig", MethodKind::kAdaMiG}, {"adami", MethodKind::kAdaMi},
};

}  // namespace

// --- catalog ----------------------------------------------------------------

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& e : kCatalog) v.emplace_back(e.name);
    v.emplace_back("adani");
    return v;
  }();
  return names;
}

std::string method_name(MethodKind kind) {
  for (const auto& e : kCatalog) {
    if (e.kind == kind) return e.name;
  }
  return "ada-wrapped";
}

bool uses_momentum(MethodKind kind) {
  switch (kind) {
    case MethodKind::kMiFgsm:
    case MethodKind::kNiFgsm:
    case MethodKind::kAdaMiG:
    case MethodKind::kAdaMi:
    case MethodKind::kAdaWrapped:
      return true;
    default:
      return false;
  }
}

AttackMethod make_method(MethodKind kind, HyperParams params) {
  if (kind == MethodKind::kAdaWrapped) {
    throw UsageError("use ada_wrap() to build a wrapped method");
  }
  params.validate();
  AttackMethod m;
  m.kind = kind;
  m.params = std::move(params);
  m.name = method_name(kind);
  return m;
}

AttackMethod make_method(std::string_view name, HyperParams params) {
  for (const auto& e : kCatalog) {
    if (name == e.name) return make_method(e.kind, std::move(params));
  }
  if (name == "adani") {
    const double beta = params.beta;
    const double delta = params.delta;
    return ada_wrap(ni_direction_rule(), beta, delta, std::move(params),
                    "adani");
  }
  std::ostringstream os;
  os << "unknown method '" << name << "'; valid methods:";
  for (const auto& n : method_names()) os << ' ' << n;
  throw UsageError(os.str());
}

AttackMethod ada_wrap(DirectionRule rule, double beta, double delta,
                      HyperParams params, std::string name) {
  if (!rule) throw UsageError("ada_wrap: empty direction rule");
  params.beta = beta;
  params.delta = delta;
  params.validate();
  AttackMethod m;
  m.kind = MethodKind::kAdaWrapped;
  m.params = std::move(params);
  m.rule = std::move(rule);
  m.name = std::move(name);
  return m;
}

// --- direction pieces -------------------------------------------------------

PointVec normalized_gradient(std::span<const double> grad) {
  PointVec out(grad.size(), 0.0);
  const double inv = inverse_l1(grad);
  if (inv != 0.0) kernels::axpy(inv, grad, out.view());
  return out;
}

PointVec sign_as_matrix(std::span<const double> grad, double delta) {
  if (!(delta >= 0.0)) throw UsageError("sign_as_matrix: delta must be >= 0");
  // (grad^2 + delta)^1/2 as hypot(grad, sqrt(delta)): grad^2 underflows for
  // |grad| below ~1e-154, hypot does not.
  const double root = std::sqrt(delta);
  PointVec out(grad.size());
  for (std::size_t i = 0; i < grad.size(); ++i) {
    out[i] = grad[i] == 0.0 ? 0.0 : grad[i] / std::hypot(grad[i], root);
  }
  return out;
}

DirectionRule mi_direction_rule() {
  return [](const AttackState& s, const Oracle& oracle,
            const StepContext& ctx) {
    const PointVec& grad = s.evaluation(oracle).gradient;
    PointVec g = s.g;
    kernels::momentum_update(g.view(), ctx.mu, grad, inverse_l1(grad));
    return g;
  };
}

DirectionRule ni_direction_rule() {
  return [](const AttackState& s, const Oracle& oracle,
            const StepContext& ctx) {
    PointVec lookahead = s.x();
    kernels::axpy(ctx.alpha, s.g, lookahead.view());
    const Evaluation e = checked_evaluate(oracle, lookahead);
    PointVec g = s.g;
    kernels::momentum_update(g.view(), ctx.mu, e.gradient,
                             inverse_l1(e.gradient));
    return g;
  };
}

// --- steps ------------------------------------------------------------------

void pgm_step(AttackState& state, const Oracle& oracle, const FeasibleBox& box,
              double alpha_t) {
  const PointVec grad = state.evaluation(oracle).gradient;
  move_along(state, box, alpha_t, grad);
}

PointVec adagrad_update_v(std::span<const double> v_prev,
                          std::span<const double> grad, std::size_t t) {
  if (t == 0) throw UsageError("adagrad_update_v: t must be >= 1");
  require_same_dim(v_prev.size(), grad.size(), "adagrad_update_v");
  PointVec v(v_prev);
  kernels::running_mean_square(v.view(), grad, t);
  return v;
}

void adagrad_step(AttackState& state, const Oracle& oracle,
                  const FeasibleBox& box, double alpha, double delta) {
  check_delta(delta);
  const std::size_t t = state.t + 1;
  const PointVec grad = state.evaluation(oracle).gradient;
  kernels::running_mean_square(state.v.view(), grad, t);
  PointVec dir(grad.dim());
  kernels::rsqrt_scale(grad, state.v, delta, dir.view());
  move_along(state, box, alpha / std::sqrt(static_cast<double>(t)), dir);
}

PointVec fgsm(std::span<const double> x, const Oracle& oracle,
              const FeasibleBox& box) {
  require_same_dim(x.size(), box.dim(), "fgsm");
  const Evaluation e = checked_evaluate(oracle, x);
  PointVec s(x.size());
  kernels::sign(e.gradient, s.view());
  PointVec out(x);
  kernels::axpy(box.epsilon(), s, out.view());
  project_in_place(box, out.view());
  return out;
}

void ifgsm_step(AttackState& state, const Oracle& oracle,
                const FeasibleBox& box, double alpha) {
  const PointVec grad = state.evaluation(oracle).gradient;
  move_along_sign(state, box, alpha, grad);
}

PointVec pgd_init(const FeasibleBox& box, std::span<const double> u) {
  require_same_dim(u.size(), box.dim(), "pgd_init");
  PointVec x = box.anchor();
  kernels::axpy(1.0, u, x.view());
  project_in_place(box, x.view());
  return x;
}

PointVec pgd_init(const FeasibleBox& box, Rng& rng) {
  PointVec u(box.dim());
  const double eps = box.epsilon();
  for (double& ui : u) ui = rng.uniform(-eps, eps);
  return pgd_init(box, u);
}

void l1ema_step(AttackState& state, const Oracle& oracle,
                const FeasibleBox& box, double alpha_t, double beta,
                double delta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw UsageError("l1ema: beta must lie in (0, 1)");
  }
  check_delta(delta);
  const PointVec grad = state.evaluation(oracle).gradient;
  kernels::ema_abs(state.v.view(), beta, grad);
  PointVec dir(grad.dim());
  kernels::inv_scale(grad, state.v, delta, dir.view());
  move_along(state, box, alpha_t, dir);
}

void mi_step(AttackState& state, const Oracle& oracle, const FeasibleBox& box,
             double alpha, double mu_t) {
  const PointVec& grad = state.evaluation(oracle).gradient;
  kernels::momentum_update(state.g.view(), mu_t, grad, inverse_l1(grad));
  move_along_sign(state, box, alpha, state.g);
}

void ni_step(AttackState& state, const Oracle& oracle, const FeasibleBox& box,
             double alpha, double mu_t) {
  state.g = ni_direction_rule()(state, oracle, StepContext{state.t + 1, alpha, mu_t});
  move_along_sign(state, box, alpha, state.g);
}

void adamig_step(AttackState& state, const Oracle& oracle,
                 const FeasibleBox& box, double alpha_t, double mu_t,
                 double beta, double delta) {
  check_beta(beta);
  check_delta(delta);
  const PointVec grad = state.evaluation(oracle).gradient;
  kernels::momentum_update(state.g.view(), mu_t, grad, inverse_l1(grad));
  kernels::ema_square(state.v.view(), beta, grad);
  PointVec dir(grad.dim());
  kernels::rsqrt_scale(state.g, state.v, delta, dir.view());
  move_along(state, box, alpha_t, dir);
}

void adami_step(AttackState& state, const Oracle& oracle,
                const FeasibleBox& box, double alpha_t, double mu_t,
                double beta, double delta) {
  check_beta(beta);
  check_delta(delta);
  const PointVec& grad = state.evaluation(oracle).gradient;
  kernels::momentum_update(state.g.view(), mu_t, grad, inverse_l1(grad));
  kernels::ema_square(state.v.view(), beta, state.g);
  PointVec dir(state.g.dim());
  kernels::rsqrt_scale(state.g, state.v, delta, dir.view());
  move_along(state, box, alpha_t, dir);
}

void ada_wrapped_step(const DirectionRule& rule, AttackState& state,
                      const Oracle& oracle, const FeasibleBox& box,
                      const StepContext& ctx, double beta, double delta) {
  check_beta(beta);
  check_delta(delta);
  PointVec g = rule(state, oracle, ctx);
  if (g.dim() != state.x().dim()) {
    throw UsageError("direction rule returned a vector of the wrong dimension");
  }
  state.g = std::move(g);
  kernels::ema_square(state.v.view(), beta, state.g);
  PointVec dir(state.g.dim());
  kernels::rsqrt_scale(state.g, state.v, delta, dir.view());
  move_along(state, box, ctx.alpha, dir);
}

void apply_step(const AttackMethod& m, AttackState& state, const Oracle& oracle,
                const FeasibleBox& box) {
  const HyperParams& p = m.params;
  const std::size_t s = state.t + 1;
  const double alpha = schedule_value(p.step, s);
  const double mu = schedule_value(p.momentum, s);
  switch (m.kind) {
    case MethodKind::kPgm:
      pgm_step(state, oracle, box, alpha);
      break;
    case MethodKind::kAdaGrad:
      adagrad_step(state, oracle, box, base_value(p.step), p.delta);
      break;
    case MethodKind::kFgsm: {
      PointVec x = fgsm(state.x(), oracle, box);
      state.move_to(std::move(x));
      ++state.t;
      break;
    }
    case MethodKind::kIfgsm:
    case MethodKind::kPgd:
      ifgsm_step(state, oracle, box, alpha);
      break;
    case MethodKind::kL1Ema:
      l1ema_step(state, oracle, box, alpha, p.beta, p.delta);
      break;
    case MethodKind::kMiFgsm:
      mi_step(state, oracle, box, alpha, mu);
      break;
    case MethodKind::kNiFgsm:
      ni_step(state, oracle, box, alpha, mu);
      break;
    case MethodKind::kAdaMiG:
      adamig_step(state, oracle, box, alpha, mu, p.beta, p.delta);
      break;
    case MethodKind::kAdaMi:
      adami_step(state, oracle, box, alpha, mu, p.beta, p.delta);
      break;
    case MethodKind::kAdaWrapped:
      ada_wrapped_step(m.rule, state, oracle, box, StepContext{s, alpha, mu},
                       p.beta, p.delta);
      break;
  }
}

// --- driver -----------------------------------------------------------------

RunTrace run_attack(const AttackMethod& method, const Oracle& oracle,
                    const FeasibleBox& box, std::size_t steps,
                    std::uint64_t seed, const StepObserver& observer) {
  if (steps < 1) throw UsageError("run_attack: T must be >= 1");
  require_same_dim(oracle.dim(), box.dim(), "run_attack");
  method.params.validate();

  RunTrace trace;
  if (method.kind == MethodKind::kPgd) {
    Rng rng(seed);
    trace.x_initial = pgd_init(box, rng);
  } else {
    trace.x_initial = box.anchor();
  }
  const std::size_t total = method.kind == MethodKind::kFgsm ? 1 : steps;
  trace.records.reserve(total);
  trace.x_average = PointVec(box.dim(), 0.0);

  AttackState state(trace.x_initial);
  const bool momentum = uses_momentum(method.kind);
  for (std::size_t k = 1; k <= total; ++k) {
    TraceRecord rec;
    try {
      const PointVec prev = state.x();
      apply_step(method, state, oracle, box);
      const Evaluation& e = state.evaluation(oracle);
      rec.t = state.t;
      rec.loss = e.loss;
      rec.grad_norm = kernels::l2_norm(e.gradient);
      rec.ald_inf = kernels::linf_distance(state.x(), box.anchor());
      rec.step_size = kernels::linf_distance(state.x(), prev);
      rec.momentum_norm = momentum ? kernels::l2_norm(state.g) : 0.0;
    } catch (const OracleError& err) {
      trace.x_final = state.x();
      std::ostringstream os;
      os << "attack aborted at step " << k << ": " << err.what();
      throw AttackAborted(os.str(), std::move(trace));
    }
    trace.records.push_back(rec);
    kernels::accumulate_mean(trace.x_average.view(), state.x(), k);
    if (observer) observer(state, trace.x_average);
  }
  trace.x_final = state.x();
  return trace;
}

}  // namespace advopt
