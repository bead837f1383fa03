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

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "advopt/kernels.hpp"
#include "advopt/metrics.hpp"
#include "advopt/optimizers.hpp"
#include "advopt/oracles.hpp"
#include "advopt/projection.hpp"
#include "advopt/rng.hpp"

namespace advopt {
namespace {

// J(x) = a . x, constant gradient a. Records every point it is asked about.
class LinearOracle final : public Oracle {
 public:
  explicit LinearOracle(PointVec a) : a_(std::move(a)) {}
  std::size_t dim() const override { return a_.dim(); }
  Evaluation evaluate(std::span<const double> x) const override {
    queried.emplace_back(x);
    double j = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) j += a_[i] * x[i];
    return {j, a_};
  }
  mutable std::vector<PointVec> queried;

 private:
  PointVec a_;
};

// Returns the k-th scripted gradient on the k-th call.
class ScriptedOracle final : public Oracle {
 public:
  explicit ScriptedOracle(std::vector<PointVec> grads)
      : grads_(std::move(grads)) {}
  std::size_t dim() const override { return grads_.front().dim(); }
  Evaluation evaluate(std::span<const double>) const override {
    const PointVec& g = grads_[std::min(calls_, grads_.size() - 1)];
    ++calls_;
    return {0.0, g};
  }

 private:
  std::vector<PointVec> grads_;
  mutable std::size_t calls_ = 0;
};

// Fails on the n-th evaluation.
class FailingOracle final : public Oracle {
 public:
  FailingOracle(std::size_t dim, std::size_t fail_at)
      : dim_(dim), fail_at_(fail_at) {}
  std::size_t dim() const override { return dim_; }
  Evaluation evaluate(std::span<const double> x) const override {
    if (++calls_ == fail_at_) return {std::nan(""), PointVec(x)};
    return {0.0, PointVec(dim_, 1.0)};
  }

 private:
  std::size_t dim_;
  std::size_t fail_at_;
  mutable std::size_t calls_ = 0;
};

// Seeded concave quadratic whose optimum may sit on a face.
QuadraticInstance quad(std::uint64_t seed, std::size_t d = 6, double eps = 0.1) {
  return make_quadratic_instance(d, eps, 2.0, seed);
}

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// --- independent reference rules (plain scalar loops) -------------------------

struct Ref {
  std::vector<double> x, g, v;
  std::size_t t = 0;
};

std::vector<double> ref_clip(const FeasibleBox& box, std::vector<double> z) {
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double lo = std::max(box.value_lo(), box.anchor()[i] - box.epsilon());
    const double hi = std::min(box.value_hi(), box.anchor()[i] + box.epsilon());
    z[i] = std::min(hi, std::max(lo, z[i]));
  }
  return z;
}

std::vector<double> grad_at(const Oracle& o, const std::vector<double>& x) {
  const auto e = o.evaluate(x);
  return {e.gradient.begin(), e.gradient.end()};
}

std::vector<double> ref_normalized(const std::vector<double>& grad) {
  double l1 = 0.0;
  for (double g : grad) l1 += std::fabs(g);
  std::vector<double> out(grad.size(), 0.0);
  if (l1 < 1e-12) return out;
  for (std::size_t i = 0; i < grad.size(); ++i) out[i] = grad[i] / l1;
  return out;
}

using RefStep = std::function<void(Ref&, const Oracle&, const FeasibleBox&,
                                   double alpha_t, double mu_t)>;

RefStep ref_rule(MethodKind kind, double alpha_base, double beta, double delta) {
  switch (kind) {
    case MethodKind::kPgm:
      return [](Ref& s, const Oracle& o, const FeasibleBox& b, double a, double) {
        auto gr = grad_at(o, s.x);
        for (std::size_t i = 0; i < gr.size(); ++i) s.x[i] += a * gr[i];
        s.x = ref_clip(b, s.x);
      };
    case MethodKind::kAdaGrad:
      return [=](Ref& s, const Oracle& o, const FeasibleBox& b, double, double) {
        const double t = static_cast<double>(s.t + 1);
        auto gr = grad_at(o, s.x);
        for (std::size_t i = 0; i < gr.size(); ++i) {
          s.v[i] = (s.v[i] * (t - 1.0) + gr[i] * gr[i]) / t;
          const double d = gr[i] == 0.0 ? 0.0 : gr[i] / std::sqrt(s.v[i] + delta);
          s.x[i] += alpha_base / std::sqrt(t) * d;
        }
        s.x = ref_clip(b, s.x);
      };
    case MethodKind::kIfgsm:
      return [](Ref& s, const Oracle& o, const FeasibleBox& b, double a, double) {
        auto gr = grad_at(o, s.x);
        for (std::size_t i = 0; i < gr.size(); ++i) s.x[i] += a * sgn(gr[i]);
        s.x = ref_clip(b, s.x);
      };
    case MethodKind::kL1Ema:
      return [=](Ref& s, const Oracle& o, const FeasibleBox& b, double a, double) {
        auto gr = grad_at(o, s.x);
        for (std::size_t i = 0; i < gr.size(); ++i) {
          s.v[i] = beta * s.v[i] + (1.0 - beta) * std::fabs(gr[i]);
          s.x[i] += a * (gr[i] == 0.0 ? 0.0 : gr[i] / (s.v[i] + delta));
        }
        s.x = ref_clip(b, s.x);
      };
    case MethodKind::kMiFgsm:
      return [](Ref& s, const Oracle& o, const FeasibleBox& b, double a, double mu) {
        auto n = ref_normalized(grad_at(o, s.x));
        for (std::size_t i = 0; i < n.size(); ++i) {
          s.g[i] = mu * s.g[i] + n[i];
          s.x[i] += a * sgn(s.g[i]);
        }
        s.x = ref_clip(b, s.x);
      };
    case MethodKind::kNiFgsm:
      return [](Ref& s, const Oracle& o, const FeasibleBox& b, double a, double mu) {
        std::vector<double> nes(s.x.size());
        for (std::size_t i = 0; i < nes.size(); ++i) nes[i] = s.x[i] + a * s.g[i];
        auto n = ref_normalized(grad_at(o, nes));
        for (std::size_t i = 0; i < n.size(); ++i) {
          s.g[i] = mu * s.g[i] + n[i];
          s.x[i] += a * sgn(s.g[i]);
        }
        s.x = ref_clip(b, s.x);
      };
    case MethodKind::kAdaMiG:
    case MethodKind::kAdaMi: {
      const bool momentum_v = kind == MethodKind::kAdaMi;
      return [=](Ref& s, const Oracle& o, const FeasibleBox& b, double a, double mu) {
        auto gr = grad_at(o, s.x);
        auto n = ref_normalized(gr);
        for (std::size_t i = 0; i < n.size(); ++i) {
          s.g[i] = mu * s.g[i] + n[i];
          const double src = momentum_v ? s.g[i] : gr[i];
          s.v[i] = beta * s.v[i] + (1.0 - beta) * src * src;
          s.x[i] += a * (s.g[i] == 0.0 ? 0.0 : s.g[i] / std::sqrt(s.v[i] + delta));
        }
        s.x = ref_clip(b, s.x);
      };
    }
    default:
      return {};
  }
}

// Runs the reference for T steps and compares every iterate with run_attack.
void expect_matches_reference(MethodKind kind, const HyperParams& hp,
                              const Oracle& oracle, const FeasibleBox& box,
                              std::size_t steps, double rel_tol) {
  const AttackMethod method = make_method(kind, hp);
  std::vector<PointVec> got;
  run_attack(method, oracle, box, steps, 0,
             [&](const AttackState& s, std::span<const double>) {
               got.push_back(s.x());
             });
  ASSERT_EQ(got.size(), steps);
  const RefStep step = ref_rule(kind, base_value(hp.step), hp.beta, hp.delta);
  Ref r;
  r.x.assign(box.anchor().begin(), box.anchor().end());
  r.g.assign(box.dim(), 0.0);
  r.v.assign(box.dim(), 0.0);
  for (std::size_t t = 1; t <= steps; ++t) {
    step(r, oracle, box, schedule_value(hp.step, t), schedule_value(hp.momentum, t));
    r.t = t;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      ASSERT_NEAR(got[t - 1][i], r.x[i], rel_tol * std::max(1.0, std::fabs(r.x[i])))
          << method_name(kind) << " t=" << t << " i=" << i;
    }
  }
}

// --- single-step examples ----------------------------------------------------

TEST(NormalizedGradient, Examples) {
  EXPECT_EQ(normalized_gradient(PointVec{2.0, -2.0}), (PointVec{0.5, -0.5}));
  EXPECT_EQ(normalized_gradient(PointVec{1e-13, 0.0}), (PointVec{0.0, 0.0}));
  EXPECT_EQ(normalized_gradient(PointVec{0.0, 0.0}), (PointVec{0.0, 0.0}));
}

TEST(SignAsMatrix, Examples) {
  EXPECT_EQ(sign_as_matrix(PointVec{3.0, -0.5, 0.0}, 0.0),
            (PointVec{1.0, -1.0, 0.0}));
  const PointVec g{3.0, -0.5, 0.0};
  const PointVec s = sign_as_matrix(g, 1e-20);
  for (std::size_t i = 0; i < 2; ++i) {
    const double direct = std::fabs(g[i]) / std::sqrt(g[i] * g[i] + 1e-20);
    EXPECT_NEAR(std::fabs(s[i]), 1.0, 1e-9);
    EXPECT_NEAR(std::fabs(s[i]), direct, 1e-15);
    EXPECT_EQ(sgn(s[i]), sgn(g[i]));
  }
  EXPECT_EQ(s[2], 0.0);
  EXPECT_THROW(sign_as_matrix(g, -1.0), UsageError);
}

TEST(SignAsMatrix, IdentityAndRangeOnRandomVectors) {
  Rng rng(21);
  for (int k = 0; k < 10000; ++k) {
    PointVec g(1 + rng.below(32));
    for (auto& x : g) {
      const double scale = std::pow(10.0, rng.uniform(-300.0, 300.0));
      x = rng.uniform() < 0.1 ? 0.0 : rng.normal() * scale;
    }
    const PointVec s0 = sign_as_matrix(g, 0.0);
    const PointVec sd = sign_as_matrix(g, 1e-20);
    for (std::size_t i = 0; i < g.dim(); ++i) {
      ASSERT_EQ(s0[i], sgn(g[i])) << g[i];
      ASSERT_LE(std::fabs(sd[i]), 1.0);
    }
  }
}

TEST(PgmStep, Examples) {
  const FeasibleBox box(PointVec{0.0}, 1.0, -1.0, 1.0);
  const LinearOracle oracle(PointVec{10.0});
  AttackState s(PointVec{0.0});
  pgm_step(s, oracle, box, 0.05);
  EXPECT_DOUBLE_EQ(s.x()[0], 0.5);
  EXPECT_EQ(s.t, 1u);
  AttackState s2(PointVec{0.0});
  pgm_step(s2, oracle, box, 0.3);
  EXPECT_EQ(s2.x()[0], 1.0);
  EXPECT_EQ(s2.g, PointVec{0.0});
  EXPECT_EQ(s2.v, PointVec{0.0});

  const LinearOracle flat(PointVec{0.0});
  AttackState s3(PointVec{0.2});
  pgm_step(s3, flat, box, 0.3);
  EXPECT_EQ(s3.x()[0], 0.2);
}

TEST(AdaGrad, RunningMeanExample) {
  PointVec v{0.0, 0.0};
  v = adagrad_update_v(v, PointVec{1.0, 2.0}, 1);
  v = adagrad_update_v(v, PointVec{3.0, 0.0}, 2);
  // ((1 + 9) / 2, (4 + 0) / 2)
  EXPECT_EQ(v, (PointVec{5.0, 2.0}));
  EXPECT_THROW(adagrad_update_v(v, PointVec{1.0, 1.0}, 0), UsageError);
  EXPECT_THROW(adagrad_update_v(v, PointVec{1.0}, 1), UsageError);
}

TEST(AdaGrad, ConstantGradientGivesSignDirection) {
  const PointVec c{0.3, -2.0, 0.0};
  const LinearOracle oracle(c);
  const FeasibleBox box(PointVec{0.5, 0.5, 0.5}, 0.4);
  AttackState s(box.anchor());
  const double alpha = 0.01;
  for (std::size_t t = 1; t <= 5; ++t) {
    const PointVec before = s.x();
    adagrad_step(s, oracle, box, alpha, 1e-20);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_DOUBLE_EQ(s.v[i], c[i] * c[i]);
      EXPECT_NEAR(s.x()[i] - before[i], alpha / std::sqrt(double(t)) * sgn(c[i]), 1e-15);
    }
  }
}

TEST(AdaGrad, ZeroGradientKeepsStart) {
  const LinearOracle oracle(PointVec{0.0, 0.0});
  const FeasibleBox box(PointVec{0.5, 0.5}, 0.1);
  AttackState s(box.anchor());
  for (int t = 0; t < 5; ++t) adagrad_step(s, oracle, box, 0.05, 1e-20);
  EXPECT_EQ(s.x(), box.anchor());
  EXPECT_TRUE(s.x().all_finite());
}

TEST(Fgsm, Examples) {
  const FeasibleBox box(PointVec{0.5, 0.5, 0.5}, 0.1);
  const LinearOracle oracle(PointVec{2.0, -3.0, 0.0});
  const PointVec x = fgsm(box.anchor(), oracle, box);
  EXPECT_DOUBLE_EQ(x[0] - 0.5, 0.1);
  EXPECT_DOUBLE_EQ(x[1] - 0.5, -0.1);
  EXPECT_EQ(x[2], 0.5);
  EXPECT_LE(kernels::linf_distance(x, box.anchor()), 0.1 + 1e-12);
  const LinearOracle flat(PointVec{0.0, 0.0, 0.0});
  EXPECT_EQ(fgsm(box.anchor(), flat, box), box.anchor());
}

TEST(Ifgsm, NeverFlippingSignsReachEpsilon) {
  const double eps = 0.1;
  const FeasibleBox box(PointVec{0.5, 0.5, 0.5}, eps);
  const LinearOracle oracle(PointVec{1.0, -2.0, 0.0});
  AttackState s(box.anchor());
  for (int t = 0; t < 10; ++t) ifgsm_step(s, oracle, box, eps / 10.0);
  EXPECT_NEAR(std::fabs(s.x()[0] - 0.5), eps, 1e-12);
  EXPECT_NEAR(std::fabs(s.x()[1] - 0.5), eps, 1e-12);
  EXPECT_EQ(s.x()[2], 0.5);
}

TEST(Ifgsm, FlippingSignOscillatesWithAmplitudeAlpha) {
  // Gradient alternates sign every call.
  const ScriptedOracle oracle({PointVec{1.0}, PointVec{-1.0}, PointVec{1.0},
                               PointVec{-1.0}, PointVec{1.0}, PointVec{-1.0}});
  const FeasibleBox box(PointVec{0.5}, 0.3);
  AttackState s(box.anchor());
  std::vector<double> xs;
  for (int t = 0; t < 6; ++t) {
    ifgsm_step(s, oracle, box, 0.05);
    xs.push_back(s.x()[0]);
  }
  for (std::size_t t = 0; t < xs.size(); ++t) {
    EXPECT_NEAR(xs[t], t % 2 == 0 ? 0.55 : 0.5, 1e-15);
  }
}

TEST(Pgd, InitFeasibleAndZeroNoiseEqualsIfgsm) {
  const QuadraticInstance q = quad(5);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    ASSERT_TRUE(box_membership(q.box, pgd_init(q.box, rng)));
  }
  const PointVec x0 = pgd_init(q.box, PointVec(q.box.dim(), 0.0));
  EXPECT_EQ(x0, q.box.anchor());
  AttackState a(x0);
  AttackState b(q.box.anchor());
  for (int t = 0; t < 20; ++t) {
    pgd_step(a, q.oracle, q.box, 0.01);
    ifgsm_step(b, q.oracle, q.box, 0.01);
    ASSERT_EQ(a.x(), b.x());
  }
}

TEST(Pgd, SameSeedBitIdentical) {
  const QuadraticInstance q = quad(6);
  const AttackMethod m = make_method("pgd", default_hyperparams(0.1, 10));
  const RunTrace r1 = run_attack(m, q.oracle, q.box, 10, 42);
  const RunTrace r2 = run_attack(m, q.oracle, q.box, 10, 42);
  const RunTrace r3 = run_attack(m, q.oracle, q.box, 10, 43);
  EXPECT_EQ(r1.x_initial, r2.x_initial);
  EXPECT_EQ(r1.x_final, r2.x_final);
  EXPECT_NE(r1.x_initial, r3.x_initial);
}

TEST(L1Ema, FirstStepAndSignLimit) {
  const double beta = 0.3;
  const FeasibleBox box(PointVec{0.5}, 0.4);
  const LinearOracle oracle(PointVec{2.0});
  AttackState s(box.anchor());
  l1ema_step(s, oracle, box, 0.01, beta, 1e-20);
  EXPECT_DOUBLE_EQ(s.v[0], (1.0 - beta) * 2.0);

  // beta -> 0, delta -> 0: direction is sign(c).
  const LinearOracle neg(PointVec{-7.0, 0.25});
  const FeasibleBox box2(PointVec{0.5, 0.5}, 0.4);
  AttackState s2(box2.anchor());
  l1ema_step(s2, neg, box2, 0.01, 1e-12, 1e-20);
  EXPECT_NEAR(s2.x()[0] - 0.5, -0.01, 1e-12);
  EXPECT_NEAR(s2.x()[1] - 0.5, 0.01, 1e-12);

  EXPECT_THROW(l1ema_step(s2, neg, box2, 0.01, 0.0, 1e-20), UsageError);
  EXPECT_THROW(l1ema_step(s2, neg, box2, 0.01, 1.0, 1e-20), UsageError);
}

TEST(MiStep, FirstStepExample) {
  const FeasibleBox box(PointVec{0.5, 0.5}, 0.1);
  const LinearOracle oracle(PointVec{2.0, -2.0});
  AttackState s(box.anchor());
  mi_step(s, oracle, box, 0.01, 1.0);
  EXPECT_EQ(s.g, (PointVec{0.5, -0.5}));
  EXPECT_DOUBLE_EQ(s.x()[0], 0.51);
  EXPECT_DOUBLE_EQ(s.x()[1], 0.49);
}

TEST(MiStep, ZeroGradientFreezes) {
  const FeasibleBox box(PointVec{0.5, 0.5}, 0.1);
  const LinearOracle oracle(PointVec{0.0, 0.0});
  AttackState s(box.anchor());
  for (int t = 0; t < 10; ++t) mi_step(s, oracle, box, 0.01, 1.0);
  EXPECT_EQ(s.x(), box.anchor());
}

TEST(NiStep, FirstStepEqualsMi) {
  const QuadraticInstance q = quad(7);
  AttackState a(q.box.anchor());
  AttackState b(q.box.anchor());
  ni_step(a, q.oracle, q.box, 0.01, 1.0);
  mi_step(b, q.oracle, q.box, 0.01, 1.0);
  EXPECT_EQ(a.x(), b.x());
  EXPECT_EQ(a.g, b.g);
}

TEST(NiStep, LookaheadIsNotProjected) {
  const FeasibleBox box(PointVec{0.5}, 0.1);
  const LinearOracle oracle(PointVec{1.0});
  AttackState s(box.anchor());
  ni_step(s, oracle, box, 0.1, 1.0);  // g = 1, x = 0.6 (upper face)
  ni_step(s, oracle, box, 0.1, 1.0);  // lookahead 0.6 + 0.1 * 1
  ASSERT_GE(oracle.queried.size(), 2u);
  EXPECT_NEAR(oracle.queried.back()[0], 0.7, 1e-15);
  EXPECT_FALSE(box_membership(box, oracle.queried.back()));
  EXPECT_TRUE(box_membership(box, s.x()));
}

TEST(AdaMiG, FirstStepIsNotSign) {
  // beta = 0, delta -> 0, g0 = 0: direction_i = sign(grad_i) / ||grad||_1.
  const PointVec grad{2.0, -1.0, 0.5};
  const LinearOracle oracle(grad);
  const FeasibleBox box(PointVec{0.5, 0.5, 0.5}, 0.4);
  AttackState s(box.anchor());
  adamig_step(s, oracle, box, 0.35, 1.0, 0.0, 1e-20);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(s.x()[i] - 0.5, 0.35 * sgn(grad[i]) / 3.5, 1e-15);
  }
  // AdaMI under the same conditions moves by alpha * sign(g').
  AttackState m(box.anchor());
  adami_step(m, oracle, box, 0.35, 1.0, 0.0, 1e-20);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(m.x()[i] - 0.5, std::copysign(0.35, grad[i]), 1e-15);
  }
}

TEST(AdaptiveRules, VNonNegativeAndFeasible) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const QuadraticInstance q = quad(seed, 8, 0.2);
    for (auto kind : {MethodKind::kAdaMi, MethodKind::kAdaMiG,
                      MethodKind::kAdaGrad, MethodKind::kL1Ema}) {
      HyperParams hp = default_hyperparams(0.2, 30);
      hp.beta = 0.7;
      run_attack(make_method(kind, hp), q.oracle, q.box, 30, seed,
                 [&](const AttackState& s, std::span<const double>) {
                   for (double v : s.v) ASSERT_GE(v, 0.0);
                   ASSERT_TRUE(box_membership(q.box, s.x()));
                 });
    }
  }
}

// --- agreement with the reference rules --------------------------------------

TEST(Reference, EveryRuleMatchesScalarLoops) {
  const MethodKind kinds[] = {MethodKind::kPgm,    MethodKind::kAdaGrad,
                              MethodKind::kIfgsm,  MethodKind::kL1Ema,
                              MethodKind::kMiFgsm, MethodKind::kNiFgsm,
                              MethodKind::kAdaMiG, MethodKind::kAdaMi};
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const QuadraticInstance q = quad(seed, 12, 0.15);
    for (bool invsqrt : {false, true}) {
      HyperParams hp = default_hyperparams(0.15, 40);
      if (invsqrt) hp.step = InvSqrtStep{0.05};
      hp.beta = 0.8;
      hp.momentum = GeometricMomentum{1.0, 0.9};
      for (auto kind : kinds) {
        expect_matches_reference(kind, hp, q.oracle, q.box, 40, 1e-12);
      }
    }
  }
}

TEST(Reference, ClassifierOracle) {
  BlobSpec spec;
  spec.samples = 100;
  spec.seed = 3;
  const SyntheticDataset data = make_blobs(spec);
  const TrainResult model = train_model(data, ModelKind::kMlp, 4);
  const ClassifierOracle oracle(model.model, data.labels[0]);
  const FeasibleBox box(data.features[0], 8.0 / 255.0);
  HyperParams hp = default_hyperparams();
  for (auto kind : {MethodKind::kMiFgsm, MethodKind::kNiFgsm,
                    MethodKind::kAdaMiG, MethodKind::kAdaMi}) {
    expect_matches_reference(kind, hp, oracle, box, 10, 1e-12);
  }
}

// --- ada_wrap ------------------------------------------------------------------

TEST(AdaWrap, MiRuleIsAdaMiExactly) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const QuadraticInstance q = quad(seed, 10, 0.1);
    HyperParams hp;
    hp.step = seed % 2 == 0 ? StepSchedule{InvSqrtStep{0.05}}
                            : StepSchedule{ConstantStep{0.01}};
    hp.momentum = GeometricMomentum{1.0, 0.999};
    hp.beta = 0.9;
    const AttackMethod adami = make_method(MethodKind::kAdaMi, hp);
    const AttackMethod wrapped = ada_wrap(mi_direction_rule(), 0.9, 1e-20, hp);
    const RunTrace a = run_attack(adami, q.oracle, q.box, 200, 0);
    const RunTrace b = run_attack(wrapped, q.oracle, q.box, 200, 0);
    EXPECT_EQ(a.x_final, b.x_final);
    EXPECT_EQ(a.x_average, b.x_average);
    for (std::size_t t = 0; t < a.records.size(); ++t) {
      ASSERT_EQ(a.records[t].loss, b.records[t].loss);
      ASSERT_EQ(a.records[t].momentum_norm, b.records[t].momentum_norm);
    }
  }
}

TEST(AdaWrap, NiRuleWithBetaZeroIsNiFgsm) {
  BlobSpec spec;
  spec.samples = 100;
  spec.seed = 9;
  const SyntheticDataset data = make_blobs(spec);
  const TrainResult model = train_model(data, ModelKind::kMlp, 10);
  HyperParams hp = default_hyperparams();
  hp.beta = 0.0;
  const AttackMethod adani = make_method("adani", hp);
  const AttackMethod ni = make_method(MethodKind::kNiFgsm, hp);
  EXPECT_EQ(adani.kind, MethodKind::kAdaWrapped);
  EXPECT_EQ(adani.name, "adani");
  for (std::size_t k = 0; k < 10; ++k) {
    const ClassifierOracle oracle(model.model, data.labels[k]);
    const FeasibleBox box(data.features[k], 8.0 / 255.0);
    std::vector<PointVec> xa, xn, gn;
    run_attack(adani, oracle, box, 10, 0,
               [&](const AttackState& s, auto) { xa.push_back(s.x()); });
    run_attack(ni, oracle, box, 10, 0, [&](const AttackState& s, auto) {
      xn.push_back(s.x());
      gn.push_back(s.g);
    });
    for (std::size_t t = 0; t < xn.size(); ++t) {
      for (std::size_t i = 0; i < xn[t].dim(); ++i) {
        if (std::fabs(gn[t][i]) < 1e-4) continue;
        ASSERT_NEAR(xa[t][i], xn[t][i], 1e-6 * std::fabs(xn[t][i]));
      }
    }
  }
}

TEST(AdaWrap, WrongDimensionIsUsageError) {
  const QuadraticInstance q = quad(1, 4);
  DirectionRule bad = [](const AttackState&, const Oracle&, const StepContext&) {
    return PointVec(3, 1.0);
  };
  const AttackMethod m = ada_wrap(bad, 0.9, 1e-20);
  EXPECT_THROW(run_attack(m, q.oracle, q.box, 3, 0), UsageError);
  EXPECT_THROW(ada_wrap(DirectionRule{}, 0.9, 1e-20), UsageError);
}

TEST(AdaWrap, CustomRulePreservesFeasibility) {
  // A rule that ignores the oracle and pushes hard in a fixed direction.
  const QuadraticInstance q = quad(2, 5, 0.05);
  DirectionRule push = [](const AttackState& s, const Oracle&,
                          const StepContext& ctx) {
    PointVec g = s.g;
    for (std::size_t i = 0; i < g.dim(); ++i) {
      g[i] = ctx.mu * g[i] + (i % 2 == 0 ? 10.0 : -10.0);
    }
    return g;
  };
  HyperParams hp;
  hp.step = ConstantStep{0.2};
  const AttackMethod m = ada_wrap(push, 0.5, 1e-20, hp, "push");
  run_attack(m, q.oracle, q.box, 50, 0, [&](const AttackState& s, auto) {
    ASSERT_TRUE(box_membership(q.box, s.x()));
  });
}

// --- catalog -------------------------------------------------------------------

TEST(Catalog, NamesAndUnknownMethod) {
  const std::vector<std::string> want = {"pgm", "adagrad", "fgsm", "ifgsm",
                                         "pgd", "l1ema", "mifgsm", "nifgsm",
                                         "adamig", "adami", "adani"};
  EXPECT_EQ(method_names(), want);
  for (const auto& n : want) {
    EXPECT_EQ(make_method(n, HyperParams{}).name, n);
  }
  try {
    make_method("adamax", HyperParams{});
    FAIL() << "expected UsageError";
  } catch (const UsageError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("adamax"), std::string::npos);
    for (const auto& n : want) EXPECT_NE(msg.find(n), std::string::npos);
  }
  EXPECT_THROW(make_method(MethodKind::kAdaWrapped, HyperParams{}), UsageError);
  HyperParams bad;
  bad.beta = 2.0;
  EXPECT_THROW(make_method("adami", bad), UsageError);
}

// --- run_attack ----------------------------------------------------------------

TEST(RunAttack, TraceShapeAndAverage) {
  const QuadraticInstance q = quad(11, 6, 0.1);
  for (const auto& name : method_names()) {
    HyperParams hp = default_hyperparams(0.1, 25);
    const AttackMethod m = make_method(name, hp);
    PointVec sum(q.box.dim(), 0.0);
    std::size_t n = 0;
    const RunTrace tr = run_attack(m, q.oracle, q.box, 25, 1,
                                   [&](const AttackState& s, auto avg) {
                                     ++n;
                                     for (std::size_t i = 0; i < sum.dim(); ++i) {
                                       sum[i] += s.x()[i];
                                     }
                                     (void)avg;
                                   });
    const std::size_t want = name == "fgsm" ? 1 : 25;
    ASSERT_EQ(tr.records.size(), want) << name;
    ASSERT_EQ(n, want);
    for (std::size_t i = 0; i < sum.dim(); ++i) {
      EXPECT_NEAR(tr.x_average[i], sum[i] / double(n), 1e-14) << name;
    }
    for (std::size_t t = 0; t < tr.records.size(); ++t) {
      EXPECT_EQ(tr.records[t].t, t + 1);
      EXPECT_LE(tr.records[t].ald_inf, 0.1 + 1e-12);
    }
    EXPECT_EQ(tr.records.back().loss, q.oracle.loss(tr.x_final));
    EXPECT_DOUBLE_EQ(tr.records.back().ald_inf,
                     kernels::linf_distance(tr.x_final, q.box.anchor()));
  }
}

TEST(RunAttack, DeterministicForSameSeed) {
  const QuadraticInstance q = quad(12);
  for (const auto& name : method_names()) {
    const AttackMethod m = make_method(name, default_hyperparams(0.1, 15));
    const RunTrace a = run_attack(m, q.oracle, q.box, 15, 99);
    const RunTrace b = run_attack(m, q.oracle, q.box, 15, 99);
    EXPECT_EQ(a.x_final, b.x_final) << name;
    EXPECT_EQ(a.x_average, b.x_average) << name;
  }
}

TEST(RunAttack, OracleFailureCarriesPartialTrace) {
  const FeasibleBox box(PointVec(3, 0.5), 0.1);
  const FailingOracle oracle(3, 4);  // evaluations: x0, x1, x2, x3 fails
  const AttackMethod m = make_method("ifgsm", default_hyperparams(0.1, 10));
  try {
    run_attack(m, oracle, box, 10, 0);
    FAIL() << "expected AttackAborted";
  } catch (const AttackAborted& e) {
    EXPECT_EQ(e.partial().records.size(), 2u);
    EXPECT_EQ(e.partial().x_final.dim(), 3u);
  }
}

TEST(RunAttack, RejectsBadArguments) {
  const QuadraticInstance q = quad(13, 4);
  const AttackMethod m = make_method("adami", HyperParams{});
  EXPECT_THROW(run_attack(m, q.oracle, q.box, 0, 0), UsageError);
  const FeasibleBox other(PointVec(3, 0.5), 0.1);
  EXPECT_THROW(run_attack(m, q.oracle, other, 5, 0), UsageError);
}

// --- properties ------------------------------------------------------------------

TEST(Properties, FeasibilityEveryMethodEveryIterate) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (double eps : {0.01, 0.3}) {
      const QuadraticInstance q = quad(100 + seed, 10, eps);
      for (const auto& name : method_names()) {
        const AttackMethod m = make_method(name, default_hyperparams(eps, 30));
        run_attack(m, q.oracle, q.box, 30, seed, [&](const AttackState& s, auto avg) {
          ASSERT_TRUE(box_membership(q.box, s.x())) << name;
          ASSERT_TRUE(box_membership(q.box, avg)) << name;
          ASSERT_LE(kernels::linf_distance(s.x(), q.box.anchor()), eps + 1e-12);
        });
      }
    }
  }
}

TEST(Properties, MomentumBoundLambdaHalf) {
  HyperParams hp = default_hyperparams(0.1, 10);
  hp.momentum = GeometricMomentum{1.0, 0.5};
  const QuadraticInstance q = quad(14, 10, 0.1);
  for (const char* name : {"mifgsm", "nifgsm", "adamig", "adami", "adani"}) {
    const AttackMethod m = make_method(name, hp);
    run_attack(m, q.oracle, q.box, 2000, 0, [&](const AttackState& s, auto) {
      ASSERT_LE(kernels::l2_norm(s.g), 3.0) << name;
    });
  }
}

TEST(Properties, AdaMiGapShrinksWithT) {
  // gap(x_bar_{4T}) < gap(x_bar_T) for T in {25, 100, 400}.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const QuadraticInstance q = quad(derive_seed(seed, 0), 10, 0.1);
    HyperParams hp;
    hp.step = InvSqrtStep{0.05};
    hp.momentum = GeometricMomentum{1.0, 0.999};
    hp.beta = 0.5;
    const std::vector<std::size_t> ts = {25, 100, 400, 1600};
    const ConvergenceCurve c =
        measure_convergence(make_method(MethodKind::kAdaMi, hp), q.oracle, q.box, ts);
    ASSERT_EQ(c.points.size(), ts.size());
    for (std::size_t k = 0; k + 1 < c.points.size(); ++k) {
      EXPECT_GT(c.points[k].gap_average, 0.0);
      EXPECT_LT(c.points[k + 1].gap_average, c.points[k].gap_average)
          << "seed " << seed << " T " << ts[k];
    }
  }
}

TEST(Properties, SignStepCyclesNearOptimum) {
  // J(x) = -x^2 / 2 on Q = [-1, 1]; each I-FGSM step moves by exactly alpha
  // until the iterate lands in a 2-cycle inside [-alpha, alpha].
  const ConcaveQuadratic oracle(PointVec{0.0}, PointVec{1.0});
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    const double x0 = rng.uniform(-0.95, 0.95);
    const double alpha = rng.uniform(0.01, 0.2);
    if (std::fabs(x0) <= alpha) continue;
    const FeasibleBox box(PointVec{x0}, 2.0, -1.0, 1.0);
    HyperParams hp;
    hp.step = ConstantStep{alpha};
    std::vector<double> xs;
    run_attack(make_method(MethodKind::kIfgsm, hp), oracle, box, 400, 0,
               [&](const AttackState& s, auto) { xs.push_back(s.x()[0]); });
    const std::size_t n = xs.size();
    EXPECT_EQ(xs[n - 1], xs[n - 3]);
    EXPECT_EQ(xs[n - 2], xs[n - 4]);
    EXPECT_LE(std::fabs(xs[n - 1]), alpha + 1e-12);
    EXPECT_LE(std::fabs(xs[n - 2]), alpha + 1e-12);
    const double step = std::fabs(xs[n - 1] - xs[n - 2]);
    if (xs[n - 1] != xs[n - 2]) EXPECT_NEAR(step, alpha, 1e-12);
  }
}

}  // namespace
}  // namespace advopt
