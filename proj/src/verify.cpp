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

#include "advopt/verify.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "advopt/harness.hpp"
#include "advopt/kernels.hpp"
#include "advopt/metrics.hpp"
#include "advopt/optimizers.hpp"
#include "advopt/oracles.hpp"
#include "advopt/rng.hpp"

namespace advopt {

namespace {

const std::vector<std::string> kMomentumMethods = {"mifgsm", "nifgsm", "adamig",
                                                   "adami", "adani"};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// A trained surrogate plus correctly classified anchors, from the classifier
// defaults with the given model kind.
struct ModelFixture {
  std::shared_ptr<const Classifier> model;
  std::vector<PointVec> anchors;
  std::vector<std::size_t> labels;
};

ModelFixture model_fixture(std::uint64_t seed, const std::string& kind,
                           std::size_t samples) {
  ExperimentConfig c;
  c.kind = ExperimentKind::kAttack;
  c.seed = seed;
  c.model = kind;
  c.samples = samples;
  const ClassifierSuite s = prepare_classifiers(c, false);
  ModelFixture f;
  f.model = s.surrogate.model;
  for (std::size_t idx : s.attack_indices) {
    f.anchors.push_back(s.pool.features[idx]);
    f.labels.push_back(s.pool.labels[idx]);
  }
  return f;
}

struct NamedProblem {
  std::string name;
  std::shared_ptr<const Oracle> oracle;
  FeasibleBox box;
};

// One quadratic, one linear-model and one MLP problem per epsilon.
std::vector<NamedProblem> problem_set(std::uint64_t seed, double epsilon) {
  std::vector<NamedProblem> out;
  QuadraticInstance q = make_quadratic_instance(10, epsilon, 2.0,
                                                derive_seed(seed, 0));
  out.push_back({"quadratic",
                 std::make_shared<ConcaveQuadratic>(std::move(q.oracle)),
                 q.box});
  for (const std::string kind : {"linear", "mlp"}) {
    const ModelFixture f = model_fixture(seed, kind, 1);
    out.push_back({kind,
                   std::make_shared<ClassifierOracle>(f.model, f.labels[0]),
                   FeasibleBox(f.anchors[0], epsilon)});
  }
  return out;
}

}  // namespace

CheckResult check_sign_identity(std::uint64_t seed, std::size_t count) {
  CheckResult r;
  r.name = "sign_identity";
  r.threshold = 0.0;
  Rng rng(derive_seed(seed, 0x5167));
  std::size_t mismatches = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t d = 1 + rng.below(64);
    PointVec g(d);
    for (std::size_t i = 0; i < d; ++i) {
      // Mix of zeros, tiny, ordinary and huge magnitudes.
      switch (rng.below(4)) {
        case 0: g[i] = 0.0; break;
        case 1: g[i] = rng.normal() * 1e-150; break;
        case 2: g[i] = rng.normal(); break;
        default: g[i] = rng.normal() * 1e150; break;
      }
    }
    const PointVec s = sign_as_matrix(g, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      const double want = g[i] > 0.0 ? 1.0 : (g[i] < 0.0 ? -1.0 : 0.0);
      if (s[i] != want) ++mismatches;
    }
  }
  r.value = static_cast<double>(mismatches);
  r.passed = mismatches == 0;
  r.detail = std::to_string(count) + " vectors, " + std::to_string(mismatches) +
             " mismatched coordinates";
  return r;
}

CheckResult check_beta0_reduction(std::uint64_t seed, std::size_t runs) {
  CheckResult r;
  r.name = "beta0_reduction";
  r.threshold = 1e-6;
  const ModelFixture f = model_fixture(seed, "mlp", runs);

  HyperParams hp = default_hyperparams();
  hp.beta = 0.0;
  hp.delta = 1e-20;
  const AttackMethod adami = make_method(MethodKind::kAdaMi, hp);
  const AttackMethod mi = make_method(MethodKind::kMiFgsm, hp);

  double worst = 0.0;
  std::size_t compared = 0;
  for (std::size_t k = 0; k < f.anchors.size(); ++k) {
    const ClassifierOracle oracle(f.model, f.labels[k]);
    const FeasibleBox box(f.anchors[k], 8.0 / 255.0);
    std::vector<PointVec> xs_a;
    std::vector<PointVec> xs_m;
    std::vector<PointVec> gs_m;
    run_attack(adami, oracle, box, 10, 0,
               [&](const AttackState& s, std::span<const double>) {
                 xs_a.push_back(s.x());
               });
    run_attack(mi, oracle, box, 10, 0,
               [&](const AttackState& s, std::span<const double>) {
                 xs_m.push_back(s.x());
                 gs_m.push_back(s.g);
               });
    for (std::size_t t = 0; t < xs_m.size(); ++t) {
      for (std::size_t i = 0; i < xs_m[t].dim(); ++i) {
        if (std::fabs(gs_m[t][i]) < 1e-4) continue;
        const double ref = xs_m[t][i];
        const double err = std::fabs(xs_a[t][i] - ref) /
                           std::max(std::fabs(ref), 1e-300);
        worst = std::max(worst, err);
        ++compared;
      }
    }
  }
  r.value = worst;
  r.passed = compared > 0 && worst < r.threshold;
  r.detail = std::to_string(f.anchors.size()) + " runs, " +
             std::to_string(compared) + " coordinates compared";
  return r;
}

CheckResult check_momentum_bound(std::uint64_t seed, std::size_t steps) {
  CheckResult r;
  r.name = "momentum_bound";
  r.threshold = 1.0;  // value is max ||g_t|| / bound
  bool ok = true;
  double worst_ratio = 0.0;
  std::size_t runs = 0;
  const auto problems = problem_set(seed, 8.0 / 255.0);
  for (const double lambda : {0.999, 0.5}) {
    const double bound = 1.0 + 1.0 / (1.0 - lambda);
    HyperParams hp = default_hyperparams(8.0 / 255.0, 10);
    hp.momentum = GeometricMomentum{1.0, lambda};
    for (const auto& name : kMomentumMethods) {
      const AttackMethod method = make_method(name, hp);
      for (const auto& p : problems) {
        run_attack(method, *p.oracle, p.box, steps, 0,
                   [&](const AttackState& s, std::span<const double>) {
                     const double n = kernels::l2_norm(s.g);
                     if (!(n <= bound)) ok = false;
                     worst_ratio = std::max(worst_ratio, n / bound);
                   });
        ++runs;
      }
    }
  }
  r.value = worst_ratio;
  r.passed = ok;
  r.detail = std::to_string(runs) + " runs of " + std::to_string(steps) +
             " steps, bounds 1001 and 3";
  return r;
}

CheckResult check_convergence_rate(std::uint64_t seed) {
  CheckResult r;
  r.name = "convergence_rate";
  r.threshold = -0.4;
  const QuadraticInstance inst =
      make_quadratic_instance(10, 0.1, 2.0, derive_seed(seed, 0));
  HyperParams hp;
  hp.step = InvSqrtStep{0.05};
  hp.momentum = GeometricMomentum{1.0, 0.999};
  hp.beta = 0.5;
  const AttackMethod method = make_method(MethodKind::kAdaMi, hp);
  const std::vector<std::size_t> checkpoints = {100, 400, 1600, 6400};
  const ConvergenceCurve curve =
      measure_convergence(method, inst.oracle, inst.box, checkpoints);
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : curve.points) {
    pts.emplace_back(static_cast<double>(p.t), p.gap_average);
  }
  const double first = curve.points.front().gap_average;
  const double last = curve.points.back().gap_average;
  try {
    const RateFit fit = rate_exponent(pts);
    r.value = fit.slope;
    r.passed = fit.slope >= -1.2 && fit.slope <= -0.4 && fit.r2 >= 0.95 &&
               last < first;
    r.detail = "slope " + fmt(fit.slope) + " r2 " + fmt(fit.r2) +
               " gap(100) " + fmt(first) + " gap(6400) " + fmt(last);
  } catch (const UsageError& e) {
    r.value = std::nan("");
    r.passed = false;
    r.detail = e.what();
  }
  return r;
}

CheckResult check_feasibility(std::uint64_t seed) {
  CheckResult r;
  r.name = "feasibility";
  r.threshold = 1e-12;  // value is max(ALD_inf - eps)
  bool ok = true;
  double worst = -INFINITY;
  std::size_t iterates = 0;
  std::vector<std::string> names = method_names();
  for (std::size_t s = 0; s < 3; ++s) {
    const std::uint64_t sub = derive_seed(seed, 100 + s);
    for (const double eps : {8.0 / 255.0, 0.3}) {
      for (const auto& p : problem_set(sub, eps)) {
        for (const auto& name : names) {
          const AttackMethod method =
              make_method(name, default_hyperparams(eps, 50));
          run_attack(method, *p.oracle, p.box, 50, sub,
                     [&](const AttackState& st, std::span<const double> avg) {
                       const double d =
                           kernels::linf_distance(st.x(), p.box.anchor());
                       if (!box_membership(p.box, st.x()) ||
                           !box_membership(p.box, avg) || !(d <= eps + 1e-12)) {
                         ok = false;
                       }
                       worst = std::max(worst, d - eps);
                       ++iterates;
                     });
        }
      }
    }
  }
  r.value = worst;
  r.passed = ok;
  r.detail = std::to_string(names.size()) + " methods, " +
             std::to_string(iterates) + " iterates";
  return r;
}

CheckResult check_sign_oscillation() {
  CheckResult r;
  r.name = "sign_oscillation";
  const double alpha = 0.1;
  r.threshold = alpha * alpha / 8.0;
  const ConcaveQuadratic oracle(PointVec{0.0}, PointVec{1.0});
  const FeasibleBox box(PointVec{0.9}, 1.9, -1.0, 1.0);  // Q = [-1, 1]

  // I-FGSM with constant alpha.
  HyperParams hp;
  hp.step = ConstantStep{alpha};
  const AttackMethod ifgsm = make_method(MethodKind::kIfgsm, hp);
  const std::size_t steps = 1000;
  std::vector<double> xs;
  run_attack(ifgsm, oracle, box, steps, 0,
             [&](const AttackState& s, std::span<const double>) {
               xs.push_back(s.x()[0]);
             });
  // First t from which the iterate repeats with period exactly 2.
  std::size_t enter = xs.size();
  for (std::size_t t = xs.size() - 2; t-- > 0;) {
    if (xs[t + 2] == xs[t] && xs[t + 1] != xs[t]) {
      enter = t;
    } else {
      break;
    }
  }
  bool cycle = enter + 2 < xs.size();
  double tail_min_pair = INFINITY;  // min over windows of the larger gap
  for (std::size_t t = enter; cycle && t + 1 < xs.size(); ++t) {
    if (std::fabs(xs[t]) > alpha) cycle = false;
    const double g0 = xs[t] * xs[t] / 2.0;
    const double g1 = xs[t + 1] * xs[t + 1] / 2.0;
    tail_min_pair = std::min(tail_min_pair, std::max(g0, g1));
  }
  const bool ifgsm_stuck = cycle && tail_min_pair >= r.threshold;

  // AdaMI with alpha / sqrt(t), averaged iterate.
  HyperParams ha;
  ha.step = InvSqrtStep{alpha};
  ha.momentum = GeometricMomentum{1.0, 0.999};
  ha.beta = 0.9;
  const AttackMethod adami = make_method(MethodKind::kAdaMi, ha);
  const RunTrace tr = run_attack(adami, oracle, box, 10000, 0);
  const double gap = convergence_gap(oracle, box, tr.x_average);

  r.value = gap;
  r.passed = ifgsm_stuck && gap < r.threshold;
  r.detail = "ifgsm 2-cycle from t=" + std::to_string(enter + 1) +
             (cycle ? "" : " (not found)") + ", tail gap >= " +
             fmt(tail_min_pair) + "; adami gap(x_bar_1e4) " + fmt(gap);
  return r;
}

std::vector<GradientCheckStats> gradient_check_suite(std::uint64_t seed,
                                                     std::size_t points) {
  std::vector<GradientCheckStats> out;
  const double h = 1e-5;

  auto run = [&](const std::string& name, const Oracle& oracle,
                 const FeasibleBox& box, const MlpModel* mlp,
                 std::uint64_t stream) {
    GradientCheckStats st;
    st.oracle = name;
    Rng rng(derive_seed(seed, stream));
    const std::size_t d = oracle.dim();
    auto draw = [&] {
      PointVec x(d);
      for (std::size_t i = 0; i < d; ++i) {
        x[i] = rng.uniform(box.lower()[i], box.upper()[i]);
      }
      return x;
    };
    double total = 0.0;
    std::size_t attempts = 0;
    while (st.points < points) {
      if (++attempts > 1000 * points) {
        throw std::runtime_error("gradient check: no kink-free points for " +
                                 name);
      }
      const PointVec x = draw();
      if (mlp != nullptr) {
        const auto pre = mlp->preactivations(x);
        const bool near_kink = std::any_of(pre.begin(), pre.end(), [](double p) {
          return std::fabs(p) <= 1e-3;
        });
        if (near_kink) continue;
      }
      const Evaluation e = checked_evaluate(oracle, x);
      const PointVec fd = fd_gradient(oracle, x, h);
      const double err = gradient_relative_error(e.gradient, fd);
      st.max_rel_error = std::max(st.max_rel_error, err);
      total += err;
      ++st.points;
    }
    st.mean_rel_error = total / static_cast<double>(st.points);
    for (std::size_t k = 0; k < 10000; ++k) {
      const PointVec x = draw();
      st.max_grad_l1 = std::max(
          st.max_grad_l1, kernels::l1_norm(checked_evaluate(oracle, x).gradient));
    }
    out.push_back(st);
  };

  {
    const QuadraticInstance q =
        make_quadratic_instance(10, 0.1, 2.0, derive_seed(seed, 0));
    run("quadratic", q.oracle, q.box, nullptr, 0x6701);
  }
  for (const std::string kind : {"linear", "mlp"}) {
    const ModelFixture f = model_fixture(seed, kind, 1);
    const ClassifierOracle oracle(f.model, f.labels[0]);
    // Random inputs anywhere in the unit cube: a box of radius 1 around the
    // anchor, clipped to [0, 1].
    const FeasibleBox box(f.anchors[0], 1.0);
    const auto* mlp = dynamic_cast<const MlpModel*>(f.model.get());
    run(kind, oracle, box, mlp, kind == "mlp" ? 0x6703 : 0x6702);
  }
  return out;
}

CheckResult check_gradients(std::uint64_t seed, std::size_t points) {
  CheckResult r;
  r.name = "gradients";
  r.threshold = 1e-5;
  const auto stats = gradient_check_suite(seed, points);
  double worst = 0.0;
  std::ostringstream detail;
  for (const auto& s : stats) {
    worst = std::max(worst, s.max_rel_error);
    detail << (detail.tellp() > 0 ? " " : "") << s.oracle << "="
           << fmt(s.max_rel_error);
  }
  r.value = worst;
  r.passed = worst < r.threshold;
  r.detail = detail.str();
  return r;
}

CheckResult check_determinism(std::uint64_t seed) {
  CheckResult r;
  r.name = "determinism";
  r.threshold = 0.0;
  ExperimentConfig c;
  c.kind = ExperimentKind::kTransfer;
  c.methods = {"adami", "mifgsm", "pgd"};
  c.seed = seed;
  c.samples = 20;
  c.train_samples = 200;
  c.trace = true;
  const ExperimentOutput a = execute_experiment(c);
  const ExperimentOutput b = execute_experiment(c);
  const bool same =
      a.csv == b.csv && a.json == b.json && a.trace_csv == b.trace_csv;
  r.value = same ? 0.0 : 1.0;
  r.passed = same;
  r.detail = same ? "identical csv, json and trace" : "outputs differ";
  return r;
}

std::vector<CheckResult> run_verify_suite(std::uint64_t seed) {
  return {
      check_sign_identity(seed),   check_beta0_reduction(seed),
      check_momentum_bound(seed),  check_convergence_rate(seed),
      check_feasibility(seed),     check_sign_oscillation(),
      check_gradients(seed),       check_determinism(seed),
  };
}

}  // namespace advopt
