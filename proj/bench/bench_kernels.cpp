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

// Serial reference kernels against the OpenMP versions at image size
// (224 x 224 x 3), plus one full AdaMI step.

#include <vector>

#include <benchmark/benchmark.h>

#include "advopt/kernels.hpp"
#include "advopt/optimizers.hpp"
#include "advopt/oracles.hpp"
#include "advopt/rng.hpp"

namespace {

constexpr std::size_t kDim = 224 * 224 * 3;

std::vector<double> random_vec(std::uint64_t seed, double lo, double hi) {
  advopt::Rng rng(seed);
  std::vector<double> v(kDim);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

template <bool Parallel>
void BM_Clamp(benchmark::State& state) {
  auto z = random_vec(1, -0.5, 1.5);
  const std::vector<double> lo(kDim, 0.0), hi(kDim, 1.0);
  for (auto _ : state) {
    if constexpr (Parallel) {
      advopt::kernels::parallel::clamp(z, lo, hi);
    } else {
      advopt::kernels::serial::clamp(z, lo, hi);
    }
    benchmark::DoNotOptimize(z.data());
  }
  state.SetBytesProcessed(state.iterations() * kDim * 3 * sizeof(double));
}

template <bool Parallel>
void BM_L1Norm(benchmark::State& state) {
  const auto x = random_vec(2, -1.0, 1.0);
  for (auto _ : state) {
    double s = Parallel ? advopt::kernels::parallel::l1_norm(x)
                        : advopt::kernels::serial::l1_norm(x);
    benchmark::DoNotOptimize(s);
  }
  state.SetBytesProcessed(state.iterations() * kDim * sizeof(double));
}

template <bool Parallel>
void BM_EmaSquare(benchmark::State& state) {
  auto v = random_vec(3, 0.0, 1.0);
  const auto g = random_vec(4, -1.0, 1.0);
  for (auto _ : state) {
    if constexpr (Parallel) {
      advopt::kernels::parallel::ema_square(v, 0.9, g);
    } else {
      advopt::kernels::serial::ema_square(v, 0.9, g);
    }
    benchmark::DoNotOptimize(v.data());
  }
  state.SetBytesProcessed(state.iterations() * kDim * 2 * sizeof(double));
}

template <bool Parallel>
void BM_RsqrtScale(benchmark::State& state) {
  const auto d = random_vec(5, -1.0, 1.0);
  const auto v = random_vec(6, 0.0, 1.0);
  std::vector<double> out(kDim);
  for (auto _ : state) {
    if constexpr (Parallel) {
      advopt::kernels::parallel::rsqrt_scale(d, v, 1e-20, out);
    } else {
      advopt::kernels::serial::rsqrt_scale(d, v, 1e-20, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetBytesProcessed(state.iterations() * kDim * 3 * sizeof(double));
}

// Dispatching step on a quadratic oracle of image size.
void BM_AdaMiStep(benchmark::State& state) {
  const auto inst = advopt::make_quadratic_instance(kDim, 8.0 / 255.0, 2.0, 7);
  advopt::HyperParams hp = advopt::default_hyperparams();
  const advopt::AttackMethod m = advopt::make_method(advopt::MethodKind::kAdaMi, hp);
  advopt::AttackState s(inst.box.anchor());
  for (auto _ : state) {
    advopt::apply_step(m, s, inst.oracle, inst.box);
    benchmark::DoNotOptimize(s.x().data());
  }
}

}  // namespace

BENCHMARK(BM_Clamp<false>)->Name("clamp/serial");
BENCHMARK(BM_Clamp<true>)->Name("clamp/parallel");
BENCHMARK(BM_L1Norm<false>)->Name("l1_norm/serial");
BENCHMARK(BM_L1Norm<true>)->Name("l1_norm/parallel");
BENCHMARK(BM_EmaSquare<false>)->Name("ema_square/serial");
BENCHMARK(BM_EmaSquare<true>)->Name("ema_square/parallel");
BENCHMARK(BM_RsqrtScale<false>)->Name("rsqrt_scale/serial");
BENCHMARK(BM_RsqrtScale<true>)->Name("rsqrt_scale/parallel");
BENCHMARK(BM_AdaMiStep)->Name("adami_step")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
