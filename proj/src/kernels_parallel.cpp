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

#include "advopt/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace advopt::kernels {

int available_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace parallel {
namespace {

using Index = std::int64_t;

Index ssize(std::size_t n) { return static_cast<Index>(n); }

// Sums f over each kReductionBlock-sized block in parallel, then combines the
// block results left to right. Same answer for any thread count.
template <typename BlockFn>
double blocked_sum(std::size_t n, BlockFn block_sum) {
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < ssize(blocks); ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t end = std::min(n, begin + kReductionBlock);
    partial[static_cast<std::size_t>(b)] = block_sum(begin, end);
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

}  // namespace

void clamp(std::span<double> z, std::span<const double> lo,
           std::span<const double> hi) {
  const Index n = ssize(z.size());
#pragma omp parallel for simd schedule(static)
  for (Index i = 0; i < n; ++i) {
    z[i] = std::min(hi[i], std::max(lo[i], z[i]));
  }
}

bool within(std::span<const double> z, std::span<const double> lo,
            std::span<const double> hi) {
  const Index n = ssize(z.size());
  bool ok = true;
#pragma omp parallel for schedule(static) reduction(&& : ok)
  for (Index i = 0; i < n; ++i) {
    ok = ok && (lo[i] <= z[i] && z[i] <= hi[i]);
  }
  return ok;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const Index n = ssize(y.size());
#pragma omp parallel for simd schedule(static)
  for (Index i = 0; i < n; ++i) y[i] += a * x[i];
}

void sign(std::span<const double> x, std::span<double> out) {
  const Index n = ssize(x.size());
#pragma omp parallel for simd schedule(static)
  for (Index i = 0; i < n; ++i) {
    out[i] = (x[i] > 0.0) ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
  }
}

double l1_norm(std::span<const double> x) {
  return blocked_sum(x.size(), [&](std::size_t b, std::size_t e) {
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += std::abs(x[i]);
    return s;
  });
}

double l2_norm(std::span<const double> x) {
  return std::sqrt(blocked_sum(x.size(), [&](std::size_t b, std::size_t e) {
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += x[i] * x[i];
    return s;
  }));
}

double linf_distance(std::span<const double> a, std::span<const double> b) {
  const Index n = ssize(a.size());
  double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m)
  for (Index i = 0; i < n; ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

void momentum_update(std::span<double> g, double mu,
                     std::span<const double> grad, double scale) {
  const Index n = ssize(g.size());
#pragma omp parallel for simd schedule(static)
  for (Index i = 0; i < n; ++i) g[i] = mu * g[i] + scale * grad[i];
}

void ema_square(std::span<double> v, double beta, std::span<const double> src) {
  const Index n = ssize(v.size());
  const double w = 1.0 - beta;
#pragma omp parallel for simd schedule(static)
  for (Index i = 0; i < n; ++i) v[i] = beta * v[i] + w * (src[i] * src[i]);
}

void ema_abs(std::span<double> v, double beta, std::span<const double> src) {
  const Index n = ssize(v.size());
  const double w = 1.0 - beta;
#pragma omp parallel for simd schedule(static)
  for (Index i = 0; i < n; ++i) v[i] = beta * v[i] + w * std::abs(src[i]);
}

void running_mean_square(std::span<double> v, std::span<const double> grad,
                         std::size_t t) {
  const Index n = ssize(v.size());
  const double inv_t = 1.0 / static_cast<double>(t);
#pragma omp parallel for simd schedule(static)
  for (Index i = 0; i < n; ++i) v[i] += (grad[i] * grad[i] - v[i]) * inv_t;
}

void rsqrt_scale(std::span<const double> dir, std::span<const double> v,
                 double delta, std::span<double> out) {
  const Index n = ssize(dir.size());
#pragma omp parallel for simd schedule(static)
  for (Index i = 0; i < n; ++i) {
    out[i] = dir[i] == 0.0 ? 0.0 : dir[i] / std::sqrt(v[i] + delta);
  }
}

void inv_scale(std::span<const double> dir, std::span<const double> v,
               double delta, std::span<double> out) {
  const Index n = ssize(dir.size());
#pragma omp parallel for simd schedule(static)
  for (Index i = 0; i < n; ++i) {
    out[i] = dir[i] == 0.0 ? 0.0 : dir[i] / (v[i] + delta);
  }
}

void accumulate_mean(std::span<double> mean, std::span<const double> x,
                     std::size_t count) {
  const Index n = ssize(mean.size());
  const double inv = 1.0 / static_cast<double>(count);
#pragma omp parallel for simd schedule(static)
  for (Index i = 0; i < n; ++i) mean[i] += (x[i] - mean[i]) * inv;
}

}  // namespace parallel

// Dispatch on length only.

namespace {
bool big(std::size_t n) { return n >= kParallelThreshold; }
}  // namespace

void clamp(std::span<double> z, std::span<const double> lo,
           std::span<const double> hi) {
  big(z.size()) ? parallel::clamp(z, lo, hi) : serial::clamp(z, lo, hi);
}

bool within(std::span<const double> z, std::span<const double> lo,
            std::span<const double> hi) {
  return big(z.size()) ? parallel::within(z, lo, hi)
                       : serial::within(z, lo, hi);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  big(y.size()) ? parallel::axpy(a, x, y) : serial::axpy(a, x, y);
}

void sign(std::span<const double> x, std::span<double> out) {
  big(x.size()) ? parallel::sign(x, out) : serial::sign(x, out);
}

double l1_norm(std::span<const double> x) {
  return big(x.size()) ? parallel::l1_norm(x) : serial::l1_norm(x);
}

double l2_norm(std::span<const double> x) {
  return big(x.size()) ? parallel::l2_norm(x) : serial::l2_norm(x);
}

double linf_distance(std::span<const double> a, std::span<const double> b) {
  return big(a.size()) ? parallel::linf_distance(a, b)
                       : serial::linf_distance(a, b);
}

void momentum_update(std::span<double> g, double mu,
                     std::span<const double> grad, double scale) {
  big(g.size()) ? parallel::momentum_update(g, mu, grad, scale)
                : serial::momentum_update(g, mu, grad, scale);
}

void ema_square(std::span<double> v, double beta, std::span<const double> src) {
  big(v.size()) ? parallel::ema_square(v, beta, src)
                : serial::ema_square(v, beta, src);
}

void ema_abs(std::span<double> v, double beta, std::span<const double> src) {
  big(v.size()) ? parallel::ema_abs(v, beta, src)
                : serial::ema_abs(v, beta, src);
}

void running_mean_square(std::span<double> v, std::span<const double> grad,
                         std::size_t t) {
  big(v.size()) ? parallel::running_mean_square(v, grad, t)
                : serial::running_mean_square(v, grad, t);
}

void rsqrt_scale(std::span<const double> dir, std::span<const double> v,
                 double delta, std::span<double> out) {
  big(dir.size()) ? parallel::rsqrt_scale(dir, v, delta, out)
                  : serial::rsqrt_scale(dir, v, delta, out);
}

void inv_scale(std::span<const double> dir, std::span<const double> v,
               double delta, std::span<double> out) {
  big(dir.size()) ? parallel::inv_scale(dir, v, delta, out)
                  : serial::inv_scale(dir, v, delta, out);
}

void accumulate_mean(std::span<double> mean, std::span<const double> x,
                     std::size_t count) {
  big(mean.size()) ? parallel::accumulate_mean(mean, x, count)
                   : serial::accumulate_mean(mean, x, count);
}

}  // namespace advopt::kernels
