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

namespace advopt::kernels::serial {

void clamp(std::span<double> z, std::span<const double> lo,
           std::span<const double> hi) {
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = std::min(hi[i], std::max(lo[i], z[i]));
  }
}

bool within(std::span<const double> z, std::span<const double> lo,
            std::span<const double> hi) {
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(lo[i] <= z[i] && z[i] <= hi[i])) return false;
  }
  return true;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void sign(std::span<const double> x, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = (x[i] > 0.0) ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
  }
}

double l1_norm(std::span<const double> x) {
  double s = 0.0;
  for (double xi : x) s += std::abs(xi);
  return s;
}

double l2_norm(std::span<const double> x) {
  double s = 0.0;
  for (double xi : x) s += xi * xi;
  return std::sqrt(s);
}

double linf_distance(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

void momentum_update(std::span<double> g, double mu,
                     std::span<const double> grad, double scale) {
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = mu * g[i] + scale * grad[i];
}

void ema_square(std::span<double> v, double beta, std::span<const double> src) {
  const double w = 1.0 - beta;
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = beta * v[i] + w * (src[i] * src[i]);
  }
}

void ema_abs(std::span<double> v, double beta, std::span<const double> src) {
  const double w = 1.0 - beta;
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = beta * v[i] + w * std::abs(src[i]);
  }
}

void running_mean_square(std::span<double> v, std::span<const double> grad,
                         std::size_t t) {
  const double inv_t = 1.0 / static_cast<double>(t);
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] += (grad[i] * grad[i] - v[i]) * inv_t;
  }
}

void rsqrt_scale(std::span<const double> dir, std::span<const double> v,
                 double delta, std::span<double> out) {
  for (std::size_t i = 0; i < dir.size(); ++i) {
    out[i] = dir[i] == 0.0 ? 0.0 : dir[i] / std::sqrt(v[i] + delta);
  }
}

void inv_scale(std::span<const double> dir, std::span<const double> v,
               double delta, std::span<double> out) {
  for (std::size_t i = 0; i < dir.size(); ++i) {
    out[i] = dir[i] == 0.0 ? 0.0 : dir[i] / (v[i] + delta);
  }
}

void accumulate_mean(std::span<double> mean, std::span<const double> x,
                     std::size_t count) {
  const double inv = 1.0 / static_cast<double>(count);
  for (std::size_t i = 0; i < mean.size(); ++i) {
    mean[i] += (x[i] - mean[i]) * inv;
  }
}

}  // namespace advopt::kernels::serial
