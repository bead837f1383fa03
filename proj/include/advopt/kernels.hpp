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

#ifndef ADVOPT_KERNELS_HPP
#define ADVOPT_KERNELS_HPP

/** \file kernels.hpp
 * Coordinate-wise inner loops of every update rule.
 *
 * Two implementations with identical signatures:
 *  - kernels::serial   plain loops, the reference used by the tests;
 *  - kernels::parallel OpenMP loops.
 *
 * The unqualified kernels:: functions pick one by vector length only
 * (never by thread count), so a given input always takes the same path.
 * Parallel reductions sum fixed-size blocks and then add the block sums in
 * order, which makes them independent of the number of threads.
 *
 * Output spans may alias the matching input span unless noted.
 */

#include <cstddef>
#include <span>

namespace advopt::kernels {

/// Vectors at least this long use the OpenMP path.
inline constexpr std::size_t kParallelThreshold = std::size_t{1} << 15;
/// Block length of the deterministic parallel reductions.
inline constexpr std::size_t kReductionBlock = 4096;

#define ADVOPT_KERNEL_DECLS                                                   \
  /* z_i <- min(hi_i, max(lo_i, z_i)) */                                      \
  void clamp(std::span<double> z, std::span<const double> lo,                 \
             std::span<const double> hi);                                     \
  /* lo_i <= z_i <= hi_i for every i */                                       \
  bool within(std::span<const double> z, std::span<const double> lo,          \
              std::span<const double> hi);                                    \
  /* y <- y + a * x */                                                        \
  void axpy(double a, std::span<const double> x, std::span<double> y);        \
  /* out_i <- sign(x_i), sign(0) = 0 */                                       \
  void sign(std::span<const double> x, std::span<double> out);                \
  double l1_norm(std::span<const double> x);                                  \
  double l2_norm(std::span<const double> x);                                  \
  double linf_distance(std::span<const double> a, std::span<const double> b); \
  /* g <- mu * g + scale * grad */                                            \
  void momentum_update(std::span<double> g, double mu,                        \
                       std::span<const double> grad, double scale);           \
  /* v <- beta * v + (1 - beta) * src^2 */                                    \
  void ema_square(std::span<double> v, double beta,                           \
                  std::span<const double> src);                               \
  /* v <- beta * v + (1 - beta) * |src| */                                    \
  void ema_abs(std::span<double> v, double beta, std::span<const double> src); \
  /* v <- v + (grad^2 - v) / t, the running mean of squares after t terms */  \
  void running_mean_square(std::span<double> v, std::span<const double> grad, \
                           std::size_t t);                                    \
  /* out_i <- dir_i / sqrt(v_i + delta); 0 where dir_i == 0 */                \
  void rsqrt_scale(std::span<const double> dir, std::span<const double> v,    \
                   double delta, std::span<double> out);                      \
  /* out_i <- dir_i / (v_i + delta); 0 where dir_i == 0 */                    \
  void inv_scale(std::span<const double> dir, std::span<const double> v,      \
                 double delta, std::span<double> out);                        \
  /* mean <- mean + (x - mean) / count, count >= 1 */                         \
  void accumulate_mean(std::span<double> mean, std::span<const double> x,     \
                       std::size_t count);

namespace serial {
ADVOPT_KERNEL_DECLS
}  // namespace serial

namespace parallel {
ADVOPT_KERNEL_DECLS
}  // namespace parallel

ADVOPT_KERNEL_DECLS

#undef ADVOPT_KERNEL_DECLS

/// Number of threads the parallel kernels would use right now.
int available_threads();

}  // namespace advopt::kernels

#endif  // ADVOPT_KERNELS_HPP
