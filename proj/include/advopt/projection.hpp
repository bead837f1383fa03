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

#ifndef ADVOPT_PROJECTION_HPP
#define ADVOPT_PROJECTION_HPP

#include <span>

#include "advopt/core.hpp"

namespace advopt {

/// Clip_x^eps: result_i = min(hi, a_i + eps, max(lo, a_i - eps, z_i)).
PointVec clip_box(const FeasibleBox& box, std::span<const double> z);

/// Euclidean projection onto the box. For an axis-aligned box this is the
/// same coordinate-wise clamp as clip_box.
PointVec project_q(const FeasibleBox& box, std::span<const double> z);

/// In-place form used by the step rules.
void project_in_place(const FeasibleBox& box, std::span<double> z);

}  // namespace advopt

#endif  // ADVOPT_PROJECTION_HPP
