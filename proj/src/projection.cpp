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

#include "advopt/projection.hpp"

#include "advopt/kernels.hpp"

namespace advopt {

void project_in_place(const FeasibleBox& box, std::span<double> z) {
  require_same_dim(z.size(), box.dim(), "projection");
  kernels::clamp(z, box.lower(), box.upper());
}

PointVec clip_box(const FeasibleBox& box, std::span<const double> z) {
  PointVec out(z);
  project_in_place(box, out.view());
  return out;
}

PointVec project_q(const FeasibleBox& box, std::span<const double> z) {
  return clip_box(box, z);
}

}  // namespace advopt
