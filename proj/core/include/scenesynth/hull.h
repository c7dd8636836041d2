// Copyright 2026 The scenesynth Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SCENESYNTH_HULL_H_
#define SCENESYNTH_HULL_H_

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "scenesynth/geometry.h"

namespace scenesynth {

// 3D convex hull. Facets are outward-oriented triangles over `points`.
// When the input is coplanar, `planar` is set, `facets` is empty and
// `points` holds the CCW polygon (about `plane_normal`) in 3D.
struct ConvexHull {
  std::vector<Vec3> points;
  std::vector<std::array<int, 3>> facets;
  std::vector<Vec3> facet_normals;  // unit
  std::vector<double> facet_offsets;
  bool planar = false;
  Vec3 plane_normal = Vec3::Zero();

  // Positive outside, non-positive inside or on the boundary.
  double signed_distance(const Vec3& p) const;

  // Unique undirected edges (index pairs into `points`).
  std::vector<std::pair<int, int>> edges() const;

  double volume() const;
  Vec3 centroid() const;  // volume centroid; point average when planar
};

// Incremental hull. Throws Error(kValidation) for fewer than 3 distinct
// points. Coplanar input yields a hull with `planar = true`.
ConvexHull compute_hull(std::span<const Vec3> points);

}  // namespace scenesynth

#endif  // SCENESYNTH_HULL_H_
