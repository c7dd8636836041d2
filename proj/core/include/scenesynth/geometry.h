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

// Small geometric helpers shared by assets, physics and render.

#ifndef SCENESYNTH_GEOMETRY_H_
#define SCENESYNTH_GEOMETRY_H_

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <limits>
#include <span>
#include <vector>

namespace scenesynth {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

// World gravity points along -Z.
inline const Vec3 kUp = Vec3::UnitZ();

struct Aabb {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  bool empty() const { return (min.array() > max.array()).any(); }
  Vec3 extents() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }
  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  bool overlaps(const Aabb& other, double tol = 0.0) const {
    return (min.array() <= other.max.array() + tol).all() &&
           (other.min.array() <= max.array() + tol).all();
  }
};

Aabb compute_aabb(std::span<const Vec3> points);

// Closest point on triangle (a, b, c) to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c);

// Orthonormal (u, v) spanning the plane with unit normal n.
void plane_basis(const Vec3& n, Vec3* u, Vec3* v);

// Newell normal of a (possibly non-planar) polygon; length is twice the area.
Vec3 newell_normal(std::span<const Vec3> polygon);

// 2D convex hull (Andrew's monotone chain), counter-clockwise, collinear
// points dropped. Degenerate inputs return 1 or 2 points.
std::vector<Vec2> convex_hull_2d(std::vector<Vec2> points, double tol = 1e-12);

// Signed distance from p to a convex CCW polygon: negative inside, positive
// outside. Polygons of 1 or 2 points are treated as a point or a segment
// (distance is then >= 0).
double signed_distance_to_convex_polygon(const Vec2& p,
                                         std::span<const Vec2> polygon);

// Closest point of a convex polygon (any degeneracy) to p.
Vec2 closest_point_on_convex_polygon(const Vec2& p,
                                     std::span<const Vec2> polygon);

// Intersection of two convex CCW polygons, each possibly degenerate (point or
// segment). Returns the convex hull of the intersection region's vertices.
std::vector<Vec2> intersect_convex_polygons(std::span<const Vec2> a,
                                            std::span<const Vec2> b,
                                            double tol);

bool is_convex_polygon(std::span<const Vec2> polygon, double tol);

// Ray/triangle hit distance (Moller-Trumbore), or a negative value on miss.
// `margin` receives the minimum barycentric coordinate of the hit.
double intersect_ray_triangle(const Vec3& origin, const Vec3& dir,
                              const Vec3& a, const Vec3& b, const Vec3& c,
                              double* margin = nullptr);

}  // namespace scenesynth

#endif  // SCENESYNTH_GEOMETRY_H_
