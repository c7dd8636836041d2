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

#include "scenesynth/geometry.h"

#include <algorithm>
#include <cmath>

namespace scenesynth {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b,
                           Vec2* closest) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Vec2 q = a + t * ab;
  if (closest != nullptr) *closest = q;
  return (p - q).norm();
}

std::vector<std::pair<Vec2, Vec2>> edges_of(std::span<const Vec2> poly) {
  std::vector<std::pair<Vec2, Vec2>> edges;
  if (poly.size() == 2) {
    edges.emplace_back(poly[0], poly[1]);
  } else if (poly.size() >= 3) {
    for (size_t i = 0; i < poly.size(); ++i) {
      edges.emplace_back(poly[i], poly[(i + 1) % poly.size()]);
    }
  }
  return edges;
}

}  // namespace

Aabb compute_aabb(std::span<const Vec3> points) {
  Aabb box;
  for (const Vec3& p : points) box.extend(p);
  return box;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    return a + (d1 / (d1 - d3)) * ab;
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    return a + (d2 / (d2 - d6)) * ac;
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }

  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

void plane_basis(const Vec3& n, Vec3* u, Vec3* v) {
  const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  *u = n.cross(helper).normalized();
  *v = n.cross(*u);
}

Vec3 newell_normal(std::span<const Vec3> polygon) {
  Vec3 n = Vec3::Zero();
  for (size_t i = 0; i < polygon.size(); ++i) {
    const Vec3& a = polygon[i];
    const Vec3& b = polygon[(i + 1) % polygon.size()];
    n.x() += (a.y() - b.y()) * (a.z() + b.z());
    n.y() += (a.z() - b.z()) * (a.x() + b.x());
    n.z() += (a.x() - b.x()) * (a.y() + b.y());
  }
  return n;
}

std::vector<Vec2> convex_hull_2d(std::vector<Vec2> points, double tol) {
  std::sort(points.begin(), points.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  points.erase(std::unique(points.begin(), points.end(),
                           [tol](const Vec2& a, const Vec2& b) {
                             return (a - b).norm() <= tol;
                           }),
               points.end());
  if (points.size() <= 2) return points;

  std::vector<Vec2> hull(2 * points.size());
  size_t k = 0;
  for (const Vec2& p : points) {
    while (k >= 2 && cross2(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <=
                         tol * (hull[k - 1] - hull[k - 2]).norm()) {
      --k;
    }
    hull[k++] = p;
  }
  for (size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    const Vec2& p = points[i];
    while (k >= lower && cross2(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <=
                             tol * (hull[k - 1] - hull[k - 2]).norm()) {
      --k;
    }
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return hull;
}

double signed_distance_to_convex_polygon(const Vec2& p,
                                         std::span<const Vec2> polygon) {
  if (polygon.empty()) return std::numeric_limits<double>::infinity();
  if (polygon.size() == 1) return (p - polygon[0]).norm();
  if (polygon.size() == 2) {
    return distance_to_segment(p, polygon[0], polygon[1], nullptr);
  }
  double max_edge = -std::numeric_limits<double>::infinity();
  double boundary = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < polygon.size(); ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % polygon.size()];
    const Vec2 e = b - a;
    const Vec2 outward(e.y(), -e.x());
    const double len = outward.norm();
    if (len == 0.0) continue;
    max_edge = std::max(max_edge, outward.dot(p - a) / len);
    boundary = std::min(boundary, distance_to_segment(p, a, b, nullptr));
  }
  return max_edge <= 0.0 ? max_edge : boundary;
}

Vec2 closest_point_on_convex_polygon(const Vec2& p,
                                     std::span<const Vec2> polygon) {
  if (polygon.size() == 1) return polygon[0];
  if (polygon.size() >= 3 && signed_distance_to_convex_polygon(p, polygon) <= 0.0) {
    return p;
  }
  Vec2 best = polygon[0];
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : edges_of(polygon)) {
    Vec2 q;
    const double d = distance_to_segment(p, a, b, &q);
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  return best;
}

std::vector<Vec2> intersect_convex_polygons(std::span<const Vec2> a,
                                            std::span<const Vec2> b,
                                            double tol) {
  std::vector<Vec2> candidates;
  for (const Vec2& p : a) {
    if (signed_distance_to_convex_polygon(p, b) <= tol) candidates.push_back(p);
  }
  for (const Vec2& p : b) {
    if (signed_distance_to_convex_polygon(p, a) <= tol) candidates.push_back(p);
  }
  for (const auto& [p0, p1] : edges_of(a)) {
    for (const auto& [q0, q1] : edges_of(b)) {
      const Vec2 r = p1 - p0;
      const Vec2 s = q1 - q0;
      const double denom = cross2(r, s);
      if (std::abs(denom) <= 1e-15 * r.norm() * s.norm()) continue;
      const double t = cross2(q0 - p0, s) / denom;
      const double u = cross2(q0 - p0, r) / denom;
      if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) {
        candidates.push_back(p0 + t * r);
      }
    }
  }
  return convex_hull_2d(std::move(candidates), 1e-12);
}

bool is_convex_polygon(std::span<const Vec2> polygon, double tol) {
  if (polygon.size() < 3) return false;
  int sign = 0;
  for (size_t i = 0; i < polygon.size(); ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % polygon.size()];
    const Vec2& c = polygon[(i + 2) % polygon.size()];
    const double cr = cross2(b - a, c - b);
    if (std::abs(cr) <= tol) continue;
    const int s = cr > 0.0 ? 1 : -1;
    if (sign == 0) {
      sign = s;
    } else if (s != sign) {
      return false;
    }
  }
  return sign != 0;
}

double intersect_ray_triangle(const Vec3& origin, const Vec3& dir,
                              const Vec3& a, const Vec3& b, const Vec3& c,
                              double* margin) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 pvec = dir.cross(e2);
  const double det = e1.dot(pvec);
  if (std::abs(det) < 1e-18) return -1.0;
  const double inv = 1.0 / det;
  const Vec3 tvec = origin - a;
  const double u = tvec.dot(pvec) * inv;
  if (u < 0.0 || u > 1.0) return -1.0;
  const Vec3 qvec = tvec.cross(e1);
  const double v = dir.dot(qvec) * inv;
  if (v < 0.0 || u + v > 1.0) return -1.0;
  if (margin != nullptr) *margin = std::min({u, v, 1.0 - u - v});
  return e2.dot(qvec) * inv;
}

}  // namespace scenesynth
