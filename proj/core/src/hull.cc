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

#include "scenesynth/hull.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "scenesynth/error.h"

namespace scenesynth {

namespace {

struct HullFace {
  std::array<int, 3> v;
  Vec3 normal;
  double offset;
  bool alive = true;
};

uint64_t edge_key(int a, int b) {
  return (static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) |
         static_cast<uint32_t>(b);
}

HullFace make_face(const std::vector<Vec3>& pts, int a, int b, int c) {
  HullFace f;
  f.v = {a, b, c};
  f.normal = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
  const double len = f.normal.norm();
  if (len > 0.0) f.normal /= len;
  f.offset = f.normal.dot(pts[a]);
  return f;
}

ConvexHull planar_hull(const std::vector<Vec3>& pts, const Vec3& normal) {
  Vec3 u, v;
  plane_basis(normal, &u, &v);
  std::vector<Vec2> flat;
  flat.reserve(pts.size());
  for (const Vec3& p : pts) flat.emplace_back(p.dot(u), p.dot(v));
  // Keep the original 3D coordinates of the 2D hull vertices.
  std::vector<Vec2> hull2 = convex_hull_2d(flat, 0.0);
  ConvexHull hull;
  hull.planar = true;
  hull.plane_normal = normal;
  for (const Vec2& q : hull2) {
    for (size_t i = 0; i < flat.size(); ++i) {
      if (flat[i] == q) {
        hull.points.push_back(pts[i]);
        break;
      }
    }
  }
  return hull;
}

}  // namespace

ConvexHull compute_hull(std::span<const Vec3> input) {
  std::vector<Vec3> pts(input.begin(), input.end());
  for (const Vec3& p : pts) {
    if (!p.allFinite()) fail(ErrorKind::kValidation, "non-finite hull input");
  }
  std::sort(pts.begin(), pts.end(), [](const Vec3& a, const Vec3& b) {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(),
                                        b.data() + 3);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) {
    fail(ErrorKind::kValidation, "hull needs at least 3 distinct points");
  }

  const Aabb box = compute_aabb(pts);
  const double scale = box.extents().maxCoeff();
  const double eps = 1e-10 * std::max(scale, 1e-300);

  // Initial simplex: extreme pair, farthest from their line, farthest from
  // their plane.
  int i0 = 0;
  int i1 = 0;
  double best = -1.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    const double d = (pts[i] - pts[0]).squaredNorm();
    if (d > best) {
      best = d;
      i1 = static_cast<int>(i);
    }
  }
  best = -1.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    const double d = (pts[i] - pts[i1]).squaredNorm();
    if (d > best) {
      best = d;
      i0 = static_cast<int>(i);
    }
  }
  const Vec3 axis = (pts[i1] - pts[i0]).normalized();
  int i2 = -1;
  best = eps;
  for (size_t i = 0; i < pts.size(); ++i) {
    const Vec3 d = pts[i] - pts[i0];
    const double dist = (d - d.dot(axis) * axis).norm();
    if (dist > best) {
      best = dist;
      i2 = static_cast<int>(i);
    }
  }
  if (i2 < 0) fail(ErrorKind::kValidation, "hull input is collinear");
  const Vec3 n0 = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
  int i3 = -1;
  best = eps;
  for (size_t i = 0; i < pts.size(); ++i) {
    const double dist = std::abs(n0.dot(pts[i] - pts[i0]));
    if (dist > best) {
      best = dist;
      i3 = static_cast<int>(i);
    }
  }
  if (i3 < 0) return planar_hull(pts, n0);

  std::vector<HullFace> faces;
  std::unordered_map<uint64_t, int> edge_to_face;
  auto add_face = [&](int a, int b, int c) {
    const int id = static_cast<int>(faces.size());
    faces.push_back(make_face(pts, a, b, c));
    edge_to_face[edge_key(a, b)] = id;
    edge_to_face[edge_key(b, c)] = id;
    edge_to_face[edge_key(c, a)] = id;
  };
  if (n0.dot(pts[i3] - pts[i0]) > 0.0) std::swap(i1, i2);
  // Now i3 lies below the plane (i0, i1, i2), which therefore faces outward.
  add_face(i0, i1, i2);
  add_face(i0, i3, i1);
  add_face(i1, i3, i2);
  add_face(i2, i3, i0);

  std::vector<int> visible;
  std::vector<std::pair<int, int>> horizon;
  for (size_t pi = 0; pi < pts.size(); ++pi) {
    const int p = static_cast<int>(pi);
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    visible.clear();
    for (size_t f = 0; f < faces.size(); ++f) {
      if (faces[f].alive &&
          faces[f].normal.dot(pts[p]) - faces[f].offset > eps) {
        visible.push_back(static_cast<int>(f));
      }
    }
    if (visible.empty()) continue;
    for (int f : visible) faces[f].alive = false;
    horizon.clear();
    for (int f : visible) {
      const auto& v = faces[f].v;
      for (int k = 0; k < 3; ++k) {
        const int a = v[k];
        const int b = v[(k + 1) % 3];
        auto it = edge_to_face.find(edge_key(b, a));
        if (it != edge_to_face.end() && faces[it->second].alive) {
          horizon.emplace_back(a, b);
        }
      }
    }
    for (int f : visible) {
      const auto& v = faces[f].v;
      for (int k = 0; k < 3; ++k) {
        auto it = edge_to_face.find(edge_key(v[k], v[(k + 1) % 3]));
        if (it != edge_to_face.end() && it->second == f) edge_to_face.erase(it);
      }
    }
    for (const auto& [a, b] : horizon) add_face(a, b, p);
  }

  ConvexHull hull;
  std::vector<int> remap(pts.size(), -1);
  for (const HullFace& f : faces) {
    if (!f.alive) continue;
    std::array<int, 3> tri;
    for (int k = 0; k < 3; ++k) {
      int& slot = remap[f.v[k]];
      if (slot < 0) {
        slot = static_cast<int>(hull.points.size());
        hull.points.push_back(pts[f.v[k]]);
      }
      tri[k] = slot;
    }
    hull.facets.push_back(tri);
    hull.facet_normals.push_back(f.normal);
    hull.facet_offsets.push_back(f.offset);
  }
  return hull;
}

double ConvexHull::signed_distance(const Vec3& p) const {
  if (planar) {
    const double off = plane_normal.dot(p - points.front());
    Vec3 u, v;
    plane_basis(plane_normal, &u, &v);
    std::vector<Vec2> poly;
    for (const Vec3& q : points) poly.emplace_back(q.dot(u), q.dot(v));
    const double in_plane =
        signed_distance_to_convex_polygon(Vec2(p.dot(u), p.dot(v)), poly);
    if (std::abs(off) <= 1e-12) return in_plane;
    return std::hypot(off, std::max(0.0, in_plane));
  }
  double d = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < facets.size(); ++i) {
    d = std::max(d, facet_normals[i].dot(p) - facet_offsets[i]);
  }
  return d;
}

std::vector<std::pair<int, int>> ConvexHull::edges() const {
  std::vector<std::pair<int, int>> out;
  if (planar) {
    for (size_t i = 0; i < points.size(); ++i) {
      const int a = static_cast<int>(i);
      const int b = static_cast<int>((i + 1) % points.size());
      if (a != b) out.emplace_back(std::min(a, b), std::max(a, b));
    }
  } else {
    for (const auto& f : facets) {
      for (int k = 0; k < 3; ++k) {
        const int a = f[k];
        const int b = f[(k + 1) % 3];
        out.emplace_back(std::min(a, b), std::max(a, b));
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double ConvexHull::volume() const {
  if (planar || points.empty()) return 0.0;
  const Vec3& r = points.front();
  double vol = 0.0;
  for (const auto& f : facets) {
    vol += (points[f[0]] - r).dot((points[f[1]] - r).cross(points[f[2]] - r));
  }
  return vol / 6.0;
}

Vec3 ConvexHull::centroid() const {
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : points) mean += p;
  mean /= static_cast<double>(std::max<size_t>(points.size(), 1));
  if (planar) return mean;
  double vol = 0.0;
  Vec3 acc = Vec3::Zero();
  for (const auto& f : facets) {
    const Vec3& a = points[f[0]];
    const Vec3& b = points[f[1]];
    const Vec3& c = points[f[2]];
    const double v = (a - mean).dot((b - mean).cross(c - mean));
    vol += v;
    acc += v * (mean + a + b + c) / 4.0;
  }
  return vol > 0.0 ? Vec3(acc / vol) : mean;
}

}  // namespace scenesynth
