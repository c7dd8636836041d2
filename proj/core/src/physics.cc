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

#include "scenesynth/physics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "scenesynth/error.h"

namespace scenesynth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const Vec3 kDown = -kUp;

void add_direction(std::vector<Vec3>& dirs, Vec3 d) {
  const double len = d.norm();
  if (len < 1e-12) return;
  d /= len;
  for (const Vec3& e : dirs) {
    if (std::abs(e.dot(d)) > 1.0 - 1e-12) return;
  }
  dirs.push_back(d);
}

void project(const std::vector<Vec3>& pts, const Vec3& axis, double* lo,
             double* hi) {
  double a = kInf;
  double b = -kInf;
  for (const Vec3& p : pts) {
    const double d = axis.dot(p);
    a = std::min(a, d);
    b = std::max(b, d);
  }
  *lo = a;
  *hi = b;
}

// Visits every separating-axis candidate; stops early when `fn` returns false.
template <typename Fn>
void for_each_axis(const ConvexPolytope& a, const ConvexPolytope& b, Fn&& fn) {
  for (const Vec3& n : a.face_normals) {
    if (!fn(n)) return;
  }
  for (const Vec3& n : b.face_normals) {
    if (!fn(n)) return;
  }
  for (const Vec3& ea : a.edge_dirs) {
    for (const Vec3& eb : b.edge_dirs) {
      Vec3 c = ea.cross(eb);
      const double len = c.norm();
      if (len < 1e-9) continue;
      if (!fn(Vec3(c / len))) return;
    }
  }
}

// Model-frame axes, computed once per distinct model in a call.
struct ShapeTemplate {
  std::vector<Vec3> face_normals;
  std::vector<Vec3> edge_dirs;
};

ShapeTemplate make_template(const ConvexHull& hull) {
  ShapeTemplate t;
  if (hull.planar) {
    add_direction(t.face_normals, hull.plane_normal);
  } else {
    for (const Vec3& n : hull.facet_normals) add_direction(t.face_normals, n);
  }
  for (const auto& [i, j] : hull.edges()) {
    add_direction(t.edge_dirs, hull.points[j] - hull.points[i]);
  }
  return t;
}

class PolytopeBuilder {
 public:
  ConvexPolytope build(const Placement& p) {
    auto it = cache_.find(p.object.get());
    if (it == cache_.end()) {
      it = cache_.emplace(p.object.get(), make_template(p.object->hull)).first;
    }
    const Eigen::Isometry3d t = p.world_from_model();
    const Eigen::Matrix3d r = t.linear();
    ConvexPolytope out;
    out.points.reserve(p.object->hull.points.size());
    for (const Vec3& q : p.object->hull.points) {
      out.points.push_back(t * q);
      out.box.extend(out.points.back());
    }
    for (const Vec3& n : it->second.face_normals) out.face_normals.push_back(r * n);
    for (const Vec3& e : it->second.edge_dirs) out.edge_dirs.push_back(r * e);
    return out;
  }

 private:
  std::unordered_map<const ObjectModel*, ShapeTemplate> cache_;
};

void translate(ConvexPolytope& poly, const Vec3& delta) {
  for (Vec3& p : poly.points) p += delta;
  poly.box.min += delta;
  poly.box.max += delta;
}

// Whether `b` can be hit by `a` moving straight down.
bool below_candidate(const ConvexPolytope& a, const ConvexPolytope& b,
                     double tol) {
  return b.box.min.z() < a.box.max.z() + tol &&
         b.box.min.x() <= a.box.max.x() + tol &&
         a.box.min.x() <= b.box.max.x() + tol &&
         b.box.min.y() <= a.box.max.y() + tol &&
         a.box.min.y() <= b.box.max.y() + tol;
}

std::vector<Vec2> feature_polygon(const std::vector<Vec3>& pts, const Vec3& n,
                                  double level, bool take_min, double ftol,
                                  const Vec3& u, const Vec3& w) {
  std::vector<Vec2> flat;
  for (const Vec3& p : pts) {
    const double d = n.dot(p);
    if (take_min ? d <= level + ftol : d >= level - ftol) {
      flat.emplace_back(u.dot(p), w.dot(p));
    }
  }
  return convex_hull_2d(std::move(flat), 1e-12);
}

// Contact manifold between `a` resting on `b` along the sweep axis.
std::vector<Vec3> contact_points(const ConvexPolytope& a,
                                 const ConvexPolytope& b, Vec3 n,
                                 double ftol) {
  if (n.dot(kDown) > 0.0) n = -n;
  double a_lo, a_hi, b_lo, b_hi;
  project(a.points, n, &a_lo, &a_hi);
  project(b.points, n, &b_lo, &b_hi);
  Vec3 u, w;
  plane_basis(n, &u, &w);
  const std::vector<Vec2> fa = feature_polygon(a.points, n, a_lo, true, ftol, u, w);
  const std::vector<Vec2> fb = feature_polygon(b.points, n, b_hi, false, ftol, u, w);
  const std::vector<Vec2> region = intersect_convex_polygons(fa, fb, ftol);
  const double level = 0.5 * (a_lo + b_hi);
  std::vector<Vec3> out;
  for (const Vec2& q : region) out.push_back(q.x() * u + q.y() * w + level * n);
  return out;
}

std::vector<ConvexPolytope> placement_polytopes(const Layout& layout) {
  PolytopeBuilder builder;
  std::vector<ConvexPolytope> polys;
  polys.reserve(layout.placements.size());
  for (const Placement& p : layout.placements) polys.push_back(builder.build(p));
  return polys;
}

const SceneBackground& scene_of(const Layout& layout) {
  if (!layout.scene) fail(ErrorKind::kValidation, "layout has no scene");
  return *layout.scene;
}

}  // namespace

ConvexPolytope polytope_from_placement(const Placement& placement) {
  PolytopeBuilder builder;
  return builder.build(placement);
}

ConvexPolytope polytope_from_triangle(const Vec3& a, const Vec3& b,
                                      const Vec3& c) {
  ConvexPolytope poly;
  poly.points = {a, b, c};
  for (const Vec3& p : poly.points) poly.box.extend(p);
  add_direction(poly.face_normals, (b - a).cross(c - a));
  add_direction(poly.edge_dirs, b - a);
  add_direction(poly.edge_dirs, c - b);
  add_direction(poly.edge_dirs, a - c);
  return poly;
}

std::vector<ConvexPolytope> scene_polytopes(const SceneBackground& scene) {
  std::vector<ConvexPolytope> out;
  out.reserve(scene.mesh.faces.size());
  for (const Face& f : scene.mesh.faces) {
    const Vec3& a = scene.mesh.vertices[f[0]];
    const Vec3& b = scene.mesh.vertices[f[1]];
    const Vec3& c = scene.mesh.vertices[f[2]];
    if ((b - a).cross(c - a).norm() < 1e-14) continue;
    out.push_back(polytope_from_triangle(a, b, c));
  }
  return out;
}

double penetration_depth(const ConvexPolytope& a, const ConvexPolytope& b) {
  double best = kInf;
  for_each_axis(a, b, [&](const Vec3& axis) {
    double a_lo, a_hi, b_lo, b_hi;
    project(a.points, axis, &a_lo, &a_hi);
    project(b.points, axis, &b_lo, &b_hi);
    best = std::min(best, std::min(a_hi - b_lo, b_hi - a_lo));
    return best > 0.0;
  });
  return best;
}

std::optional<SweepInterval> sweep(const ConvexPolytope& a, const Vec3& dir,
                                   const ConvexPolytope& b, double tol) {
  SweepInterval out;
  out.enter = -kInf;
  out.exit = kInf;
  bool never = false;
  for_each_axis(a, b, [&](const Vec3& axis) {
    double a_lo, a_hi, b_lo, b_hi;
    project(a.points, axis, &a_lo, &a_hi);
    project(b.points, axis, &b_lo, &b_hi);
    const double s = dir.dot(axis);
    // Overlap beyond tol: a_lo + t s < b_hi - tol and a_hi + t s > b_lo + tol.
    if (std::abs(s) < 1e-12) {
      if (a_lo >= b_hi - tol || a_hi <= b_lo + tol) never = true;
      return !never;
    }
    double t0 = (b_lo + tol - a_hi) / s;
    double t1 = (b_hi - tol - a_lo) / s;
    if (s < 0.0) std::swap(t0, t1);
    if (t0 > out.enter) {
      out.enter = t0;
      out.axis = axis;
    }
    out.exit = std::min(out.exit, t1);
    if (out.enter >= out.exit) never = true;
    return !never;
  });
  if (never) return std::nullopt;
  return out;
}

PenetrationResult penetration_check(const Layout& layout,
                                    const PhysicsConfig& config) {
  const SceneBackground& scene = scene_of(layout);
  const std::vector<ConvexPolytope> polys = placement_polytopes(layout);
  const std::vector<ConvexPolytope> tris = scene_polytopes(scene);
  PenetrationResult result;
  auto record = [&](const std::string& a, const std::string& b, double depth) {
    result.max_penetration = std::max(result.max_penetration, depth);
    if (depth > config.contact_tolerance) result.pairs.push_back({a, b, depth});
  };
  const auto& pl = layout.placements;
  for (size_t i = 0; i < polys.size(); ++i) {
    for (size_t j = i + 1; j < polys.size(); ++j) {
      if (!polys[i].box.overlaps(polys[j].box)) continue;
      record(pl[i].instance_id, pl[j].instance_id,
             penetration_depth(polys[i], polys[j]));
    }
    double scene_depth = 0.0;
    for (const ConvexPolytope& t : tris) {
      if (!polys[i].box.overlaps(t.box)) continue;
      scene_depth = std::max(scene_depth, penetration_depth(polys[i], t));
    }
    record(pl[i].instance_id, kSceneId, scene_depth);
  }
  return result;
}

SettleResult settle(const Layout& layout, int max_iters,
                    const PhysicsConfig& config) {
  const SceneBackground& scene = scene_of(layout);
  SettleResult result;
  result.layout = layout;
  auto& placements = result.layout.placements;
  std::vector<ConvexPolytope> polys = placement_polytopes(layout);
  const std::vector<ConvexPolytope> tris = scene_polytopes(scene);

  std::vector<size_t> order(placements.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return polys[a].box.min.z() < polys[b].box.min.z();
  });

  const double tol = 1e-9;
  bool converged = false;
  std::vector<std::string> unsupported;
  for (int iter = 0; iter < max_iters; ++iter) {
    double max_move = 0.0;
    unsupported.clear();
    for (size_t k = 0; k < order.size(); ++k) {
      const size_t i = order[k];
      double limit = kInf;
      bool blocked = false;
      auto consider = [&](const ConvexPolytope& obstacle) {
        if (!below_candidate(polys[i], obstacle, tol)) return;
        auto s = sweep(polys[i], kDown, obstacle, tol);
        if (!s || s->exit <= 0.0) return;
        blocked = true;
        // Back off from "overlap exceeds tol" to first touch.
        const double slope = std::abs(kDown.dot(s->axis));
        const double touch = slope > 1e-12 ? s->enter - tol / slope : s->enter;
        limit = std::min(limit, std::max(0.0, touch));
      };
      for (const ConvexPolytope& t : tris) consider(t);
      for (size_t kk = 0; kk < k; ++kk) consider(polys[order[kk]]);
      if (!blocked) {
        unsupported.push_back(placements[i].instance_id);
        continue;
      }
      if (limit > 0.0) {
        placements[i].location.z() -= limit;
        translate(polys[i], limit * kDown);
      }
      max_move = std::max(max_move, limit);
    }
    if (max_move < config.settle_epsilon) {
      converged = true;
      break;
    }
  }
  result.report.settled = converged && unsupported.empty();
  result.report.unsupported = std::move(unsupported);
  return result;
}

StabilityResult stability_check(const Layout& layout,
                                const PhysicsConfig& config) {
  const SceneBackground& scene = scene_of(layout);
  const std::vector<ConvexPolytope> polys = placement_polytopes(layout);
  const std::vector<ConvexPolytope> tris = scene_polytopes(scene);
  const auto& pl = layout.placements;
  StabilityResult result;
  result.stable.assign(pl.size(), false);
  const double tol = 1e-9;
  for (size_t i = 0; i < pl.size(); ++i) {
    std::vector<Vec2> support;
    auto consider = [&](const ConvexPolytope& other, const std::string& name) {
      if (!below_candidate(polys[i], other, config.contact_tolerance)) return;
      auto s = sweep(polys[i], kDown, other, tol);
      if (!s || s->exit <= 0.0 || s->enter > config.contact_tolerance) return;
      Contact c;
      c.a = pl[i].instance_id;
      c.b = name;
      c.normal = s->axis.dot(kDown) > 0.0 ? Vec3(-s->axis) : s->axis;
      c.points = contact_points(polys[i], other, s->axis, config.feature_tolerance);
      if (c.points.empty()) return;
      for (const Vec3& p : c.points) support.emplace_back(p.x(), p.y());
      result.contacts.push_back(std::move(c));
    };
    for (const ConvexPolytope& t : tris) consider(t, kSceneId);
    for (size_t j = 0; j < pl.size(); ++j) {
      if (j != i) consider(polys[j], pl[j].instance_id);
    }
    if (support.empty()) continue;
    const std::vector<Vec2> polygon = convex_hull_2d(std::move(support), 1e-12);
    const Vec3 com = pl[i].world_center_of_mass();
    const double d =
        signed_distance_to_convex_polygon(Vec2(com.x(), com.y()), polygon);
    result.stable[i] = d <= config.stability_margin;
  }
  return result;
}

PhysicsVerdict physics_accept(const Layout& layout,
                              const PhysicsConfig& config) {
  const SceneBackground& scene = scene_of(layout);
  PhysicsVerdict verdict;
  SettleResult settled = settle(layout, config.max_iters, config);
  verdict.layout = std::move(settled.layout);
  verdict.report = std::move(settled.report);

  const PenetrationResult pen = penetration_check(verdict.layout, config);
  const double allowed = config.penetration_tolerance * scene.scene_scale;
  verdict.report.max_penetration = pen.max_penetration;
  for (const PenetratingPair& p : pen.pairs) {
    if (p.depth > allowed) verdict.report.offending.push_back(p);
  }

  StabilityResult stability = stability_check(verdict.layout, config);
  verdict.report.contacts = std::move(stability.contacts);
  for (size_t i = 0; i < stability.stable.size(); ++i) {
    const std::string& id = verdict.layout.placements[i].instance_id;
    auto& unsupported = verdict.report.unsupported;
    if (!stability.stable[i] &&
        std::find(unsupported.begin(), unsupported.end(), id) == unsupported.end()) {
      unsupported.push_back(id);
    }
  }
  verdict.report.settled =
      verdict.report.settled && verdict.report.unsupported.empty();
  verdict.accepted = verdict.report.settled &&
                     pen.max_penetration <= allowed &&
                     verdict.report.unsupported.empty();
  return verdict;
}

nlohmann::json contact_report_to_json(const ContactReport& report) {
  nlohmann::json j;
  j["settled"] = report.settled;
  j["max_penetration"] = report.max_penetration;
  j["unsupported"] = report.unsupported;
  j["offending"] = nlohmann::json::array();
  for (const PenetratingPair& p : report.offending) {
    j["offending"].push_back({{"a", p.a}, {"b", p.b}, {"depth", p.depth}});
  }
  j["contacts"] = nlohmann::json::array();
  for (const Contact& c : report.contacts) {
    nlohmann::json pts = nlohmann::json::array();
    for (const Vec3& p : c.points) pts.push_back({p.x(), p.y(), p.z()});
    j["contacts"].push_back({{"a", c.a},
                             {"b", c.b},
                             {"normal", {c.normal.x(), c.normal.y(), c.normal.z()}},
                             {"points", pts}});
  }
  return j;
}

}  // namespace scenesynth
