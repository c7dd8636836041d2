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

// Quasi-static plausibility gate. Objects are convex hulls; the scene is its
// triangle soup. Settling translates each object straight down to first
// contact; stability is a static support-polygon test. No dynamics.

#ifndef SCENESYNTH_PHYSICS_H_
#define SCENESYNTH_PHYSICS_H_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "scenesynth/layout.h"

namespace scenesynth {

struct PhysicsConfig {
  double penetration_tolerance = 1e-3;  // fraction of scene_scale
  double stability_margin = 1e-3;       // meters
  double contact_tolerance = 1e-6;      // meters; gaps below this touch
  double feature_tolerance = 1e-3;      // meters; contact feature selection
  double settle_epsilon = 1e-4;         // meters; convergence threshold
  int max_iters = 8;
};

inline constexpr const char* kSceneId = "scene";

struct Contact {
  std::string a;  // supported object
  std::string b;  // supporter: instance id or kSceneId
  std::vector<Vec3> points;
  Vec3 normal = kUp;  // from b towards a
};

struct PenetratingPair {
  std::string a;
  std::string b;
  double depth = 0.0;
};

struct PenetrationResult {
  double max_penetration = 0.0;
  std::vector<PenetratingPair> pairs;  // depth > contact_tolerance
};

struct ContactReport {
  double max_penetration = 0.0;
  std::vector<Contact> contacts;
  std::vector<std::string> unsupported;
  std::vector<PenetratingPair> offending;  // depth > allowed tolerance
  bool settled = false;
};

struct SettleResult {
  Layout layout;
  ContactReport report;
};

struct StabilityResult {
  std::vector<bool> stable;  // per placement
  std::vector<Contact> contacts;
};

struct PhysicsVerdict {
  bool accepted = false;
  Layout layout;  // settled
  ContactReport report;
};

// Convex shape in world coordinates with its separating-axis candidates.
struct ConvexPolytope {
  std::vector<Vec3> points;
  std::vector<Vec3> face_normals;  // unit, unique up to sign
  std::vector<Vec3> edge_dirs;     // unit, unique up to sign
  Aabb box;
};

ConvexPolytope polytope_from_placement(const Placement& placement);
ConvexPolytope polytope_from_triangle(const Vec3& a, const Vec3& b,
                                      const Vec3& c);
// Scene mesh triangles, degenerate ones skipped.
std::vector<ConvexPolytope> scene_polytopes(const SceneBackground& scene);

// Minimum overlap over all separating-axis candidates: the penetration depth
// when positive, a lower bound on separation (negated) otherwise.
double penetration_depth(const ConvexPolytope& a, const ConvexPolytope& b);

// Time interval during which `a`, translated by t * dir (unit), overlaps `b`
// by more than `tol` on every axis. nullopt if never.
struct SweepInterval {
  double enter = 0.0;
  double exit = 0.0;
  Vec3 axis = Vec3::Zero();  // axis that determines `enter`
};
std::optional<SweepInterval> sweep(const ConvexPolytope& a, const Vec3& dir,
                                   const ConvexPolytope& b, double tol);

PenetrationResult penetration_check(const Layout& layout,
                                    const PhysicsConfig& config = {});
SettleResult settle(const Layout& layout, int max_iters,
                    const PhysicsConfig& config = {});
StabilityResult stability_check(const Layout& layout,
                                const PhysicsConfig& config = {});
PhysicsVerdict physics_accept(const Layout& layout,
                              const PhysicsConfig& config = {});

nlohmann::json contact_report_to_json(const ContactReport& report);

}  // namespace scenesynth

#endif  // SCENESYNTH_PHYSICS_H_
