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

#ifndef SCENESYNTH_ASSETS_H_
#define SCENESYNTH_ASSETS_H_

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scenesynth/geometry.h"
#include "scenesynth/hull.h"
#include "scenesynth/mesh.h"

namespace scenesynth {

inline constexpr double kDefaultDensity = 500.0;  // kg/m^3

struct MassProperties {
  double volume = 0.0;  // m^3, of the convex hull
  double mass = 0.0;    // kg
  Vec3 center_of_mass = Vec3::Zero();  // model frame
};

// A scanned object. Immutable once built; shared between layouts.
struct ObjectModel {
  std::string id;
  std::string category;
  TriMesh mesh;
  Vec3 canonical_up = kUp;
  ConvexHull hull;
  Aabb aabb;
  MassProperties mass;

  // Rotation taking canonical_up onto world +Z. Poses are composed on top.
  Quat canonical_rotation() const;
};

struct ObjectOptions {
  std::string id;  // defaults to the file stem
  double scale = 1.0;
  Vec3 up = kUp;
  double density = kDefaultDensity;
};

ObjectModel make_object(std::string id, std::string category, TriMesh mesh,
                        const ObjectOptions& options = {});
ObjectModel load_object(const std::filesystem::path& path,
                        const std::string& category,
                        const ObjectOptions& options = {});

// Planar convex polygon on which objects may rest.
struct SupportSurface {
  std::string name;
  std::vector<Vec3> polygon;  // CCW about `normal`
  Vec3 normal = kUp;          // unit, against gravity
  Vec3 u = Vec3::UnitX();     // in-plane basis
  Vec3 v = Vec3::UnitY();
  std::vector<Vec2> polygon_2d;  // polygon in (u, v) coordinates

  double plane_offset() const { return normal.dot(polygon.front()); }
  double plane_distance(const Vec3& p) const {
    return normal.dot(p) - plane_offset();
  }
  Vec2 to_plane(const Vec3& p) const { return Vec2(u.dot(p), v.dot(p)); }
  Vec3 from_plane(const Vec2& q) const {
    return q.x() * u + q.y() * v + plane_offset() * normal;
  }
  // Inside the polygon (within `tol`) and within `tol` of the plane.
  bool contains(const Vec3& p, double tol) const;
  // Projects onto the plane and clamps into the polygon.
  Vec3 clamp(const Vec3& p) const;
  Vec3 centroid() const;
};

struct SurfaceSpec {
  std::string name;
  std::vector<Vec3> polygon;
  std::optional<Vec3> normal;  // derived from winding when absent
};

struct SceneBackground {
  std::string name;
  TriMesh mesh;
  std::vector<SupportSurface> surfaces;
  double scene_scale = 1.0;  // characteristic length, meters
  Aabb bounds;

  const SupportSurface* find_surface(std::string_view surface_name) const;
  // First surface containing p within 1e-3 * scene_scale, or nullptr.
  const SupportSurface* surface_at(const Vec3& p) const;
};

struct SceneOptions {
  std::string name;
  double scale = 1.0;
  std::optional<double> scene_scale;  // defaults to the bounds diagonal
};

SupportSurface make_surface(const SurfaceSpec& spec, double scene_scale);
SceneBackground make_scene(std::string name, TriMesh mesh,
                           const std::vector<SurfaceSpec>& surfaces,
                           std::optional<double> scene_scale = std::nullopt);
SceneBackground load_scene(const std::filesystem::path& path,
                           const std::vector<SurfaceSpec>& surfaces,
                           const SceneOptions& options = {});

// All assets named by one JSON index file.
struct AssetLibrary {
  std::map<std::string, std::shared_ptr<const ObjectModel>> objects;
  std::map<std::string, std::shared_ptr<const SceneBackground>> scenes;

  std::vector<std::shared_ptr<const ObjectModel>> models_of(
      std::string_view category) const;
  std::vector<std::string> categories() const;
  std::shared_ptr<const SceneBackground> scene(std::string_view name) const;
};

// Index schema:
//   {"objects": [{"id", "category", "path", "up"?, "scale"?, "density"?}],
//    "scenes":  [{"name", "path", "scale"?, "scene_scale"?,
//                 "surfaces": [{"name", "polygon": [[x,y,z],...],
//                               "normal"?}]}]}
// Relative paths resolve against the index file's directory.
AssetLibrary load_asset_index(const std::filesystem::path& index_path);

}  // namespace scenesynth

#endif  // SCENESYNTH_ASSETS_H_
