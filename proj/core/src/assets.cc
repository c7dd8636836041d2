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

#include "scenesynth/assets.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "json.hpp"
#include "scenesynth/error.h"

namespace scenesynth {

namespace {

using nlohmann::json;

Vec3 read_vec3(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) {
    fail(ErrorKind::kParse, what + ": expected [x, y, z]");
  }
  Vec3 v(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
  if (!v.allFinite()) fail(ErrorKind::kValidation, what + ": non-finite");
  return v;
}

double distance_to_mesh(const TriMesh& mesh, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const Face& f : mesh.faces) {
    const Vec3 q = closest_point_on_triangle(p, mesh.vertices[f[0]],
                                             mesh.vertices[f[1]],
                                             mesh.vertices[f[2]]);
    best = std::min(best, (p - q).norm());
  }
  return best;
}

}  // namespace

Quat ObjectModel::canonical_rotation() const {
  return Quat::FromTwoVectors(canonical_up, kUp);
}

ObjectModel make_object(std::string id, std::string category, TriMesh mesh,
                        const ObjectOptions& options) {
  mesh.validate();
  ObjectModel model;
  model.id = std::move(id);
  model.category = std::move(category);
  if (model.id.empty()) fail(ErrorKind::kValidation, "object id is empty");
  if (model.category.empty()) {
    fail(ErrorKind::kValidation, "object " + model.id + " has no category");
  }
  const double up_len = options.up.norm();
  if (!(up_len > 0.0) || !options.up.allFinite()) {
    fail(ErrorKind::kValidation, "canonical_up must be a non-zero vector");
  }
  model.canonical_up = options.up / up_len;
  model.hull = compute_hull(mesh.vertices);
  model.aabb = compute_aabb(mesh.vertices);
  model.mass.volume = model.hull.volume();
  model.mass.mass = options.density * model.mass.volume;
  model.mass.center_of_mass = model.hull.centroid();
  model.mesh = std::move(mesh);
  return model;
}

ObjectModel load_object(const std::filesystem::path& path,
                        const std::string& category,
                        const ObjectOptions& options) {
  ObjReadOptions read_options;
  read_options.scale = options.scale;
  TriMesh mesh = read_obj(path, read_options);
  std::string id = options.id.empty() ? path.stem().string() : options.id;
  return make_object(std::move(id), category, std::move(mesh), options);
}

bool SupportSurface::contains(const Vec3& p, double tol) const {
  if (std::abs(plane_distance(p)) > tol) return false;
  return signed_distance_to_convex_polygon(to_plane(p), polygon_2d) <= tol;
}

Vec3 SupportSurface::clamp(const Vec3& p) const {
  return from_plane(closest_point_on_convex_polygon(to_plane(p), polygon_2d));
}

Vec3 SupportSurface::centroid() const {
  Vec3 c = Vec3::Zero();
  for (const Vec3& p : polygon) c += p;
  return c / static_cast<double>(polygon.size());
}

SupportSurface make_surface(const SurfaceSpec& spec, double scene_scale) {
  if (spec.polygon.size() < 3) {
    fail(ErrorKind::kValidation,
         "support surface " + spec.name + " needs at least 3 vertices");
  }
  SupportSurface s;
  s.name = spec.name;
  s.polygon = spec.polygon;
  Vec3 n = newell_normal(s.polygon);
  if (n.norm() <= 0.0) {
    fail(ErrorKind::kValidation, "support surface " + spec.name + " has zero area");
  }
  n.normalize();
  if (spec.normal) {
    const Vec3 given = spec.normal->normalized();
    if (std::abs(given.dot(n)) < std::cos(1e-3)) {
      fail(ErrorKind::kValidation,
           "support surface " + spec.name + ": normal is not perpendicular to polygon");
    }
    if (given.dot(n) < 0.0) {
      std::reverse(s.polygon.begin(), s.polygon.end());
      n = -n;
    }
  }
  if (n.dot(kUp) < std::cos(std::numbers::pi / 4.0)) {
    fail(ErrorKind::kValidation,
         "support normal opposes gravity: surface " + spec.name);
  }
  s.normal = n;
  const Vec3 center = s.centroid();
  for (const Vec3& p : s.polygon) {
    if (std::abs(n.dot(p - center)) > 1e-4 * scene_scale) {
      fail(ErrorKind::kValidation,
           "support surface " + spec.name + " is not planar within tolerance");
    }
  }
  plane_basis(n, &s.u, &s.v);
  // Snap vertices onto the mean plane so plane_offset is exact.
  for (Vec3& p : s.polygon) p -= n.dot(p - center) * n;
  for (const Vec3& p : s.polygon) s.polygon_2d.push_back(s.to_plane(p));
  if (!is_convex_polygon(s.polygon_2d, 1e-12 * scene_scale * scene_scale)) {
    fail(ErrorKind::kValidation,
         "support surface " + spec.name + " must be a convex polygon");
  }
  return s;
}

const SupportSurface* SceneBackground::find_surface(
    std::string_view surface_name) const {
  for (const SupportSurface& s : surfaces) {
    if (s.name == surface_name) return &s;
  }
  return nullptr;
}

const SupportSurface* SceneBackground::surface_at(const Vec3& p) const {
  const double tol = 1e-3 * scene_scale;
  for (const SupportSurface& s : surfaces) {
    if (s.contains(p, tol)) return &s;
  }
  return nullptr;
}

SceneBackground make_scene(std::string name, TriMesh mesh,
                           const std::vector<SurfaceSpec>& surfaces,
                           std::optional<double> scene_scale) {
  mesh.validate();
  SceneBackground scene;
  scene.name = std::move(name);
  scene.bounds = compute_aabb(mesh.vertices);
  scene.scene_scale = scene_scale.value_or(scene.bounds.extents().norm());
  if (!(scene.scene_scale > 0.0)) {
    fail(ErrorKind::kValidation, "scene_scale must be positive");
  }
  std::set<std::string> names;
  for (const SurfaceSpec& spec : surfaces) {
    if (!names.insert(spec.name).second) {
      fail(ErrorKind::kValidation, "duplicate support surface " + spec.name);
    }
    SupportSurface s = make_surface(spec, scene.scene_scale);
    for (const Vec3& p : s.polygon) {
      if (distance_to_mesh(mesh, p) > 1e-3 * scene.scene_scale) {
        fail(ErrorKind::kValidation,
             "support surface " + spec.name + " is off-mesh");
      }
    }
    scene.surfaces.push_back(std::move(s));
  }
  scene.mesh = std::move(mesh);
  return scene;
}

SceneBackground load_scene(const std::filesystem::path& path,
                           const std::vector<SurfaceSpec>& surfaces,
                           const SceneOptions& options) {
  ObjReadOptions read_options;
  read_options.scale = options.scale;
  TriMesh mesh = read_obj(path, read_options);
  std::string name = options.name.empty() ? path.stem().string() : options.name;
  return make_scene(std::move(name), std::move(mesh), surfaces,
                    options.scene_scale);
}

std::vector<std::shared_ptr<const ObjectModel>> AssetLibrary::models_of(
    std::string_view category) const {
  std::vector<std::shared_ptr<const ObjectModel>> out;
  for (const auto& [id, model] : objects) {
    if (model->category == category) out.push_back(model);
  }
  return out;
}

std::vector<std::string> AssetLibrary::categories() const {
  std::set<std::string> cats;
  for (const auto& [id, model] : objects) cats.insert(model->category);
  return {cats.begin(), cats.end()};
}

std::shared_ptr<const SceneBackground> AssetLibrary::scene(
    std::string_view name) const {
  auto it = scenes.find(std::string(name));
  if (it == scenes.end()) {
    fail(ErrorKind::kNotFound, "unknown scene " + std::string(name));
  }
  return it->second;
}

AssetLibrary load_asset_index(const std::filesystem::path& index_path) {
  std::ifstream in(index_path);
  if (!in) {
    fail(ErrorKind::kNotFound, "asset index not found: " + index_path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, "asset index: " + std::string(e.what()));
  }
  const std::filesystem::path base = index_path.parent_path();
  AssetLibrary lib;
  try {
    for (const json& entry : doc.value("objects", json::array())) {
      ObjectOptions opts;
      opts.id = entry.at("id").get<std::string>();
      opts.scale = entry.value("scale", 1.0);
      opts.density = entry.value("density", kDefaultDensity);
      if (entry.contains("up")) opts.up = read_vec3(entry["up"], opts.id + ".up");
      if (lib.objects.count(opts.id)) {
        fail(ErrorKind::kValidation, "duplicate object id " + opts.id);
      }
      auto model = std::make_shared<const ObjectModel>(
          load_object(base / entry.at("path").get<std::string>(),
                      entry.at("category").get<std::string>(), opts));
      lib.objects.emplace(opts.id, std::move(model));
    }
    for (const json& entry : doc.value("scenes", json::array())) {
      SceneOptions opts;
      opts.name = entry.at("name").get<std::string>();
      opts.scale = entry.value("scale", 1.0);
      if (entry.contains("scene_scale")) {
        opts.scene_scale = entry["scene_scale"].get<double>();
      }
      std::vector<SurfaceSpec> specs;
      for (const json& s : entry.value("surfaces", json::array())) {
        SurfaceSpec spec;
        spec.name = s.at("name").get<std::string>();
        for (const json& p : s.at("polygon")) {
          spec.polygon.push_back(read_vec3(p, spec.name) * opts.scale);
        }
        if (s.contains("normal")) spec.normal = read_vec3(s["normal"], spec.name);
        specs.push_back(std::move(spec));
      }
      auto scene = std::make_shared<const SceneBackground>(load_scene(
          base / entry.at("path").get<std::string>(), specs, opts));
      lib.scenes.emplace(opts.name, std::move(scene));
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, "asset index: " + std::string(e.what()));
  }
  return lib;
}

}  // namespace scenesynth
