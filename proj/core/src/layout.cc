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

#include "scenesynth/layout.h"

#include <cmath>
#include <set>

#include "scenesynth/error.h"

namespace scenesynth {

Vec3 base_offset(const ObjectModel& model, const Quat& world_rotation) {
  const Eigen::Matrix3d r = world_rotation.toRotationMatrix();
  Aabb box;
  for (const Vec3& p : model.hull.points) box.extend(r * p);
  return Vec3(0.5 * (box.min.x() + box.max.x()),
              0.5 * (box.min.y() + box.max.y()), box.min.z());
}

Eigen::Isometry3d Placement::world_from_model() const {
  const Quat rotation = pose * object->canonical_rotation();
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.linear() = rotation.toRotationMatrix();
  t.translation() = location - base_offset(*object, rotation);
  return t;
}

std::vector<Vec3> Placement::world_hull() const {
  const Eigen::Isometry3d t = world_from_model();
  std::vector<Vec3> out;
  out.reserve(object->hull.points.size());
  for (const Vec3& p : object->hull.points) out.push_back(t * p);
  return out;
}

Vec3 Placement::world_center_of_mass() const {
  return world_from_model() * object->mass.center_of_mass;
}

void Layout::validate() const {
  std::set<std::string> ids;
  for (const Placement& p : placements) {
    if (!p.object) fail(ErrorKind::kValidation, "placement without object");
    if (!ids.insert(p.instance_id).second) {
      fail(ErrorKind::kValidation, "duplicate instance id " + p.instance_id);
    }
    if (std::abs(p.pose.norm() - 1.0) > 1e-9) {
      fail(ErrorKind::kValidation, "pose of " + p.instance_id + " is not unit");
    }
    if (!p.location.allFinite()) {
      fail(ErrorKind::kValidation, "location of " + p.instance_id + " is not finite");
    }
  }
}

nlohmann::json layout_to_json(const Layout& layout) {
  nlohmann::json j;
  j["scene"] = layout.scene ? layout.scene->name : "";
  j["placements"] = nlohmann::json::array();
  for (const Placement& p : layout.placements) {
    j["placements"].push_back(
        {{"instance", p.instance_id},
         {"model", p.object->id},
         {"category", p.object->category},
         {"pose", {p.pose.w(), p.pose.x(), p.pose.y(), p.pose.z()}},
         {"location", {p.location.x(), p.location.y(), p.location.z()}}});
  }
  return j;
}

}  // namespace scenesynth
