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

#ifndef SCENESYNTH_LAYOUT_H_
#define SCENESYNTH_LAYOUT_H_

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "scenesynth/assets.h"
#include "scenesynth/geometry.h"

namespace scenesynth {

// One object instance in a scene. `location` is the object's base point:
// the bottom centre of its posed hull's bounding box, i.e. where it meets
// the surface it stands on.
struct Placement {
  std::string instance_id;
  std::shared_ptr<const ObjectModel> object;
  Quat pose = Quat::Identity();  // world rotation applied after canonical_rotation
  Vec3 location = Vec3::Zero();

  const std::string& category() const { return object->category; }
  Eigen::Isometry3d world_from_model() const;
  // Hull vertices in world coordinates.
  std::vector<Vec3> world_hull() const;
  Vec3 world_center_of_mass() const;
};

struct Layout {
  std::shared_ptr<const SceneBackground> scene;
  std::vector<Placement> placements;

  // Throws Error(kValidation) on duplicate instance ids, non-unit poses or
  // non-finite locations.
  void validate() const;
};

// Base-point offset of the posed model: bottom centre of R * hull.
Vec3 base_offset(const ObjectModel& model, const Quat& world_rotation);

nlohmann::json layout_to_json(const Layout& layout);

}  // namespace scenesynth

#endif  // SCENESYNTH_LAYOUT_H_
