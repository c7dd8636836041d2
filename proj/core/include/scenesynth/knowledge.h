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

#ifndef SCENESYNTH_KNOWLEDGE_H_
#define SCENESYNTH_KNOWLEDGE_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "scenesynth/assets.h"
#include "scenesynth/geometry.h"
#include "scenesynth/random.h"

namespace scenesynth {

inline constexpr double kDefaultPoseBandwidth = 0.3;          // radians
inline constexpr double kDefaultLocationBandwidthFactor = 0.05;  // x scene_scale

struct Keypose {
  Quat rotation = Quat::Identity();
  double prob = 1.0;
};

struct Anchor {
  Vec3 position = Vec3::Zero();
  std::string surface;
  double prob = 1.0;
};

struct CategoryPrior {
  std::string name;
  std::vector<Keypose> keyposes;
  std::vector<Anchor> anchors;
  // Keyposes constrain tilt only; rotation about world +Z is free.
  bool yaw_free = true;
};

// Occurrence-object-pair prior, stored by role.
struct PairPrior {
  std::string a;
  std::string b;
  double occ_prob = 0.0;
  double sugg_dist = 0.0;  // meters
};

struct ReasoningConfig {
  double sigma = 0.1;  // meters
  double gamma = 0.5;
  std::optional<double> k_threshold;  // nullopt: calibrate on a pilot batch
  uint64_t seed = 0;

  void validate() const;
};

struct PoseSample {
  Quat rotation;
  size_t keypose = 0;
};

struct LocationSample {
  Vec3 point;
  std::string surface;
  size_t anchor = 0;
};

// The three annotated priors plus reasoning constants. Immutable after
// construction; queries are pure.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  // Validates probabilities, distances, category references and, when a
  // scene is supplied, anchor placement on its surfaces.
  KnowledgeBase(std::vector<CategoryPrior> categories,
                std::vector<PairPrior> pairs, ReasoningConfig config,
                double pose_bandwidth, double location_bandwidth,
                const SceneBackground* scene = nullptr);

  const CategoryPrior& category(std::string_view name) const;
  bool has_category(std::string_view name) const;
  std::vector<std::string> category_names() const;
  const std::vector<CategoryPrior>& categories() const { return categories_; }
  const std::vector<PairPrior>& pairs() const { return pairs_; }
  const ReasoningConfig& config() const { return config_; }
  double pose_bandwidth() const { return pose_bandwidth_; }
  double location_bandwidth() const { return location_bandwidth_; }

  // Number of annotated object models and of annotated pairs, for cost
  // accounting.
  size_t model_count() const { return categories_.size(); }
  size_t pair_count() const { return pairs_.size(); }

  // max_k prob_k * exp(-theta_k^2 / (2 bw^2)), theta_k the geodesic angle
  // (yaw-orbit angle when the category is yaw-free).
  double pose_density(std::string_view category, const Quat& pose) const;

  // max over anchors on `surface` of prob * exp(-|p - a|^2 / (2 bw^2)).
  double location_density(std::string_view category, const Vec3& point,
                          std::string_view surface) const;

  // Symmetric lookup; absent pairs return occ_prob = 0.
  PairPrior relationship(std::string_view a, std::string_view b) const;

  PoseSample sample_pose(std::string_view category, Rng& rng) const;
  LocationSample sample_location(std::string_view category,
                                 const SceneBackground& scene, Rng& rng) const;

  KnowledgeBase with_config(const ReasoningConfig& config) const;

 private:
  std::vector<CategoryPrior> categories_;
  std::map<std::string, size_t, std::less<>> index_;
  std::vector<PairPrior> pairs_;
  std::map<std::pair<std::string, std::string>, size_t> pair_index_;
  ReasoningConfig config_;
  double pose_bandwidth_ = kDefaultPoseBandwidth;
  double location_bandwidth_ = kDefaultLocationBandwidthFactor;
};

// Geodesic angle between two rotations, in [0, pi].
double geodesic_angle(const Quat& a, const Quat& b);
// min over psi of geodesic_angle(Rz(psi) * a, b).
double yaw_invariant_angle(const Quat& a, const Quat& b);

// Prior schema (JSON):
//   {"categories": {"<name>": {"keyposes": [{"quat": [w,x,y,z], "prob"}],
//                              "anchors": [{"xyz": [..], "surface", "prob"}],
//                              "yaw_free"?: bool}},
//    "pairs": [{"a", "b", "occ_prob", "sugg_dist_m"}],
//    "config": {"sigma", "gamma", "k_threshold": number | "calibrate",
//               "seed", "pose_bandwidth"?, "location_bandwidth"?}}
// The location bandwidth defaults to 0.05 * scene_scale (scene_scale = 1
// when no scene is given).
KnowledgeBase knowledge_from_json(const nlohmann::json& doc,
                                  const SceneBackground* scene = nullptr);
KnowledgeBase load_knowledge(const std::filesystem::path& path,
                             const SceneBackground* scene = nullptr);
nlohmann::json knowledge_to_json(const KnowledgeBase& kb);

}  // namespace scenesynth

#endif  // SCENESYNTH_KNOWLEDGE_H_
