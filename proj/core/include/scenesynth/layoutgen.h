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


#ifndef SCENESYNTH_LAYOUTGEN_H_
#define SCENESYNTH_LAYOUTGEN_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "scenesynth/assets.h"
#include "scenesynth/knowledge.h"
#include "scenesynth/layout.h"
#include "scenesynth/physics.h"
#include "scenesynth/random.h"
#include "scenesynth/reasoning.h"

namespace scenesynth {

inline constexpr double kSecondsPerModel = 10.0;
inline constexpr double kSecondsPerPair = 10.0;

struct GenConfig {
  int min_objects = 1;
  int max_objects = 5;
  std::vector<std::string> categories;  // empty: every prior category
  int64_t attempts = 10000;             // candidate budget
  uint64_t seed = 0;
  std::optional<ReasoningConfig> reasoning;  // overrides the prior's config
  double calibration_percentile = 20.0;
  int pilot_size = 200;
  double drop_clearance = 0.005;  // meters above the sampled surface point
  PhysicsConfig physics;
  int threads = 0;

  void validate() const;
};

struct GenStats {
  int64_t tried = 0;
  int64_t physics_rejections = 0;
  int64_t commonsense_rejections = 0;
  int64_t accepted = 0;
  double annotation_cost_s = 0.0;
  double threshold = 0.0;
  bool budget_exhausted = false;
};

struct GeneratedLayout {
  uint64_t index = 0;  // candidate sequence number
  Layout layout;       // settled
  LikelihoodReport likelihood;
  ContactReport contacts;
};

// Categories a config draws from, checked against priors, models and the
// scene's surfaces.
std::vector<std::string> resolve_categories(const KnowledgeBase& kb,
                                            const AssetLibrary& library,
                                            const SceneBackground& scene,
                                            const GenConfig& config);

Layout sample_candidate(const KnowledgeBase& kb, const AssetLibrary& library,
                        std::shared_ptr<const SceneBackground> scene,
                        const GenConfig& config, Rng& rng);

// The fixed threshold, or the calibration percentile of normalized log K
// over a pilot batch of physics-plausible candidates.
double resolve_threshold(const KnowledgeBase& kb, const AssetLibrary& library,
                         std::shared_ptr<const SceneBackground> scene,
                         const GenConfig& config);

// Emits accepted layouts in candidate order until `count` are accepted or
// the attempt budget runs out (stats.budget_exhausted).
GenStats generate(const KnowledgeBase& kb, const AssetLibrary& library,
                  std::shared_ptr<const SceneBackground> scene,
                  const GenConfig& config, size_t count,
                  const std::function<void(const GeneratedLayout&)>& emit);

double annotation_cost(size_t models, size_t pairs);
double annotation_cost(const KnowledgeBase& kb);

// n copies with every probability and suggested distance scaled by an
// independent factor in [1 - noise, 1 + noise]; probabilities clamped.
std::vector<KnowledgeBase> simulate_annotators(const KnowledgeBase& kb, int n,
                                               double noise, Rng& rng);

nlohmann::json gen_stats_to_json(const GenStats& stats);
nlohmann::json generated_to_json(const GeneratedLayout& g);

}  // namespace scenesynth

#endif  // SCENESYNTH_LAYOUTGEN_H_
