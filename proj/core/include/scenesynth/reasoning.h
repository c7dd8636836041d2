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

#ifndef SCENESYNTH_REASONING_H_
#define SCENESYNTH_REASONING_H_

#include <span>
#include <vector>

#include "json.hpp"
#include "scenesynth/knowledge.h"
#include "scenesynth/layout.h"

namespace scenesynth {

// Factors below this are clamped before taking logs.
inline constexpr double kLikelihoodFloor = 1e-12;

struct PairTerm {
  size_t i = 0;
  size_t j = 0;
  double k_pose = 1.0;
  double k_location = 1.0;
  double k_relation = 1.0;
};

struct LikelihoodReport {
  std::vector<PairTerm> pairs;
  double log_k = 0.0;
  bool accepted = false;

  // log_k / max(1, pair count); the quantity thresholds apply to.
  double normalized_log_k() const;
};

// Pose term: product of the two pose densities.
double pair_pose_likelihood(const Placement& a, const Placement& b,
                            const KnowledgeBase& kb);
// Location term: product of the two location densities. The surface of each
// location is looked up in `scene`.
double pair_location_likelihood(const Placement& a, const Placement& b,
                                const KnowledgeBase& kb,
                                const SceneBackground& scene);
// Relation term: Gaussian on (distance - sugg_dist) when the
// pair's occurrence probability exceeds gamma, 1 otherwise.
double pair_relation_likelihood(const Placement& a, const Placement& b,
                                const KnowledgeBase& kb,
                                const ReasoningConfig& config);

// Location density of one placement, resolving its support surface.
double placement_location_density(const Placement& p, const KnowledgeBase& kb,
                                  const SceneBackground& scene);

// Log-likelihood summed over all unordered placement pairs. `accepted` is left false;
// commonsense_accept decides it.
LikelihoodReport layout_likelihood(const Layout& layout,
                                   const KnowledgeBase& kb,
                                   const ReasoningConfig& config);

bool commonsense_accept(const LikelihoodReport& report, double threshold);

// Nearest-rank percentile of normalized log K over the pilot batch.
double calibrate_threshold(std::span<const LikelihoodReport> pilot,
                           double percentile);

nlohmann::json report_to_json(const LikelihoodReport& report);

}  // namespace scenesynth

#endif  // SCENESYNTH_REASONING_H_
