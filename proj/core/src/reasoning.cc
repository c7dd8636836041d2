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

#include "scenesynth/reasoning.h"

#include <algorithm>
#include <cmath>

#include "scenesynth/error.h"

namespace scenesynth {

namespace {

double clamped_log(double factor) {
  return std::log(std::max(factor, kLikelihoodFloor));
}

}  // namespace

double LikelihoodReport::normalized_log_k() const {
  return log_k / static_cast<double>(std::max<size_t>(1, pairs.size()));
}

double pair_pose_likelihood(const Placement& a, const Placement& b,
                            const KnowledgeBase& kb) {
  return kb.pose_density(a.category(), a.pose) *
         kb.pose_density(b.category(), b.pose);
}

double placement_location_density(const Placement& p, const KnowledgeBase& kb,
                                  const SceneBackground& scene) {
  const SupportSurface* surface = scene.surface_at(p.location);
  if (surface == nullptr) {
    kb.category(p.category());  // still reject unknown categories
    return 0.0;
  }
  return kb.location_density(p.category(), p.location, surface->name);
}

double pair_location_likelihood(const Placement& a, const Placement& b,
                                const KnowledgeBase& kb,
                                const SceneBackground& scene) {
  return placement_location_density(a, kb, scene) *
         placement_location_density(b, kb, scene);
}

double pair_relation_likelihood(const Placement& a, const Placement& b,
                                const KnowledgeBase& kb,
                                const ReasoningConfig& config) {
  kb.category(a.category());
  kb.category(b.category());
  const PairPrior rel = kb.relationship(a.category(), b.category());
  if (!(rel.occ_prob > config.gamma)) return 1.0;
  const double offset = (a.location - b.location).norm() - rel.sugg_dist;
  return std::exp(-(offset * offset) / (2.0 * config.sigma * config.sigma));
}

LikelihoodReport layout_likelihood(const Layout& layout,
                                   const KnowledgeBase& kb,
                                   const ReasoningConfig& config) {
  if (!layout.scene) fail(ErrorKind::kValidation, "layout has no scene");
  const auto& placements = layout.placements;
  // Per-placement densities are shared by every pair containing it.
  std::vector<double> pose(placements.size());
  std::vector<double> location(placements.size());
  for (size_t i = 0; i < placements.size(); ++i) {
    pose[i] = kb.pose_density(placements[i].category(), placements[i].pose);
    location[i] = placement_location_density(placements[i], kb, *layout.scene);
  }
  LikelihoodReport report;
  for (size_t i = 0; i < placements.size(); ++i) {
    for (size_t j = i + 1; j < placements.size(); ++j) {
      PairTerm t;
      t.i = i;
      t.j = j;
      t.k_pose = pose[i] * pose[j];
      t.k_location = location[i] * location[j];
      t.k_relation =
          pair_relation_likelihood(placements[i], placements[j], kb, config);
      report.log_k +=
          clamped_log(t.k_pose) + clamped_log(t.k_location) + clamped_log(t.k_relation);
      report.pairs.push_back(t);
    }
  }
  return report;
}

bool commonsense_accept(const LikelihoodReport& report, double threshold) {
  return report.normalized_log_k() >= threshold;
}

double calibrate_threshold(std::span<const LikelihoodReport> pilot,
                           double percentile) {
  if (pilot.empty()) {
    fail(ErrorKind::kValidation, "calibration pilot batch is empty");
  }
  if (!(percentile >= 0.0 && percentile <= 100.0)) {
    fail(ErrorKind::kValidation, "percentile must lie in [0, 100]");
  }
  std::vector<double> values;
  values.reserve(pilot.size());
  for (const LikelihoodReport& r : pilot) values.push_back(r.normalized_log_k());
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  size_t rank = static_cast<size_t>(std::ceil(percentile * n / 100.0));
  rank = std::clamp<size_t>(rank, 1, values.size());
  return values[rank - 1];
}

nlohmann::json report_to_json(const LikelihoodReport& report) {
  nlohmann::json j;
  j["log_k"] = report.log_k;
  j["normalized_log_k"] = report.normalized_log_k();
  j["accepted"] = report.accepted;
  j["pairs"] = nlohmann::json::array();
  for (const PairTerm& t : report.pairs) {
    j["pairs"].push_back({{"i", t.i},
                          {"j", t.j},
                          {"k_pose", t.k_pose},
                          {"k_location", t.k_location},
                          {"k_relation", t.k_relation}});
  }
  return j;
}

}  // namespace scenesynth
