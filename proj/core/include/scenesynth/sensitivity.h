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


#ifndef SCENESYNTH_SENSITIVITY_H_
#define SCENESYNTH_SENSITIVITY_H_

#include <memory>
#include <span>
#include <vector>

#include "json.hpp"
#include "scenesynth/layoutgen.h"

namespace scenesynth {

// Normalized-count histograms describing a batch of layouts.
struct LayoutFeatures {
  std::vector<double> cooccurrence;  // unordered category pairs
  std::vector<double> keypose;       // (category, nearest keypose)
  std::vector<double> distance;      // pairwise base-point distances
};

struct FeatureSpace {
  std::vector<std::string> categories;
  const KnowledgeBase* reference = nullptr;  // keyposes used for binning
  int distance_bins = 20;
  double max_distance = 1.0;  // meters; the last bin absorbs the tail
};

FeatureSpace make_feature_space(const KnowledgeBase& reference,
                                const SceneBackground& scene,
                                std::vector<std::string> categories);

// Raw counts per layout, summed by `histograms`.
LayoutFeatures layout_counts(const Layout& layout, const FeatureSpace& space);
LayoutFeatures histograms(std::span<const LayoutFeatures> counts);

// Jensen-Shannon divergence in bits of two count vectors, each normalized;
// two empty vectors give 0.
double jensen_shannon(std::span<const double> p, std::span<const double> q);
// Mean JSD over the three histogram families.
double feature_divergence(const LayoutFeatures& a, const LayoutFeatures& b);

struct SensitivityConfig {
  size_t layouts_per_base = 500;
  bool shared_seed = false;  // true: every base reuses gen.seed
  int floor_batches = 4;     // same-base batches for the noise floor
  int bootstrap_rounds = 200;
  double bootstrap_quantile = 0.99;
};

struct SensitivityReport {
  std::vector<std::vector<double>> divergence;  // bases x bases
  double median_divergence = 0.0;               // off-diagonal
  double noise_floor = 0.0;      // median JSD, same base, different seeds
  double bootstrap_floor = 0.0;  // quantile of bootstrap-resampled JSD
  double threshold = 0.0;        // shared normalized log K threshold
  size_t layouts_per_base = 0;
};

// `reference` is the unperturbed base: it fixes the commonsense threshold
// and supplies the noise-floor batches.
SensitivityReport sensitivity_report(
    const KnowledgeBase& reference, std::span<const KnowledgeBase> bases,
    const AssetLibrary& library, std::shared_ptr<const SceneBackground> scene,
    const GenConfig& gen, const SensitivityConfig& config = {});

nlohmann::json sensitivity_to_json(const SensitivityReport& report);
std::string divergence_csv(const SensitivityReport& report);

}  // namespace scenesynth

#endif  // SCENESYNTH_SENSITIVITY_H_
