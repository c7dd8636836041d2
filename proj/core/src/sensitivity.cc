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


#include "scenesynth/sensitivity.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "scenesynth/error.h"

namespace scenesynth {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void accumulate(std::vector<double>& into, const std::vector<double>& add) {
  if (into.size() < add.size()) into.resize(add.size(), 0.0);
  for (size_t i = 0; i < add.size(); ++i) into[i] += add[i];
}

std::vector<LayoutFeatures> run_batch(const KnowledgeBase& kb,
                                      const AssetLibrary& library,
                                      const std::shared_ptr<const SceneBackground>& scene,
                                      const GenConfig& gen, size_t count,
                                      const FeatureSpace& space) {
  std::vector<LayoutFeatures> out;
  out.reserve(count);
  const GenStats stats = generate(kb, library, scene, gen, count,
                                  [&](const GeneratedLayout& g) {
                                    out.push_back(layout_counts(g.layout, space));
                                  });
  if (stats.budget_exhausted) {
    fail(ErrorKind::kBudget, "sensitivity batch exhausted its budget after " +
                                 std::to_string(stats.accepted) + " of " +
                                 std::to_string(count) + " layouts");
  }
  return out;
}

}  // namespace

FeatureSpace make_feature_space(const KnowledgeBase& reference,
                                const SceneBackground& scene,
                                std::vector<std::string> categories) {
  FeatureSpace space;
  std::sort(categories.begin(), categories.end());
  categories.erase(std::unique(categories.begin(), categories.end()),
                   categories.end());
  space.categories = std::move(categories);
  space.reference = &reference;
  double reach = 0.0;
  std::vector<Vec3> corners;
  for (const SupportSurface& s : scene.surfaces) {
    corners.insert(corners.end(), s.polygon.begin(), s.polygon.end());
  }
  for (size_t i = 0; i < corners.size(); ++i) {
    for (size_t j = i + 1; j < corners.size(); ++j) {
      reach = std::max(reach, (corners[i] - corners[j]).norm());
    }
  }
  space.max_distance = reach > 0.0 ? reach : scene.scene_scale;
  return space;
}

LayoutFeatures layout_counts(const Layout& layout, const FeatureSpace& space) {
  const size_t c = space.categories.size();
  std::vector<size_t> keypose_offset(c + 1, 0);
  for (size_t i = 0; i < c; ++i) {
    keypose_offset[i + 1] =
        keypose_offset[i] +
        space.reference->category(space.categories[i]).keyposes.size();
  }
  LayoutFeatures f;
  f.cooccurrence.assign(c * (c + 1) / 2, 0.0);
  f.keypose.assign(keypose_offset[c], 0.0);
  f.distance.assign(static_cast<size_t>(space.distance_bins), 0.0);

  std::vector<long> idx;
  for (const Placement& p : layout.placements) {
    auto it = std::lower_bound(space.categories.begin(), space.categories.end(),
                               p.category());
    if (it == space.categories.end() || *it != p.category()) {
      idx.push_back(-1);
      continue;
    }
    const size_t ci = static_cast<size_t>(it - space.categories.begin());
    idx.push_back(static_cast<long>(ci));
    const CategoryPrior& prior = space.reference->category(p.category());
    size_t best = 0;
    double best_angle = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < prior.keyposes.size(); ++k) {
      const Quat& kq = prior.keyposes[k].rotation;
      const double a = prior.yaw_free ? yaw_invariant_angle(kq, p.pose)
                                      : geodesic_angle(kq, p.pose);
      if (a < best_angle) {
        best_angle = a;
        best = k;
      }
    }
    if (!prior.keyposes.empty()) f.keypose[keypose_offset[ci] + best] += 1.0;
  }
  const auto& pl = layout.placements;
  for (size_t i = 0; i < pl.size(); ++i) {
    for (size_t j = i + 1; j < pl.size(); ++j) {
      if (idx[i] >= 0 && idx[j] >= 0) {
        size_t a = static_cast<size_t>(idx[i]);
        size_t b = static_cast<size_t>(idx[j]);
        if (a > b) std::swap(a, b);
        f.cooccurrence[a * c - a * (a - 1) / 2 + (b - a)] += 1.0;
      }
      const double d = (pl[i].location - pl[j].location).norm();
      const int bins = space.distance_bins;
      const int bin = std::min(
          bins - 1, static_cast<int>(d / space.max_distance * bins));
      f.distance[static_cast<size_t>(bin)] += 1.0;
    }
  }
  return f;
}

LayoutFeatures histograms(std::span<const LayoutFeatures> counts) {
  LayoutFeatures total;
  for (const LayoutFeatures& f : counts) {
    accumulate(total.cooccurrence, f.cooccurrence);
    accumulate(total.keypose, f.keypose);
    accumulate(total.distance, f.distance);
  }
  return total;
}

double jensen_shannon(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    fail(ErrorKind::kValidation, "histograms differ in size");
  }
  double sp = 0.0;
  double sq = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    sp += p[i];
    sq += q[i];
  }
  if (sp <= 0.0 && sq <= 0.0) return 0.0;
  if (sp <= 0.0 || sq <= 0.0) return 1.0;
  double js = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    const double a = p[i] / sp;
    const double b = q[i] / sq;
    const double m = 0.5 * (a + b);
    const double ta = a > 0.0 ? a * std::log2(a / m) : 0.0;
    const double tb = b > 0.0 ? b * std::log2(b / m) : 0.0;
    js += 0.5 * (ta + tb);  // one sum per bin keeps the result symmetric
  }
  return std::clamp(js, 0.0, 1.0);
}

double feature_divergence(const LayoutFeatures& a, const LayoutFeatures& b) {
  return (jensen_shannon(a.cooccurrence, b.cooccurrence) +
          jensen_shannon(a.keypose, b.keypose) +
          jensen_shannon(a.distance, b.distance)) /
         3.0;
}

SensitivityReport sensitivity_report(
    const KnowledgeBase& reference, std::span<const KnowledgeBase> bases,
    const AssetLibrary& library, std::shared_ptr<const SceneBackground> scene,
    const GenConfig& gen, const SensitivityConfig& config) {
  if (bases.empty()) fail(ErrorKind::kValidation, "no knowledge bases given");
  if (!scene) fail(ErrorKind::kValidation, "no scene");
  if (config.layouts_per_base < 1) {
    fail(ErrorKind::kValidation, "layouts per base must be >= 1");
  }
  SensitivityReport report;
  report.layouts_per_base = config.layouts_per_base;
  report.threshold = resolve_threshold(reference, library, scene, gen);

  GenConfig fixed = gen;
  ReasoningConfig reasoning = gen.reasoning.value_or(reference.config());
  reasoning.k_threshold = report.threshold;
  fixed.reasoning = reasoning;
  const FeatureSpace space = make_feature_space(
      reference, *scene, resolve_categories(reference, library, *scene, fixed));

  const size_t n = bases.size();
  std::vector<LayoutFeatures> hist(n);
  for (size_t b = 0; b < n; ++b) {
    GenConfig g = fixed;
    if (!config.shared_seed) g.seed = gen.seed + b;
    const auto counts = run_batch(bases[b], library, scene, g,
                                  config.layouts_per_base, space);
    hist[b] = histograms(counts);
  }
  report.divergence.assign(n, std::vector<double>(n, 0.0));
  std::vector<double> off;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double d = feature_divergence(hist[i], hist[j]);
      report.divergence[i][j] = report.divergence[j][i] = d;
      off.push_back(d);
    }
  }
  report.median_divergence = median(off);

  if (config.floor_batches >= 2) {
    std::vector<LayoutFeatures> floor_hist;
    std::vector<LayoutFeatures> first_counts;
    for (int f = 0; f < config.floor_batches; ++f) {
      GenConfig g = fixed;
      g.seed = gen.seed + n + static_cast<uint64_t>(f);
      auto counts = run_batch(reference, library, scene, g,
                              config.layouts_per_base, space);
      floor_hist.push_back(histograms(counts));
      if (f == 0) first_counts = std::move(counts);
    }
    std::vector<double> floor;
    for (size_t i = 0; i < floor_hist.size(); ++i) {
      for (size_t j = i + 1; j < floor_hist.size(); ++j) {
        floor.push_back(feature_divergence(floor_hist[i], floor_hist[j]));
      }
    }
    report.noise_floor = median(floor);

    if (config.bootstrap_rounds > 0) {
      Rng rng = make_stream(gen.seed, uint64_t{1} << 61);
      std::uniform_int_distribution<size_t> pick(0, first_counts.size() - 1);
      std::vector<double> boot;
      std::vector<LayoutFeatures> a(first_counts.size());
      std::vector<LayoutFeatures> b(first_counts.size());
      for (int r = 0; r < config.bootstrap_rounds; ++r) {
        for (size_t k = 0; k < a.size(); ++k) a[k] = first_counts[pick(rng)];
        for (size_t k = 0; k < b.size(); ++k) b[k] = first_counts[pick(rng)];
        boot.push_back(feature_divergence(histograms(a), histograms(b)));
      }
      std::sort(boot.begin(), boot.end());
      const size_t rank = static_cast<size_t>(std::max(
          1.0, std::ceil(config.bootstrap_quantile * static_cast<double>(boot.size()))));
      report.bootstrap_floor = boot[std::min(rank, boot.size()) - 1];
    }
  }
  return report;
}

nlohmann::json sensitivity_to_json(const SensitivityReport& report) {
  nlohmann::json j;
  j["bases"] = report.divergence.size();
  j["layouts_per_base"] = report.layouts_per_base;
  j["threshold"] = report.threshold;
  j["median_divergence"] = report.median_divergence;
  j["noise_floor"] = report.noise_floor;
  j["bootstrap_floor"] = report.bootstrap_floor;
  j["ratio_to_floor"] = report.noise_floor > 0.0
                            ? nlohmann::json(report.median_divergence / report.noise_floor)
                            : nlohmann::json(nullptr);
  j["divergence"] = report.divergence;
  return j;
}

std::string divergence_csv(const SensitivityReport& report) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& row : report.divergence) {
    for (size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << row[j];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace scenesynth
