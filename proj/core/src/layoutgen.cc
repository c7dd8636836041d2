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


#include "scenesynth/layoutgen.h"

#include <algorithm>
#include <limits>
#include <random>

#include "scenesynth/error.h"
#include "scenesynth/parallel.h"

namespace scenesynth {

namespace {

constexpr uint64_t kPilotStream = uint64_t{1} << 62;

struct Candidate {
  bool physics_ok = false;
  PhysicsVerdict verdict;
  LikelihoodReport likelihood;
};

ReasoningConfig effective_reasoning(const KnowledgeBase& kb,
                                    const GenConfig& config) {
  return config.reasoning.value_or(kb.config());
}

Layout draw(const KnowledgeBase& kb, const AssetLibrary& library,
            const std::shared_ptr<const SceneBackground>& scene,
            const GenConfig& config, const std::vector<std::string>& cats,
            Rng& rng) {
  std::uniform_int_distribution<int> count_dist(config.min_objects,
                                                config.max_objects);
  std::uniform_int_distribution<size_t> cat_dist(0, cats.size() - 1);
  const int n = count_dist(rng);
  Layout layout;
  layout.scene = scene;
  for (int k = 0; k < n; ++k) {
    const std::string& cat = cats[cat_dist(rng)];
    const auto models = library.models_of(cat);
    std::uniform_int_distribution<size_t> model_dist(0, models.size() - 1);
    Placement p;
    p.object = models[model_dist(rng)];
    p.instance_id = cat + "_" + std::to_string(k);
    p.pose = kb.sample_pose(cat, rng).rotation;
    p.location = kb.sample_location(cat, *scene, rng).point +
                 config.drop_clearance * kUp;
    layout.placements.push_back(std::move(p));
  }
  return layout;
}

Candidate evaluate(const Layout& layout, const KnowledgeBase& kb,
                   const ReasoningConfig& reasoning,
                   const PhysicsConfig& physics) {
  Candidate c;
  c.verdict = physics_accept(layout, physics);
  c.physics_ok = c.verdict.accepted;
  if (c.physics_ok) {
    c.likelihood = layout_likelihood(c.verdict.layout, kb, reasoning);
  }
  return c;
}

}  // namespace

void GenConfig::validate() const {
  if (min_objects < 1 || max_objects < min_objects) {
    fail(ErrorKind::kValidation, "object count range must satisfy 1 <= min <= max");
  }
  if (attempts < 1) fail(ErrorKind::kValidation, "attempt budget must be >= 1");
  if (!(calibration_percentile >= 0.0 && calibration_percentile <= 100.0)) {
    fail(ErrorKind::kValidation, "calibration percentile must be in [0, 100]");
  }
  if (pilot_size < 1) fail(ErrorKind::kValidation, "pilot size must be >= 1");
  if (!(drop_clearance >= 0.0)) {
    fail(ErrorKind::kValidation, "drop clearance must be >= 0");
  }
  if (reasoning) reasoning->validate();
}

std::vector<std::string> resolve_categories(const KnowledgeBase& kb,
                                            const AssetLibrary& library,
                                            const SceneBackground& scene,
                                            const GenConfig& config) {
  std::vector<std::string> cats =
      config.categories.empty() ? kb.category_names() : config.categories;
  if (cats.empty()) fail(ErrorKind::kValidation, "no categories to sample");
  for (const std::string& c : cats) {
    if (!kb.has_category(c)) {
      fail(ErrorKind::kValidation, "category not in priors: " + c);
    }
    if (library.models_of(c).empty()) {
      fail(ErrorKind::kValidation, "no object models for category " + c);
    }
    const CategoryPrior& prior = kb.category(c);
    const bool anchored = std::any_of(
        prior.anchors.begin(), prior.anchors.end(), [&](const Anchor& a) {
          return a.prob > 0.0 && scene.find_surface(a.surface) != nullptr;
        });
    if (!anchored) {
      fail(ErrorKind::kValidation,
           "no anchors for category " + c + " in scene " + scene.name);
    }
  }
  return cats;
}

Layout sample_candidate(const KnowledgeBase& kb, const AssetLibrary& library,
                        std::shared_ptr<const SceneBackground> scene,
                        const GenConfig& config, Rng& rng) {
  if (!scene) fail(ErrorKind::kValidation, "no scene");
  config.validate();
  const auto cats = resolve_categories(kb, library, *scene, config);
  return draw(kb, library, scene, config, cats, rng);
}

double resolve_threshold(const KnowledgeBase& kb, const AssetLibrary& library,
                         std::shared_ptr<const SceneBackground> scene,
                         const GenConfig& config) {
  const ReasoningConfig reasoning = effective_reasoning(kb, config);
  if (reasoning.k_threshold) return *reasoning.k_threshold;
  if (!scene) fail(ErrorKind::kValidation, "no scene");
  config.validate();
  const auto cats = resolve_categories(kb, library, *scene, config);
  std::vector<Candidate> pilot(static_cast<size_t>(config.pilot_size));
  parallel_for(pilot.size(), config.threads, [&](size_t i) {
    Rng rng = make_stream(config.seed, kPilotStream + i);
    pilot[i] = evaluate(draw(kb, library, scene, config, cats, rng), kb,
                        reasoning, config.physics);
  });
  std::vector<LikelihoodReport> reports;
  for (Candidate& c : pilot) {
    if (c.physics_ok) reports.push_back(std::move(c.likelihood));
  }
  if (reports.empty()) {
    fail(ErrorKind::kBudget,
         "calibration pilot produced no physically plausible layouts");
  }
  return calibrate_threshold(reports, config.calibration_percentile);
}

GenStats generate(const KnowledgeBase& kb, const AssetLibrary& library,
                  std::shared_ptr<const SceneBackground> scene,
                  const GenConfig& config, size_t count,
                  const std::function<void(const GeneratedLayout&)>& emit) {
  if (!scene) fail(ErrorKind::kValidation, "no scene");
  config.validate();
  const auto cats = resolve_categories(kb, library, *scene, config);
  ReasoningConfig reasoning = effective_reasoning(kb, config);
  GenStats stats;
  stats.annotation_cost_s = annotation_cost(kb);
  stats.threshold = resolve_threshold(kb, library, scene, config);

  const size_t batch = static_cast<size_t>(resolve_threads(config.threads)) * 4;
  const uint64_t budget = static_cast<uint64_t>(config.attempts);
  uint64_t next = 0;
  std::vector<Candidate> results;
  while (static_cast<size_t>(stats.accepted) < count) {
    if (next >= budget) {
      stats.budget_exhausted = true;
      break;
    }
    const size_t n = static_cast<size_t>(std::min<uint64_t>(batch, budget - next));
    results.assign(n, Candidate{});
    parallel_for(n, config.threads, [&](size_t i) {
      Rng rng = make_stream(config.seed, next + i);
      results[i] = evaluate(draw(kb, library, scene, config, cats, rng), kb,
                            reasoning, config.physics);
    });
    for (size_t i = 0; i < n && static_cast<size_t>(stats.accepted) < count; ++i) {
      Candidate& c = results[i];
      ++stats.tried;
      if (!c.physics_ok) {
        ++stats.physics_rejections;
        continue;
      }
      c.likelihood.accepted = commonsense_accept(c.likelihood, stats.threshold);
      if (!c.likelihood.accepted) {
        ++stats.commonsense_rejections;
        continue;
      }
      ++stats.accepted;
      GeneratedLayout g;
      g.index = next + i;
      g.layout = std::move(c.verdict.layout);
      g.likelihood = std::move(c.likelihood);
      g.contacts = std::move(c.verdict.report);
      if (emit) emit(g);
    }
    next += n;
  }
  return stats;
}

double annotation_cost(size_t models, size_t pairs) {
  return kSecondsPerModel * static_cast<double>(models) +
         kSecondsPerPair * static_cast<double>(pairs);
}

double annotation_cost(const KnowledgeBase& kb) {
  return annotation_cost(kb.model_count(), kb.pair_count());
}

std::vector<KnowledgeBase> simulate_annotators(const KnowledgeBase& kb, int n,
                                               double noise, Rng& rng) {
  if (n < 1) fail(ErrorKind::kValidation, "annotator count must be >= 1");
  if (!(noise >= 0.0 && noise < 1.0)) {
    fail(ErrorKind::kValidation, "noise must be in [0, 1)");
  }
  std::uniform_real_distribution<double> factor(1.0 - noise, 1.0 + noise);
  auto scale = [&](double v) { return noise > 0.0 ? v * factor(rng) : v; };
  auto scale_prob = [&](double p) { return std::clamp(scale(p), 0.0, 1.0); };
  std::vector<KnowledgeBase> out;
  out.reserve(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    std::vector<CategoryPrior> cats = kb.categories();
    for (CategoryPrior& c : cats) {
      for (Keypose& kp : c.keyposes) kp.prob = scale_prob(kp.prob);
      for (Anchor& a : c.anchors) a.prob = scale_prob(a.prob);
    }
    std::vector<PairPrior> pairs = kb.pairs();
    for (PairPrior& p : pairs) {
      p.occ_prob = scale_prob(p.occ_prob);
      p.sugg_dist = scale(p.sugg_dist);
    }
    out.emplace_back(std::move(cats), std::move(pairs), kb.config(),
                     kb.pose_bandwidth(), kb.location_bandwidth());
  }
  return out;
}

nlohmann::json gen_stats_to_json(const GenStats& stats) {
  return {{"tried", stats.tried},
          {"physics_rejections", stats.physics_rejections},
          {"commonsense_rejections", stats.commonsense_rejections},
          {"accepted", stats.accepted},
          {"annotation_cost_s", stats.annotation_cost_s},
          {"threshold", stats.threshold},
          {"budget_exhausted", stats.budget_exhausted}};
}

nlohmann::json generated_to_json(const GeneratedLayout& g) {
  return {{"index", g.index},
          {"layout", layout_to_json(g.layout)},
          {"likelihood", report_to_json(g.likelihood)},
          {"contacts", contact_report_to_json(g.contacts)}};
}

}  // namespace scenesynth
