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

#include "scenesynth/knowledge.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "scenesynth/error.h"

namespace scenesynth {

namespace {

using nlohmann::json;

void check_prob(double p, const std::string& what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    fail(ErrorKind::kValidation,
         what + ": probability " + std::to_string(p) + " outside [0, 1]");
  }
}

double gaussian_kernel(double dist, double bandwidth) {
  if (bandwidth <= 0.0) return dist <= 1e-12 ? 1.0 : 0.0;
  return std::exp(-(dist * dist) / (2.0 * bandwidth * bandwidth));
}

std::pair<std::string, std::string> ordered(std::string_view a,
                                            std::string_view b) {
  return a <= b ? std::pair<std::string, std::string>(a, b)
                : std::pair<std::string, std::string>(b, a);
}

size_t pick_weighted(const std::vector<double>& weights, Rng& rng,
                     const std::string& what) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) {
    fail(ErrorKind::kValidation, what + ": all probabilities are zero");
  }
  std::discrete_distribution<size_t> dist(weights.begin(), weights.end());
  return dist(rng);
}

}  // namespace

void ReasoningConfig::validate() const {
  if (!(sigma > 0.0)) fail(ErrorKind::kValidation, "sigma must be > 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    fail(ErrorKind::kValidation, "gamma must lie in [0, 1]");
  }
  if (k_threshold && !std::isfinite(*k_threshold)) {
    fail(ErrorKind::kValidation, "k_threshold must be finite");
  }
}

double geodesic_angle(const Quat& a, const Quat& b) {
  const double d = std::min(1.0, std::abs(a.coeffs().dot(b.coeffs())));
  return 2.0 * std::acos(d);
}

double yaw_invariant_angle(const Quat& a, const Quat& b) {
  const Quat za = Quat(0.0, 0.0, 0.0, 1.0) * a;
  const double c0 = a.coeffs().dot(b.coeffs());
  const double c1 = za.coeffs().dot(b.coeffs());
  return 2.0 * std::acos(std::min(1.0, std::hypot(c0, c1)));
}

KnowledgeBase::KnowledgeBase(std::vector<CategoryPrior> categories,
                             std::vector<PairPrior> pairs,
                             ReasoningConfig config, double pose_bandwidth,
                             double location_bandwidth,
                             const SceneBackground* scene)
    : categories_(std::move(categories)),
      pairs_(std::move(pairs)),
      config_(config),
      pose_bandwidth_(pose_bandwidth),
      location_bandwidth_(location_bandwidth) {
  config_.validate();
  if (!(pose_bandwidth_ >= 0.0) || !(location_bandwidth_ >= 0.0)) {
    fail(ErrorKind::kValidation, "bandwidths must be >= 0");
  }
  for (size_t i = 0; i < categories_.size(); ++i) {
    CategoryPrior& c = categories_[i];
    if (!index_.emplace(c.name, i).second) {
      fail(ErrorKind::kValidation, "duplicate category " + c.name);
    }
    if (c.keyposes.empty()) {
      fail(ErrorKind::kValidation, "category " + c.name + " has no keypose");
    }
    for (Keypose& k : c.keyposes) {
      check_prob(k.prob, c.name + " keypose");
      const double n = k.rotation.norm();
      if (!(n > 0.0) || !k.rotation.coeffs().allFinite()) {
        fail(ErrorKind::kValidation, c.name + ": degenerate keypose quaternion");
      }
      k.rotation.normalize();
    }
    for (const Anchor& a : c.anchors) {
      check_prob(a.prob, c.name + " anchor");
      if (!a.position.allFinite()) {
        fail(ErrorKind::kValidation, c.name + ": non-finite anchor");
      }
      if (scene != nullptr) {
        const SupportSurface* s = scene->find_surface(a.surface);
        if (s == nullptr) {
          fail(ErrorKind::kValidation,
               c.name + ": anchor on unknown surface " + a.surface);
        }
        if (!s->contains(a.position, 1e-3 * scene->scene_scale)) {
          fail(ErrorKind::kValidation,
               c.name + ": anchor is not on surface " + a.surface);
        }
      }
    }
  }
  for (size_t i = 0; i < pairs_.size(); ++i) {
    const PairPrior& p = pairs_[i];
    if (!has_category(p.a) || !has_category(p.b)) {
      fail(ErrorKind::kValidation,
           "unknown category in pair (" + p.a + ", " + p.b + ")");
    }
    check_prob(p.occ_prob, "pair (" + p.a + ", " + p.b + ")");
    if (!(p.sugg_dist >= 0.0) || !std::isfinite(p.sugg_dist)) {
      fail(ErrorKind::kValidation,
           "pair (" + p.a + ", " + p.b + "): negative suggested distance");
    }
    if (!pair_index_.emplace(ordered(p.a, p.b), i).second) {
      fail(ErrorKind::kValidation,
           "duplicate pair (" + p.a + ", " + p.b + ")");
    }
  }
}

const CategoryPrior& KnowledgeBase::category(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    fail(ErrorKind::kNotFound, "unknown category " + std::string(name));
  }
  return categories_[it->second];
}

bool KnowledgeBase::has_category(std::string_view name) const {
  return index_.find(name) != index_.end();
}

std::vector<std::string> KnowledgeBase::category_names() const {
  std::vector<std::string> names;
  for (const auto& c : categories_) names.push_back(c.name);
  return names;
}

double KnowledgeBase::pose_density(std::string_view name,
                                   const Quat& pose) const {
  const CategoryPrior& c = category(name);
  const Quat q = pose.normalized();
  double best = 0.0;
  for (const Keypose& k : c.keyposes) {
    const double theta = c.yaw_free ? yaw_invariant_angle(k.rotation, q)
                                    : geodesic_angle(k.rotation, q);
    best = std::max(best, k.prob * gaussian_kernel(theta, pose_bandwidth_));
  }
  return best;
}

double KnowledgeBase::location_density(std::string_view name,
                                       const Vec3& point,
                                       std::string_view surface) const {
  const CategoryPrior& c = category(name);
  double best = 0.0;
  for (const Anchor& a : c.anchors) {
    if (a.surface != surface) continue;
    best = std::max(best, a.prob * gaussian_kernel((point - a.position).norm(),
                                                   location_bandwidth_));
  }
  return best;
}

PairPrior KnowledgeBase::relationship(std::string_view a,
                                      std::string_view b) const {
  auto it = pair_index_.find(ordered(a, b));
  if (it == pair_index_.end()) {
    PairPrior none;
    none.a = a;
    none.b = b;
    return none;
  }
  return pairs_[it->second];
}

PoseSample KnowledgeBase::sample_pose(std::string_view name, Rng& rng) const {
  const CategoryPrior& c = category(name);
  std::vector<double> weights;
  for (const Keypose& k : c.keyposes) weights.push_back(k.prob);
  PoseSample out;
  out.keypose = pick_weighted(weights, rng, c.name + " keyposes");
  Quat q = c.keyposes[out.keypose].rotation;
  if (pose_bandwidth_ > 0.0) {
    std::normal_distribution<double> normal(0.0, pose_bandwidth_);
    const Vec3 omega(normal(rng), normal(rng), normal(rng));
    const double angle = omega.norm();
    if (angle > 0.0) {
      q = Quat(Eigen::AngleAxisd(angle, omega / angle)) * q;
    }
  }
  if (c.yaw_free) {
    std::uniform_real_distribution<double> yaw(0.0, 2.0 * std::numbers::pi);
    q = Quat(Eigen::AngleAxisd(yaw(rng), kUp)) * q;
  }
  out.rotation = q.normalized();
  return out;
}

LocationSample KnowledgeBase::sample_location(std::string_view name,
                                              const SceneBackground& scene,
                                              Rng& rng) const {
  const CategoryPrior& c = category(name);
  std::vector<double> weights;
  for (const Anchor& a : c.anchors) {
    weights.push_back(scene.find_surface(a.surface) != nullptr ? a.prob : 0.0);
  }
  if (weights.empty() ||
      std::all_of(weights.begin(), weights.end(), [](double w) { return w <= 0.0; })) {
    fail(ErrorKind::kValidation,
         "no anchors for category " + c.name + " in scene " + scene.name);
  }
  LocationSample out;
  out.anchor = pick_weighted(weights, rng, c.name + " anchors");
  const Anchor& anchor = c.anchors[out.anchor];
  const SupportSurface& surface = *scene.find_surface(anchor.surface);
  Vec3 p = anchor.position;
  if (location_bandwidth_ > 0.0) {
    std::normal_distribution<double> normal(0.0, location_bandwidth_);
    const double du = normal(rng);
    const double dv = normal(rng);
    p += du * surface.u + dv * surface.v;
  }
  out.point = surface.clamp(p);
  out.surface = anchor.surface;
  return out;
}

KnowledgeBase KnowledgeBase::with_config(const ReasoningConfig& config) const {
  KnowledgeBase copy = *this;
  config.validate();
  copy.config_ = config;
  return copy;
}

KnowledgeBase knowledge_from_json(const json& doc,
                                  const SceneBackground* scene) {
  try {
    std::vector<CategoryPrior> categories;
    for (const auto& [name, entry] : doc.at("categories").items()) {
      CategoryPrior c;
      c.name = name;
      c.yaw_free = entry.value("yaw_free", true);
      for (const json& k : entry.value("keyposes", json::array())) {
        const json& q = k.at("quat");
        if (!q.is_array() || q.size() != 4) {
          fail(ErrorKind::kParse, name + ": quat must be [w, x, y, z]");
        }
        Keypose kp;
        kp.rotation = Quat(q[0].get<double>(), q[1].get<double>(),
                           q[2].get<double>(), q[3].get<double>());
        kp.prob = k.at("prob").get<double>();
        c.keyposes.push_back(kp);
      }
      for (const json& a : entry.value("anchors", json::array())) {
        const json& p = a.at("xyz");
        if (!p.is_array() || p.size() != 3) {
          fail(ErrorKind::kParse, name + ": xyz must be [x, y, z]");
        }
        Anchor an;
        an.position = Vec3(p[0].get<double>(), p[1].get<double>(),
                           p[2].get<double>());
        an.surface = a.at("surface").get<std::string>();
        an.prob = a.at("prob").get<double>();
        c.anchors.push_back(an);
      }
      categories.push_back(std::move(c));
    }
    std::vector<PairPrior> pairs;
    for (const json& p : doc.value("pairs", json::array())) {
      PairPrior pp;
      pp.a = p.at("a").get<std::string>();
      pp.b = p.at("b").get<std::string>();
      pp.occ_prob = p.at("occ_prob").get<double>();
      pp.sugg_dist = p.at("sugg_dist_m").get<double>();
      pairs.push_back(pp);
    }
    ReasoningConfig config;
    const json cfg = doc.value("config", json::object());
    config.sigma = cfg.value("sigma", 0.1);
    config.gamma = cfg.value("gamma", 0.5);
    config.seed = cfg.value("seed", uint64_t{0});
    if (cfg.contains("k_threshold")) {
      const json& k = cfg["k_threshold"];
      if (k.is_string()) {
        if (k.get<std::string>() != "calibrate") {
          fail(ErrorKind::kParse, "k_threshold must be a number or \"calibrate\"");
        }
      } else {
        config.k_threshold = k.get<double>();
      }
    }
    const double scale = scene != nullptr ? scene->scene_scale : 1.0;
    const double pose_bw = cfg.value("pose_bandwidth", kDefaultPoseBandwidth);
    const double loc_bw =
        cfg.value("location_bandwidth", kDefaultLocationBandwidthFactor * scale);
    return KnowledgeBase(std::move(categories), std::move(pairs), config,
                         pose_bw, loc_bw, scene);
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, "knowledge base: " + std::string(e.what()));
  }
}

KnowledgeBase load_knowledge(const std::filesystem::path& path,
                             const SceneBackground* scene) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorKind::kNotFound, "knowledge base not found: " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, "knowledge base: " + std::string(e.what()));
  }
  return knowledge_from_json(doc, scene);
}

json knowledge_to_json(const KnowledgeBase& kb) {
  json doc;
  json cats = json::object();
  for (const CategoryPrior& c : kb.categories()) {
    json entry;
    entry["yaw_free"] = c.yaw_free;
    entry["keyposes"] = json::array();
    for (const Keypose& k : c.keyposes) {
      entry["keyposes"].push_back(
          {{"quat", {k.rotation.w(), k.rotation.x(), k.rotation.y(), k.rotation.z()}},
           {"prob", k.prob}});
    }
    entry["anchors"] = json::array();
    for (const Anchor& a : c.anchors) {
      entry["anchors"].push_back(
          {{"xyz", {a.position.x(), a.position.y(), a.position.z()}},
           {"surface", a.surface},
           {"prob", a.prob}});
    }
    cats[c.name] = entry;
  }
  doc["categories"] = cats;
  doc["pairs"] = json::array();
  for (const PairPrior& p : kb.pairs()) {
    doc["pairs"].push_back({{"a", p.a},
                            {"b", p.b},
                            {"occ_prob", p.occ_prob},
                            {"sugg_dist_m", p.sugg_dist}});
  }
  const ReasoningConfig& cfg = kb.config();
  doc["config"] = {{"sigma", cfg.sigma},
                   {"gamma", cfg.gamma},
                   {"seed", cfg.seed},
                   {"pose_bandwidth", kb.pose_bandwidth()},
                   {"location_bandwidth", kb.location_bandwidth()}};
  if (cfg.k_threshold) {
    doc["config"]["k_threshold"] = *cfg.k_threshold;
  } else {
    doc["config"]["k_threshold"] = "calibrate";
  }
  return doc;
}

}  // namespace scenesynth
