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


#include "scenesynth/pipeline.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <regex>
#include <sstream>

#include "scenesynth/error.h"

namespace scenesynth {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr uint64_t kCameraStream = uint64_t{1} << 60;
constexpr uint64_t kAnnotatorStream = uint64_t{1} << 59;

double deg(double d) { return d * std::numbers::pi / 180.0; }

std::pair<double, double> range_of(const json& j, const char* key,
                                   std::pair<double, double> fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_number()) return {v.get<double>(), v.get<double>()};
  if (!v.is_array() || v.size() != 2) {
    fail(ErrorKind::kValidation, std::string(key) + " must be a number or [min, max]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

void absolutize(json& doc, const fs::path& base) {
  auto fix = [&](json& v) {
    if (v.is_string()) {
      const fs::path p(v.get<std::string>());
      if (p.is_relative()) v = (base / p).lexically_normal().string();
    }
  };
  if (doc.contains("assets")) fix(doc["assets"]);
  if (doc.contains("scenes") && doc["scenes"].is_object()) {
    for (auto& [name, s] : doc["scenes"].items()) {
      if (s.is_object() && s.contains("priors")) fix(s["priors"]);
    }
  }
}

json read_json_file(const fs::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kNotFound, std::string(what) + " not found: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
}

void remove_stale_samples(const fs::path& dir) {
  static const std::regex stem(R"(^\d{6}\..*)");
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return;
  std::vector<fs::path> stale;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() &&
        std::regex_match(entry.path().filename().string(), stem)) {
      stale.push_back(entry.path());
    }
  }
  for (const fs::path& p : stale) fs::remove(p, ec);
}

PhysicsConfig physics_from_json(const json& j) {
  PhysicsConfig p;
  p.penetration_tolerance = j.value("penetration_tolerance", p.penetration_tolerance);
  p.stability_margin = j.value("stability_margin", p.stability_margin);
  p.contact_tolerance = j.value("contact_tolerance", p.contact_tolerance);
  p.feature_tolerance = j.value("feature_tolerance", p.feature_tolerance);
  p.settle_epsilon = j.value("settle_epsilon", p.settle_epsilon);
  p.max_iters = j.value("max_iters", p.max_iters);
  if (p.max_iters < 1) fail(ErrorKind::kValidation, "physics.max_iters must be >= 1");
  return p;
}

}  // namespace

json default_config() {
  return {{"scene", "shelf"},
          {"count", 10},
          {"seed", 0},
          {"threads", 0},
          {"generation",
           {{"min_objects", 1},
            {"max_objects", 5},
            {"categories", json::array()},
            {"attempts", 20000},
            {"calibration_percentile", 20.0},
            {"pilot_size", 200},
            {"drop_clearance", 0.005}}},
          {"physics", json::object()},
          {"render", {{"width", 256}, {"height", 256}, {"ambient", 0.35}}},
          {"weights", {{"gan", 2.0}, {"pmse", 5.0}, {"rec", 10.0}, {"geo", 3.0}}},
          {"sensitivity",
           {{"annotators", 20},
            {"noise", 0.2},
            {"layouts_per_base", 500},
            {"floor_batches", 4},
            {"bootstrap_rounds", 200}}},
          {"scenes", json::object()}};
}

json load_config(const std::vector<fs::path>& layers) {
  json config = default_config();
  for (const fs::path& path : layers) {
    json layer = read_json_file(path, "config");
    if (!layer.is_object()) fail(ErrorKind::kParse, path.string() + ": not an object");
    absolutize(layer, path.parent_path());
    config.merge_patch(layer);
  }
  return config;
}

CameraProfile camera_profile_from_json(const json& j) {
  CameraProfile p;
  std::tie(p.radius_min, p.radius_max) =
      range_of(j, "radius", {p.radius_min, p.radius_max});
  auto [e0, e1] = range_of(j, "elevation_deg", {30.0, 30.0});
  auto [a0, a1] = range_of(j, "azimuth_deg", {-90.0, -90.0});
  p.elevation_min = deg(e0);
  p.elevation_max = deg(e1);
  p.azimuth_min = deg(a0);
  p.azimuth_max = deg(a1);
  p.target_jitter = j.value("target_jitter", p.target_jitter);
  if (j.contains("target")) {
    const auto t = j.at("target").get<std::vector<double>>();
    if (t.size() != 3) fail(ErrorKind::kValidation, "camera.target must be [x, y, z]");
    p.target = Vec3(t[0], t[1], t[2]);
  }
  p.fov_y_deg = j.value("fov_y_deg", p.fov_y_deg);
  p.near = j.value("near", p.near);
  p.far = j.value("far", p.far);
  p.validate();
  return p;
}

GenConfig gen_config_from_json(const json& config, const KnowledgeBase& kb) {
  const json& g = config.at("generation");
  GenConfig gen;
  gen.min_objects = g.value("min_objects", gen.min_objects);
  gen.max_objects = g.value("max_objects", gen.max_objects);
  gen.categories = g.value("categories", std::vector<std::string>{});
  gen.attempts = g.value("attempts", gen.attempts);
  gen.calibration_percentile = g.value("calibration_percentile", gen.calibration_percentile);
  gen.pilot_size = g.value("pilot_size", gen.pilot_size);
  gen.drop_clearance = g.value("drop_clearance", gen.drop_clearance);
  gen.seed = config.value("seed", uint64_t{0});
  gen.threads = config.value("threads", 0);
  gen.physics = physics_from_json(config.value("physics", json::object()));
  if (config.contains("k_threshold") && !config.at("k_threshold").is_null()) {
    ReasoningConfig r = kb.config();
    const json& k = config.at("k_threshold");
    if (k.is_string()) {
      if (k.get<std::string>() != "calibrate") {
        fail(ErrorKind::kValidation, "k_threshold must be a number or \"calibrate\"");
      }
      r.k_threshold.reset();
    } else {
      r.k_threshold = k.get<double>();
    }
    gen.reasoning = r;
  }
  gen.validate();
  return gen;
}

Workspace open_workspace(const json& config) {
  try {
    Workspace ws;
    ws.config = config;
    ws.scene_name = config.at("scene").get<std::string>();
    if (!config.contains("assets")) fail(ErrorKind::kValidation, "config has no assets index");
    ws.library = load_asset_index(config.at("assets").get<std::string>());
    ws.scene = ws.library.scene(ws.scene_name);
    const json scene_cfg =
        config.at("scenes").value(ws.scene_name, json::object());
    if (!scene_cfg.contains("priors")) {
      fail(ErrorKind::kValidation, "no priors configured for scene " + ws.scene_name);
    }
    ws.config["generation"].merge_patch(scene_cfg.value("generation", json::object()));
    ws.kb = load_knowledge(scene_cfg.at("priors").get<std::string>(), ws.scene.get());
    ws.gen = gen_config_from_json(ws.config, ws.kb);
    ws.camera = camera_profile_from_json(scene_cfg.value("camera", json::object()));
    const json& r = ws.config.at("render");
    ws.camera.width = r.value("width", 256);
    ws.camera.height = r.value("height", 256);
    ws.render.ambient = r.value("ambient", ws.render.ambient);
    ws.render.threads = ws.gen.threads;
    const json& w = ws.config.at("weights");
    ws.weights.gan = w.value("gan", ws.weights.gan);
    ws.weights.pmse = w.value("pmse", ws.weights.pmse);
    ws.weights.rec = w.value("rec", ws.weights.rec);
    ws.weights.geo = w.value("geo", ws.weights.geo);
    ws.weights.validate();
    return ws;
  } catch (const json::exception& e) {
    fail(ErrorKind::kValidation, std::string("config: ") + e.what());
  }
}

json cmd_import(const Workspace& ws) {
  json objects = json::array();
  for (const auto& [id, m] : ws.library.objects) {
    objects.push_back({{"id", id},
                       {"category", m->category},
                       {"vertices", m->mesh.vertices.size()},
                       {"faces", m->mesh.faces.size()},
                       {"hull_vertices", m->hull.points.size()},
                       {"volume_m3", m->mass.volume},
                       {"mass_kg", m->mass.mass}});
  }
  json scenes = json::array();
  for (const auto& [name, s] : ws.library.scenes) {
    json surfaces = json::array();
    for (const SupportSurface& f : s->surfaces) surfaces.push_back(f.name);
    scenes.push_back({{"name", name},
                      {"faces", s->mesh.faces.size()},
                      {"scene_scale", s->scene_scale},
                      {"surfaces", surfaces}});
  }
  return {{"objects", objects},
          {"scenes", scenes},
          {"priors",
           {{"scene", ws.scene_name},
            {"categories", ws.kb.model_count()},
            {"pairs", ws.kb.pair_count()},
            {"annotation_cost_s", annotation_cost(ws.kb)}}}};
}

DatasetManifest cmd_generate(const Workspace& ws, size_t count,
                             const fs::path& out, std::ostream* log) {
  const fs::path samples = out / "samples";
  std::error_code ec;
  fs::create_directories(samples, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create " + samples.string() + ": " + ec.message());
  remove_stale_samples(samples);

  DatasetManifest manifest;
  manifest.scene = ws.scene_name;
  manifest.config = ws.config;
  manifest.config["count"] = count;
  manifest.categories = resolve_categories(ws.kb, ws.library, *ws.scene, ws.gen);
  std::sort(manifest.categories.begin(), manifest.categories.end());
  for (const std::string& c : manifest.categories) manifest.instance_counts[c] = 0;

  std::ostringstream jsonl;
  const GenStats stats = generate(
      ws.kb, ws.library, ws.scene, ws.gen, count, [&](const GeneratedLayout& g) {
        const size_t k = manifest.samples.size();
        char stem[16];
        std::snprintf(stem, sizeof(stem), "%06zu", k);
        Rng rng = make_stream(ws.gen.seed, kCameraStream + k);
        const Camera camera = sample_camera(*ws.scene, rng, ws.camera);
        const RenderedSample sample = rasterize(g.layout, camera, ws.render);

        json instances = json::array();
        for (size_t i = 0; i < g.layout.placements.size(); ++i) {
          const Placement& p = g.layout.placements[i];
          instances.push_back({{"id", i + 1},
                               {"instance_id", p.instance_id},
                               {"category", p.category()},
                               {"model", p.object->id}});
        }
        const json extra = {{"sample", stem},
                            {"scene", ws.scene_name},
                            {"layout_index", g.index},
                            {"seed", ws.gen.seed},
                            {"instances", instances}};
        encode_sample(sample, samples, stem, extra);

        std::vector<bool> seen(g.layout.placements.size() + 1, false);
        for (uint16_t v : sample.instance.data) seen[v] = true;
        for (size_t i = 0; i < g.layout.placements.size(); ++i) {
          if (seen[i + 1]) ++manifest.instance_counts[g.layout.placements[i].category()];
        }
        SampleEntry entry;
        entry.stem = stem;
        entry.layout_index = g.index;
        entry.seed = ws.gen.seed;
        entry.camera = camera_to_json(camera);
        manifest.samples.push_back(std::move(entry));
        json line = generated_to_json(g);
        line["sample"] = stem;
        jsonl << line.dump() << '\n';
        if (log) *log << "sample " << stem << " (candidate " << g.index << ")\n";
      });
  manifest.stats = stats;
  manifest.complete = !stats.budget_exhausted;
  write_text(out / "layouts.jsonl", jsonl.str());
  write_manifest(out / "manifest.json", manifest);
  return manifest;
}

ImageTensor tensor_from_image(const Image8& image) {
  ImageTensor t(image.height, image.width, image.channels);
  for (size_t i = 0; i < image.data.size(); ++i) t.values[i] = image.data[i] / 127.5 - 1.0;
  return t;
}

ImageTensor tensor_from_image(const Image16& image) {
  ImageTensor t(image.height, image.width, image.channels);
  for (size_t i = 0; i < image.data.size(); ++i) t.values[i] = image.data[i] / 32767.5 - 1.0;
  return t;
}

ImageTensor read_score_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kNotFound, "score map not found: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        fail(ErrorKind::kParse, path.string() + ": bad number '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(ErrorKind::kParse, path.string() + ": ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) {
    fail(ErrorKind::kValidation, path.string() + ": empty score map");
  }
  ImageTensor t(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()), 1);
  for (size_t y = 0; y < rows.size(); ++y) {
    for (size_t x = 0; x < rows[y].size(); ++x) {
      t.at(static_cast<int>(y), static_cast<int>(x)) = rows[y][x];
    }
  }
  t.validate();
  return t;
}

json cmd_losses(const LossInputs& in) {
  in.weights.validate();
  const DecodedSample s = decode_sample(in.sample_dir, in.stem);
  const SampleFiles files = sample_files(in.sample_dir, in.stem);
  const ImageTensor rough = tensor_from_image(s.rgb);
  Image8 cand_img = read_png8(in.candidate);
  if (cand_img.channels == 4) {
    Image8 rgb(cand_img.width, cand_img.height, 3);
    for (int y = 0; y < cand_img.height; ++y) {
      for (int x = 0; x < cand_img.width; ++x) {
        for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = cand_img.at(x, y, c);
      }
    }
    cand_img = std::move(rgb);
  }
  const ImageTensor candidate = tensor_from_image(cand_img);
  if (!candidate.same_shape(rough)) {
    fail(ErrorKind::kValidation, "candidate shape does not match the rough image");
  }

  const ImageTensor seg = tensor_from_image(read_png16(files.seg));
  const ImageTensor normal = tensor_from_image(read_png8(files.normal));
  const ImageTensor depth = tensor_from_image(read_png16(files.depth));
  auto predicted = [](const std::optional<fs::path>& p, const ImageTensor& gt,
                      bool sixteen) {
    if (!p) return gt;
    ImageTensor t = sixteen ? tensor_from_image(read_png16(*p))
                            : tensor_from_image(read_png8(*p));
    if (!t.same_shape(gt)) fail(ErrorKind::kValidation, p->string() + ": shape mismatch");
    return t;
  };
  const std::vector<ImageTensor> gt = {seg, normal, depth};
  const std::vector<ImageTensor> pred = {predicted(in.pred_seg, seg, true),
                                         predicted(in.pred_normal, normal, false),
                                         predicted(in.pred_depth, depth, true)};

  std::vector<ImageTensor> rec = pred;
  std::vector<ImageTensor> target = gt;
  if (in.include_rough) {
    rec.insert(rec.begin(), candidate);
    target.insert(target.begin(), rough);
  }

  LossReport report;
  report.weights = in.weights;
  report.pmse = pmse_loss(rough, candidate);
  report.rec = reconstruction_loss(rec, target);
  report.geo = geo_guided_loss(pred, gt);
  json gan = nullptr;
  if (in.real_scores && in.fake_scores) {
    const LsganLosses l =
        lsgan_losses(read_score_csv(*in.real_scores), read_score_csv(*in.fake_scores));
    report.gan = l.d_loss;
    gan = {{"d_loss", l.d_loss}, {"g_loss", l.g_loss}};
  } else if (in.real_scores || in.fake_scores) {
    fail(ErrorKind::kUsage, "both real and fake score maps are needed");
  }
  report.total = total_objective(report.gan, report.pmse, report.rec, report.geo,
                                 report.weights);
  json out = loss_report_to_json(report);
  out["gan_scores"] = gan;
  out["reconstruction_arity"] = rec.size();
  return out;
}

SensitivityReport cmd_sensitivity(const Workspace& ws, int annotators,
                                  double noise, const fs::path& out,
                                  std::ostream* log) {
  const json& cfg = ws.config.at("sensitivity");
  SensitivityConfig sc;
  sc.layouts_per_base = cfg.value("layouts_per_base", sc.layouts_per_base);
  sc.floor_batches = cfg.value("floor_batches", sc.floor_batches);
  sc.bootstrap_rounds = cfg.value("bootstrap_rounds", sc.bootstrap_rounds);
  Rng rng = make_stream(ws.gen.seed, kAnnotatorStream);
  const std::vector<KnowledgeBase> bases =
      simulate_annotators(ws.kb, annotators, noise, rng);
  if (log) *log << "sensitivity: " << annotators << " bases x " << sc.layouts_per_base << " layouts\n";
  const SensitivityReport report =
      sensitivity_report(ws.kb, bases, ws.library, ws.scene, ws.gen, sc);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create " + out.string() + ": " + ec.message());
  json doc = sensitivity_to_json(report);
  doc["noise"] = noise;
  doc["annotators"] = annotators;
  doc["seed"] = ws.gen.seed;
  write_text(out / "report.json", doc.dump(2) + "\n");
  write_text(out / "divergence.csv", divergence_csv(report));
  return report;
}

}  // namespace scenesynth
