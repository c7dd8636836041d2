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


#include "scenesynth/dataset.h"

#include <algorithm>
#include <fstream>

#include "scenesynth/error.h"
#include "scenesynth/render.h"

namespace scenesynth {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path samples_dir(const fs::path& root) { return root / "samples"; }

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kNotFound, "file not found: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, path.string() + ": " + e.what());
  }
}

// Pixel count per instance id.
std::map<uint16_t, int64_t> instance_pixels(const Image16& seg) {
  std::map<uint16_t, int64_t> out;
  for (uint16_t v : seg.data) {
    if (v != 0) ++out[v];
  }
  return out;
}

}  // namespace

int DatasetManifest::category_id(const std::string& name) const {
  auto it = std::find(categories.begin(), categories.end(), name);
  return it == categories.end() ? 0 : static_cast<int>(it - categories.begin()) + 1;
}

json manifest_to_json(const DatasetManifest& m) {
  json samples = json::array();
  for (const SampleEntry& s : m.samples) {
    samples.push_back({{"stem", s.stem},
                       {"layout_index", s.layout_index},
                       {"seed", s.seed},
                       {"camera", s.camera}});
  }
  json cats = json::array();
  for (size_t i = 0; i < m.categories.size(); ++i) {
    cats.push_back({{"id", i + 1}, {"name", m.categories[i]}});
  }
  return {{"version", m.version},
          {"scene", m.scene},
          {"complete", m.complete},
          {"categories", cats},
          {"instance_counts", m.instance_counts},
          {"stats", gen_stats_to_json(m.stats)},
          {"config", m.config},
          {"samples", samples}};
}

DatasetManifest manifest_from_json(const json& j) {
  try {
    DatasetManifest m;
    m.version = j.at("version").get<int>();
    if (m.version != kManifestVersion) {
      fail(ErrorKind::kValidation,
           "unsupported manifest version " + std::to_string(m.version));
    }
    m.scene = j.at("scene").get<std::string>();
    m.complete = j.value("complete", true);
    const json& cats = j.at("categories");
    m.categories.resize(cats.size());
    for (const json& c : cats) {
      const size_t id = c.at("id").get<size_t>();
      if (id < 1 || id > cats.size()) {
        fail(ErrorKind::kValidation, "category id out of range");
      }
      m.categories[id - 1] = c.at("name").get<std::string>();
    }
    m.instance_counts = j.at("instance_counts").get<std::map<std::string, int64_t>>();
    const json& st = j.at("stats");
    m.stats.tried = st.value("tried", int64_t{0});
    m.stats.physics_rejections = st.value("physics_rejections", int64_t{0});
    m.stats.commonsense_rejections = st.value("commonsense_rejections", int64_t{0});
    m.stats.accepted = st.value("accepted", int64_t{0});
    m.stats.annotation_cost_s = st.value("annotation_cost_s", 0.0);
    m.stats.threshold = st.value("threshold", 0.0);
    m.stats.budget_exhausted = st.value("budget_exhausted", false);
    m.config = j.value("config", json::object());
    for (const json& s : j.at("samples")) {
      SampleEntry e;
      e.stem = s.at("stem").get<std::string>();
      e.layout_index = s.value("layout_index", uint64_t{0});
      e.seed = s.value("seed", uint64_t{0});
      e.camera = s.value("camera", json::object());
      m.samples.push_back(std::move(e));
    }
    return m;
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("manifest: ") + e.what());
  }
}

DatasetManifest load_manifest(const fs::path& path) {
  return manifest_from_json(read_json(path));
}

void write_manifest(const fs::path& path, const DatasetManifest& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out << manifest_to_json(m).dump(2) << '\n';
  if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
}

Rle rle_encode(const Image8& mask) {
  Rle rle;
  rle.height = mask.height;
  rle.width = mask.width;
  bool current = false;
  uint32_t run = 0;
  for (int x = 0; x < mask.width; ++x) {
    for (int y = 0; y < mask.height; ++y) {
      const bool v = mask.at(x, y) != 0;
      if (v != current) {
        rle.counts.push_back(run);
        run = 0;
        current = v;
      }
      ++run;
    }
  }
  rle.counts.push_back(run);
  return rle;
}

Image8 rle_decode(const Rle& rle) {
  Image8 mask(rle.width, rle.height, 1, 0);
  const size_t total = static_cast<size_t>(rle.width) * rle.height;
  size_t pos = 0;
  bool value = false;
  for (uint32_t run : rle.counts) {
    if (pos + run > total) fail(ErrorKind::kValidation, "RLE overruns its mask");
    for (uint32_t k = 0; k < run; ++k, ++pos) {
      if (value) {
        const int x = static_cast<int>(pos / rle.height);
        const int y = static_cast<int>(pos % rle.height);
        mask.at(x, y) = 1;
      }
    }
    value = !value;
  }
  if (pos != total) fail(ErrorKind::kValidation, "RLE does not cover its mask");
  return mask;
}

int64_t rle_area(const Rle& rle) {
  int64_t area = 0;
  for (size_t i = 1; i < rle.counts.size(); i += 2) area += rle.counts[i];
  return area;
}

std::array<int, 4> mask_bbox(const Image8& mask) {
  int x0 = mask.width, y0 = mask.height, x1 = -1, y1 = -1;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y) == 0) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) return {0, 0, 0, 0};
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

std::map<uint16_t, std::string> sample_categories(const json& meta) {
  std::map<uint16_t, std::string> out;
  for (const json& inst : meta.value("instances", json::array())) {
    out[inst.at("id").get<uint16_t>()] = inst.value("category", std::string());
  }
  return out;
}

std::map<std::string, int64_t> recount_instances(const DatasetManifest& m,
                                                 const fs::path& root) {
  std::map<std::string, int64_t> counts;
  for (const std::string& c : m.categories) counts[c] = 0;
  for (const SampleEntry& s : m.samples) {
    const SampleFiles files = sample_files(samples_dir(root), s.stem);
    const auto cats = sample_categories(read_json(files.meta));
    for (const auto& [id, pixels] : instance_pixels(read_png16(files.seg))) {
      auto it = cats.find(id);
      if (it == cats.end()) {
        fail(ErrorKind::kValidation, "corrupt segmentation map " +
                                         files.seg.string() + ": unknown instance " +
                                         std::to_string(id));
      }
      ++counts[it->second];
    }
  }
  return counts;
}

std::vector<std::string> validate_dataset(const DatasetManifest& m,
                                          const fs::path& root) {
  std::vector<std::string> problems;
  for (const SampleEntry& s : m.samples) {
    const SampleFiles f = sample_files(samples_dir(root), s.stem);
    for (const fs::path& p : {f.rgb, f.seg, f.depth, f.normal, f.meta}) {
      if (!fs::is_regular_file(p)) problems.push_back("missing file: " + p.string());
    }
  }
  if (!problems.empty()) return problems;
  try {
    std::map<std::string, int64_t> recount = recount_instances(m, root);
    std::map<std::string, int64_t> declared;
    for (const std::string& c : m.categories) declared[c] = 0;
    for (const auto& [c, n] : m.instance_counts) declared[c] = n;
    for (const auto& [c, n] : recount) {
      if (m.category_id(c) == 0) problems.push_back("category not in table: " + c);
    }
    for (const auto& [c, n] : declared) {
      const int64_t actual = recount.count(c) ? recount.at(c) : 0;
      if (actual != n) {
        problems.push_back("instance count mismatch for " + c + ": manifest " +
                           std::to_string(n) + ", maps " + std::to_string(actual));
      }
    }
  } catch (const Error& e) {
    problems.push_back(e.what());
  }
  return problems;
}

json export_coco(const DatasetManifest& m, const fs::path& root) {
  json images = json::array();
  json annotations = json::array();
  json categories = json::array();
  for (size_t i = 0; i < m.categories.size(); ++i) {
    categories.push_back({{"id", i + 1}, {"name", m.categories[i]}, {"supercategory", m.scene}});
  }
  int64_t ann_id = 1;
  for (size_t k = 0; k < m.samples.size(); ++k) {
    const SampleEntry& s = m.samples[k];
    const SampleFiles files = sample_files(samples_dir(root), s.stem);
    const Image16 seg = read_png16(files.seg);
    const auto cats = sample_categories(read_json(files.meta));
    const int64_t image_id = static_cast<int64_t>(k) + 1;
    images.push_back({{"id", image_id},
                      {"file_name", (fs::path("samples") / (s.stem + ".rgb.png")).generic_string()},
                      {"width", seg.width},
                      {"height", seg.height}});
    for (const auto& [id, pixels] : instance_pixels(seg)) {
      auto it = cats.find(id);
      if (it == cats.end() || m.category_id(it->second) == 0) {
        fail(ErrorKind::kValidation, "corrupt segmentation map " +
                                         files.seg.string() + ": unknown instance " +
                                         std::to_string(id));
      }
      Image8 mask(seg.width, seg.height, 1, 0);
      for (size_t p = 0; p < seg.data.size(); ++p) mask.data[p] = seg.data[p] == id;
      const Rle rle = rle_encode(mask);
      const auto box = mask_bbox(mask);
      annotations.push_back({{"id", ann_id++},
                             {"image_id", image_id},
                             {"category_id", m.category_id(it->second)},
                             {"segmentation", {{"size", {rle.height, rle.width}}, {"counts", rle.counts}}},
                             {"area", rle_area(rle)},
                             {"bbox", box},
                             {"iscrowd", 0},
                             {"instance", id}});
    }
  }
  return {{"info", {{"description", "scenesynth " + m.scene}, {"version", m.version}}},
          {"images", images},
          {"annotations", annotations},
          {"categories", categories}};
}

json dataset_stats(const DatasetManifest& m) {
  int64_t total = 0;
  json per_category = json::object();
  for (const std::string& c : m.categories) per_category[c] = 0;
  for (const auto& [c, n] : m.instance_counts) {
    per_category[c] = n;
    total += n;
  }
  const size_t ncat = m.categories.size();
  return {{"scene", m.scene},
          {"samples", m.samples.size()},
          {"categories", ncat},
          {"instances_per_category", per_category},
          {"total_instances", total},
          {"average_per_category", ncat ? static_cast<double>(total) / ncat : 0.0},
          {"per_scene", {{m.scene, total}}},
          {"modeled_labeling_s", m.stats.annotation_cost_s}};
}

Image8 contact_sheet(const DatasetManifest& m, const fs::path& root,
                     int columns, int limit) {
  if (columns < 1 || limit < 1) fail(ErrorKind::kUsage, "columns and limit must be >= 1");
  const size_t n = std::min(m.samples.size(), static_cast<size_t>(limit));
  if (n == 0) return Image8(1, 1, 3, 0);
  std::vector<Image8> tiles;
  for (size_t i = 0; i < n; ++i) {
    tiles.push_back(read_png8(sample_files(samples_dir(root), m.samples[i].stem).rgb));
  }
  const int tw = tiles[0].width;
  const int th = tiles[0].height;
  const int cols = std::min(columns, static_cast<int>(n));
  const int rows = (static_cast<int>(n) + cols - 1) / cols;
  Image8 sheet(cols * tw, rows * th, 3, 0);
  for (size_t i = 0; i < n; ++i) {
    const Image8& t = tiles[i];
    const int ox = static_cast<int>(i % cols) * tw;
    const int oy = static_cast<int>(i / cols) * th;
    for (int y = 0; y < std::min(th, t.height); ++y) {
      for (int x = 0; x < std::min(tw, t.width); ++x) {
        for (int c = 0; c < 3; ++c) {
          sheet.at(ox + x, oy + y, c) = t.at(x, y, std::min(c, t.channels - 1));
        }
      }
    }
  }
  return sheet;
}

}  // namespace scenesynth
