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


#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "scenesynth/dataset.h"
#include "scenesynth/error.h"
#include "scenesynth/pipeline.h"
#include "test_support.h"

namespace scenesynth {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
  }
  return out;
}

json small_config(int count = 4) {
  json cfg = load_config({SCENESYNTH_DATA_DIR "/config.json"});
  cfg["render"]["width"] = 96;
  cfg["render"]["height"] = 96;
  cfg["count"] = count;
  cfg["generation"]["pilot_size"] = 60;
  return cfg;
}

TEST(Rle, RoundTripAndColumnMajorOrder) {
  Image8 m(2, 2, 1, 0);
  m.at(1, 0) = 1;  // x = 1, y = 0
  Rle r = rle_encode(m);
  EXPECT_EQ(r.counts, (std::vector<uint32_t>{2, 1, 1}));
  Image8 starts(2, 1, 1, 1);
  EXPECT_EQ(rle_encode(starts).counts, (std::vector<uint32_t>{0, 2}));

  std::mt19937_64 rng(3);
  std::bernoulli_distribution coin(0.3);
  for (int t = 0; t < 50; ++t) {
    Image8 mask(17 + t % 5, 9 + t % 7, 1, 0);
    for (auto& v : mask.data) v = coin(rng) ? 1 : 0;
    Rle enc = rle_encode(mask);
    EXPECT_EQ(rle_decode(enc), mask);
    EXPECT_EQ(rle_area(enc), std::count(mask.data.begin(), mask.data.end(), 1));
  }
}

TEST(Rle, BoundingBoxMatchesPixelScan) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> pos(0, 30);
  for (int t = 0; t < 100; ++t) {
    Image8 mask(31, 31, 1, 0);
    const int n = t % 6;
    for (int k = 0; k < n; ++k) mask.at(pos(rng), pos(rng)) = 255;
    int x0 = 99, y0 = 99, x1 = -1, y1 = -1;
    for (int y = 0; y < 31; ++y) {
      for (int x = 0; x < 31; ++x) {
        if (!mask.at(x, y)) continue;
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
      }
    }
    const auto box = mask_bbox(mask);
    if (x1 < 0) {
      EXPECT_EQ(box, (std::array<int, 4>{0, 0, 0, 0}));
    } else {
      EXPECT_EQ(box, (std::array<int, 4>{x0, y0, x1 - x0 + 1, y1 - y0 + 1}));
    }
  }
}

TEST(Stats, AveragesAndEmptyDataset) {
  DatasetManifest m;
  m.scene = "desk";
  m.categories = {"cup", "pen"};
  m.instance_counts = {{"cup", 4}, {"pen", 6}};
  json s = dataset_stats(m);
  EXPECT_EQ(s["average_per_category"].get<double>(), 5.0);
  EXPECT_EQ(s["total_instances"], 10);
  EXPECT_EQ(s["per_scene"]["desk"], 10);
  DatasetManifest empty;
  json e = dataset_stats(empty);
  EXPECT_EQ(e["average_per_category"].get<double>(), 0.0);
  EXPECT_EQ(e["total_instances"], 0);
  EXPECT_EQ(e["samples"], 0);
}

TEST(Config, LayersMergeAndResolveRelativePaths) {
  auto dir = testing::fresh_dir("config");
  fs::create_directories(dir / "override");
  std::ofstream(dir / "override" / "layer.json")
      << R"({"seed": 9, "scenes": {"desk": {"priors": "p.json"}}, "render": {"width": 64}})";
  json cfg = load_config({SCENESYNTH_DATA_DIR "/config.json", dir / "override" / "layer.json"});
  EXPECT_EQ(cfg["seed"], 9);
  EXPECT_EQ(cfg["render"]["width"], 64);
  EXPECT_EQ(cfg["render"]["height"], 256);
  EXPECT_EQ(fs::path(cfg["scenes"]["desk"]["priors"].get<std::string>()),
            dir / "override" / "p.json");
  EXPECT_TRUE(fs::path(cfg["assets"].get<std::string>()).is_absolute());
  EXPECT_TRUE(cfg["scenes"]["desk"].contains("camera"));
  EXPECT_THROW(load_config({dir / "absent.json"}), Error);
}

TEST(Pipeline, MissingPriorFileIsReported) {
  json cfg = small_config();
  cfg["scenes"]["shelf"]["priors"] = "/nonexistent/priors.json";
  try {
    open_workspace(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotFound);
    EXPECT_NE(std::string(e.what()).find("knowledge base not found"), std::string::npos);
  }
}

class GeneratedDataset : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = new fs::path(testing::fresh_dir("dataset"));
    Workspace ws = open_workspace(small_config());
    manifest_ = new DatasetManifest(cmd_generate(ws, 4, *root_));
  }
  static void TearDownTestSuite() {
    delete manifest_;
    delete root_;
  }
  static fs::path* root_;
  static DatasetManifest* manifest_;
};
fs::path* GeneratedDataset::root_ = nullptr;
DatasetManifest* GeneratedDataset::manifest_ = nullptr;

TEST_F(GeneratedDataset, ManifestIsCompleteAndValid) {
  const DatasetManifest& m = *manifest_;
  EXPECT_TRUE(m.complete);
  EXPECT_EQ(m.samples.size(), 4u);
  EXPECT_EQ(m.scene, "shelf");
  EXPECT_EQ(m.categories.size(), 30u);
  EXPECT_TRUE(validate_dataset(m, *root_).empty());
  EXPECT_EQ(recount_instances(m, *root_), m.instance_counts);
  DatasetManifest back = load_manifest(*root_ / "manifest.json");
  EXPECT_EQ(manifest_to_json(back), manifest_to_json(m));
  EXPECT_EQ(m.stats.tried,
            m.stats.accepted + m.stats.physics_rejections + m.stats.commonsense_rejections);
  EXPECT_EQ(m.config["render"]["width"], 96);
  std::ifstream lines(*root_ / "layouts.jsonl");
  std::string line;
  size_t n = 0;
  while (std::getline(lines, line)) ++n;
  EXPECT_EQ(n, 4u);
}

TEST_F(GeneratedDataset, CocoExportPreservesPixelCounts) {
  const DatasetManifest& m = *manifest_;
  json coco = export_coco(m, *root_);
  ASSERT_EQ(coco["images"].size(), 4u);
  int64_t total = 0;
  for (const auto& [c, n] : m.instance_counts) total += n;
  ASSERT_EQ(static_cast<int64_t>(coco["annotations"].size()), total);
  std::map<int64_t, Image8> covered;
  for (const json& a : coco["annotations"]) {
    const int64_t image = a["image_id"];
    const SampleEntry& s = m.samples[static_cast<size_t>(image - 1)];
    const Image16 seg = read_png16(*root_ / "samples" / (s.stem + ".seg.png"));
    Rle rle;
    rle.height = a["segmentation"]["size"][0];
    rle.width = a["segmentation"]["size"][1];
    rle.counts = a["segmentation"]["counts"].get<std::vector<uint32_t>>();
    const Image8 mask = rle_decode(rle);
    const uint16_t id = a["instance"];
    int64_t pixels = 0;
    for (size_t p = 0; p < seg.data.size(); ++p) {
      pixels += seg.data[p] == id;
      EXPECT_EQ(mask.data[p] != 0, seg.data[p] == id);
    }
    EXPECT_EQ(a["area"].get<int64_t>(), pixels);
    EXPECT_EQ((a["bbox"].get<std::array<int, 4>>()), mask_bbox(mask));
    auto [it, fresh] = covered.try_emplace(image, Image8(seg.width, seg.height, 1, 0));
    for (size_t p = 0; p < mask.data.size(); ++p) {
      if (mask.data[p]) {
        EXPECT_EQ(it->second.data[p], 0) << "masks overlap";
        it->second.data[p] = 1;
      }
    }
  }
}

TEST_F(GeneratedDataset, LossReportExamples) {
  const fs::path samples = *root_ / "samples";
  const std::string stem = manifest_->samples[0].stem;
  const fs::path scratch = testing::fresh_dir("loss_inputs");
  LossInputs in;
  in.sample_dir = samples;
  in.stem = stem;
  in.candidate = samples / (stem + ".rgb.png");
  json same = cmd_losses(in);
  EXPECT_EQ(same["components"]["pmse"].get<double>(), 0.0);
  EXPECT_EQ(same["components"]["rec"].get<double>(), 0.0);
  EXPECT_EQ(same["components"]["geo"].get<double>(), 0.0);

  Image8 rgb = read_png8(in.candidate);
  const int top = *std::max_element(rgb.data.begin(), rgb.data.end());
  const int shift = std::min(12, 255 - top);
  ASSERT_GT(shift, 0);
  for (auto& v : rgb.data) v = static_cast<uint8_t>(v + shift);
  const fs::path shifted = scratch / "shifted.png";
  write_png(shifted, rgb);
  in.candidate = shifted;
  json r = cmd_losses(in);
  const json& c = r["components"];
  EXPECT_NEAR(c["pmse"].get<double>(), 0.0, 1e-12);
  EXPECT_GT(c["rec"].get<double>(), 0.0);
  const json& w = r["weights"];
  const double recombined = w["gan"].get<double>() * c["gan"].get<double>() +
                            w["pmse"].get<double>() * c["pmse"].get<double>() +
                            w["rec"].get<double>() * c["rec"].get<double>() +
                            w["geo"].get<double>() * c["geo"].get<double>();
  EXPECT_NEAR(r["total"].get<double>(), recombined, 1e-12);

  in.include_rough = false;
  EXPECT_EQ(cmd_losses(in)["components"]["rec"].get<double>(), 0.0);
  in.real_scores = scratch / "real.csv";
  std::ofstream(*in.real_scores) << "1,1\n1,1\n";
  EXPECT_THROW(cmd_losses(in), Error);
  in.fake_scores = scratch / "fake.csv";
  std::ofstream(*in.fake_scores) << "0.5,0.5\n0.5,0.5\n";
  json g = cmd_losses(in);
  EXPECT_DOUBLE_EQ(g["components"]["gan"].get<double>(), 0.25);
  EXPECT_DOUBLE_EQ(g["gan_scores"]["g_loss"].get<double>(), 0.25);
}

TEST_F(GeneratedDataset, CorruptSegmentationIsDetected) {
  auto dir = testing::fresh_dir("corrupt");
  fs::copy(*root_, dir, fs::copy_options::recursive);
  const fs::path seg = dir / "samples" / (manifest_->samples[1].stem + ".seg.png");
  Image16 map = read_png16(seg);
  map.at(0, 0) = 999;
  write_png(seg, map);
  EXPECT_THROW(export_coco(*manifest_, dir), Error);
  EXPECT_FALSE(validate_dataset(*manifest_, dir).empty());
  fs::remove(dir / "samples" / (manifest_->samples[2].stem + ".depth.png"));
  auto problems = validate_dataset(*manifest_, dir);
  ASSERT_FALSE(problems.empty());
  EXPECT_NE(problems[0].find("missing file"), std::string::npos);
}

TEST_F(GeneratedDataset, BackgroundOnlySampleHasNoAnnotations) {
  auto dir = testing::fresh_dir("blank");
  fs::copy(*root_, dir, fs::copy_options::recursive);
  DatasetManifest m = *manifest_;
  const fs::path seg = dir / "samples" / (m.samples[0].stem + ".seg.png");
  Image16 map = read_png16(seg);
  std::fill(map.data.begin(), map.data.end(), 0);
  write_png(seg, map);
  json coco = export_coco(m, dir);
  for (const json& a : coco["annotations"]) EXPECT_NE(a["image_id"], 1);
  EXPECT_EQ(coco["images"].size(), 4u);
}

TEST_F(GeneratedDataset, RerunIsByteIdenticalAndClearsStaleSamples) {
  auto dir = testing::fresh_dir("rerun");
  fs::create_directories(dir / "samples");
  std::ofstream(dir / "samples" / "000099.rgb.png") << "stale";
  std::ofstream(dir / "samples" / "keep.txt") << "user file";
  Workspace ws = open_workspace(small_config());
  cmd_generate(ws, 4, dir);
  EXPECT_FALSE(fs::exists(dir / "samples" / "000099.rgb.png"));
  EXPECT_TRUE(fs::exists(dir / "samples" / "keep.txt"));
  fs::remove(dir / "samples" / "keep.txt");
  EXPECT_EQ(tree(dir), tree(*root_));
}

TEST_F(GeneratedDataset, ContactSheetTilesSamples) {
  Image8 sheet = contact_sheet(*manifest_, *root_, 3, 16);
  EXPECT_EQ(sheet.width, 3 * 96);
  EXPECT_EQ(sheet.height, 2 * 96);
}

TEST(Pipeline, BudgetExhaustionWritesPartialManifest) {
  json cfg = small_config();
  cfg["generation"]["attempts"] = 2;
  cfg["k_threshold"] = 0.0;
  Workspace ws = open_workspace(cfg);
  auto dir = testing::fresh_dir("budget");
  DatasetManifest m = cmd_generate(ws, 5, dir);
  EXPECT_FALSE(m.complete);
  EXPECT_TRUE(m.stats.budget_exhausted);
  EXPECT_LT(m.samples.size(), 5u);
  EXPECT_FALSE(load_manifest(dir / "manifest.json").complete);
}

TEST(Pipeline, ImportSummarisesAssets) {
  Workspace ws = open_workspace(small_config());
  json j = cmd_import(ws);
  EXPECT_EQ(j["priors"]["scene"], "shelf");
  EXPECT_EQ(j["priors"]["annotation_cost_s"].get<double>(), 10.0 * (30 + ws.kb.pairs().size()));
  EXPECT_EQ(ws.kb.categories().size(), 30u);
  EXPECT_EQ(ws.gen.min_objects, 3);
  EXPECT_EQ(ws.camera.width, 96);
}

TEST(Pipeline, TensorViewsNormalise) {
  Image8 a(1, 1, 3, 255);
  EXPECT_DOUBLE_EQ(tensor_from_image(a).values[0], 1.0);
  Image16 b(1, 1, 1, 0);
  EXPECT_DOUBLE_EQ(tensor_from_image(b).values[0], -1.0);
}

}  // namespace
}  // namespace scenesynth
