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


#ifndef SCENESYNTH_PIPELINE_H_
#define SCENESYNTH_PIPELINE_H_

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "scenesynth/assets.h"
#include "scenesynth/dataset.h"
#include "scenesynth/geoloss.h"
#include "scenesynth/knowledge.h"
#include "scenesynth/layoutgen.h"
#include "scenesynth/render.h"
#include "scenesynth/sensitivity.h"

namespace scenesynth {

// Configuration document (JSON):
//   {"assets": path, "scene": name, "count", "seed", "threads",
//    "k_threshold": number | "calibrate",
//    "generation": {"min_objects", "max_objects", "categories", "attempts",
//                   "calibration_percentile", "pilot_size", "drop_clearance"},
//    "physics": {...}, "render": {"width", "height", "ambient"},
//    "weights": {"gan", "pmse", "rec", "geo"},
//    "sensitivity": {"annotators", "noise", "layouts_per_base",
//                    "floor_batches", "bootstrap_rounds"},
//    "scenes": {"<name>": {"priors": path, "camera": {...},
//                          "generation": {...}}}}
// Layers are merged in order (RFC 7386 merge patch); relative paths resolve
// against the file that names them.
nlohmann::json default_config();
nlohmann::json load_config(const std::vector<std::filesystem::path>& layers);

// Everything one scene profile needs, loaded and validated.
struct Workspace {
  nlohmann::json config;  // effective
  std::string scene_name;
  AssetLibrary library;
  std::shared_ptr<const SceneBackground> scene;
  KnowledgeBase kb;
  GenConfig gen;
  CameraProfile camera;
  RenderOptions render;
  LossWeights weights;
};
Workspace open_workspace(const nlohmann::json& config);

CameraProfile camera_profile_from_json(const nlohmann::json& j);
GenConfig gen_config_from_json(const nlohmann::json& config,
                               const KnowledgeBase& kb);

// Asset and prior summary.
nlohmann::json cmd_import(const Workspace& ws);

// Generate, render and encode `count` samples under `out`:
// manifest.json, layouts.jsonl and samples/{stem}.*. The manifest is
// written even when the budget runs out (complete = false).
DatasetManifest cmd_generate(const Workspace& ws, size_t count,
                             const std::filesystem::path& out,
                             std::ostream* log = nullptr);

struct LossInputs {
  std::filesystem::path sample_dir;
  std::string stem;
  std::filesystem::path candidate;  // generated image (PNG, RGB)
  std::optional<std::filesystem::path> pred_seg;
  std::optional<std::filesystem::path> pred_normal;
  std::optional<std::filesystem::path> pred_depth;
  std::optional<std::filesystem::path> real_scores;  // CSV score maps
  std::optional<std::filesystem::path> fake_scores;
  bool include_rough = true;  // rough image joins the reconstruction tuple
  LossWeights weights;
};
nlohmann::json cmd_losses(const LossInputs& in);

// Tensor views of stored maps: 8-bit v / 127.5 - 1, 16-bit v / 32767.5 - 1.
ImageTensor tensor_from_image(const Image8& image);
ImageTensor tensor_from_image(const Image16& image);
ImageTensor read_score_csv(const std::filesystem::path& path);

// Writes report.json and divergence.csv under `out`.
SensitivityReport cmd_sensitivity(const Workspace& ws, int annotators,
                                  double noise, const std::filesystem::path& out,
                                  std::ostream* log = nullptr);

}  // namespace scenesynth

#endif  // SCENESYNTH_PIPELINE_H_
