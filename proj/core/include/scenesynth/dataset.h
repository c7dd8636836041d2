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


#ifndef SCENESYNTH_DATASET_H_
#define SCENESYNTH_DATASET_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "scenesynth/image_io.h"
#include "scenesynth/layoutgen.h"

namespace scenesynth {

inline constexpr int kManifestVersion = 1;

struct SampleEntry {
  std::string stem;         // files live at samples/{stem}.*
  uint64_t layout_index = 0;  // candidate sequence number
  uint64_t seed = 0;
  nlohmann::json camera;
};

struct DatasetManifest {
  int version = kManifestVersion;
  std::string scene;
  std::vector<SampleEntry> samples;
  std::vector<std::string> categories;  // category id k <-> categories[k - 1]
  std::map<std::string, int64_t> instance_counts;  // visible instances
  GenStats stats;
  nlohmann::json config;  // effective configuration
  bool complete = true;

  int category_id(const std::string& name) const;  // 0 when absent
};

nlohmann::json manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const nlohmann::json& j);
DatasetManifest load_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& m);

// Column-major uncompressed run lengths, starting with a run of zeros.
struct Rle {
  int height = 0;
  int width = 0;
  std::vector<uint32_t> counts;
};
Rle rle_encode(const Image8& mask);  // nonzero = foreground
Image8 rle_decode(const Rle& rle);   // 0 / 1
int64_t rle_area(const Rle& rle);

// [x, y, w, h] of the nonzero pixels; zeros when the mask is empty.
std::array<int, 4> mask_bbox(const Image8& mask);

// Per-sample mapping from instance id to category, read from the sample
// metadata next to its maps.
std::map<uint16_t, std::string> sample_categories(const nlohmann::json& meta);

// Visible instances per category, counted from the segmentation maps.
std::map<std::string, int64_t> recount_instances(const DatasetManifest& m,
                                                 const std::filesystem::path& root);

// Referential integrity and count consistency; empty when valid.
std::vector<std::string> validate_dataset(const DatasetManifest& m,
                                          const std::filesystem::path& root);

nlohmann::json export_coco(const DatasetManifest& m,
                           const std::filesystem::path& root);

nlohmann::json dataset_stats(const DatasetManifest& m);

// Grid of rgb thumbnails, `columns` wide, at most `limit` samples.
Image8 contact_sheet(const DatasetManifest& m, const std::filesystem::path& root,
                     int columns = 4, int limit = 16);

}  // namespace scenesynth

#endif  // SCENESYNTH_DATASET_H_
