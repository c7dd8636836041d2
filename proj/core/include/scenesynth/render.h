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


#ifndef SCENESYNTH_RENDER_H_
#define SCENESYNTH_RENDER_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "scenesynth/image_io.h"
#include "scenesynth/layout.h"
#include "scenesynth/random.h"

namespace scenesynth {

// Pinhole camera, OpenCV axes: x right, y down, z forward. Pixel (i, j) has
// its centre at (i + 0.5, j + 0.5).
struct Camera {
  double fx = 256.0;
  double fy = 256.0;
  double cx = 128.0;
  double cy = 128.0;
  Quat rotation = Quat::Identity();  // world from camera
  Vec3 position = Vec3::Zero();      // camera centre in world
  int width = 256;
  int height = 256;
  double near = 0.05;
  double far = 20.0;

  void validate() const;
  Vec3 to_camera(const Vec3& world) const;
  Vec3 to_world(const Vec3& cam) const;
  // Camera-space direction (z = 1) through a sub-pixel position.
  Vec3 ray(double px, double py) const;
};

// Camera at `eye` looking at `target`, image up along world +Z.
Camera look_at(const Vec3& eye, const Vec3& target, double fov_y_deg,
               int width = 256, int height = 256);

// Viewpoint region: spherical shell around a look-at point.
struct CameraProfile {
  double radius_min = 1.0;
  double radius_max = 1.0;
  double elevation_min = 0.5;  // radians above the horizontal
  double elevation_max = 0.5;
  double azimuth_min = -1.5707963267948966;  // radians from world +X
  double azimuth_max = -1.5707963267948966;
  double target_jitter = 0.0;  // meters, per axis
  std::optional<Vec3> target;  // default: centre of the support surfaces
  double fov_y_deg = 50.0;
  int width = 256;
  int height = 256;
  double near = 0.05;
  double far = 20.0;

  void validate() const;
};

Camera sample_camera(const SceneBackground& scene, Rng& rng,
                     const CameraProfile& profile);

struct RenderOptions {
  Vec3 light_dir = Vec3(-0.3, -0.5, -1.0);  // world direction light travels
  double ambient = 0.35;
  Vec3 scene_albedo = Vec3(0.6, 0.6, 0.6);
  int tile = 32;
  int threads = 1;
};

struct RenderedSample {
  Camera camera;
  Image8 rgb;                // 3 channels
  Image16 instance;          // 0 = background, else placement index + 1
  Image<float> depth;        // camera z in meters, +inf on no hit
  Image<float> normal;       // 3 channels, camera space, zero on no hit
  Image<int32_t> primitive;  // owning triangle for any hit, -1 otherwise
  std::vector<uint8_t> primitive_flat;  // vertex normals equal face normal
  std::vector<std::string> instance_ids;  // instance k -> instance_ids[k - 1]
};

// Z-buffered rasterization. The scene mesh occludes and shades but only
// layout objects enter the instance, depth and normal maps.
RenderedSample rasterize(const Layout& layout, const Camera& camera,
                         const RenderOptions& options = {});

// Nearest hit along the ray through a pixel centre, by brute force.
struct PixelHit {
  uint16_t instance = 0;
  double depth = 0.0;         // camera z; +inf on miss
  double margin = 0.0;        // distance of the hit from a triangle edge
  bool scene = false;
};
PixelHit raycast_pixel(const Layout& layout, const Camera& camera, int x,
                       int y);

// File codecs. Depth is stored in millimetres (0 = no hit, clamped at
// 65535); normals as round(n * 127.5 + 127.5) with zero on background.
Image16 encode_depth(const Image<float>& depth);
Image<float> decode_depth(const Image16& depth);
Image8 encode_normal(const Image<float>& normal, const Image16& instance);
Image<float> decode_normal(const Image8& normal);

struct SampleFiles {
  std::filesystem::path rgb;
  std::filesystem::path seg;
  std::filesystem::path depth;
  std::filesystem::path normal;
  std::filesystem::path meta;
};
SampleFiles sample_files(const std::filesystem::path& dir,
                         const std::string& stem);

// Writes the four PNG maps and {stem}.json (camera, encodings, instances,
// plus `extra` merged in).
SampleFiles encode_sample(const RenderedSample& sample,
                          const std::filesystem::path& dir,
                          const std::string& stem,
                          const nlohmann::json& extra = nlohmann::json::object());

struct DecodedSample {
  Image8 rgb;
  Image16 instance;
  Image<float> depth;
  Image<float> normal;
  nlohmann::json meta;
};
DecodedSample decode_sample(const std::filesystem::path& dir,
                            const std::string& stem);

nlohmann::json camera_to_json(const Camera& camera);
Camera camera_from_json(const nlohmann::json& j);

// Angles (degrees) between rendered normals and normals reconstructed from
// central differences of depth, at pixels whose window x window
// neighbourhood is covered by a single flat triangle.
std::vector<double> depth_normal_deviation(const RenderedSample& sample,
                                           int window = 3);

// Instance-boundary pixels whose instance disagrees with an independent
// ray cast. Pixels whose ray passes within `edge_margin` of a triangle edge
// are skipped as ambiguous.
struct BleedResult {
  size_t boundary_pixels = 0;
  size_t checked = 0;
  size_t bleeding = 0;
};
BleedResult boundary_bleed(const RenderedSample& sample, const Layout& layout,
                           double edge_margin = 1e-9);

}  // namespace scenesynth

#endif  // SCENESYNTH_RENDER_H_
