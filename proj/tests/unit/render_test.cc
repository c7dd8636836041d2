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
#include <cmath>
#include <random>

#include "scenesynth/error.h"
#include "scenesynth/pipeline.h"
#include "scenesynth/render.h"
#include "test_support.h"

namespace scenesynth {
namespace {

using testing::place;

// Camera at the origin looking along world +Z.
Camera forward_camera(int size = 256) {
  Camera c;
  c.width = c.height = size;
  c.cx = c.cy = size / 2.0;
  c.fx = c.fy = size;
  return c;
}

Layout cube_ahead() {
  // Floor far below the camera's view; unit cube whose base face is at z = 2.
  auto scene = testing::floor_scene(1.0, -10.0);
  auto cube = testing::cube_model("cube", "box", 0.5);
  return Layout{scene, {place(cube, Vec3(0, 0, 2.0))}};
}

TEST(Render, CubeFaceDepthAndNormal) {
  Layout l = cube_ahead();
  RenderedSample s = rasterize(l, forward_camera());
  EXPECT_EQ(s.instance.at(128, 128), 1);
  EXPECT_NEAR(s.depth.at(128, 128), 2.0, 1e-4);
  EXPECT_NEAR(s.depth.at(127, 127), 2.0, 1e-4);
  EXPECT_NEAR(s.normal.at(128, 128, 0), 0.0, 1e-6);
  EXPECT_NEAR(s.normal.at(128, 128, 1), 0.0, 1e-6);
  EXPECT_NEAR(s.normal.at(128, 128, 2), -1.0, 1e-6);
  Image8 enc = encode_normal(s.normal, s.instance);
  EXPECT_EQ(enc.at(128, 128, 0), 128);
  EXPECT_EQ(enc.at(128, 128, 1), 128);
  EXPECT_EQ(enc.at(128, 128, 2), 0);
  // Face spans x, y in [-0.5, 0.5] at z = 2: pixels |u - 128| < 64.
  EXPECT_EQ(s.instance.at(128 + 63, 128), 1);
  EXPECT_EQ(s.instance.at(128 + 64, 128), 0);
  EXPECT_EQ(s.instance.at(128 - 64, 128), 1);
  EXPECT_EQ(s.instance.at(128 - 65, 128), 0);
  EXPECT_EQ(s.instance_ids, std::vector<std::string>{"cube"});
}

TEST(Render, GroundTruthInvariants) {
  Layout l = cube_ahead();
  Camera cam = look_at(Vec3(1.5, -1.2, 3.8), Vec3(0, 0, 2.5), 50);
  RenderedSample s = rasterize(l, cam);
  size_t hits = 0;
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      if (s.instance.at(x, y) == 0) {
        EXPECT_TRUE(std::isinf(s.depth.at(x, y)));
        continue;
      }
      ++hits;
      EXPECT_GE(s.depth.at(x, y), cam.near);
      EXPECT_LE(s.depth.at(x, y), cam.far);
      const Vec3 n(s.normal.at(x, y, 0), s.normal.at(x, y, 1), s.normal.at(x, y, 2));
      EXPECT_NEAR(n.norm(), 1.0, 1e-3);
    }
  }
  EXPECT_GT(hits, 1000u);
}

TEST(Render, EmptyLayoutIsAllBackground) {
  Layout l{testing::floor_scene(), {}};
  RenderedSample s = rasterize(l, look_at(Vec3(0, -2, 1), Vec3::Zero(), 50));
  for (uint16_t v : s.instance.data) EXPECT_EQ(v, 0);
  for (float d : s.depth.data) EXPECT_TRUE(std::isinf(d));
  // The floor itself still shades the rough image.
  EXPECT_TRUE(std::any_of(s.rgb.data.begin(), s.rgb.data.end(), [](uint8_t v) { return v > 0; }));
  RenderedSample none = rasterize(Layout{testing::floor_scene(), {}},
                                  look_at(Vec3(0, 0, 5), Vec3(0, 0, 10), 50));
  for (uint8_t v : none.rgb.data) EXPECT_EQ(v, 0);
}

// Far-to-near painting of depth-layered triangles, coverage decided at
// pixel centres in double precision.
TEST(Render, ZBufferAgreesWithPaintersOrder) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int size = 64;
  Camera cam = forward_camera(size);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 19;
    TriMesh mesh;
    std::vector<int> layer(n);
    for (int k = 0; k < n; ++k) layer[k] = k;
    std::shuffle(layer.begin(), layer.end(), rng);
    for (int k = 0; k < n; ++k) {
      const double z0 = 2.0 + 0.5 * layer[k];
      for (int v = 0; v < 3; ++v) {
        const double z = z0 + 0.3 * (u(rng) + 1) / 2;
        mesh.vertices.emplace_back(u(rng) * 0.6 * z, u(rng) * 0.6 * z, z);
      }
      mesh.faces.push_back({uint32_t(3 * k), uint32_t(3 * k + 1), uint32_t(3 * k + 2)});
    }
    compute_vertex_normals(mesh);
    auto scene = std::make_shared<const SceneBackground>(make_scene("tris", mesh, {}, 1.0));
    RenderedSample s = rasterize(Layout{scene, {}}, cam);

    std::vector<int> order(n);
    for (int k = 0; k < n; ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return layer[a] > layer[b]; });
    size_t compared = 0;
    for (int y = 0; y < size; ++y) {
      for (int x = 0; x < size; ++x) {
        int painted = -1;
        bool ambiguous = false;
        for (int k : order) {
          Vec2 p[3];
          for (int v = 0; v < 3; ++v) {
            const Vec3& w = mesh.vertices[3 * k + v];
            p[v] = Vec2(cam.fx * w.x() / w.z() + cam.cx, cam.fy * w.y() / w.z() + cam.cy);
          }
          const Vec2 c(x + 0.5, y + 0.5);
          double e[3];
          for (int v = 0; v < 3; ++v) {
            const Vec2& a = p[v];
            const Vec2& b = p[(v + 1) % 3];
            e[v] = ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x()) / (b - a).norm();
          }
          const bool in_pos = e[0] >= 0 && e[1] >= 0 && e[2] >= 0;
          const bool in_neg = e[0] <= 0 && e[1] <= 0 && e[2] <= 0;
          const double closest = std::min({std::abs(e[0]), std::abs(e[1]), std::abs(e[2])});
          if (closest < 1e-6) ambiguous = true;
          if (in_pos || in_neg) painted = k;
        }
        if (ambiguous) continue;
        ++compared;
        EXPECT_EQ(s.primitive.at(x, y), painted) << "trial " << trial << " px " << x << "," << y;
      }
    }
    EXPECT_GT(compared, size * size * 9u / 10u);
  }
}

TEST(Render, DeterministicAcrossThreadCounts) {
  auto ws = open_workspace(load_config({SCENESYNTH_DATA_DIR "/config.json"}));
  std::vector<GeneratedLayout> layouts;
  generate(ws.kb, ws.library, ws.scene, ws.gen, 2,
           [&](const GeneratedLayout& g) { layouts.push_back(g); });
  ASSERT_EQ(layouts.size(), 2u);
  Rng rng(4);
  for (const auto& g : layouts) {
    Camera cam = sample_camera(*ws.scene, rng, ws.camera);
    RenderOptions one = ws.render;
    one.threads = 1;
    RenderOptions many = ws.render;
    many.threads = 4;
    many.tile = 16;
    RenderedSample a = rasterize(g.layout, cam, one);
    RenderedSample b = rasterize(g.layout, cam, many);
    EXPECT_EQ(a.rgb, b.rgb);
    EXPECT_EQ(a.instance, b.instance);
    EXPECT_EQ(a.depth, b.depth);
    EXPECT_EQ(a.normal, b.normal);
    EXPECT_EQ(rasterize(g.layout, cam, one).rgb, a.rgb);
  }
}

TEST(Render, CrossBufferConsistencyOnShelfSamples) {
  auto ws = open_workspace(load_config({SCENESYNTH_DATA_DIR "/config.json"}));
  std::vector<GeneratedLayout> layouts;
  generate(ws.kb, ws.library, ws.scene, ws.gen, 4,
           [&](const GeneratedLayout& g) { layouts.push_back(g); });
  Rng rng(9);
  size_t planar = 0;
  for (const auto& g : layouts) {
    RenderedSample s = rasterize(g.layout, sample_camera(*ws.scene, rng, ws.camera), ws.render);
    for (double angle : depth_normal_deviation(s)) {
      EXPECT_LE(angle, 5.0);
      ++planar;
    }
    BleedResult bleed = boundary_bleed(s, g.layout);
    EXPECT_GT(bleed.boundary_pixels, 0u);
    EXPECT_GT(bleed.checked, bleed.boundary_pixels / 2);
    EXPECT_EQ(bleed.bleeding, 0u);
  }
  EXPECT_GT(planar, 100u);
}

TEST(Render, RaycastAgreesWithRasterAwayFromEdges) {
  Layout l = cube_ahead();
  Camera cam = look_at(Vec3(1.5, -1.2, 3.8), Vec3(0, 0, 2.5), 50, 64, 64);
  RenderedSample s = rasterize(l, cam);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      PixelHit h = raycast_pixel(l, cam, x, y);
      if (h.margin < 1e-6) continue;
      EXPECT_EQ(h.instance, s.instance.at(x, y));
      if (h.instance != 0) EXPECT_NEAR(h.depth, s.depth.at(x, y), 1e-4);
    }
  }
}

TEST(Render, DepthAndNormalCodecs) {
  Image<float> depth(4, 1, 1);
  depth.data = {2.0f, 0.0004f, 70.0f, std::numeric_limits<float>::infinity()};
  Image16 enc = encode_depth(depth);
  EXPECT_EQ(enc.data, (std::vector<uint16_t>{2000, 0, 65535, 0}));
  Image<float> back = decode_depth(enc);
  EXPECT_FLOAT_EQ(back.data[0], 2.0f);
  EXPECT_TRUE(std::isinf(back.data[3]));

  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  Image<float> normal(50, 1, 3);
  Image16 inst(50, 1, 1, 1);
  for (int x = 0; x < 50; ++x) {
    Vec3 n(g(rng), g(rng), g(rng));
    n.normalize();
    for (int c = 0; c < 3; ++c) normal.at(x, 0, c) = static_cast<float>(n[c]);
  }
  Image<float> dec = decode_normal(encode_normal(normal, inst));
  for (int x = 0; x < 50; ++x) {
    Vec3 a(normal.at(x, 0, 0), normal.at(x, 0, 1), normal.at(x, 0, 2));
    Vec3 b(dec.at(x, 0, 0), dec.at(x, 0, 1), dec.at(x, 0, 2));
    const double angle = std::acos(std::clamp(a.dot(b.normalized()), -1.0, 1.0)) * 180 / M_PI;
    EXPECT_LE(angle, 0.5);
  }
}

TEST(Render, SampleFilesRoundTrip) {
  Layout l = cube_ahead();
  Camera cam = look_at(Vec3(1.5, -1.2, 3.8), Vec3(0, 0, 2.5), 50);
  RenderedSample s = rasterize(l, cam);
  auto dir = testing::fresh_dir("sample");
  SampleFiles files = encode_sample(s, dir, "000007", {{"layout_index", 3}});
  EXPECT_TRUE(std::filesystem::exists(files.rgb));
  EXPECT_EQ(files.seg.filename(), "000007.seg.png");
  EXPECT_EQ(files.depth.filename(), "000007.depth.png");
  EXPECT_EQ(files.normal.filename(), "000007.normal.png");
  DecodedSample d = decode_sample(dir, "000007");
  EXPECT_EQ(d.rgb, s.rgb);
  EXPECT_EQ(d.instance, s.instance);
  EXPECT_EQ(d.meta["layout_index"], 3);
  for (size_t i = 0; i < s.depth.data.size(); ++i) {
    if (std::isinf(s.depth.data[i])) {
      EXPECT_TRUE(std::isinf(d.depth.data[i]));
    } else {
      EXPECT_NEAR(d.depth.data[i], s.depth.data[i], 0.5e-3 + 1e-6);
    }
  }
  Camera back = camera_from_json(d.meta["camera"]);
  EXPECT_EQ(camera_to_json(back), camera_to_json(cam));
}

TEST(Render, CameraSampling) {
  auto scene = testing::floor_scene();
  CameraProfile fixed;
  fixed.target = Vec3(0, 0, 0.2);
  Rng a(1), b(2);
  EXPECT_EQ(camera_to_json(sample_camera(*scene, a, fixed)),
            camera_to_json(sample_camera(*scene, b, fixed)));

  CameraProfile p;
  p.target = Vec3(0, 0, 0);  // inside the floor's bounds, so no clamping
  p.radius_min = 1.5;
  p.radius_max = 2.5;
  p.elevation_min = 0.2;
  p.elevation_max = 0.9;
  p.azimuth_min = -2.0;
  p.azimuth_max = -1.0;
  p.target_jitter = 0.05;
  Rng rng(5), again(5);
  for (int i = 0; i < 1000; ++i) {
    Camera c = sample_camera(*scene, rng, p);
    const Vec3 rel = c.position - *p.target;
    EXPECT_GE(rel.norm(), 1.5 - 1e-9);
    EXPECT_LE(rel.norm(), 2.5 + 1e-9);
    const double elev = std::asin(rel.z() / rel.norm());
    EXPECT_GE(elev, 0.2 - 1e-9);
    EXPECT_LE(elev, 0.9 + 1e-9);
    // The optical axis points at the (jittered) target.
    const Vec3 axis = c.rotation * Vec3::UnitZ();
    EXPECT_GT(axis.dot(-rel.normalized()), std::cos(0.1));
    EXPECT_EQ(camera_to_json(c), camera_to_json(sample_camera(*scene, again, p)));
  }
}

TEST(Render, InvalidCameraIsRejected) {
  Camera c;
  c.near = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c = Camera{};
  c.fx = -1;
  EXPECT_THROW(c.validate(), Error);
}

}  // namespace
}  // namespace scenesynth
