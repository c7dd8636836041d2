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

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "scenesynth/assets.h"
#include "scenesynth/error.h"
#include "scenesynth/geometry.h"
#include "scenesynth/hull.h"
#include "scenesynth/image_io.h"
#include "scenesynth/mesh.h"
#include "test_support.h"

namespace scenesynth {
namespace {

using testing::fresh_dir;
using testing::translated;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

const char* kUnitCubeObj =
    "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
    "v 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\n"
    "f 1 3 2\nf 1 4 3\nf 5 6 7\nf 5 7 8\n"
    "f 1 2 6\nf 1 6 5\nf 2 3 7\nf 2 7 6\n"
    "f 3 4 8\nf 3 8 7\nf 4 1 5\nf 4 5 8\n";

TEST(Assets, UnitCubeFileHasUnitExtents) {
  auto dir = fresh_dir("cube");
  write_text(dir / "cube.obj", kUnitCubeObj);
  ObjectModel m = load_object(dir / "cube.obj", "box");
  EXPECT_EQ(m.category, "box");
  EXPECT_EQ(m.id, "cube");
  EXPECT_TRUE(m.aabb.extents().isApprox(Vec3(1, 1, 1)));
  EXPECT_EQ(m.hull.points.size(), 8u);
  EXPECT_NEAR(m.hull.volume(), 1.0, 1e-12);
  EXPECT_NEAR(m.mass.mass, kDefaultDensity, 1e-9);
  ASSERT_EQ(m.mesh.normals.size(), m.mesh.vertices.size());
  for (const Vec3& n : m.mesh.normals) EXPECT_NEAR(n.norm(), 1.0, 1e-6);
}

TEST(Assets, TetrahedronIsItsOwnHull) {
  TriMesh mesh;
  mesh.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  mesh.faces = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  compute_vertex_normals(mesh);
  ObjectModel m = make_object("tet", "tet", mesh);
  EXPECT_EQ(m.hull.points.size(), 4u);
  EXPECT_EQ(m.hull.facets.size(), 4u);
}

TEST(Assets, FaceIndexOutOfRangeIsRejected) {
  auto dir = fresh_dir("badindex");
  std::string text;
  for (int i = 0; i < 10; ++i) text += "v " + std::to_string(i) + " 0 " + std::to_string(i % 3) + "\n";
  text += "f 1 2 12\n";
  write_text(dir / "bad.obj", text);
  try {
    load_object(dir / "bad.obj", "x");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("index out of range"), std::string::npos);
  }
}

TEST(Assets, ZeroFacesAndNonFiniteAreRejected) {
  auto dir = fresh_dir("degenerate");
  write_text(dir / "empty.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\n");
  EXPECT_THROW(load_object(dir / "empty.obj", "x"), Error);
  write_text(dir / "nan.obj", "v 0 0 nan\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
  EXPECT_THROW(load_object(dir / "nan.obj", "x"), Error);
  write_text(dir / "junk.obj", "v 0 zero 0\n");
  EXPECT_THROW(load_object(dir / "junk.obj", "x"), Error);
}

TEST(Assets, FloorWithOneSurface) {
  auto scene = testing::floor_scene();
  ASSERT_EQ(scene->surfaces.size(), 1u);
  EXPECT_TRUE(scene->surfaces[0].normal.isApprox(kUp));
  EXPECT_NE(scene->surface_at(Vec3(0.3, 0.2, 0.0)), nullptr);
  EXPECT_EQ(scene->surface_at(Vec3(0.3, 0.2, 0.5)), nullptr);
}

TEST(Assets, ShelfWithFourBoards) {
  TriMesh mesh;
  std::vector<SurfaceSpec> specs;
  for (int b = 0; b < 4; ++b) {
    const double top = 0.4 * b + 0.02;
    TriMesh board = translated(make_box(Vec3(0.5, 0.2, 0.01)), Vec3(0, 0, top - 0.01));
    const uint32_t base = static_cast<uint32_t>(mesh.vertices.size());
    for (size_t i = 0; i < board.vertices.size(); ++i) {
      mesh.vertices.push_back(board.vertices[i]);
      mesh.normals.push_back(board.normals[i]);
    }
    for (Face f : board.faces) mesh.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
    specs.push_back({"board_" + std::to_string(b),
                     {Vec3(-0.5, -0.2, top), Vec3(0.5, -0.2, top),
                      Vec3(0.5, 0.2, top), Vec3(-0.5, 0.2, top)},
                     std::nullopt});
  }
  SceneBackground scene = make_scene("shelf", mesh, specs, 1.0);
  EXPECT_EQ(scene.surfaces.size(), 4u);
}

TEST(Assets, DownwardSurfaceIsRejected) {
  TriMesh slab = make_box(Vec3(1, 1, 0.01));
  SurfaceSpec down{"under",
                   {Vec3(-1, 1, -0.01), Vec3(1, 1, -0.01), Vec3(1, -1, -0.01),
                    Vec3(-1, -1, -0.01)},
                   std::nullopt};
  try {
    make_scene("s", slab, {down}, 1.0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("support normal opposes gravity"),
              std::string::npos);
  }
}

TEST(Assets, NonPlanarAndOffMeshSurfacesAreRejected) {
  TriMesh slab = make_box(Vec3(1, 1, 0.01));
  SurfaceSpec warped{"w",
                     {Vec3(-1, -1, 0.01), Vec3(1, -1, 0.01), Vec3(1, 1, 0.02),
                      Vec3(-1, 1, 0.01)},
                     std::nullopt};
  EXPECT_THROW(make_scene("s", slab, {warped}, 1.0), Error);
  SurfaceSpec floating{"f",
                       {Vec3(-1, -1, 0.5), Vec3(1, -1, 0.5), Vec3(1, 1, 0.5),
                        Vec3(-1, 1, 0.5)},
                       std::nullopt};
  EXPECT_THROW(make_scene("s", slab, {floating}, 1.0), Error);
}

TEST(Hull, InteriorPointIsExcluded) {
  std::vector<Vec3> pts;
  for (int i = 0; i < 8; ++i) pts.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  pts.emplace_back(0.5, 0.5, 0.5);
  ConvexHull h = compute_hull(pts);
  EXPECT_FALSE(h.planar);
  EXPECT_EQ(h.points.size(), 8u);
  for (const Vec3& p : h.points) EXPECT_FALSE(p.isApprox(Vec3(0.5, 0.5, 0.5)));
}

TEST(Hull, RandomCloudIsContained) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 50; ++i) pts.emplace_back(g(rng), g(rng), g(rng));
    ConvexHull h = compute_hull(pts);
    for (const Vec3& p : pts) EXPECT_LE(h.signed_distance(p), 1e-9);
    // Every hull vertex is one of the inputs.
    for (const Vec3& q : h.points) {
      bool found = false;
      for (const Vec3& p : pts) found = found || p == q;
      EXPECT_TRUE(found);
    }
    // Oracle: a point is a hull vertex iff some facet plane through it exists;
    // checked indirectly via containment of every input in every facet.
    for (size_t f = 0; f < h.facets.size(); ++f) {
      for (const Vec3& p : pts) {
        EXPECT_LE(h.facet_normals[f].dot(p) - h.facet_offsets[f], 1e-9);
      }
    }
  }
}

TEST(Hull, CoplanarInputIsFlagged) {
  std::vector<Vec3> pts = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)};
  ConvexHull h = compute_hull(pts);
  EXPECT_TRUE(h.planar);
  EXPECT_EQ(h.points.size(), 4u);
  EXPECT_THROW(compute_hull(std::vector<Vec3>{Vec3(0, 0, 0), Vec3(1, 1, 1)}), Error);
}

TEST(Assets, LibraryModelsSatisfyInvariants) {
  AssetLibrary lib = load_asset_index(SCENESYNTH_DATA_DIR "/assets.json");
  ASSERT_FALSE(lib.objects.empty());
  for (const auto& [id, m] : lib.objects) {
    Aabb box;
    for (const Vec3& v : m->mesh.vertices) {
      EXPECT_LE(m->hull.signed_distance(v), 1e-6) << id;
      box.extend(v);
    }
    EXPECT_EQ(box.min, m->aabb.min) << id;
    EXPECT_EQ(box.max, m->aabb.max) << id;
  }
  EXPECT_EQ(lib.scenes.size(), 3u);
}

TEST(Mesh, ObjRoundTripIsBitExact) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TriMesh mesh = make_cylinder(0.1, 0.2, 17);
  for (Vec3& v : mesh.vertices) v += Vec3(u(rng), u(rng), u(rng)) * 1e-3;
  mesh.uvs.assign(mesh.vertices.size(), Vec2(0.25, 1.0 / 3.0));
  std::stringstream text;
  write_obj(text, mesh);
  TriMesh back = parse_obj(text, ".");
  EXPECT_EQ(back.vertices, mesh.vertices);
  EXPECT_EQ(back.faces, mesh.faces);
  EXPECT_EQ(back.normals, mesh.normals);
  EXPECT_EQ(back.uvs, mesh.uvs);
}

TEST(Mesh, QuadsAreFanTriangulatedAndNormalsComputed) {
  std::stringstream text("v 0 0 0\nv 2 0 0\nv 2 1 0\nv 0 1 0\nf 1 2 3 4\n");
  TriMesh mesh = parse_obj(text, ".");
  ASSERT_EQ(mesh.faces.size(), 2u);
  for (const Vec3& n : mesh.normals) EXPECT_TRUE(n.isApprox(kUp));
}

TEST(Geometry, Polygon2dHelpers) {
  std::vector<Vec2> pts = {Vec2(0, 0), Vec2(2, 0), Vec2(2, 2), Vec2(0, 2), Vec2(1, 1),
                           Vec2(1, 0)};
  auto hull = convex_hull_2d(pts);
  ASSERT_EQ(hull.size(), 4u);
  EXPECT_NEAR(signed_distance_to_convex_polygon(Vec2(1, 1), hull), -1.0, 1e-12);
  EXPECT_NEAR(signed_distance_to_convex_polygon(Vec2(3, 1), hull), 1.0, 1e-12);
  EXPECT_NEAR(signed_distance_to_convex_polygon(Vec2(3, 3), hull), std::sqrt(2.0), 1e-12);
  std::vector<Vec2> other = {Vec2(1, 1), Vec2(3, 1), Vec2(3, 3), Vec2(1, 3)};
  auto inter = intersect_convex_polygons(hull, other, 1e-12);
  ASSERT_EQ(inter.size(), 4u);
  double area = 0;
  for (size_t i = 0; i < inter.size(); ++i) {
    const Vec2& a = inter[i];
    const Vec2& b = inter[(i + 1) % inter.size()];
    area += a.x() * b.y() - a.y() * b.x();
  }
  EXPECT_NEAR(area / 2, 1.0, 1e-12);
  std::vector<Vec2> seg = {Vec2(-1, 1), Vec2(3, 1)};
  auto cut = intersect_convex_polygons(hull, seg, 1e-12);
  ASSERT_EQ(cut.size(), 2u);
}

TEST(Geometry, RayTriangleAndClosestPoint) {
  double margin = 0;
  double t = intersect_ray_triangle(Vec3(0.2, 0.2, 5), Vec3(0, 0, -1), Vec3(0, 0, 0),
                                    Vec3(1, 0, 0), Vec3(0, 1, 0), &margin);
  EXPECT_NEAR(t, 5.0, 1e-12);
  EXPECT_NEAR(margin, 0.2, 1e-12);
  EXPECT_LT(intersect_ray_triangle(Vec3(2, 2, 5), Vec3(0, 0, -1), Vec3(0, 0, 0),
                                   Vec3(1, 0, 0), Vec3(0, 1, 0)),
            0.0);
  Vec3 c = closest_point_on_triangle(Vec3(2, 2, 1), Vec3(0, 0, 0), Vec3(1, 0, 0),
                                     Vec3(0, 1, 0));
  EXPECT_TRUE(c.isApprox(Vec3(0.5, 0.5, 0)));
}

TEST(ImageIo, PngRoundTrips) {
  auto dir = fresh_dir("png");
  Image8 rgb(5, 3, 3);
  Image16 depth(5, 3, 1);
  for (size_t i = 0; i < rgb.data.size(); ++i) rgb.data[i] = static_cast<uint8_t>(i * 17);
  for (size_t i = 0; i < depth.data.size(); ++i) depth.data[i] = static_cast<uint16_t>(i * 4099);
  write_png(dir / "a.png", rgb);
  write_png(dir / "b.png", depth);
  EXPECT_EQ(read_png8(dir / "a.png"), rgb);
  EXPECT_EQ(read_png16(dir / "b.png"), depth);
  EXPECT_THROW(read_png8(dir / "missing.png"), Error);
}

}  // namespace
}  // namespace scenesynth
