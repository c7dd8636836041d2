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

#include "oracles.h"
#include "scenesynth/physics.h"
#include "test_support.h"

namespace scenesynth {
namespace {

using testing::cube_model;
using testing::floor_scene;
using testing::place;

Layout on_floor(std::vector<Placement> ps, double half = 2.0) {
  return Layout{floor_scene(half), std::move(ps)};
}

std::shared_ptr<const ObjectModel> octahedron(double r) {
  TriMesh m;
  m.vertices = {Vec3(r, 0, 0), Vec3(-r, 0, 0), Vec3(0, r, 0),
                Vec3(0, -r, 0), Vec3(0, 0, r), Vec3(0, 0, -r)};
  m.faces = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
             {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  compute_vertex_normals(m);
  return std::make_shared<const ObjectModel>(make_object("oct", "oct", m));
}

TEST(Physics, DisjointCubesDoNotPenetrate) {
  auto cube = cube_model("c", "c");
  Layout l = on_floor({place(cube, Vec3(-1, 0, 0), Quat::Identity(), "a"),
                       place(cube, Vec3(1, 0, 0), Quat::Identity(), "b")});
  PenetrationResult r = penetration_check(l);
  EXPECT_LE(r.max_penetration, 1e-6);
  EXPECT_TRUE(r.pairs.empty());
}

TEST(Physics, OverlappingCubesPenetrateByOverlap) {
  auto cube = cube_model("c", "c");
  Layout l = on_floor({place(cube, Vec3(0, 0, 0), Quat::Identity(), "a"),
                       place(cube, Vec3(0.5, 0, 0), Quat::Identity(), "b")});
  PenetrationResult r = penetration_check(l);
  EXPECT_NEAR(r.max_penetration, 0.5, 1e-12);
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.pairs[0].a, "a");
  EXPECT_EQ(r.pairs[0].b, "b");
}

TEST(Physics, RestingCubeDoesNotPenetrateFloor) {
  Layout l = on_floor({place(cube_model("c", "c"), Vec3(0.2, 0.1, 0))});
  EXPECT_LE(penetration_check(l).max_penetration, 1e-6);
  Layout sunk = on_floor({place(cube_model("c", "c"), Vec3(0.2, 0.1, -0.05))});
  EXPECT_NEAR(penetration_check(sunk).max_penetration, 0.05, 1e-9);
}

TEST(Physics, SatDepthMatchesMinkowskiOracle) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_real_distribution<double> size(0.1, 0.6);
  for (int t = 0; t < 300; ++t) {
    auto a = testing::box_model("a", "a", Vec3(size(rng), size(rng), size(rng)));
    auto b = std::make_shared<const ObjectModel>(
        make_object("b", "b", make_cylinder(size(rng), size(rng), 9)));
    Quat qa(u(rng), u(rng), u(rng), u(rng));
    Quat qb(u(rng), u(rng), u(rng), u(rng));
    qa.normalize();
    qb.normalize();
    Placement pa = place(a, Vec3(u(rng), u(rng), u(rng)) * 0.5, qa);
    Placement pb = place(b, Vec3(u(rng), u(rng), u(rng)) * 0.5, qb);
    const double sat = std::max(0.0, penetration_depth(polytope_from_placement(pa),
                                                       polytope_from_placement(pb)));
    const double mink = oracle::minkowski_depth(pa.world_hull(), pb.world_hull());
    EXPECT_NEAR(sat, mink, 1e-9) << t;
  }
}

TEST(Physics, FloatingCubeDropsToFloor) {
  auto cube = cube_model("c", "c", 0.25);
  Layout l = on_floor({place(cube, Vec3(0.1, 0.2, 0.3))});
  SettleResult s = settle(l, 8);
  EXPECT_TRUE(s.report.settled);
  EXPECT_NEAR(s.layout.placements[0].location.z(), 0.0, 1e-9);
  EXPECT_NEAR(s.layout.placements[0].world_center_of_mass().z(), 0.25, 1e-9);
  EXPECT_EQ(s.layout.placements[0].location.x(), 0.1);
}

TEST(Physics, CubesStack) {
  auto small = cube_model("s", "s", 0.1);
  auto big = cube_model("b", "b", 0.2);
  // Listed top first; settling orders by height.
  Layout l = on_floor({place(small, Vec3(0.05, 0, 1.0), Quat::Identity(), "top"),
                       place(big, Vec3(0, 0, 0.3), Quat::Identity(), "bottom")});
  SettleResult s = settle(l, 8);
  ASSERT_TRUE(s.report.settled);
  EXPECT_NEAR(s.layout.placements[1].location.z(), 0.0, 1e-9);
  EXPECT_NEAR(s.layout.placements[0].location.z(), 0.4, 1e-4);
  PhysicsVerdict v = physics_accept(l);
  EXPECT_TRUE(v.accepted);
}

TEST(Physics, RestingCubeIsAFixedPoint) {
  Layout l = on_floor({place(cube_model("c", "c"), Vec3(0.3, -0.2, 0))});
  SettleResult s = settle(l, 8);
  EXPECT_EQ(s.layout.placements[0].location, l.placements[0].location);
}

TEST(Physics, NothingBelowIsUnsupported) {
  Layout l = on_floor({place(cube_model("c", "c", 0.1), Vec3(5, 0, 1))});
  SettleResult s = settle(l, 8);
  EXPECT_FALSE(s.report.settled);
  ASSERT_EQ(s.report.unsupported.size(), 1u);
  PhysicsVerdict v = physics_accept(l);
  EXPECT_FALSE(v.accepted);
}

TEST(Physics, SupportPolygonStability) {
  auto table = floor_scene(0.5, 0.75);
  auto cube = cube_model("c", "c", 0.1);
  Layout full{table, {place(cube, Vec3(0, 0, 0.75))}};
  EXPECT_TRUE(stability_check(full).stable[0]);
  // 60% of the 0.2 m base beyond the x = 0.5 edge.
  Layout over{table, {place(cube, Vec3(0.52, 0, 0.75))}};
  EXPECT_FALSE(stability_check(over).stable[0]);
  PhysicsVerdict v = physics_accept(over);
  EXPECT_FALSE(v.accepted);
  ASSERT_EQ(v.report.unsupported.size(), 1u);
  EXPECT_EQ(v.report.unsupported[0], "c");
  // 40% beyond the edge keeps the centre of mass over the table.
  Layout ok{table, {place(cube, Vec3(0.48, 0, 0.75))}};
  EXPECT_TRUE(stability_check(ok).stable[0]);
  EXPECT_TRUE(oracle::audit_support(ok, 1e-3).empty());
  EXPECT_EQ(oracle::audit_support(over, 1e-3).size(), 1u);
}

TEST(Physics, PointContactUnderCentreIsStable) {
  auto oct = octahedron(0.1);
  Layout l = on_floor({place(oct, Vec3(0, 0, 0))});
  EXPECT_TRUE(stability_check(l).stable[0]);
  EXPECT_TRUE(physics_accept(l).accepted);
}

TEST(Physics, InterpenetratingPairIsRejected) {
  auto cube = cube_model("c", "c", 0.1);
  Layout l = on_floor({place(cube, Vec3(0, 0, 0), Quat::Identity(), "a"),
                       place(cube, Vec3(0.1, 0, 0), Quat::Identity(), "b")});
  PhysicsVerdict v = physics_accept(l);
  EXPECT_FALSE(v.accepted);
  ASSERT_EQ(v.report.offending.size(), 1u);
  EXPECT_NEAR(v.report.offending[0].depth, 0.1, 1e-9);
  auto j = contact_report_to_json(v.report);
  EXPECT_EQ(j["offending"].size(), 1u);
}

TEST(Physics, ValidArrangementOnShelfIsAccepted) {
  AssetLibrary lib = load_asset_index(SCENESYNTH_DATA_DIR "/assets.json");
  auto shelf = lib.scene("shelf");
  const SupportSurface& board = shelf->surfaces[0];
  auto models = lib.models_of(lib.categories().front());
  Layout l{shelf, {place(models.front(), board.centroid() + Vec3(0, 0, 0.01))}};
  PhysicsVerdict v = physics_accept(l);
  EXPECT_TRUE(v.accepted) << contact_report_to_json(v.report).dump();
  EXPECT_NEAR(v.layout.placements[0].location.z(), board.centroid().z(), 1e-9);
}

TEST(Physics, SettleIsIdempotentMonotoneAndDeterministic) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  std::uniform_real_distribution<double> h(0.0, 1.0);
  std::uniform_real_distribution<double> s(0.05, 0.2);
  for (int t = 0; t < 40; ++t) {
    std::vector<Placement> ps;
    for (int k = 0; k < 6; ++k) {
      auto m = testing::box_model("m" + std::to_string(k), "m", Vec3(s(rng), s(rng), s(rng)));
      ps.push_back(place(m, Vec3(u(rng), u(rng), h(rng)), testing::yaw(u(rng) * 3)));
    }
    Layout l = on_floor(ps);
    SettleResult once = settle(l, 16);
    SettleResult twice = settle(once.layout, 16);
    SettleResult again = settle(l, 16);
    for (size_t i = 0; i < ps.size(); ++i) {
      EXPECT_LE((twice.layout.placements[i].location - once.layout.placements[i].location).norm(),
                1e-6);
      EXPECT_LE(once.layout.placements[i].location.z(), l.placements[i].location.z());
      EXPECT_EQ(once.layout.placements[i].location, again.layout.placements[i].location);
    }
    PhysicsVerdict v = physics_accept(l);
    if (v.accepted) {
      EXPECT_LE(oracle::audit_penetration(v.layout).max_depth, 1e-3);
      EXPECT_TRUE(oracle::audit_support(v.layout, 1e-3).empty());
    }
  }
}

}  // namespace
}  // namespace scenesynth
