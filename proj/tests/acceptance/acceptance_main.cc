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


// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
// and exits non-zero if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include "oracles.h"
#include "scenesynth/arch.h"
#include "scenesynth/geoloss.h"
#include "scenesynth/layoutgen.h"
#include "scenesynth/physics.h"
#include "scenesynth/pipeline.h"
#include "scenesynth/reasoning.h"
#include "scenesynth/render.h"
#include "scenesynth/sensitivity.h"
#include "test_support.h"

namespace fs = std::filesystem;
using namespace scenesynth;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Workspace shelf_workspace(const std::string& scene = "shelf") {
  nlohmann::json cfg = load_config({SCENESYNTH_DATA_DIR "/config.json"});
  cfg["scene"] = scene;
  return open_workspace(cfg);
}

// --- 1 ---------------------------------------------------------------------

Outcome likelihood_oracle() {
  const Workspace ws = shelf_workspace();
  GenConfig cfg = ws.gen;
  cfg.min_objects = 1;
  cfg.max_objects = 10;
  Rng rng = make_stream(2024, 0);
  std::vector<Layout> layouts;
  for (int i = 0; i < 100; ++i) {
    layouts.push_back(sample_candidate(ws.kb, ws.library, ws.scene, cfg, rng));
  }
  const ReasoningConfig& rc = ws.kb.config();
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (const Layout& l : layouts) {
    const double got = layout_likelihood(l, ws.kb, rc).log_k;
    const double want = oracle::log_likelihood(l, ws.kb, rc.sigma, rc.gamma);
    worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want)));
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-9 && t < 5.0,
          fmt("100 layouts, max rel err %.3g, %.3f s", worst, t)};
}

// --- 2 ---------------------------------------------------------------------

Outcome relation_branches() {
  auto scene = testing::floor_scene();
  auto cat = [](const std::string& n) {
    CategoryPrior c;
    c.name = n;
    c.keyposes = {{Quat::Identity(), 1.0}};
    return c;
  };
  ReasoningConfig rc;
  const bool constants = rc.sigma == 0.1 && rc.gamma == 0.5;
  KnowledgeBase kb({cat("a"), cat("b"), cat("c")},
                   {{"a", "b", 0.5, 0.3}, {"a", "c", 0.9, 0.3}}, rc, 0.3, 0.3);
  auto a = testing::cube_model("a", "a", 0.05);
  auto b = testing::cube_model("b", "b", 0.05);
  auto c = testing::cube_model("c", "c", 0.05);
  const Placement pa = testing::place(a, Vec3(0, 0, 0));
  bool ok = constants;
  double worst_low = 0.0;
  for (double d : {0.0, 0.1, 0.3, 0.77, 2.5}) {
    const double k = pair_relation_likelihood(pa, testing::place(b, Vec3(d, 0, 0)), kb, rc);
    worst_low = std::max(worst_low, std::abs(k - 1.0));
    ok = ok && k == 1.0;
  }
  const double at = pair_relation_likelihood(pa, testing::place(c, Vec3(0.3, 0, 0)), kb, rc);
  const double off = pair_relation_likelihood(pa, testing::place(c, Vec3(0.4, 0, 0)), kb, rc);
  const double err = std::abs(off - std::exp(-0.5));
  ok = ok && at == 1.0 && err <= 1e-12;
  return {ok, fmt("occ<=0.5 dev %.3g, zero offset K_r=%.17g, offset sigma err %.3g", worst_low,
                  at, err)};
}

// --- 3 ---------------------------------------------------------------------

Outcome physics_gate() {
  const auto t0 = Clock::now();
  size_t audited = 0;
  size_t unsupported = 0;
  double worst_ratio = 0.0;
  double worst_move = 0.0;
  const std::vector<std::pair<std::string, size_t>> plan = {
      {"shelf", 400}, {"desk", 300}, {"tote", 300}};
  for (const auto& [name, n] : plan) {
    const Workspace ws = shelf_workspace(name);
    GenConfig cfg = ws.gen;
    ReasoningConfig rc = ws.kb.config();
    rc.k_threshold = -1e300;  // physics gate only
    cfg.reasoning = rc;
    cfg.seed = 77;
    const double scale = ws.scene->scene_scale;
    generate(ws.kb, ws.library, ws.scene, cfg, n, [&](const GeneratedLayout& g) {
      ++audited;
      worst_ratio = std::max(worst_ratio,
                             oracle::audit_penetration(g.layout).max_depth / (1e-3 * scale));
      unsupported += oracle::audit_support(g.layout, cfg.physics.stability_margin).size();
      const SettleResult again = settle(g.layout, cfg.physics.max_iters, cfg.physics);
      for (size_t i = 0; i < again.layout.placements.size(); ++i) {
        worst_move = std::max(worst_move, (again.layout.placements[i].location -
                                           g.layout.placements[i].location)
                                              .norm());
      }
    });
  }
  const double t = seconds_since(t0);
  const bool ok = audited == 1000 && worst_ratio <= 1.0 && unsupported == 0 &&
                  worst_move <= 1e-6 && t < 120.0;
  return {ok, fmt("%zu layouts, max penetration %.3g x tol, %zu unsupported, "
                  "resettle %.3g m, %.1f s",
                  audited, worst_ratio, unsupported, worst_move, t)};
}

// --- 4 ---------------------------------------------------------------------

Outcome render_consistency() {
  // Analytic cube: unit cube face at z = 2 in front of an axis-aligned camera.
  Camera fwd;
  fwd.width = fwd.height = 256;
  fwd.cx = fwd.cy = 128.0;
  fwd.fx = fwd.fy = 256.0;
  auto far_floor = testing::floor_scene(1.0, -10.0);
  Layout cube{far_floor, {testing::place(testing::cube_model("cube", "box", 0.5), Vec3(0, 0, 2))}};
  const RenderedSample cs = rasterize(cube, fwd);
  double cube_err = 0.0;
  for (int y = 0; y < 256; ++y) {
    for (int x = 0; x < 256; ++x) {
      if (cs.instance.at(x, y)) cube_err = std::max(cube_err, std::abs(cs.depth.at(x, y) - 2.0));
    }
  }

  double worst_angle = 0.0;
  size_t planar = 0;
  size_t bleed = 0;
  size_t boundary = 0;
  int samples = 0;
  for (const std::string name : {"shelf", "desk", "tote"}) {
    const Workspace ws = shelf_workspace(name);
    const size_t n = name == "shelf" ? 18 : 16;
    GenConfig cfg = ws.gen;
    cfg.seed = 31;
    Rng cams = make_stream(31, 5);
    generate(ws.kb, ws.library, ws.scene, cfg, n, [&](const GeneratedLayout& g) {
      CameraProfile prof = ws.camera;
      prof.width = prof.height = 256;
      const RenderedSample s = rasterize(g.layout, sample_camera(*ws.scene, cams, prof), ws.render);
      for (double a : depth_normal_deviation(s)) {
        worst_angle = std::max(worst_angle, a);
        ++planar;
      }
      const BleedResult b = boundary_bleed(s, g.layout);
      bleed += b.bleeding;
      boundary += b.boundary_pixels;
      ++samples;
    });
  }
  const bool ok = samples == 50 && planar > 0 && worst_angle <= 5.0 && bleed == 0 &&
                  cube_err <= 1e-4;
  return {ok, fmt("%d samples, %zu planar px, max angle %.3f deg, %zu/%zu boundary px bleed, "
                  "cube depth err %.3g m",
                  samples, planar, worst_angle, bleed, boundary, cube_err)};
}

// --- 5 ---------------------------------------------------------------------

ImageTensor random_tensor(Rng& rng, int h, int w, int c) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ImageTensor t(h, w, c);
  for (double& v : t.values) v = u(rng);
  return t;
}

Outcome loss_kernels_check() {
  const auto t0 = Clock::now();
  Rng rng = make_stream(5, 0);
  double shift_err = 0.0;
  for (int k = 0; k < 20; ++k) {
    ImageTensor x = random_tensor(rng, 8, 8, 3);
    ImageTensor y = random_tensor(rng, 8, 8, 3);
    ImageTensor ys = y;
    const double c = std::uniform_real_distribution<double>(-3, 3)(rng);
    for (double& v : ys.values) v += c;
    shift_err = std::max(shift_err, std::abs(pmse_loss(x, ys) - pmse_loss(x, y)));
  }
  ImageTensor a(1, 2, 1), b(1, 2, 1);
  b.values = {1.0, 3.0};
  const double hand = pmse_loss(a, b);

  double worst_fd = 0.0;
  for (const LossKernel& kernel : loss_kernels()) {
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<ImageTensor> in;
      for (size_t i = 0; i < kernel_arity(kernel.name); ++i) in.push_back(random_tensor(rng, 8, 8, 3));
      worst_fd = std::max(worst_fd, finite_diff_check(kernel, in));
    }
  }
  const double total = total_objective(1, 1, 1, 1, LossWeights{});
  const LossWeights w;
  const bool weights = w.gan == 2 && w.pmse == 5 && w.rec == 10 && w.geo == 3;
  const double t = seconds_since(t0);
  const bool ok = shift_err <= 1e-12 && hand == 1.0 && worst_fd < 1e-4 && total == 20.0 &&
                  weights && t < 10.0;
  return {ok, fmt("shift err %.3g, hand %.17g, max fd rel err %.3g, total %.17g, %.3f s",
                  shift_err, hand, worst_fd, total, t)};
}

// --- 6 ---------------------------------------------------------------------

Outcome receptive_field_check() {
  const int rf = receptive_field(parse_arch(kDiscriminatorArch));
  const auto trace = shape_trace(parse_arch(kColorPathArch), 256, 256, 3);
  int smallest = 256;
  for (const LayerShape& s : trace) smallest = std::min(smallest, s.height);
  const int final_h = trace.back().height;
  const bool ok = rf == 70 && smallest == 64 && final_h == 256 && trace.back().width == 256;
  return {ok, fmt("discriminator RF %d, color path 256 -> %d -> %d", rf, smallest, final_h)};
}

// --- 7 ---------------------------------------------------------------------

Outcome annotation_cost_check() {
  const double c = annotation_cost(100, 20);
  return {c == 1200.0, fmt("100 models + 20 pairs -> %.1f s", c)};
}

// --- 8 ---------------------------------------------------------------------

Outcome sensitivity_check() {
  const auto t0 = Clock::now();
  const Workspace ws = shelf_workspace();
  Rng rng = make_stream(ws.gen.seed, 99);
  const std::vector<KnowledgeBase> bases = simulate_annotators(ws.kb, 20, 0.2, rng);
  SensitivityConfig cfg;
  cfg.layouts_per_base = 500;
  const SensitivityReport r =
      sensitivity_report(ws.kb, bases, ws.library, ws.scene, ws.gen, cfg);
  const double t = seconds_since(t0);
  const double ratio = r.median_divergence / r.noise_floor;
  const bool ok = r.divergence.size() == 20 && r.noise_floor > 0.0 && ratio < 2.0 && t < 600.0;
  return {ok, fmt("median JSD %.4g, noise floor %.4g, ratio %.3f, bootstrap floor %.4g, %.1f s",
                  r.median_divergence, r.noise_floor, ratio, r.bootstrap_floor, t)};
}

// --- 9 ---------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string tree_digest(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::string all;
  for (const fs::path& f : files) all += fs::relative(f, root).string() + '\n' + slurp(f);
  return all;
}

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome throughput_check() {
  const fs::path a = testing::fresh_dir("accept_a");
  const fs::path b = testing::fresh_dir("accept_b");
  const fs::path layer = testing::fresh_dir("accept_cfg") / "render.json";
  std::ofstream(layer) << R"({"render": {"width": 256, "height": 256}})";
  auto gen = [&](const fs::path& out) {
    const std::string cli = "\"" SCENESYNTH_CLI "\"";
    const std::string cfg = std::string("--config \"") + SCENESYNTH_DATA_DIR "/config.json," +
                            layer.string() + "\"";
    return shell(cli + " gen " + cfg + " --count 100 --seed 7 --quiet --out \"" + out.string() +
                 "\" > /dev/null") == 0 &&
           shell(cli + " export-coco \"" + out.string() + "\" > /dev/null") == 0;
  };
  const auto t0 = Clock::now();
  const bool first = gen(a);
  const double t = seconds_since(t0);
  const bool second = gen(b);
  const bool same = first && second && tree_digest(a) == tree_digest(b);
  const bool ok = first && second && same && t < 60.0;
  return {ok, fmt("100 samples at 256x256 in %.1f s on %u hardware threads, rerun %s", t,
                  std::thread::hardware_concurrency(), same ? "byte-identical" : "DIFFERS")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"likelihood-oracle", likelihood_oracle},
      {"relation-branches", relation_branches},
      {"physics-gate", physics_gate},
      {"render-consistency", render_consistency},
      {"loss-kernels", loss_kernels_check},
      {"receptive-field", receptive_field_check},
      {"annotation-cost", annotation_cost_check},
      {"sensitivity", sensitivity_check},
      {"throughput-determinism", throughput_check},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
