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


#include "scenesynth/render.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "scenesynth/error.h"
#include "scenesynth/parallel.h"

namespace scenesynth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr float kInfF = std::numeric_limits<float>::infinity();

struct Vertex {
  Vec3 p;  // camera space
  Vec3 n;  // camera space
  Vec2 uv = Vec2::Zero();
};

struct Source {
  Vertex v[3];
  Vec3 albedo;
  const Image8* texture = nullptr;
  uint16_t instance = 0;
  int32_t primitive = 0;
};

struct ScreenTri {
  Vertex v[3];
  Vec2 s[3];
  double iz[3];
  double area;
  int x0, y0, x1, y1;  // inclusive pixel bounds
  const Source* src;
};

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Vec3 category_colour(const std::string& category) {
  const uint64_t h = fnv1a(category);
  return Vec3(0.25 + 0.7 * static_cast<double>(h & 0xff) / 255.0,
              0.25 + 0.7 * static_cast<double>((h >> 8) & 0xff) / 255.0,
              0.25 + 0.7 * static_cast<double>((h >> 16) & 0xff) / 255.0);
}

// World-space triangles of the scene (instance 0) and every placement.
template <typename Fn>
void for_each_world_triangle(const Layout& layout, Fn&& fn) {
  auto emit_mesh = [&](const TriMesh& mesh, const Eigen::Isometry3d& t,
                       uint16_t instance) {
    const Eigen::Matrix3d r = t.linear();
    for (const Face& f : mesh.faces) {
      Vec3 p[3];
      Vec3 n[3];
      Vec2 uv[3];
      for (int k = 0; k < 3; ++k) {
        p[k] = t * mesh.vertices[f[k]];
        uv[k] = mesh.uvs.empty() ? Vec2::Zero() : mesh.uvs[f[k]];
      }
      Vec3 geo = (p[1] - p[0]).cross(p[2] - p[0]);
      const double len = geo.norm();
      if (len == 0.0) continue;
      geo /= len;
      for (int k = 0; k < 3; ++k) {
        n[k] = mesh.normals.empty() ? geo : Vec3(r * mesh.normals[f[k]]);
      }
      fn(mesh, p, n, uv, geo, instance);
    }
  };
  if (layout.scene) {
    emit_mesh(layout.scene->mesh, Eigen::Isometry3d::Identity(), 0);
  }
  for (size_t i = 0; i < layout.placements.size(); ++i) {
    const Placement& pl = layout.placements[i];
    emit_mesh(pl.object->mesh, pl.world_from_model(),
              static_cast<uint16_t>(i + 1));
  }
}

Vertex lerp(const Vertex& a, const Vertex& b, double t) {
  return {a.p + t * (b.p - a.p), a.n + t * (b.n - a.n),
          a.uv + t * (b.uv - a.uv)};
}

// Sutherland-Hodgman against z >= near.
int clip_near(const Vertex in[3], double near, Vertex out[4]) {
  int n = 0;
  for (int k = 0; k < 3; ++k) {
    const Vertex& a = in[k];
    const Vertex& b = in[(k + 1) % 3];
    const bool ain = a.p.z() >= near;
    const bool bin = b.p.z() >= near;
    if (ain) out[n++] = a;
    if (ain != bin) {
      const double t = (near - a.p.z()) / (b.p.z() - a.p.z());
      Vertex v = lerp(a, b, t);
      v.p.z() = near;
      out[n++] = v;
    }
  }
  return n;
}

double edge(const Vec2& a, const Vec2& b, const Vec2& p) {
  return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
}

// Shared edges are traversed in opposite directions by the two triangles,
// so exactly one of them owns pixels lying on the edge.
bool owns_edge(const Vec2& a, const Vec2& b) {
  const double dy = b.y() - a.y();
  const double dx = b.x() - a.x();
  return dy > 0.0 || (dy == 0.0 && dx < 0.0);
}

bool inside(double w, bool owner) { return w > 0.0 || (w == 0.0 && owner); }

Vec3 sample_texture(const Image8& tex, const Vec2& uv) {
  const double u = uv.x() - std::floor(uv.x());
  const double v = uv.y() - std::floor(uv.y());
  const int x = std::clamp(static_cast<int>(u * tex.width), 0, tex.width - 1);
  const int y =
      std::clamp(static_cast<int>((1.0 - v) * tex.height), 0, tex.height - 1);
  Vec3 c;
  for (int k = 0; k < 3; ++k) {
    c[k] = tex.at(x, y, std::min(k, tex.channels - 1)) / 255.0;
  }
  return c;
}

uint8_t to_byte(double v) {
  return static_cast<uint8_t>(std::clamp(std::lround(v * 255.0), 0L, 255L));
}

}  // namespace

void Camera::validate() const {
  if (!(fx > 0.0 && fy > 0.0)) fail(ErrorKind::kValidation, "focal lengths must be > 0");
  if (!(near > 0.0 && near < far)) {
    fail(ErrorKind::kValidation, "clip planes must satisfy 0 < near < far");
  }
  if (width < 1 || height < 1 || width > 16384 || height > 16384) {
    fail(ErrorKind::kValidation, "resolution out of range");
  }
  if (std::abs(rotation.norm() - 1.0) > 1e-6 || !position.allFinite()) {
    fail(ErrorKind::kValidation, "camera pose is not a rigid transform");
  }
}

Vec3 Camera::to_camera(const Vec3& world) const {
  return rotation.conjugate() * (world - position);
}

Vec3 Camera::to_world(const Vec3& cam) const { return rotation * cam + position; }

Vec3 Camera::ray(double px, double py) const {
  return Vec3((px - cx) / fx, (py - cy) / fy, 1.0);
}

Camera look_at(const Vec3& eye, const Vec3& target, double fov_y_deg,
               int width, int height) {
  Vec3 z = target - eye;
  if (z.norm() < 1e-12) fail(ErrorKind::kValidation, "camera eye equals target");
  z.normalize();
  Vec3 x = z.cross(kUp);
  if (x.norm() < 1e-9) x = z.cross(Vec3::UnitY());
  x.normalize();
  const Vec3 y = z.cross(x);
  Eigen::Matrix3d r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  Camera cam;
  cam.width = width;
  cam.height = height;
  cam.fy = 0.5 * height / std::tan(0.5 * fov_y_deg * std::numbers::pi / 180.0);
  cam.fx = cam.fy;
  cam.cx = 0.5 * width;
  cam.cy = 0.5 * height;
  cam.rotation = Quat(r).normalized();
  cam.position = eye;
  return cam;
}

void CameraProfile::validate() const {
  if (!(radius_min > 0.0 && radius_max >= radius_min)) {
    fail(ErrorKind::kValidation, "camera radii must satisfy 0 < min <= max");
  }
  if (!(elevation_max >= elevation_min && azimuth_max >= azimuth_min)) {
    fail(ErrorKind::kValidation, "camera angle ranges are inverted");
  }
  if (std::abs(elevation_min) > std::numbers::pi / 2 ||
      std::abs(elevation_max) > std::numbers::pi / 2) {
    fail(ErrorKind::kValidation, "elevation must lie in [-pi/2, pi/2]");
  }
  if (!(target_jitter >= 0.0)) fail(ErrorKind::kValidation, "jitter must be >= 0");
  if (!(fov_y_deg > 0.0 && fov_y_deg < 180.0)) {
    fail(ErrorKind::kValidation, "field of view must lie in (0, 180)");
  }
}

Camera sample_camera(const SceneBackground& scene, Rng& rng,
                     const CameraProfile& profile) {
  profile.validate();
  auto uniform = [&](double lo, double hi) {
    if (hi <= lo) return lo;
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  Vec3 target = Vec3::Zero();
  if (profile.target) {
    target = *profile.target;
  } else if (!scene.surfaces.empty()) {
    for (const SupportSurface& s : scene.surfaces) target += s.centroid();
    target /= static_cast<double>(scene.surfaces.size());
  } else {
    target = scene.bounds.center();
  }
  const double radius = uniform(profile.radius_min, profile.radius_max);
  const double elevation = uniform(profile.elevation_min, profile.elevation_max);
  const double azimuth = uniform(profile.azimuth_min, profile.azimuth_max);
  Vec3 jitter;
  for (int k = 0; k < 3; ++k) {
    jitter[k] = uniform(-profile.target_jitter, profile.target_jitter);
  }
  Vec3 look = target + jitter;
  if (!scene.bounds.empty()) {
    look = look.cwiseMax(scene.bounds.min).cwiseMin(scene.bounds.max);
  }
  const Vec3 eye =
      target + radius * Vec3(std::cos(elevation) * std::cos(azimuth),
                             std::cos(elevation) * std::sin(azimuth),
                             std::sin(elevation));
  Camera cam = look_at(eye, look, profile.fov_y_deg, profile.width, profile.height);
  cam.near = profile.near;
  cam.far = profile.far;
  return cam;
}

RenderedSample rasterize(const Layout& layout, const Camera& camera,
                         const RenderOptions& options) {
  camera.validate();
  if (layout.placements.size() >= 65535) {
    fail(ErrorKind::kValidation, "too many placements for 16-bit instance ids");
  }
  const int w = camera.width;
  const int h = camera.height;
  RenderedSample out;
  out.camera = camera;
  out.rgb = Image8(w, h, 3, 0);
  out.instance = Image16(w, h, 1, 0);
  out.depth = Image<float>(w, h, 1, kInfF);
  out.normal = Image<float>(w, h, 3, 0.0f);
  out.primitive = Image<int32_t>(w, h, 1, -1);
  for (const Placement& p : layout.placements) out.instance_ids.push_back(p.instance_id);

  const Eigen::Matrix3d to_cam = camera.rotation.conjugate().toRotationMatrix();
  std::vector<Source> sources;
  for_each_world_triangle(
      layout, [&](const TriMesh& mesh, const Vec3* p, const Vec3* n,
                  const Vec2* uv, const Vec3& geo, uint16_t instance) {
        Source s;
        s.primitive = static_cast<int32_t>(sources.size());
        s.instance = instance;
        bool flat = true;
        for (int k = 0; k < 3; ++k) {
          s.v[k].p = camera.to_camera(p[k]);
          s.v[k].n = to_cam * n[k];
          s.v[k].uv = uv[k];
          flat = flat && std::abs(std::abs(n[k].normalized().dot(geo)) - 1.0) < 1e-6;
        }
        out.primitive_flat.push_back(flat ? 1 : 0);
        if (mesh.texture && !mesh.uvs.empty()) s.texture = mesh.texture.get();
        if (mesh.albedo) {
          s.albedo = *mesh.albedo;
        } else if (instance == 0) {
          s.albedo = options.scene_albedo;
        } else {
          s.albedo = category_colour(layout.placements[instance - 1].category());
        }
        sources.push_back(s);
      });

  std::vector<ScreenTri> tris;
  for (const Source& src : sources) {
    Vertex clipped[4];
    const int n = clip_near(src.v, camera.near, clipped);
    for (int k = 1; k + 1 < n; ++k) {
      ScreenTri t;
      t.src = &src;
      t.v[0] = clipped[0];
      t.v[1] = clipped[k];
      t.v[2] = clipped[k + 1];
      double xmin = kInf, ymin = kInf, xmax = -kInf, ymax = -kInf;
      for (int j = 0; j < 3; ++j) {
        const Vec3& q = t.v[j].p;
        t.iz[j] = 1.0 / q.z();
        t.s[j] = Vec2(camera.fx * q.x() * t.iz[j] + camera.cx,
                      camera.fy * q.y() * t.iz[j] + camera.cy);
        xmin = std::min(xmin, t.s[j].x());
        xmax = std::max(xmax, t.s[j].x());
        ymin = std::min(ymin, t.s[j].y());
        ymax = std::max(ymax, t.s[j].y());
      }
      t.area = edge(t.s[0], t.s[1], t.s[2]);
      if (t.area == 0.0 || !std::isfinite(t.area)) continue;
      if (t.area < 0.0) {
        std::swap(t.v[1], t.v[2]);
        std::swap(t.s[1], t.s[2]);
        std::swap(t.iz[1], t.iz[2]);
        t.area = -t.area;
      }
      t.x0 = std::max(0, static_cast<int>(std::floor(xmin - 0.5)));
      t.y0 = std::max(0, static_cast<int>(std::floor(ymin - 0.5)));
      t.x1 = std::min(w - 1, static_cast<int>(std::ceil(xmax - 0.5)));
      t.y1 = std::min(h - 1, static_cast<int>(std::ceil(ymax - 0.5)));
      if (t.x0 > t.x1 || t.y0 > t.y1) continue;
      tris.push_back(t);
    }
  }

  const int tile = std::max(1, options.tile);
  const int tiles_x = (w + tile - 1) / tile;
  const int tiles_y = (h + tile - 1) / tile;
  std::vector<std::vector<uint32_t>> bins(static_cast<size_t>(tiles_x * tiles_y));
  for (uint32_t i = 0; i < tris.size(); ++i) {
    const ScreenTri& t = tris[i];
    for (int ty = t.y0 / tile; ty <= t.y1 / tile; ++ty) {
      for (int tx = t.x0 / tile; tx <= t.x1 / tile; ++tx) {
        bins[static_cast<size_t>(ty * tiles_x + tx)].push_back(i);
      }
    }
  }

  const Vec3 light = (to_cam * options.light_dir).normalized();
  std::vector<double> zbuf(static_cast<size_t>(w) * h, kInf);
  parallel_for(bins.size(), options.threads, [&](size_t b) {
    const int bx0 = static_cast<int>(b % tiles_x) * tile;
    const int by0 = static_cast<int>(b / tiles_x) * tile;
    const int bx1 = std::min(w - 1, bx0 + tile - 1);
    const int by1 = std::min(h - 1, by0 + tile - 1);
    for (uint32_t idx : bins[b]) {
      const ScreenTri& t = tris[idx];
      const bool own0 = owns_edge(t.s[1], t.s[2]);
      const bool own1 = owns_edge(t.s[2], t.s[0]);
      const bool own2 = owns_edge(t.s[0], t.s[1]);
      for (int y = std::max(by0, t.y0); y <= std::min(by1, t.y1); ++y) {
        for (int x = std::max(bx0, t.x0); x <= std::min(bx1, t.x1); ++x) {
          const Vec2 p(x + 0.5, y + 0.5);
          const double w0 = edge(t.s[1], t.s[2], p);
          const double w1 = edge(t.s[2], t.s[0], p);
          const double w2 = edge(t.s[0], t.s[1], p);
          if (!inside(w0, own0) || !inside(w1, own1) || !inside(w2, own2)) continue;
          const double b0 = w0 / t.area * t.iz[0];
          const double b1 = w1 / t.area * t.iz[1];
          const double b2 = w2 / t.area * t.iz[2];
          const double iz = b0 + b1 + b2;
          const double z = 1.0 / iz;
          if (z > camera.far) continue;
          const size_t pix = static_cast<size_t>(y) * w + x;
          if (!(z < zbuf[pix])) continue;
          zbuf[pix] = z;
          const double a0 = b0 / iz, a1 = b1 / iz, a2 = b2 / iz;
          const Source& src = *t.src;
          const Vec3 pos = a0 * t.v[0].p + a1 * t.v[1].p + a2 * t.v[2].p;
          Vec3 n = a0 * t.v[0].n + a1 * t.v[1].n + a2 * t.v[2].n;
          if (n.norm() < 1e-12) {
            n = (t.v[1].p - t.v[0].p).cross(t.v[2].p - t.v[0].p);
          }
          n.normalize();
          if (n.dot(pos) > 0.0) n = -n;
          Vec3 albedo = src.albedo;
          if (src.texture != nullptr) {
            albedo = sample_texture(
                *src.texture, a0 * t.v[0].uv + a1 * t.v[1].uv + a2 * t.v[2].uv);
          }
          const double shade =
              options.ambient + (1.0 - options.ambient) * std::max(0.0, -n.dot(light));
          for (int c = 0; c < 3; ++c) out.rgb.at(x, y, c) = to_byte(albedo[c] * shade);
          out.primitive.at(x, y) = src.primitive;
          out.instance.at(x, y) = src.instance;
          if (src.instance != 0) {
            out.depth.at(x, y) = static_cast<float>(z);
            for (int c = 0; c < 3; ++c) out.normal.at(x, y, c) = static_cast<float>(n[c]);
          } else {
            out.depth.at(x, y) = kInfF;
            for (int c = 0; c < 3; ++c) out.normal.at(x, y, c) = 0.0f;
          }
        }
      }
    }
  });
  return out;
}

PixelHit raycast_pixel(const Layout& layout, const Camera& camera, int x,
                       int y) {
  const Vec3 dir = camera.rotation * camera.ray(x + 0.5, y + 0.5);
  PixelHit best;
  best.depth = kInf;
  best.margin = kInf;
  double best_margin = kInf;
  // Nearest hit by any owner other than the winner, for tie detection.
  std::vector<std::pair<double, uint16_t>> hits;
  for_each_world_triangle(
      layout, [&](const TriMesh&, const Vec3* p, const Vec3*, const Vec2*,
                  const Vec3&, uint16_t instance) {
        double margin = 0.0;
        const double t =
            intersect_ray_triangle(camera.position, dir, p[0], p[1], p[2], &margin);
        if (t < camera.near || t > camera.far) return;
        hits.emplace_back(t, instance);
        if (t < best.depth) {
          best.depth = t;
          best.instance = instance;
          best.scene = instance == 0;
          best_margin = margin;
        }
      });
  double gap = kInf;
  for (const auto& [t, inst] : hits) {
    if (inst != best.instance) gap = std::min(gap, (t - best.depth) / best.depth);
  }
  best.margin = std::min(best_margin, gap);
  if (best.scene) best.instance = 0;
  return best;
}

Image16 encode_depth(const Image<float>& depth) {
  Image16 out(depth.width, depth.height, 1, 0);
  for (size_t i = 0; i < depth.data.size(); ++i) {
    const double d = depth.data[i];
    if (!std::isfinite(d)) continue;
    out.data[i] = static_cast<uint16_t>(
        std::clamp(std::llround(d * 1000.0), 0LL, 65535LL));
  }
  return out;
}

Image<float> decode_depth(const Image16& depth) {
  Image<float> out(depth.width, depth.height, 1, kInfF);
  for (size_t i = 0; i < depth.data.size(); ++i) {
    if (depth.data[i] != 0) out.data[i] = static_cast<float>(depth.data[i] / 1000.0);
  }
  return out;
}

Image8 encode_normal(const Image<float>& normal, const Image16& instance) {
  Image8 out(normal.width, normal.height, 3, 0);
  for (int y = 0; y < normal.height; ++y) {
    for (int x = 0; x < normal.width; ++x) {
      if (instance.at(x, y) == 0) continue;
      for (int c = 0; c < 3; ++c) {
        const double v = std::round(normal.at(x, y, c) * 127.5 + 127.5);
        out.at(x, y, c) = static_cast<uint8_t>(std::clamp(v, 0.0, 255.0));
      }
    }
  }
  return out;
}

Image<float> decode_normal(const Image8& normal) {
  Image<float> out(normal.width, normal.height, 3, 0.0f);
  for (int y = 0; y < normal.height; ++y) {
    for (int x = 0; x < normal.width; ++x) {
      Vec3 n;
      bool background = true;
      for (int c = 0; c < 3; ++c) {
        background = background && normal.at(x, y, c) == 0;
        n[c] = (normal.at(x, y, c) - 127.5) / 127.5;
      }
      if (background || n.norm() == 0.0) continue;
      n.normalize();
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = static_cast<float>(n[c]);
    }
  }
  return out;
}

SampleFiles sample_files(const std::filesystem::path& dir,
                         const std::string& stem) {
  return {dir / (stem + ".rgb.png"), dir / (stem + ".seg.png"),
          dir / (stem + ".depth.png"), dir / (stem + ".normal.png"),
          dir / (stem + ".json")};
}

nlohmann::json camera_to_json(const Camera& c) {
  return {{"fx", c.fx},
          {"fy", c.fy},
          {"cx", c.cx},
          {"cy", c.cy},
          {"width", c.width},
          {"height", c.height},
          {"near", c.near},
          {"far", c.far},
          {"rotation_wxyz", {c.rotation.w(), c.rotation.x(), c.rotation.y(), c.rotation.z()}},
          {"position", {c.position.x(), c.position.y(), c.position.z()}}};
}

Camera camera_from_json(const nlohmann::json& j) {
  try {
    Camera c;
    c.fx = j.at("fx").get<double>();
    c.fy = j.at("fy").get<double>();
    c.cx = j.at("cx").get<double>();
    c.cy = j.at("cy").get<double>();
    c.width = j.at("width").get<int>();
    c.height = j.at("height").get<int>();
    c.near = j.at("near").get<double>();
    c.far = j.at("far").get<double>();
    const auto& q = j.at("rotation_wxyz");
    c.rotation = Quat(q.at(0).get<double>(), q.at(1).get<double>(),
                      q.at(2).get<double>(), q.at(3).get<double>());
    const auto& p = j.at("position");
    c.position = Vec3(p.at(0).get<double>(), p.at(1).get<double>(),
                      p.at(2).get<double>());
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, std::string("camera: ") + e.what());
  }
}

SampleFiles encode_sample(const RenderedSample& sample,
                          const std::filesystem::path& dir,
                          const std::string& stem,
                          const nlohmann::json& extra) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
  const SampleFiles files = sample_files(dir, stem);
  write_png(files.rgb, sample.rgb);
  write_png(files.seg, sample.instance);
  write_png(files.depth, encode_depth(sample.depth));
  write_png(files.normal, encode_normal(sample.normal, sample.instance));

  nlohmann::json meta = nlohmann::json::object();
  meta["camera"] = camera_to_json(sample.camera);
  meta["encoding"] = {{"rgb", "png8-rgb/1"},
                      {"seg", "png16-instance/1"},
                      {"depth", "png16-millimeter/1"},
                      {"normal", "png8-unit-vector/1"}};
  nlohmann::json instances = nlohmann::json::array();
  for (size_t k = 0; k < sample.instance_ids.size(); ++k) {
    instances.push_back({{"id", k + 1}, {"instance_id", sample.instance_ids[k]}});
  }
  meta["instances"] = instances;
  meta.merge_patch(extra);
  std::ofstream out(files.meta, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + files.meta.string());
  out << meta.dump(2) << '\n';
  if (!out) fail(ErrorKind::kIo, "write failed: " + files.meta.string());
  return files;
}

DecodedSample decode_sample(const std::filesystem::path& dir,
                            const std::string& stem) {
  const SampleFiles files = sample_files(dir, stem);
  DecodedSample out;
  out.rgb = read_png8(files.rgb);
  out.instance = read_png16(files.seg);
  out.depth = decode_depth(read_png16(files.depth));
  out.normal = decode_normal(read_png8(files.normal));
  std::ifstream in(files.meta, std::ios::binary);
  if (!in) fail(ErrorKind::kNotFound, "sample metadata not found: " + files.meta.string());
  try {
    out.meta = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, files.meta.string() + ": " + e.what());
  }
  const int w = out.rgb.width;
  const int h = out.rgb.height;
  if (out.rgb.channels != 3 || out.instance.width != w || out.instance.height != h ||
      out.depth.width != w || out.depth.height != h || out.normal.width != w ||
      out.normal.height != h) {
    fail(ErrorKind::kValidation, "sample maps of " + stem + " disagree in shape");
  }
  return out;
}

std::vector<double> depth_normal_deviation(const RenderedSample& sample,
                                           int window) {
  const int r = window / 2;
  const Camera& cam = sample.camera;
  const int w = sample.depth.width;
  const int h = sample.depth.height;
  auto point = [&](int x, int y) -> Vec3 {
    return static_cast<double>(sample.depth.at(x, y)) * cam.ray(x + 0.5, y + 0.5);
  };
  std::vector<double> out;
  for (int y = r; y < h - r; ++y) {
    for (int x = r; x < w - r; ++x) {
      if (sample.instance.at(x, y) == 0) continue;
      const int32_t prim = sample.primitive.at(x, y);
      if (prim < 0 || !sample.primitive_flat[static_cast<size_t>(prim)]) continue;
      bool uniform = true;
      for (int dy = -r; dy <= r && uniform; ++dy) {
        for (int dx = -r; dx <= r && uniform; ++dx) {
          uniform = sample.primitive.at(x + dx, y + dy) == prim;
        }
      }
      if (!uniform) continue;
      const Vec3 p = point(x, y);
      Vec3 n = (point(x + 1, y) - point(x - 1, y)).cross(point(x, y + 1) - point(x, y - 1));
      if (n.norm() == 0.0) continue;
      n.normalize();
      if (n.dot(p) > 0.0) n = -n;
      const Vec3 m(sample.normal.at(x, y, 0), sample.normal.at(x, y, 1),
                   sample.normal.at(x, y, 2));
      const double c = std::clamp(n.dot(m.normalized()), -1.0, 1.0);
      out.push_back(std::acos(c) * 180.0 / std::numbers::pi);
    }
  }
  return out;
}

BleedResult boundary_bleed(const RenderedSample& sample, const Layout& layout,
                           double edge_margin) {
  BleedResult result;
  const Image16& inst = sample.instance;
  for (int y = 0; y < inst.height; ++y) {
    for (int x = 0; x < inst.width; ++x) {
      const uint16_t id = inst.at(x, y);
      const bool boundary = (x > 0 && inst.at(x - 1, y) != id) ||
                            (x + 1 < inst.width && inst.at(x + 1, y) != id) ||
                            (y > 0 && inst.at(x, y - 1) != id) ||
                            (y + 1 < inst.height && inst.at(x, y + 1) != id);
      if (!boundary) continue;
      ++result.boundary_pixels;
      const PixelHit hit = raycast_pixel(layout, sample.camera, x, y);
      if (std::isfinite(hit.depth) && hit.margin < edge_margin) continue;
      ++result.checked;
      if (hit.instance != id) ++result.bleeding;
    }
  }
  return result;
}

}  // namespace scenesynth
