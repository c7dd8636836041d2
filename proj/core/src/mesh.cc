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

#include "scenesynth/mesh.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>

#include "scenesynth/error.h"

namespace scenesynth {

namespace {

struct Corner {
  long v = 0;
  long vt = -1;
  long vn = -1;
  auto operator<=>(const Corner&) const = default;
};

struct Material {
  std::optional<Vec3> kd;
  std::filesystem::path map_kd;
};

double parse_double(const std::string& token, int line_no) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    fail(ErrorKind::kParse, "line " + std::to_string(line_no) +
                                ": bad number '" + token + "'");
  }
  if (!std::isfinite(value)) {
    fail(ErrorKind::kValidation, "line " + std::to_string(line_no) +
                                     ": non-finite coordinate");
  }
  return value;
}

// Resolves a 1-based (or negative, relative) OBJ index to 0-based.
long resolve_index(const std::string& token, size_t count, int line_no) {
  long raw = 0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), raw);
  if (ec != std::errc() || ptr != token.data() + token.size() || raw == 0) {
    fail(ErrorKind::kParse, "line " + std::to_string(line_no) +
                                ": bad face index '" + token + "'");
  }
  return raw > 0 ? raw - 1 : static_cast<long>(count) + raw;
}

Corner parse_corner(const std::string& token, size_t nv, size_t nvt, size_t nvn,
                    int line_no) {
  Corner c;
  const size_t s1 = token.find('/');
  if (s1 == std::string::npos) {
    c.v = resolve_index(token, nv, line_no);
    return c;
  }
  c.v = resolve_index(token.substr(0, s1), nv, line_no);
  const size_t s2 = token.find('/', s1 + 1);
  const std::string vt = token.substr(
      s1 + 1, s2 == std::string::npos ? std::string::npos : s2 - s1 - 1);
  if (!vt.empty()) c.vt = resolve_index(vt, nvt, line_no);
  if (s2 != std::string::npos && s2 + 1 < token.size()) {
    c.vn = resolve_index(token.substr(s2 + 1), nvn, line_no);
  }
  return c;
}

std::map<std::string, Material> read_mtl(const std::filesystem::path& path) {
  std::map<std::string, Material> materials;
  std::ifstream in(path);
  if (!in) return materials;  // a missing sidecar only loses colour
  std::string line;
  std::string current;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key) || key[0] == '#') continue;
    if (key == "newmtl") {
      ls >> current;
      materials[current];
    } else if (key == "Kd" && !current.empty()) {
      std::string r, g, b;
      ls >> r >> g >> b;
      materials[current].kd = Vec3(parse_double(r, line_no),
                                   parse_double(g, line_no),
                                   parse_double(b, line_no));
    } else if (key == "map_Kd" && !current.empty()) {
      std::string file;
      std::getline(ls >> std::ws, file);
      materials[current].map_kd = path.parent_path() / file;
    }
  }
  return materials;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

void TriMesh::validate() const {
  if (faces.empty()) {
    fail(ErrorKind::kValidation, "degenerate mesh: zero faces");
  }
  for (const Vec3& v : vertices) {
    if (!v.allFinite()) {
      fail(ErrorKind::kValidation, "non-finite coordinate");
    }
  }
  for (const Face& f : faces) {
    for (uint32_t idx : f) {
      if (idx >= vertices.size()) {
        fail(ErrorKind::kValidation,
             "face index out of range: " + std::to_string(idx) + " >= " +
                 std::to_string(vertices.size()));
      }
    }
  }
  if (normals.size() != vertices.size()) {
    fail(ErrorKind::kValidation, "normal count does not match vertex count");
  }
  for (const Vec3& n : normals) {
    if (!n.allFinite() || std::abs(n.norm() - 1.0) > 1e-6) {
      fail(ErrorKind::kValidation, "normal is not unit length");
    }
  }
  if (!uvs.empty()) {
    if (uvs.size() != vertices.size()) {
      fail(ErrorKind::kValidation, "uv count does not match vertex count");
    }
    for (const Vec2& uv : uvs) {
      if (!uv.allFinite()) fail(ErrorKind::kValidation, "non-finite uv");
    }
  }
}

Vec3 face_normal(const TriMesh& mesh, const Face& face) {
  const Vec3& a = mesh.vertices[face[0]];
  const Vec3& b = mesh.vertices[face[1]];
  const Vec3& c = mesh.vertices[face[2]];
  return (b - a).cross(c - a);
}

void compute_vertex_normals(TriMesh& mesh) {
  mesh.normals.assign(mesh.vertices.size(), Vec3::Zero());
  for (const Face& f : mesh.faces) {
    const Vec3 n = face_normal(mesh, f);  // length = 2 * area
    for (uint32_t idx : f) mesh.normals[idx] += n;
  }
  for (Vec3& n : mesh.normals) {
    const double len = n.norm();
    n = len > 1e-300 ? Vec3(n / len) : kUp;
  }
}

TriMesh parse_obj(std::istream& in, const std::filesystem::path& base_dir,
                  const ObjReadOptions& options) {
  std::vector<Vec3> positions;
  std::vector<Vec2> texcoords;
  std::vector<Vec3> file_normals;
  std::vector<std::array<Corner, 3>> triangles;
  std::map<std::string, Material> materials;
  std::optional<Material> active;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key) || key[0] == '#') continue;
    if (key == "v" || key == "vn") {
      std::string x, y, z;
      if (!(ls >> x >> y >> z)) {
        fail(ErrorKind::kParse,
             "line " + std::to_string(line_no) + ": expected 3 components");
      }
      const Vec3 p(parse_double(x, line_no), parse_double(y, line_no),
                   parse_double(z, line_no));
      if (key == "v") {
        positions.push_back(p * options.scale);
      } else {
        file_normals.push_back(p);
      }
    } else if (key == "vt") {
      std::string u, v;
      if (!(ls >> u >> v)) {
        fail(ErrorKind::kParse,
             "line " + std::to_string(line_no) + ": expected 2 components");
      }
      texcoords.emplace_back(parse_double(u, line_no), parse_double(v, line_no));
    } else if (key == "f") {
      std::vector<Corner> poly;
      std::string tok;
      while (ls >> tok) {
        poly.push_back(parse_corner(tok, positions.size(), texcoords.size(),
                                    file_normals.size(), line_no));
      }
      if (poly.size() < 3) {
        fail(ErrorKind::kParse,
             "line " + std::to_string(line_no) + ": face with < 3 corners");
      }
      for (size_t i = 1; i + 1 < poly.size(); ++i) {
        triangles.push_back({poly[0], poly[i], poly[i + 1]});
      }
    } else if (key == "mtllib" && options.load_materials) {
      std::string file;
      std::getline(ls >> std::ws, file);
      materials.merge(read_mtl(base_dir / file));
    } else if (key == "usemtl") {
      std::string name;
      ls >> name;
      if (auto it = materials.find(name); it != materials.end()) {
        active = it->second;
      }
    }
  }

  // Range checks happen against the declared arrays before any remapping.
  for (const auto& tri : triangles) {
    for (const Corner& c : tri) {
      if (c.v < 0 || static_cast<size_t>(c.v) >= positions.size()) {
        fail(ErrorKind::kValidation,
             "face index out of range: " + std::to_string(c.v + 1) + " > " +
                 std::to_string(positions.size()) + " vertices");
      }
      if (c.vt >= static_cast<long>(texcoords.size()) ||
          c.vn >= static_cast<long>(file_normals.size()) ||
          (c.vt < -1) || (c.vn < -1)) {
        fail(ErrorKind::kValidation, "texture/normal index out of range");
      }
    }
  }

  bool direct = true;
  bool has_vt = false;
  bool has_vn = false;
  for (const auto& tri : triangles) {
    for (const Corner& c : tri) {
      if ((c.vt >= 0 && c.vt != c.v) || (c.vn >= 0 && c.vn != c.v)) {
        direct = false;
      }
      has_vt |= c.vt >= 0;
      has_vn |= c.vn >= 0;
    }
  }
  if (direct) {
    // Every corner uses the same index for all attributes, so the attribute
    // arrays must cover all positions for the direct mapping to apply.
    if ((has_vt && texcoords.size() < positions.size()) ||
        (has_vn && file_normals.size() < positions.size())) {
      direct = false;
    }
  }

  TriMesh mesh;
  bool normals_complete = true;
  if (direct) {
    mesh.vertices = positions;
    if (has_vt) {
      mesh.uvs.assign(texcoords.begin(), texcoords.begin() + positions.size());
    }
    if (has_vn) {
      mesh.normals.assign(file_normals.begin(),
                          file_normals.begin() + positions.size());
    } else {
      normals_complete = false;
    }
    for (const auto& tri : triangles) {
      mesh.faces.push_back({static_cast<uint32_t>(tri[0].v),
                            static_cast<uint32_t>(tri[1].v),
                            static_cast<uint32_t>(tri[2].v)});
    }
  } else {
    std::map<Corner, uint32_t> remap;
    for (const auto& tri : triangles) {
      Face f;
      for (int k = 0; k < 3; ++k) {
        const Corner& c = tri[k];
        auto [it, inserted] =
            remap.try_emplace(c, static_cast<uint32_t>(mesh.vertices.size()));
        if (inserted) {
          mesh.vertices.push_back(positions[c.v]);
          mesh.uvs.push_back(c.vt >= 0 ? texcoords[c.vt] : Vec2::Zero());
          mesh.normals.push_back(c.vn >= 0 ? file_normals[c.vn] : Vec3::Zero());
          normals_complete &= c.vn >= 0;
        }
        f[k] = it->second;
      }
      mesh.faces.push_back(f);
    }
    if (!has_vt) mesh.uvs.clear();
  }

  for (const Vec3& n : mesh.normals) {
    if (n.norm() < 1e-12) normals_complete = false;
  }
  if (!normals_complete || mesh.normals.size() != mesh.vertices.size()) {
    compute_vertex_normals(mesh);
  } else {
    for (Vec3& n : mesh.normals) {
      if (std::abs(n.norm() - 1.0) > 1e-12) n.normalize();
    }
  }

  if (active) {
    mesh.albedo = active->kd;
    if (!active->map_kd.empty() && !mesh.uvs.empty()) {
      auto tex = std::make_shared<Image8>(read_png8(active->map_kd));
      if (tex->channels < 3) {
        fail(ErrorKind::kValidation, "texture must be RGB");
      }
      mesh.texture = std::move(tex);
    }
  }

  mesh.validate();
  return mesh;
}

TriMesh read_obj(const std::filesystem::path& path,
                 const ObjReadOptions& options) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorKind::kNotFound, "mesh file not found: " + path.string());
  }
  return parse_obj(in, path.parent_path(), options);
}

void write_obj(std::ostream& out, const TriMesh& mesh) {
  for (const Vec3& v : mesh.vertices) {
    out << "v " << format_double(v.x()) << ' ' << format_double(v.y()) << ' '
        << format_double(v.z()) << '\n';
  }
  for (const Vec2& t : mesh.uvs) {
    out << "vt " << format_double(t.x()) << ' ' << format_double(t.y()) << '\n';
  }
  for (const Vec3& n : mesh.normals) {
    out << "vn " << format_double(n.x()) << ' ' << format_double(n.y()) << ' '
        << format_double(n.z()) << '\n';
  }
  const bool uv = !mesh.uvs.empty();
  for (const Face& f : mesh.faces) {
    out << 'f';
    for (uint32_t idx : f) {
      const uint32_t i = idx + 1;
      out << ' ' << i << '/';
      if (uv) out << i;
      out << '/' << i;
    }
    out << '\n';
  }
}

void write_obj(const std::filesystem::path& path, const TriMesh& mesh) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  write_obj(out, mesh);
  if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
}

TriMesh make_box(const Vec3& half_extents) {
  TriMesh mesh;
  for (int axis = 0; axis < 3; ++axis) {
    for (int sign : {-1, 1}) {
      Vec3 n = Vec3::Zero();
      n[axis] = sign;
      const int a1 = (axis + 1) % 3;
      const int a2 = (axis + 2) % 3;
      const uint32_t base = static_cast<uint32_t>(mesh.vertices.size());
      const double corners[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
      for (const auto& c : corners) {
        Vec3 p;
        p[axis] = sign * half_extents[axis];
        p[a1] = c[0] * half_extents[a1];
        p[a2] = c[1] * half_extents[a2];
        mesh.vertices.push_back(p);
        mesh.normals.push_back(n);
      }
      // (a1, a2, axis) is right-handed, so CCW in (a1, a2) faces +axis.
      if (sign > 0) {
        mesh.faces.push_back({base, base + 1, base + 2});
        mesh.faces.push_back({base, base + 2, base + 3});
      } else {
        mesh.faces.push_back({base, base + 2, base + 1});
        mesh.faces.push_back({base, base + 3, base + 2});
      }
    }
  }
  return mesh;
}

TriMesh make_cylinder(double radius, double half_height, int segments) {
  TriMesh mesh;
  const double step = 2.0 * std::numbers::pi / segments;
  auto ring = [&](int i) {
    const double a = i * step;
    return Vec2(radius * std::cos(a), radius * std::sin(a));
  };
  for (int i = 0; i < segments; ++i) {
    const Vec2 p0 = ring(i);
    const Vec2 p1 = ring(i + 1);
    const double mid = (i + 0.5) * step;
    const Vec3 n(std::cos(mid), std::sin(mid), 0.0);
    const uint32_t base = static_cast<uint32_t>(mesh.vertices.size());
    mesh.vertices.emplace_back(p0.x(), p0.y(), -half_height);
    mesh.vertices.emplace_back(p1.x(), p1.y(), -half_height);
    mesh.vertices.emplace_back(p1.x(), p1.y(), half_height);
    mesh.vertices.emplace_back(p0.x(), p0.y(), half_height);
    for (int k = 0; k < 4; ++k) mesh.normals.push_back(n);
    mesh.faces.push_back({base, base + 1, base + 2});
    mesh.faces.push_back({base, base + 2, base + 3});
  }
  for (int sign : {-1, 1}) {
    const uint32_t center = static_cast<uint32_t>(mesh.vertices.size());
    mesh.vertices.emplace_back(0.0, 0.0, sign * half_height);
    mesh.normals.emplace_back(0.0, 0.0, sign);
    for (int i = 0; i < segments; ++i) {
      const Vec2 p = ring(i);
      mesh.vertices.emplace_back(p.x(), p.y(), sign * half_height);
      mesh.normals.emplace_back(0.0, 0.0, sign);
    }
    for (int i = 0; i < segments; ++i) {
      const uint32_t a = center + 1 + i;
      const uint32_t b = center + 1 + (i + 1) % segments;
      if (sign > 0) {
        mesh.faces.push_back({center, a, b});
      } else {
        mesh.faces.push_back({center, b, a});
      }
    }
  }
  return mesh;
}

}  // namespace scenesynth
