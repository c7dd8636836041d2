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

#ifndef SCENESYNTH_MESH_H_
#define SCENESYNTH_MESH_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "scenesynth/geometry.h"
#include "scenesynth/image_io.h"

namespace scenesynth {

using Face = std::array<uint32_t, 3>;

// Indexed triangle mesh in meters. Attributes are per vertex; `uvs` is either
// empty or the same length as `vertices`.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<Vec3> normals;
  std::vector<Vec2> uvs;
  std::optional<Vec3> albedo;             // diffuse colour in [0,1]^3
  std::shared_ptr<const Image8> texture;  // RGB, sampled through uvs

  // Throws Error(kValidation) when an invariant does not hold.
  void validate() const;
};

// Replaces `normals` with area-weighted averages of incident face normals.
// Vertices touching only degenerate faces get +Z.
void compute_vertex_normals(TriMesh& mesh);

Vec3 face_normal(const TriMesh& mesh, const Face& face);

struct ObjReadOptions {
  double scale = 1.0;
  bool load_materials = true;
};

// Wavefront OBJ reader. Polygons are fan-triangulated; when face corners use
// the same index for v/vt/vn the vertex order of the file is preserved.
// Material sidecars (mtllib / usemtl) provide Kd and map_Kd.
TriMesh read_obj(const std::filesystem::path& path,
                 const ObjReadOptions& options = {});
TriMesh parse_obj(std::istream& in, const std::filesystem::path& base_dir,
                  const ObjReadOptions& options = {});

// Writes v/vt/vn with shortest round-trip formatting, so read(write(m))
// reproduces vertices, normals, uvs and faces bit-for-bit.
void write_obj(std::ostream& out, const TriMesh& mesh);
void write_obj(const std::filesystem::path& path, const TriMesh& mesh);

// Builders used by tests, benchmarks and demo assets. Both produce flat
// per-face normals (vertices are split along creases).
TriMesh make_box(const Vec3& half_extents);
TriMesh make_cylinder(double radius, double half_height, int segments);

}  // namespace scenesynth

#endif  // SCENESYNTH_MESH_H_
