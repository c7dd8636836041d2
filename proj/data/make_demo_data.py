#!/usr/bin/env python3
# Copyright 2026 The scenesynth Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the demo asset set: three scene backgrounds, primitive object
meshes, the asset index, per-scene priors and a pipeline config."""

import json
import math
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent


def box_mesh(hx, hy, hz, cx=0.0, cy=0.0, cz=0.0):
    """Axis-aligned box with split vertices and flat normals."""
    verts, norms, faces = [], [], []
    for axis in range(3):
        for sign in (-1.0, 1.0):
            n = [0.0, 0.0, 0.0]
            n[axis] = sign
            u, v = (axis + 1) % 3, (axis + 2) % 3
            h = (hx, hy, hz)
            base = len(verts)
            for du, dv in ((-1, -1), (1, -1), (1, 1), (-1, 1)):
                p = [0.0, 0.0, 0.0]
                p[axis] = sign * h[axis]
                p[u] = du * h[u]
                p[v] = dv * h[v]
                verts.append((p[0] + cx, p[1] + cy, p[2] + cz))
                norms.append(tuple(n))
            if sign > 0:
                faces += [(base, base + 1, base + 2), (base, base + 2, base + 3)]
            else:
                faces += [(base, base + 2, base + 1), (base, base + 3, base + 2)]
    return verts, norms, faces


def cylinder_mesh(r, hh, segments=16):
    verts, norms, faces = [], [], []
    for s in range(segments):
        a0 = 2 * math.pi * s / segments
        a1 = 2 * math.pi * (s + 1) / segments
        mid = 0.5 * (a0 + a1)
        n = (math.cos(mid), math.sin(mid), 0.0)
        base = len(verts)
        for a, z in ((a0, -hh), (a1, -hh), (a1, hh), (a0, hh)):
            verts.append((r * math.cos(a), r * math.sin(a), z))
            norms.append(n)
        faces += [(base, base + 1, base + 2), (base, base + 2, base + 3)]
    for z, nz in ((hh, 1.0), (-hh, -1.0)):
        centre = len(verts)
        verts.append((0.0, 0.0, z))
        norms.append((0.0, 0.0, nz))
        ring = len(verts)
        for s in range(segments):
            a = 2 * math.pi * s / segments
            verts.append((r * math.cos(a), r * math.sin(a), z))
            norms.append((0.0, 0.0, nz))
        for s in range(segments):
            i, j = ring + s, ring + (s + 1) % segments
            faces.append((centre, i, j) if nz > 0 else (centre, j, i))
    return verts, norms, faces


def merge(*meshes):
    verts, norms, faces = [], [], []
    for v, n, f in meshes:
        off = len(verts)
        verts += v
        norms += n
        faces += [(a + off, b + off, c + off) for a, b, c in f]
    return verts, norms, faces


def write_obj(path, mesh, kd=None):
    verts, norms, faces = mesh
    lines = ["# scenesynth demo asset"]
    if kd is not None:
        mtl = path.with_suffix(".mtl")
        mtl.write_text("newmtl m\nKd %.4f %.4f %.4f\n" % kd)
        lines += ["mtllib " + mtl.name, "usemtl m"]
    lines += ["v %.6f %.6f %.6f" % v for v in verts]
    lines += ["vn %.6f %.6f %.6f" % n for n in norms]
    lines += ["f %d//%d %d//%d %d//%d" % (a + 1, a + 1, b + 1, b + 1, c + 1, c + 1)
              for a, b, c in faces]
    path.write_text("\n".join(lines) + "\n")


def rect(x0, x1, y0, y1, z):
    return [[x0, y0, z], [x1, y0, z], [x1, y1, z], [x0, y1, z]]


SCENES = {
    "shelf": {
        "mesh": lambda: merge(
            box_mesh(0.6, 0.2, 0.01, 0, 0, 0.01),
            box_mesh(0.6, 0.2, 0.01, 0, 0, 0.41),
            box_mesh(0.6, 0.2, 0.01, 0, 0, 0.81),
            box_mesh(0.6, 0.2, 0.01, 0, 0, 1.21),
            box_mesh(0.01, 0.2, 0.61, -0.61, 0, 0.61),
            box_mesh(0.01, 0.2, 0.61, 0.61, 0, 0.61),
            box_mesh(0.6, 0.01, 0.61, 0, 0.21, 0.61)),
        "surfaces": [
            {"name": "board_0", "polygon": rect(-0.6, 0.6, -0.2, 0.2, 0.02)},
            {"name": "board_1", "polygon": rect(-0.6, 0.6, -0.2, 0.2, 0.42)},
            {"name": "board_2", "polygon": rect(-0.6, 0.6, -0.2, 0.2, 0.82)},
        ],
        "scene_scale": 1.0,
        "categories": 30,
        "objects": [3, 8],
        "camera": {"radius": [1.7, 2.3], "elevation_deg": [5, 30],
                   "azimuth_deg": [-115, -65], "target_jitter": 0.05,
                   "target": [0.0, 0.0, 0.45], "fov_y_deg": 50},
    },
    "desk": {
        "mesh": lambda: merge(
            box_mesh(0.7, 0.35, 0.015, 0, 0, 0.735),
            box_mesh(0.02, 0.02, 0.36, -0.66, -0.31, 0.36),
            box_mesh(0.02, 0.02, 0.36, 0.66, -0.31, 0.36),
            box_mesh(0.02, 0.02, 0.36, -0.66, 0.31, 0.36),
            box_mesh(0.02, 0.02, 0.36, 0.66, 0.31, 0.36)),
        "surfaces": [
            {"name": "top", "polygon": rect(-0.7, 0.7, -0.35, 0.35, 0.75)},
        ],
        "scene_scale": 1.0,
        "categories": 15,
        "objects": [2, 6],
        "camera": {"radius": [1.3, 1.8], "elevation_deg": [30, 60],
                   "azimuth_deg": [-140, -40], "target_jitter": 0.05,
                   "target": [0.0, 0.0, 0.75], "fov_y_deg": 50},
    },
    "tote": {
        "mesh": lambda: merge(
            box_mesh(0.3, 0.2, 0.005, 0, 0, 0.005),
            box_mesh(0.005, 0.2, 0.15, -0.305, 0, 0.15),
            box_mesh(0.005, 0.2, 0.15, 0.305, 0, 0.15),
            box_mesh(0.31, 0.005, 0.15, 0, -0.205, 0.15),
            box_mesh(0.31, 0.005, 0.15, 0, 0.205, 0.15)),
        "surfaces": [
            {"name": "floor", "polygon": rect(-0.3, 0.3, -0.2, 0.2, 0.01)},
        ],
        "scene_scale": 0.5,
        "categories": 15,
        "objects": [2, 5],
        "camera": {"radius": [0.9, 1.2], "elevation_deg": [55, 80],
                   "azimuth_deg": [-180, 180], "target_jitter": 0.03,
                   "target": [0.0, 0.0, 0.05], "fov_y_deg": 50},
    },
}

KINDS = ["box", "can", "bottle", "carton", "jar", "book", "cup", "tin", "block", "tube"]


def category_shape(rng, kind, size):
    """Returns (mesh, tall, flat_side) for a primitive of the given kind."""
    if kind in ("can", "bottle", "jar", "cup", "tin", "tube"):
        r = rng.uniform(0.025, 0.045) * size
        hh = {"can": 0.06, "bottle": 0.11, "jar": 0.05, "cup": 0.045,
              "tin": 0.03, "tube": 0.08}[kind] * size * rng.uniform(0.85, 1.15)
        return cylinder_mesh(r, hh), hh > r, False
    hx = rng.uniform(0.03, 0.07) * size
    hy = rng.uniform(0.02, 0.05) * size
    hz = {"box": 0.05, "carton": 0.09, "book": 0.1, "block": 0.035}[kind]
    hz *= size * rng.uniform(0.85, 1.15)
    return box_mesh(hx, hy, hz), True, True


def quat_about_x(angle):
    return [math.cos(angle / 2), math.sin(angle / 2), 0.0, 0.0]


def main():
    rng = random.Random(7)
    (ROOT / "objects").mkdir(exist_ok=True)
    (ROOT / "scenes").mkdir(exist_ok=True)
    (ROOT / "priors").mkdir(exist_ok=True)
    index = {"objects": [], "scenes": []}
    config = {
        "assets": "assets.json",
        "scene": "shelf",
        "count": 10,
        "seed": 0,
        "threads": 0,
        "k_threshold": "calibrate",
        "generation": {"attempts": 20000, "calibration_percentile": 20,
                       "pilot_size": 200, "drop_clearance": 0.005},
        "scenes": {},
    }
    for scene_name, spec in SCENES.items():
        write_obj(ROOT / "scenes" / (scene_name + ".obj"), spec["mesh"](), (0.55, 0.5, 0.45))
        index["scenes"].append({"name": scene_name,
                                "path": "scenes/%s.obj" % scene_name,
                                "scene_scale": spec["scene_scale"],
                                "surfaces": spec["surfaces"]})
        size = 0.7 if scene_name == "tote" else 1.0
        categories = {}
        names = []
        for c in range(spec["categories"]):
            kind = KINDS[c % len(KINDS)]
            name = "%s_%s_%02d" % (scene_name, kind, c)
            names.append(name)
            mesh, tall, flat_side = category_shape(rng, kind, size)
            kd = (rng.uniform(0.15, 0.95), rng.uniform(0.15, 0.95), rng.uniform(0.15, 0.95))
            path = "objects/%s.obj" % name
            write_obj(ROOT / path, mesh, kd)
            index["objects"].append({"id": name, "category": name, "path": path})
            keyposes = [{"quat": [1.0, 0.0, 0.0, 0.0], "prob": 0.8 if flat_side else 1.0}]
            if flat_side:
                keyposes.append({"quat": quat_about_x(math.pi / 2), "prob": 0.2})
            anchors = []
            surfaces = spec["surfaces"]
            for s in rng.sample(surfaces, min(len(surfaces), rng.randint(1, 2))):
                poly = s["polygon"]
                xs = [p[0] for p in poly]
                ys = [p[1] for p in poly]
                margin_x = 0.25 * (max(xs) - min(xs))
                margin_y = 0.25 * (max(ys) - min(ys))
                x = rng.uniform(min(xs) + margin_x, max(xs) - margin_x)
                y = rng.uniform(min(ys) + margin_y, max(ys) - margin_y)
                anchors.append({"xyz": [round(x, 4), round(y, 4), poly[0][2]],
                                "surface": s["name"],
                                "prob": round(rng.uniform(0.5, 1.0), 3)})
            categories[name] = {"keyposes": keyposes, "anchors": anchors}
        pairs = []
        order = names[:]
        rng.shuffle(order)
        for k in range(0, len(order) - 1, 3):
            pairs.append({"a": order[k], "b": order[k + 1],
                          "occ_prob": round(rng.uniform(0.55, 0.9), 3),
                          "sugg_dist_m": round(rng.uniform(0.12, 0.3) * size, 3)})
        for k in range(1, len(order) - 1, 5):
            if k % 3 == 0:
                continue
            pairs.append({"a": order[k], "b": order[k + 1],
                          "occ_prob": round(rng.uniform(0.05, 0.45), 3),
                          "sugg_dist_m": round(rng.uniform(0.1, 0.4) * size, 3)})
        priors = {"categories": categories, "pairs": pairs,
                  "config": {"sigma": 0.1, "gamma": 0.5, "k_threshold": "calibrate",
                             "pose_bandwidth": 0.002,
                             "seed": 0}}
        (ROOT / "priors" / (scene_name + ".json")).write_text(json.dumps(priors, indent=2) + "\n")
        config["scenes"][scene_name] = {
            "priors": "priors/%s.json" % scene_name,
            "camera": spec["camera"],
            "generation": {"min_objects": spec["objects"][0],
                           "max_objects": spec["objects"][1]},
        }
    (ROOT / "assets.json").write_text(json.dumps(index, indent=2) + "\n")
    (ROOT / "config.json").write_text(json.dumps(config, indent=2) + "\n")


if __name__ == "__main__":
    main()
