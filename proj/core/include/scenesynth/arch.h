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


#ifndef SCENESYNTH_ARCH_H_
#define SCENESYNTH_ARCH_H_

#include <string>
#include <string_view>
#include <vector>

namespace scenesynth {

// Token grammar, '-' separated:
//   {k}n{c}s{s}{Act}  k x k conv, c filters, stride s, optional activation
//   R{c}              residual block of two 3x3 stride-1 convs
//   up{c}             2x bilinear upsample, then 3x3 stride-1 conv + ReLU
//   down{c}           3x3 stride-2 conv + LeakyReLU(0.2)
enum class LayerKind { kConv, kResidualPair, kUpsampleConv };

struct ConvLayer {
  LayerKind kind = LayerKind::kConv;
  int kernel = 3;
  int stride = 1;
  int padding = 1;  // floor(kernel / 2)
  int out_channels = 1;
  std::string activation;  // "", ReLU, LReLU, Tanh, Sigmoid
  double leaky_slope = 0.0;
  bool down_notation = false;  // spelled downk

  bool operator==(const ConvLayer&) const = default;
};

struct ConvSpec {
  std::vector<ConvLayer> layers;
  bool operator==(const ConvSpec&) const = default;
};

inline constexpr std::string_view kColorPathArch =
    "7n3s1ReLU-3n64s2ReLU-3n128s2ReLU-R256-R256-R256-R256-R256-R256-up512-up256";
inline constexpr std::string_view kGeometryPathArch =
    "7n3s1ReLU-3n64s2ReLU-3n128s2ReLU-R256-R256-R256-R256-R256-R256-up256-up128";
inline constexpr std::string_view kPredictorArch =
    "down64-down128-down256-down512-down512-down512-up1024-up1024-up1024-"
    "up512-up256-up128";
// 70 x 70 PatchGAN.
inline constexpr std::string_view kDiscriminatorArch =
    "4n64s2LReLU-4n128s2LReLU-4n256s2LReLU-4n512s1LReLU-4n1s1";

// Throws Error(kParse) on unknown tokens.
ConvSpec parse_arch(std::string_view spec);
std::string to_string(const ConvSpec& spec);

struct LayerShape {
  std::string token;
  int height = 0;
  int width = 0;
  int channels = 0;
};

// Output shape after each layer; throws Error(kValidation) when a dimension
// becomes non-positive.
std::vector<LayerShape> shape_trace(const ConvSpec& spec, int height,
                                    int width, int channels);

// RF <- RF + (k - 1) * product of earlier strides. Throws
// Error(kValidation) for specs containing upsampling.
int receptive_field(const ConvSpec& spec);

}  // namespace scenesynth

#endif  // SCENESYNTH_ARCH_H_
