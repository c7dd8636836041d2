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


#include "scenesynth/arch.h"

#include <charconv>
#include <regex>

#include "scenesynth/error.h"

namespace scenesynth {

namespace {

int to_int(const std::string& s, std::string_view token) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 1) {
    fail(ErrorKind::kParse, "bad number in token '" + std::string(token) + "'");
  }
  return v;
}

ConvLayer parse_token(std::string_view token) {
  static const std::regex conv(R"(^(\d+)n(\d+)s(\d+)(ReLU|LReLU|Tanh|Sigmoid)?$)");
  static const std::regex residual(R"(^R(\d+)$)");
  static const std::regex up(R"(^up(\d+)$)");
  static const std::regex down(R"(^down(\d+)$)");
  const std::string t(token);
  std::smatch m;
  ConvLayer layer;
  if (std::regex_match(t, m, conv)) {
    layer.kernel = to_int(m[1], token);
    layer.out_channels = to_int(m[2], token);
    layer.stride = to_int(m[3], token);
    layer.activation = m[4].matched ? m[4].str() : "";
    if (layer.activation == "LReLU") layer.leaky_slope = 0.2;
  } else if (std::regex_match(t, m, residual)) {
    layer.kind = LayerKind::kResidualPair;
    layer.out_channels = to_int(m[1], token);
    layer.activation = "ReLU";
  } else if (std::regex_match(t, m, up)) {
    layer.kind = LayerKind::kUpsampleConv;
    layer.out_channels = to_int(m[1], token);
    layer.activation = "ReLU";
  } else if (std::regex_match(t, m, down)) {
    layer.out_channels = to_int(m[1], token);
    layer.stride = 2;
    layer.activation = "LReLU";
    layer.leaky_slope = 0.2;
    layer.down_notation = true;
  } else {
    fail(ErrorKind::kParse, "unknown layer token '" + t + "'");
  }
  layer.padding = layer.kernel / 2;
  return layer;
}

std::string token_of(const ConvLayer& l) {
  switch (l.kind) {
    case LayerKind::kResidualPair:
      return "R" + std::to_string(l.out_channels);
    case LayerKind::kUpsampleConv:
      return "up" + std::to_string(l.out_channels);
    case LayerKind::kConv:
      break;
  }
  if (l.down_notation) return "down" + std::to_string(l.out_channels);
  return std::to_string(l.kernel) + "n" + std::to_string(l.out_channels) + "s" +
         std::to_string(l.stride) + l.activation;
}

int conv_out(int in, const ConvLayer& l) {
  return (in + 2 * l.padding - l.kernel) / l.stride + 1;
}

}  // namespace

ConvSpec parse_arch(std::string_view spec) {
  ConvSpec out;
  if (spec.empty()) fail(ErrorKind::kParse, "empty architecture string");
  size_t start = 0;
  while (start <= spec.size()) {
    const size_t end = std::min(spec.find('-', start), spec.size());
    const std::string_view token = spec.substr(start, end - start);
    if (token.empty()) fail(ErrorKind::kParse, "empty layer token");
    out.layers.push_back(parse_token(token));
    start = end + 1;
  }
  return out;
}

std::string to_string(const ConvSpec& spec) {
  std::string out;
  for (const ConvLayer& l : spec.layers) {
    if (!out.empty()) out += '-';
    out += token_of(l);
  }
  return out;
}

std::vector<LayerShape> shape_trace(const ConvSpec& spec, int height,
                                    int width, int channels) {
  if (height < 1 || width < 1 || channels < 1) {
    fail(ErrorKind::kValidation, "input shape must be positive");
  }
  std::vector<LayerShape> out;
  for (const ConvLayer& l : spec.layers) {
    switch (l.kind) {
      case LayerKind::kConv:
        height = conv_out(height, l);
        width = conv_out(width, l);
        break;
      case LayerKind::kResidualPair:
        break;
      case LayerKind::kUpsampleConv:
        height *= 2;
        width *= 2;
        break;
    }
    channels = l.out_channels;
    if (height < 1 || width < 1) {
      fail(ErrorKind::kValidation,
           "non-positive dimension after layer " + token_of(l));
    }
    out.push_back({token_of(l), height, width, channels});
  }
  return out;
}

int receptive_field(const ConvSpec& spec) {
  long rf = 1;
  long jump = 1;
  for (const ConvLayer& l : spec.layers) {
    switch (l.kind) {
      case LayerKind::kUpsampleConv:
        fail(ErrorKind::kValidation,
             "receptive field is undefined for upsampling layers");
      case LayerKind::kResidualPair:
        rf += 2 * (3 - 1) * jump;
        break;
      case LayerKind::kConv:
        rf += (l.kernel - 1) * jump;
        jump *= l.stride;
        break;
    }
  }
  return static_cast<int>(rf);
}

}  // namespace scenesynth
