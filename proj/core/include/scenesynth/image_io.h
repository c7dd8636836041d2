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

#ifndef SCENESYNTH_IMAGE_IO_H_
#define SCENESYNTH_IMAGE_IO_H_

#include <cstdint>
#include <filesystem>
#include <vector>

namespace scenesynth {

// Interleaved row-major image.
template <typename T>
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<T> data;

  Image() = default;
  Image(int w, int h, int c, T fill = T{})
      : width(w), height(h), channels(c),
        data(static_cast<size_t>(w) * h * c, fill) {}

  T& at(int x, int y, int c = 0) {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  const T& at(int x, int y, int c = 0) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  bool operator==(const Image&) const = default;
};

using Image8 = Image<uint8_t>;
using Image16 = Image<uint16_t>;

// PNG codecs. 8-bit images may have 1, 3 or 4 channels; 16-bit images are
// single channel. Files are written without timestamps so output is
// byte-stable.
void write_png(const std::filesystem::path& path, const Image8& image);
void write_png(const std::filesystem::path& path, const Image16& image);
Image8 read_png8(const std::filesystem::path& path);
Image16 read_png16(const std::filesystem::path& path);

}  // namespace scenesynth

#endif  // SCENESYNTH_IMAGE_IO_H_
