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

#include "scenesynth/image_io.h"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <memory>
#include <string>

#include "scenesynth/error.h"

namespace scenesynth {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr file(std::fopen(path.c_str(), mode));
  if (!file) {
    fail(ErrorKind::kIo, "cannot open " + path.string());
  }
  return file;
}

int color_type_for(int channels) {
  switch (channels) {
    case 1:
      return PNG_COLOR_TYPE_GRAY;
    case 3:
      return PNG_COLOR_TYPE_RGB;
    case 4:
      return PNG_COLOR_TYPE_RGBA;
    default:
      fail(ErrorKind::kValidation,
           "unsupported channel count " + std::to_string(channels));
  }
}

// libpng reports errors through longjmp; everything touched after setjmp
// lives in the caller's frame and is trivially destructible.
void write_rows(const std::filesystem::path& path, int width, int height,
                int bit_depth, int color_type,
                const std::vector<png_bytep>& rows) {
  FilePtr file = open_file(path, "wb");
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorKind::kIo, "png allocation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorKind::kIo, "png write failed: " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) {
    fail(ErrorKind::kIo, "flush failed: " + path.string());
  }
}

struct Decoded {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<uint8_t> bytes;  // native-endian for 16-bit
};

Decoded read_any(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  png_byte header[8];
  if (std::fread(header, 1, 8, file.get()) != 8 || png_sig_cmp(header, 0, 8)) {
    fail(ErrorKind::kParse, "not a PNG file: " + path.string());
  }
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorKind::kIo, "png allocation failed");
  }
  Decoded out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorKind::kParse, "corrupt PNG: " + path.string());
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const int color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (png_get_bit_depth(png, info) < 8) png_set_expand(png);
  if (png_get_bit_depth(png, info) == 16) png_set_swap(png);
  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const size_t rowbytes = png_get_rowbytes(png, info);
  out.bytes.resize(rowbytes * out.height);
  std::vector<png_bytep> rows(out.height);
  for (int y = 0; y < out.height; ++y) rows[y] = out.bytes.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

}  // namespace

void write_png(const std::filesystem::path& path, const Image8& image) {
  const int color_type = color_type_for(image.channels);
  if (image.data.size() !=
      static_cast<size_t>(image.width) * image.height * image.channels) {
    fail(ErrorKind::kValidation, "image buffer size mismatch");
  }
  std::vector<png_bytep> rows(image.height);
  for (int y = 0; y < image.height; ++y) {
    rows[y] = const_cast<png_bytep>(image.data.data()) +
              static_cast<size_t>(y) * image.width * image.channels;
  }
  write_rows(path, image.width, image.height, 8, color_type, rows);
}

void write_png(const std::filesystem::path& path, const Image16& image) {
  if (image.channels != 1) {
    fail(ErrorKind::kValidation, "16-bit PNG must be single channel");
  }
  std::vector<png_bytep> rows(image.height);
  for (int y = 0; y < image.height; ++y) {
    rows[y] = reinterpret_cast<png_bytep>(const_cast<uint16_t*>(
        image.data.data() + static_cast<size_t>(y) * image.width));
  }
  write_rows(path, image.width, image.height, 16, PNG_COLOR_TYPE_GRAY, rows);
}

Image8 read_png8(const std::filesystem::path& path) {
  Decoded d = read_any(path);
  if (d.bit_depth != 8) {
    fail(ErrorKind::kParse, "expected 8-bit PNG: " + path.string());
  }
  Image8 image;
  image.width = d.width;
  image.height = d.height;
  image.channels = d.channels;
  image.data = std::move(d.bytes);
  return image;
}

Image16 read_png16(const std::filesystem::path& path) {
  Decoded d = read_any(path);
  if (d.bit_depth != 16 || d.channels != 1) {
    fail(ErrorKind::kParse, "expected 16-bit grayscale PNG: " + path.string());
  }
  Image16 image(d.width, d.height, 1);
  std::memcpy(image.data.data(), d.bytes.data(), d.bytes.size());
  return image;
}

}  // namespace scenesynth
