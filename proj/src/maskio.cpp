/* Copyright 2026 The Occlumark Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "occlumark/maskio.hpp"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <array>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>
#include <system_error>

#include "occlumark/error.hpp"

namespace occlumark {

namespace fs = std::filesystem;

Image::Image(int width, int height, int channels)
    : Image(width, height, channels,
            std::vector<std::uint8_t>(
                static_cast<std::size_t>(std::max(width, 0)) *
                static_cast<std::size_t>(std::max(height, 0)) *
                static_cast<std::size_t>(std::max(channels, 0)))) {}

Image::Image(int width, int height, int channels,
             std::vector<std::uint8_t> pixels)
    : width_(width),
      height_(height),
      channels_(channels),
      pixels_(std::move(pixels)) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kDomainError, "image dimensions must be >= 1");
  }
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::kDomainError, "image channels must be 1 or 3");
  }
  const std::size_t expected = static_cast<std::size_t>(width) * height *
                               static_cast<std::size_t>(channels);
  if (pixels_.size() != expected) {
    throw Error(ErrorCode::kDimensionMismatch,
                "pixel buffer has " + std::to_string(pixels_.size()) +
                    " samples, expected " + std::to_string(expected));
  }
}

BinaryMask::BinaryMask(int width, int height, bool fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kDomainError, "mask dimensions must be >= 1");
  }
  bits_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kDomainError, "mask dimensions must be >= 1");
  }
  if (bits_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::kDimensionMismatch, "mask buffer size mismatch");
  }
  for (auto& b : bits_) b = b != 0 ? 1 : 0;
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_for_read(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kFileNotFound, path.string());
  }
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw Error(ErrorCode::kFileNotFound, path.string());
  return f;
}

// Raw decoder output before channel policy is applied.
struct Decoded {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 (gray) or 3 (rgb), alpha already stripped
  int png_color_type = -1;
  int png_bit_depth = 0;
  std::vector<std::uint8_t> pixels;
};

void png_error_fn(png_structp png, png_const_charp msg) {
  auto* buf = static_cast<std::string*>(png_get_error_ptr(png));
  if (buf != nullptr) *buf = msg;
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

Decoded decode_png(std::FILE* f, const fs::path& path) {
  std::string message;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message,
                                           png_error_fn, png_warning_fn);
  if (png == nullptr) throw Error(ErrorCode::kDecodeError, "png_create_read");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCode::kDecodeError, "png_create_info");
  }

  // State touched after setjmp lives on the heap so the longjmp path never
  // reads an indeterminate automatic object.
  auto holder = std::make_unique<Decoded>();
  auto rows_holder = std::make_unique<std::vector<png_bytep>>();
  Decoded& out = *holder;
  std::vector<png_bytep>& rows = *rows_holder;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kDecodeError, path.string() + ": " + message);
  }

  png_init_io(png, f);
  png_read_info(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  out.png_color_type = color_type;
  out.png_bit_depth = bit_depth;

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (bit_depth == 16) png_set_strip_16(png);
  // tRNS would otherwise be expanded into an alpha channel; drop it.
  if (png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_tRNS_to_alpha(png);
  }
  png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = static_cast<int>(png_get_channels(png, info));
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  if (out.channels != 1 && out.channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kDecodeError,
                path.string() + ": unsupported channel layout");
  }
  out.pixels.resize(rowbytes * static_cast<std::size_t>(out.height));
  rows.resize(static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y) {
    rows[static_cast<std::size_t>(y)] =
        out.pixels.data() + rowbytes * static_cast<std::size_t>(y);
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return std::move(out);
}

struct JpegErrorMgr {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void jpeg_count_warnings(j_common_ptr cinfo, int msg_level) {
  if (msg_level < 0) ++cinfo->err->num_warnings;
}

Decoded decode_jpeg(std::FILE* f, const fs::path& path) {
  jpeg_decompress_struct cinfo{};
  JpegErrorMgr err{};
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  err.base.emit_message = jpeg_count_warnings;

  auto holder = std::make_unique<Decoded>();
  Decoded& out = *holder;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw Error(ErrorCode::kDecodeError,
                path.string() + ": " + std::string(err.message));
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, f);
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space =
      cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  out.width = static_cast<int>(cinfo.output_width);
  out.height = static_cast<int>(cinfo.output_height);
  out.channels = cinfo.output_components;
  const std::size_t stride =
      static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.channels);
  out.pixels.resize(stride * static_cast<std::size_t>(out.height));
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out.pixels.data() + stride * cinfo.output_scanline;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  // libjpeg only warns on premature end-of-data and pads the remainder.
  const long warnings = err.base.num_warnings;
  jpeg_destroy_decompress(&cinfo);
  if (warnings > 0) {
    throw Error(ErrorCode::kDecodeError,
                path.string() + ": corrupt or truncated JPEG data");
  }
  return std::move(out);
}

Decoded decode_file(const fs::path& path) {
  FilePtr f = open_for_read(path);
  std::array<unsigned char, 8> magic{};
  const std::size_t n = std::fread(magic.data(), 1, magic.size(), f.get());
  std::rewind(f.get());
  if (n >= 8 && png_sig_cmp(magic.data(), 0, 8) == 0) {
    return decode_png(f.get(), path);
  }
  if (n >= 3 && magic[0] == 0xFF && magic[1] == 0xD8 && magic[2] == 0xFF) {
    return decode_jpeg(f.get(), path);
  }
  throw Error(ErrorCode::kDecodeError, path.string() + ": not a PNG or JPEG");
}

void png_write_gray_or_rgb(const fs::path& path, int width, int height,
                           int channels, std::span<const std::uint8_t> data) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) {
      throw Error(ErrorCode::kIoError,
                  path.parent_path().string() + ": " + ec.message());
    }
  }
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw Error(ErrorCode::kIoError, path.string() + ": cannot open");

  std::string message;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message,
                                            png_error_fn, png_warning_fn);
  if (png == nullptr) throw Error(ErrorCode::kIoError, "png_create_write");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::kIoError, "png_create_info");
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIoError, path.string() + ": " + message);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), 8,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_ALL_FILTERS);
  png_write_info(png, info);
  const std::size_t stride =
      static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
  for (int y = 0; y < height; ++y) {
    rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(
        data.data() + stride * static_cast<std::size_t>(y));
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(f.get()) != 0 || std::ferror(f.get()) != 0) {
    throw Error(ErrorCode::kIoError, path.string() + ": write failed");
  }
}

}  // namespace

Image load_image(const fs::path& path) {
  Decoded d = decode_file(path);
  return Image(d.width, d.height, d.channels, std::move(d.pixels));
}

BinaryMask load_mask(const fs::path& path, int expected_width,
                     int expected_height) {
  Decoded d = decode_file(path);
  if (d.png_color_type != PNG_COLOR_TYPE_GRAY) {
    throw Error(ErrorCode::kDecodeError,
                path.string() + ": mask must be a single-channel PNG");
  }
  if (d.width != expected_width || d.height != expected_height) {
    throw Error(ErrorCode::kDimensionMismatch,
                path.string() + ": mask is " + std::to_string(d.width) + "x" +
                    std::to_string(d.height) + ", image is " +
                    std::to_string(expected_width) + "x" +
                    std::to_string(expected_height));
  }
  return BinaryMask(d.width, d.height, std::move(d.pixels));
}

std::size_t mask_area(const BinaryMask& mask) {
  return static_cast<std::size_t>(
      std::count(mask.bits().begin(), mask.bits().end(), std::uint8_t{1}));
}

Rect bounding_box(const BinaryMask& mask) {
  Rect r{mask.width(), mask.height(), -1, -1};
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      r.x0 = std::min(r.x0, x);
      r.y0 = std::min(r.y0, y);
      r.x1 = std::max(r.x1, x);
      r.y1 = std::max(r.y1, y);
    }
  }
  if (r.x1 < 0) throw Error(ErrorCode::kEmptyMask, "mask has no active pixel");
  return r;
}

void write_image(const Image& image, const fs::path& path) {
  png_write_gray_or_rgb(path, image.width(), image.height(), image.channels(),
                        image.pixels());
}

void write_mask(const BinaryMask& mask, const fs::path& path) {
  std::vector<std::uint8_t> gray(mask.bits().begin(), mask.bits().end());
  for (auto& v : gray) v = v != 0 ? 255 : 0;
  png_write_gray_or_rgb(path, mask.width(), mask.height(), 1, gray);
}

}  // namespace occlumark
