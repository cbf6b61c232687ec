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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace occlumark {

// H x W x C raster of 8-bit samples, row-major, channels interleaved.
class Image {
 public:
  Image() = default;
  // Zero-filled image. Throws DomainError unless width, height >= 1 and
  // channels is 1 or 3.
  Image(int width, int height, int channels);
  Image(int width, int height, int channels, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  std::uint8_t at(int x, int y, int c) const {
    return pixels_[index(x, y, c)];
  }
  std::uint8_t& at(int x, int y, int c) { return pixels_[index(x, y, c)]; }

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> pixels_;
};

// H x W raster of 0/1 values. Bits are stored one per byte so masks can be
// combined with plain loops and handed out as spans.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false);
  // Any nonzero input byte becomes 1.
  BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return bits_.size(); }

  bool at(int x, int y) const noexcept {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool v) noexcept {
    bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0;
  }

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  bool same_shape(const BinaryMask& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  bool operator==(const BinaryMask&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Inclusive pixel rectangle.
struct Rect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const noexcept { return x1 - x0 + 1; }
  int height() const noexcept { return y1 - y0 + 1; }
  bool contains(int x, int y) const noexcept {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }
  bool operator==(const Rect&) const = default;
};

// Decodes a PNG or JPEG file. Gray (with or without alpha) decodes to one
// channel, everything else to three; alpha is dropped and 16-bit samples are
// reduced to 8 bits.
Image load_image(const std::filesystem::path& path);

// Decodes an 8-bit single-channel PNG of exactly expected_width x
// expected_height. An all-zero mask is returned as-is.
BinaryMask load_mask(const std::filesystem::path& path, int expected_width,
                     int expected_height);

std::size_t mask_area(const BinaryMask& mask);

// Tightest rectangle around the active pixels. Throws EmptyMask.
Rect bounding_box(const BinaryMask& mask);

// Lossless PNG. Parent directories are created as needed. The encoder
// settings are fixed so identical images always produce identical bytes.
void write_image(const Image& image, const std::filesystem::path& path);

// Writes the mask as an 8-bit gray PNG with active pixels set to 255.
void write_mask(const BinaryMask& mask, const std::filesystem::path& path);

}  // namespace occlumark
