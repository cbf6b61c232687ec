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

#include "occlumark/composer.hpp"

#include <string>
#include <vector>

#include "occlumark/error.hpp"

namespace occlumark {

namespace {

void require_same_shape(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                    " vs " + std::to_string(b.width()) + "x" +
                    std::to_string(b.height()));
  }
}

}  // namespace

std::string_view to_string(PlacementMode mode) noexcept {
  return mode == PlacementMode::kInside ? "inside" : "outside";
}

BinaryMask intersect(const BinaryMask& grid, const BinaryMask& object) {
  require_same_shape(grid, object);
  std::vector<std::uint8_t> out(grid.size());
  const auto g = grid.bits();
  const auto o = object.bits();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = g[i] & o[i];
  return BinaryMask(grid.width(), grid.height(), std::move(out));
}

BinaryMask bbox_complement(const BinaryMask& object) {
  const Rect box = bounding_box(object);
  BinaryMask out(object.width(), object.height());
  for (int y = box.y0; y <= box.y1; ++y) {
    for (int x = box.x0; x <= box.x1; ++x) {
      if (!object.at(x, y)) out.set(x, y, true);
    }
  }
  return out;
}

BinaryMask outside_grid(const BinaryMask& grid, const BinaryMask& object) {
  require_same_shape(grid, object);
  return intersect(grid, bbox_complement(object));
}

double occlusion_ratio(const BinaryMask& effective,
                       const BinaryMask& reference) {
  require_same_shape(effective, reference);
  const std::size_t denom = mask_area(reference);
  if (denom == 0) {
    throw Error(ErrorCode::kEmptyMask, "occlusion reference region is empty");
  }
  return static_cast<double>(mask_area(intersect(effective, reference))) /
         static_cast<double>(denom);
}

Image apply_occlusion(const Image& image, const BinaryMask& effective,
                      std::uint8_t fill, bool invert) {
  if (image.width() != effective.width() ||
      image.height() != effective.height()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "mask does not match image dimensions");
  }
  Image out = image;
  const auto bits = effective.bits();
  auto px = out.pixels();
  const auto channels = static_cast<std::size_t>(image.channels());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const bool replace = (bits[i] != 0) != invert;
    if (!replace) continue;
    for (std::size_t c = 0; c < channels; ++c) px[i * channels + c] = fill;
  }
  return out;
}

OcclusionResult compose_variant(const Image& image, const BinaryMask& object,
                                const GridSpec& spec, PlacementMode mode,
                                std::uint8_t fill, bool invert) {
  if (image.width() != object.width() || image.height() != object.height()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "object mask does not match image dimensions");
  }
  if (mask_area(object) == 0) {
    throw Error(ErrorCode::kEmptyMask, "object mask has no active pixel");
  }
  const BinaryMask grid = pattern_mask(image.width(), image.height(), spec);

  OcclusionResult result;
  result.mode = mode;
  if (mode == PlacementMode::kInside) {
    result.effective_mask = intersect(grid, object);
    result.measured_ratio = occlusion_ratio(result.effective_mask, object);
  } else {
    const BinaryMask reference = bbox_complement(object);
    result.effective_mask = intersect(grid, reference);
    result.measured_ratio = occlusion_ratio(result.effective_mask, reference);
  }
  result.occluded_image =
      apply_occlusion(image, result.effective_mask, fill, invert);
  return result;
}

}  // namespace occlumark
