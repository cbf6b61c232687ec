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

#include <cstdint>
#include <string_view>

#include "occlumark/gridmask.hpp"
#include "occlumark/maskio.hpp"

namespace occlumark {

enum class PlacementMode {
  kInside,        // grid restricted to the object pixels
  kOutsideEdges,  // grid restricted to bbox(object) minus the object
};

std::string_view to_string(PlacementMode mode) noexcept;

struct OcclusionResult {
  Image occluded_image;
  BinaryMask effective_mask;
  double measured_ratio = 0.0;
  PlacementMode mode = PlacementMode::kInside;
};

// Bitwise AND. Throws DimensionMismatch.
BinaryMask intersect(const BinaryMask& grid, const BinaryMask& object);

// grid AND bbox(object) AND NOT object. Throws EmptyMask, DimensionMismatch.
BinaryMask outside_grid(const BinaryMask& grid, const BinaryMask& object);

// bbox(object) AND NOT object: the reference region for outside placement.
BinaryMask bbox_complement(const BinaryMask& object);

// |effective AND reference| / |reference|. Throws EmptyMask on an empty
// reference.
double occlusion_ratio(const BinaryMask& effective,
                       const BinaryMask& reference);

// Pixels under an active bit take `fill` on every channel. With `invert`
// the roles swap: only pixels under active bits survive and the rest take
// `fill`, i.e. the image multiplied by the effective mask.
Image apply_occlusion(const Image& image, const BinaryMask& effective,
                      std::uint8_t fill, bool invert = false);

// pattern_mask -> intersect | outside_grid -> occlusion_ratio ->
// apply_occlusion. Throws EmptyMask when the object (or, in outside mode,
// the bbox complement) is empty.
OcclusionResult compose_variant(const Image& image, const BinaryMask& object,
                                const GridSpec& spec, PlacementMode mode,
                                std::uint8_t fill, bool invert = false);

}  // namespace occlumark
