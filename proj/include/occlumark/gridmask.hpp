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

#include <string_view>

#include "occlumark/maskio.hpp"

namespace occlumark {

// The three occlusion patterns a unit can carry. Each unit is a 2x2 window
// of subcells; the level names the fraction of subcells that are dropped.
enum class OcclusionLevel {
  k25,  // subcell (0,0): the plain GridMask square
  k50,  // subcells (0,0) and (1,1): checkerboard
  k75,  // subcells (0,0), (1,1) and (0,1): checkerboard plus one overlap
};

double target_fraction(OcclusionLevel level) noexcept;
// 25, 50 or 75.
int target_percent(OcclusionLevel level) noexcept;
// Accepts 25/50/75. Throws ConfigError otherwise.
OcclusionLevel level_from_percent(int percent);

// Geometry of one full-frame grid pattern. Units are square with side
// unit_side; the tiling starts at (-offset_x, -offset_y).
struct GridSpec {
  int n_grids = 2;
  OcclusionLevel level = OcclusionLevel::k25;
  int unit_side = 2;
  int offset_x = 0;
  int offset_y = 0;

  // Throws SpecError when unit_side < 2 or an offset is outside
  // [0, unit_side - 1].
  void validate() const;
};

// GridMask keep ratio k = 1 - (1 - r)^2 = 2r - r^2 for the kept-edge ratio r.
// Throws DomainError unless 0 <= r <= 1.
double keep_ratio(double r);

// Side of the dropped square, l = round(r * d), clamped to [0, d].
int dropped_square_side(double r, int d);

// floor(min(width, height) / n_grids). Throws TooManyGrids unless
// n_grids >= 1 and min(width, height) >= 2 * n_grids.
int unit_side(int width, int height, int n_grids);

// Side of the first subcell along one axis of a unit of side d; the second
// subcell gets the remaining d - ceil(d/2) pixels.
constexpr int first_subcell_side(int d) noexcept { return (d + 1) / 2; }

// Active bits mark occluded pixels. Throws SpecError when the GridSpec is
// invalid or the unit does not fit in the frame.
BinaryMask pattern_mask(int width, int height, const GridSpec& spec);

// Fraction of active pixels.
double coverage(const BinaryMask& mask);

}  // namespace occlumark
