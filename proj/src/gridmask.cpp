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

#include "occlumark/gridmask.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "occlumark/error.hpp"

namespace occlumark {

double target_fraction(OcclusionLevel level) noexcept {
  switch (level) {
    case OcclusionLevel::k25: return 0.25;
    case OcclusionLevel::k50: return 0.50;
    case OcclusionLevel::k75: return 0.75;
  }
  return 0.0;
}

int target_percent(OcclusionLevel level) noexcept {
  switch (level) {
    case OcclusionLevel::k25: return 25;
    case OcclusionLevel::k50: return 50;
    case OcclusionLevel::k75: return 75;
  }
  return 0;
}

OcclusionLevel level_from_percent(int percent) {
  switch (percent) {
    case 25: return OcclusionLevel::k25;
    case 50: return OcclusionLevel::k50;
    case 75: return OcclusionLevel::k75;
    default:
      throw Error(ErrorCode::kConfigError,
                  "occlusion ratio must be 25, 50 or 75, got " +
                      std::to_string(percent));
  }
}

void GridSpec::validate() const {
  if (unit_side < 2) {
    throw Error(ErrorCode::kSpecError, "unit side must be >= 2");
  }
  if (offset_x < 0 || offset_x >= unit_side || offset_y < 0 ||
      offset_y >= unit_side) {
    throw Error(ErrorCode::kSpecError,
                "offsets must lie in [0, " + std::to_string(unit_side - 1) +
                    "]");
  }
}

double keep_ratio(double r) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw Error(ErrorCode::kDomainError, "r must lie in [0, 1]");
  }
  return 2.0 * r - r * r;
}

int dropped_square_side(double r, int d) {
  if (!(r >= 0.0 && r <= 1.0) || d < 1) {
    throw Error(ErrorCode::kDomainError, "need 0 <= r <= 1 and d >= 1");
  }
  const long l = std::lround(r * d);
  return static_cast<int>(std::clamp<long>(l, 0, d));
}

int unit_side(int width, int height, int n_grids) {
  const int shorter = std::min(width, height);
  if (n_grids < 1 || shorter < 2 * n_grids) {
    throw Error(ErrorCode::kTooManyGrids,
                std::to_string(n_grids) + " grids do not fit a " +
                    std::to_string(width) + "x" + std::to_string(height) +
                    " frame");
  }
  return shorter / n_grids;
}

BinaryMask pattern_mask(int width, int height, const GridSpec& spec) {
  spec.validate();
  if (width < spec.unit_side || height < spec.unit_side) {
    throw Error(ErrorCode::kSpecError, "unit of side " +
                                           std::to_string(spec.unit_side) +
                                           " exceeds the frame");
  }
  const int d = spec.unit_side;
  const int half = first_subcell_side(d);

  // Subcell index (0 or 1) of every column and row.
  std::vector<std::uint8_t> col(static_cast<std::size_t>(width));
  std::vector<std::uint8_t> row(static_cast<std::size_t>(height));
  for (int x = 0; x < width; ++x) {
    col[static_cast<std::size_t>(x)] = (x + spec.offset_x) % d >= half;
  }
  for (int y = 0; y < height; ++y) {
    row[static_cast<std::size_t>(y)] = (y + spec.offset_y) % d >= half;
  }

  BinaryMask mask(width, height);
  for (int y = 0; y < height; ++y) {
    const int sr = row[static_cast<std::size_t>(y)];
    for (int x = 0; x < width; ++x) {
      const int sc = col[static_cast<std::size_t>(x)];
      bool active = false;
      switch (spec.level) {
        case OcclusionLevel::k25:
          active = sr == 0 && sc == 0;
          break;
        case OcclusionLevel::k50:
          active = sr == sc;
          break;
        case OcclusionLevel::k75:
          active = sr == sc || (sr == 0 && sc == 1);
          break;
      }
      if (active) mask.set(x, y, true);
    }
  }
  return mask;
}

double coverage(const BinaryMask& mask) {
  if (mask.size() == 0) return 0.0;
  return static_cast<double>(mask_area(mask)) /
         static_cast<double>(mask.size());
}

}  // namespace occlumark
