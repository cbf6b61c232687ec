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

#include <gtest/gtest.h>

#include <cmath>

#include "occlumark/error.hpp"
#include "occlumark/seeding.hpp"
#include "support/oracles.hpp"

namespace occlumark {
namespace {

constexpr OcclusionLevel kLevels[] = {OcclusionLevel::k25, OcclusionLevel::k50,
                                      OcclusionLevel::k75};

GridSpec spec_of(int d, OcclusionLevel level, int dx = 0, int dy = 0) {
  GridSpec s;
  s.unit_side = d;
  s.level = level;
  s.offset_x = dx;
  s.offset_y = dy;
  return s;
}

TEST(KeepRatio, Examples) {
  EXPECT_DOUBLE_EQ(keep_ratio(0.0), 0.0);
  EXPECT_DOUBLE_EQ(keep_ratio(1.0), 1.0);
  EXPECT_DOUBLE_EQ(keep_ratio(0.5), 0.75);
  EXPECT_THROW(keep_ratio(-0.01), Error);
  EXPECT_THROW(keep_ratio(1.01), Error);
  EXPECT_THROW(keep_ratio(std::nan("")), Error);
}

TEST(DroppedSquareSide, Examples) {
  EXPECT_EQ(dropped_square_side(0.5, 32), 16);
  EXPECT_EQ(dropped_square_side(0.0, 32), 0);
  EXPECT_EQ(dropped_square_side(1.0, 7), 7);
  EXPECT_EQ(dropped_square_side(0.3, 10), 3);
  EXPECT_THROW(dropped_square_side(0.5, 0), Error);
}

TEST(UnitSide, Examples) {
  EXPECT_EQ(unit_side(224, 224, 2), 112);
  EXPECT_EQ(unit_side(224, 224, 5), 44);
  EXPECT_EQ(unit_side(224, 224, 9), 24);
  EXPECT_EQ(unit_side(100, 60, 5), 12);
  try {
    unit_side(10, 10, 9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooManyGrids);
  }
  EXPECT_THROW(unit_side(10, 10, 0), Error);
}

TEST(Coverage, Examples) {
  EXPECT_DOUBLE_EQ(coverage(BinaryMask(3, 3)), 0.0);
  EXPECT_DOUBLE_EQ(coverage(BinaryMask(3, 3, true)), 1.0);
  BinaryMask m(2, 2);
  m.set(1, 0, true);
  EXPECT_DOUBLE_EQ(coverage(m), 0.25);
}

TEST(PatternMask, ExactOnEvenTiling224) {
  EXPECT_EQ(coverage(pattern_mask(224, 224, spec_of(112, OcclusionLevel::k25))), 0.25);
  EXPECT_EQ(coverage(pattern_mask(224, 224, spec_of(112, OcclusionLevel::k50))), 0.50);
  EXPECT_EQ(coverage(pattern_mask(224, 224, spec_of(112, OcclusionLevel::k75))), 0.75);
}

TEST(PatternMask, ExactWheneverFrameDividesByUnit) {
  for (int d = 2; d <= 40; d += 2) {
    for (const auto level : kLevels) {
      const BinaryMask m = pattern_mask(3 * d, 2 * d, spec_of(d, level));
      EXPECT_EQ(coverage(m), target_fraction(level)) << "d=" << d;
    }
  }
}

TEST(PatternMask, MatchesPerPixelOracle) {
  SplitMix64 rng(21);
  for (int i = 0; i < 60; ++i) {
    const int d = 2 + static_cast<int>(rng.below(30));
    const int w = d + static_cast<int>(rng.below(60));
    const int h = d + static_cast<int>(rng.below(60));
    const auto level = kLevels[rng.below(3)];
    const int dx = static_cast<int>(rng.below(d));
    const int dy = static_cast<int>(rng.below(d));
    const BinaryMask m = pattern_mask(w, h, spec_of(d, level, dx, dy));
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        ASSERT_EQ(m.at(x, y), testing::oracle_pattern_bit(x + dx, y + dy, d, level))
            << "d=" << d << " at " << x << "," << y;
      }
    }
  }
}

TEST(PatternMask, OddUnitSplitsCeilThenFloor) {
  // d = 5: first subcell 3 px, second 2 px.
  const BinaryMask m = pattern_mask(5, 5, spec_of(5, OcclusionLevel::k25));
  EXPECT_EQ(mask_area(m), 9u);
  EXPECT_TRUE(m.at(2, 2));
  EXPECT_FALSE(m.at(3, 0));
}

TEST(PatternMask, BoundaryClippingBound) {
  SplitMix64 rng(33);
  for (int i = 0; i < 200; ++i) {
    const int d = 2 + static_cast<int>(rng.below(30));
    const int w = 4 * d + static_cast<int>(rng.below(3 * d));
    const int h = 4 * d + static_cast<int>(rng.below(3 * d));
    const auto level = kLevels[rng.below(3)];
    const int dx = static_cast<int>(rng.below(d));
    const int dy = static_cast<int>(rng.below(d));
    const double cov = coverage(pattern_mask(w, h, spec_of(d, level, dx, dy)));
    const double bound = 2.0 * d * (w + h) / (static_cast<double>(w) * h);
    EXPECT_LE(std::abs(cov - target_fraction(level)), bound)
        << "d=" << d << " " << w << "x" << h;
  }
}

TEST(PatternMask, ShiftEquivariance) {
  SplitMix64 rng(44);
  for (int i = 0; i < 50; ++i) {
    const int d = 2 + static_cast<int>(rng.below(20));
    const int w = 2 * d + static_cast<int>(rng.below(40));
    const int h = 2 * d + static_cast<int>(rng.below(40));
    const auto level = kLevels[rng.below(3)];
    const int dx = static_cast<int>(rng.below(d));
    const int dy = static_cast<int>(rng.below(d));
    const BinaryMask shifted = pattern_mask(w, h, spec_of(d, level, dx, dy));
    const BinaryMask base = pattern_mask(w + d, h + d, spec_of(d, level));
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        ASSERT_EQ(shifted.at(x, y), base.at(x + dx, y + dy));
      }
    }
  }
}

TEST(PatternMask, LevelsAreNested) {
  SplitMix64 rng(55);
  for (int i = 0; i < 100; ++i) {
    const int d = 2 + static_cast<int>(rng.below(30));
    const int w = d + static_cast<int>(rng.below(50));
    const int h = d + static_cast<int>(rng.below(50));
    const int dx = static_cast<int>(rng.below(d));
    const int dy = static_cast<int>(rng.below(d));
    const auto m25 = pattern_mask(w, h, spec_of(d, OcclusionLevel::k25, dx, dy));
    const auto m50 = pattern_mask(w, h, spec_of(d, OcclusionLevel::k50, dx, dy));
    const auto m75 = pattern_mask(w, h, spec_of(d, OcclusionLevel::k75, dx, dy));
    for (std::size_t p = 0; p < m25.size(); ++p) {
      ASSERT_LE(m25.bits()[p], m50.bits()[p]);
      ASSERT_LE(m50.bits()[p], m75.bits()[p]);
    }
  }
}

TEST(PatternMask, QuarterPatternIsGridMaskWithHalfEdge) {
  // The 25% pattern is the classic GridMask unit with keep ratio 0.75.
  for (int d = 2; d <= 64; d += 2) {
    const BinaryMask ours = pattern_mask(4 * d, 4 * d, spec_of(d, OcclusionLevel::k25));
    EXPECT_EQ(ours, testing::oracle_gridmask_drop(4 * d, 4 * d, d, 0.5));
    EXPECT_DOUBLE_EQ(keep_ratio(0.5) + coverage(ours), 1.0);
  }
}

TEST(PatternMask, KeepAndDropAreComplementary) {
  for (int d = 4; d <= 40; d += 4) {
    for (int num = 0; num <= 4; ++num) {
      const double r = num / 4.0;
      const BinaryMask drop = testing::oracle_gridmask_drop(3 * d, 2 * d, d, r);
      EXPECT_NEAR(keep_ratio(r) + coverage(drop), 1.0, 1e-12) << d << " " << r;
    }
  }
}

TEST(PatternMask, SpecErrors) {
  EXPECT_THROW(pattern_mask(10, 10, spec_of(1, OcclusionLevel::k25)), Error);
  EXPECT_THROW(pattern_mask(10, 10, spec_of(12, OcclusionLevel::k25)), Error);
  EXPECT_THROW(pattern_mask(10, 10, spec_of(4, OcclusionLevel::k25, 4, 0)), Error);
  EXPECT_THROW(pattern_mask(10, 10, spec_of(4, OcclusionLevel::k25, 0, -1)), Error);
}

TEST(OcclusionLevel, PercentConversions) {
  EXPECT_EQ(level_from_percent(50), OcclusionLevel::k50);
  EXPECT_EQ(target_percent(OcclusionLevel::k75), 75);
  EXPECT_THROW(level_from_percent(30), Error);
}

}  // namespace
}  // namespace occlumark
