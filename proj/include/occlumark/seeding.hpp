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
#include <span>
#include <string_view>

namespace occlumark {

inline constexpr std::uint64_t kFnv64OffsetBasis = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnv64Prime = 1099511628211ULL;

// 64-bit FNV-1a, optionally continuing from a previous hash state.
constexpr std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes,
                                std::uint64_t state = kFnv64OffsetBasis) {
  for (const std::uint8_t b : bytes) {
    state ^= b;
    state *= kFnv64Prime;
  }
  return state;
}

std::uint64_t fnv1a64(std::string_view text,
                      std::uint64_t state = kFnv64OffsetBasis);

// Vigna's splitmix64. Every draw advances the state by the golden gamma
// before mixing.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // next() mod bound. bound must be >= 1.
  constexpr std::uint64_t below(std::uint64_t bound) noexcept {
    return next() % bound;
  }

  constexpr std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

// FNV-1a over: global_seed as 8 little-endian bytes, the relpath bytes, one
// 0x00 separator, the variant id bytes.
std::uint64_t derive_seed(std::uint64_t global_seed,
                          std::string_view image_relpath,
                          std::string_view variant_id);

}  // namespace occlumark
