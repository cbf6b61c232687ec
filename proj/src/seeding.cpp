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

#include "occlumark/seeding.hpp"

#include <array>

namespace occlumark {

std::uint64_t fnv1a64(std::string_view text, std::uint64_t state) {
  for (const char c : text) {
    state ^= static_cast<std::uint8_t>(c);
    state *= kFnv64Prime;
  }
  return state;
}

std::uint64_t derive_seed(std::uint64_t global_seed,
                          std::string_view image_relpath,
                          std::string_view variant_id) {
  std::array<std::uint8_t, 8> le{};
  for (std::size_t i = 0; i < le.size(); ++i) {
    le[i] = static_cast<std::uint8_t>(global_seed >> (8 * i));
  }
  std::uint64_t h = fnv1a64(std::span<const std::uint8_t>(le));
  h = fnv1a64(image_relpath, h);
  const std::array<std::uint8_t, 1> sep{0};
  h = fnv1a64(std::span<const std::uint8_t>(sep), h);
  return fnv1a64(variant_id, h);
}

}  // namespace occlumark
