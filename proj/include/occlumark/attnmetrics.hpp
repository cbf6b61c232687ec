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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace occlumark {

// Attention weights exported from one forward pass: layers x heads x
// queries x keys, row-major. Token order is the leading non-spatial tokens
// (cls_count of them) followed by the patch grid in row-major order.
struct AttentionTensor {
  std::uint32_t layers = 0;
  std::uint32_t heads = 0;
  std::uint32_t tokens = 0;
  std::uint32_t grid_rows = 0;
  std::uint32_t grid_cols = 0;
  std::uint32_t cls_count = 0;
  std::uint32_t patch_pixels = 16;
  std::vector<float> weights;

  std::size_t slice_size() const noexcept {
    return static_cast<std::size_t>(tokens) * tokens;
  }
  // The T x T matrix of one (layer, head).
  std::span<const float> slice(std::uint32_t layer, std::uint32_t head) const;
  std::span<float> slice(std::uint32_t layer, std::uint32_t head);

  // Throws FormatError on inconsistent shape or out-of-range weights and
  // NormalizationError when a row does not sum to 1 within 1e-4.
  void validate() const;

  bool same_shape(const AttentionTensor& other) const noexcept;
};

// S x S Euclidean distances between patch centres, S = rows * cols.
class DistanceMatrix {
 public:
  DistanceMatrix(std::uint32_t grid_rows, std::uint32_t grid_cols,
                 double patch_pixels);

  std::size_t size() const noexcept { return size_; }
  double at(std::size_t a, std::size_t b) const noexcept {
    return entries_[a * size_ + b];
  }
  double max_entry() const noexcept;

 private:
  std::size_t size_;
  std::vector<double> entries_;
};

inline DistanceMatrix patch_distance_matrix(std::uint32_t grid_rows,
                                            std::uint32_t grid_cols,
                                            double patch_pixels) {
  return DistanceMatrix(grid_rows, grid_cols, patch_pixels);
}

// Mean over spatial queries of the attention-weighted distance to every
// spatial key. The first cls_count rows and columns are dropped and the
// remaining rows renormalized. `weights` is a T x T row-major matrix with
// T = dist.size() + cls_count.
double mean_attention_distance(std::span<const float> weights,
                               const DistanceMatrix& dist,
                               std::uint32_t cls_count);

struct AttentionDistanceRow {
  std::uint32_t layer = 0;
  std::uint32_t head = 0;
  double mean_distance = 0.0;
};

struct AttentionDistanceTable {
  std::vector<AttentionDistanceRow> rows;  // sorted by (layer, head)
  std::size_t n_datapoints = 0;
};

enum class DistanceUnits { kPixels, kPatches };

// Per-(layer, head) distances of one tensor, sorted by (layer, head).
std::vector<AttentionDistanceRow> head_distances(
    const AttentionTensor& tensor, DistanceUnits units = DistanceUnits::kPixels);

// Equal-weight mean over tensors of the per-head distances. Throws
// ShapeMismatch when the tensors disagree in shape and EmptyInput on an
// empty list.
AttentionDistanceTable analyze_tensors(std::span<const AttentionTensor> tensors,
                                       DistanceUnits units = DistanceUnits::kPixels);

// Loads every file (processed in sorted path order) and reduces as above.
AttentionDistanceTable analyze(std::vector<std::filesystem::path> files,
                               DistanceUnits units = DistanceUnits::kPixels);

// ATNW container: "ATNW", u16 version, u32 L, H, T, grid_rows, grid_cols,
// cls_count, patch_pixels, then L*H*T*T little-endian float32.
inline constexpr std::uint16_t kAtnwVersion = 1;
std::vector<std::uint8_t> encode_atnw(const AttentionTensor& tensor);
AttentionTensor decode_atnw(std::span<const std::uint8_t> bytes);
void write_atnw(const AttentionTensor& tensor, const std::filesystem::path& path);
AttentionTensor read_atnw(const std::filesystem::path& path);

// Header "layer,head,mean_distance,n", six decimals.
std::string table_to_csv(const AttentionDistanceTable& table);

// Paths matching a shell glob, sorted. Empty when nothing matches.
std::vector<std::filesystem::path> expand_glob(const std::string& pattern);

}  // namespace occlumark
