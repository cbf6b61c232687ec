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

#include "occlumark/attnmetrics.hpp"

#include <glob.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "occlumark/error.hpp"

namespace occlumark {

namespace fs = std::filesystem;

namespace {

constexpr double kRowSumTolerance = 1e-4;
constexpr double kMinSpatialMass = 1e-6;
constexpr std::size_t kHeaderBytes = 4 + 2 + 7 * 4;

}  // namespace

std::span<const float> AttentionTensor::slice(std::uint32_t layer,
                                              std::uint32_t head) const {
  const std::size_t off =
      (static_cast<std::size_t>(layer) * heads + head) * slice_size();
  return std::span<const float>(weights).subspan(off, slice_size());
}

std::span<float> AttentionTensor::slice(std::uint32_t layer,
                                        std::uint32_t head) {
  const std::size_t off =
      (static_cast<std::size_t>(layer) * heads + head) * slice_size();
  return std::span<float>(weights).subspan(off, slice_size());
}

void AttentionTensor::validate() const {
  if (layers == 0 || heads == 0 || tokens == 0) {
    throw Error(ErrorCode::kFormatError, "L, H and T must be positive");
  }
  if (cls_count > 1) {
    throw Error(ErrorCode::kFormatError, "cls_count must be 0 or 1");
  }
  if (grid_rows == 0 || grid_cols == 0 ||
      static_cast<std::uint64_t>(grid_rows) * grid_cols + cls_count != tokens) {
    throw Error(ErrorCode::kFormatError,
                "grid_rows * grid_cols + cls_count must equal T");
  }
  if (weights.size() != static_cast<std::size_t>(layers) * heads * slice_size()) {
    throw Error(ErrorCode::kFormatError, "weight count does not match L*H*T*T");
  }
  const std::size_t t = tokens;
  for (std::size_t row = 0; row < weights.size() / t; ++row) {
    double sum = 0.0;
    for (std::size_t k = 0; k < t; ++k) {
      const float w = weights[row * t + k];
      if (!(w >= 0.0f && w <= 1.0f)) {
        throw Error(ErrorCode::kFormatError, "attention weight outside [0, 1]");
      }
      sum += w;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw Error(ErrorCode::kNormalizationError,
                  "attention row sums to " + std::to_string(sum));
    }
  }
}

bool AttentionTensor::same_shape(const AttentionTensor& o) const noexcept {
  return layers == o.layers && heads == o.heads && tokens == o.tokens &&
         grid_rows == o.grid_rows && grid_cols == o.grid_cols &&
         cls_count == o.cls_count && patch_pixels == o.patch_pixels;
}

DistanceMatrix::DistanceMatrix(std::uint32_t grid_rows, std::uint32_t grid_cols,
                               double patch_pixels)
    : size_(static_cast<std::size_t>(grid_rows) * grid_cols) {
  if (grid_rows == 0 || grid_cols == 0) {
    throw Error(ErrorCode::kDomainError, "patch grid must be at least 1x1");
  }
  entries_.resize(size_ * size_);
  for (std::size_t a = 0; a < size_; ++a) {
    const double ra = static_cast<double>(a / grid_cols);
    const double ca = static_cast<double>(a % grid_cols);
    for (std::size_t b = 0; b < size_; ++b) {
      const double dr = ra - static_cast<double>(b / grid_cols);
      const double dc = ca - static_cast<double>(b % grid_cols);
      entries_[a * size_ + b] = patch_pixels * std::sqrt(dr * dr + dc * dc);
    }
  }
}

double DistanceMatrix::max_entry() const noexcept {
  return entries_.empty() ? 0.0
                          : *std::max_element(entries_.begin(), entries_.end());
}

double mean_attention_distance(std::span<const float> weights,
                               const DistanceMatrix& dist,
                               std::uint32_t cls_count) {
  const std::size_t s = dist.size();
  const std::size_t t = s + cls_count;
  if (weights.size() != t * t) {
    throw Error(ErrorCode::kShapeMismatch,
                "attention slice does not match the patch grid");
  }
  double total = 0.0;
  for (std::size_t q = 0; q < s; ++q) {
    const float* row = weights.data() + (q + cls_count) * t + cls_count;
    double mass = 0.0;
    double weighted = 0.0;
    for (std::size_t k = 0; k < s; ++k) {
      mass += row[k];
      weighted += static_cast<double>(row[k]) * dist.at(q, k);
    }
    if (mass < kMinSpatialMass) {
      throw Error(ErrorCode::kNormalizationError,
                  "query " + std::to_string(q) +
                      " puts no attention on spatial tokens");
    }
    total += weighted / mass;
  }
  return total / static_cast<double>(s);
}

std::vector<AttentionDistanceRow> head_distances(const AttentionTensor& tensor,
                                                 DistanceUnits units) {
  const double scale =
      units == DistanceUnits::kPixels ? static_cast<double>(tensor.patch_pixels)
                                      : 1.0;
  const DistanceMatrix dist(tensor.grid_rows, tensor.grid_cols, scale);
  std::vector<AttentionDistanceRow> rows;
  rows.reserve(static_cast<std::size_t>(tensor.layers) * tensor.heads);
  for (std::uint32_t l = 0; l < tensor.layers; ++l) {
    for (std::uint32_t h = 0; h < tensor.heads; ++h) {
      rows.push_back(
          {l, h, mean_attention_distance(tensor.slice(l, h), dist, tensor.cls_count)});
    }
  }
  return rows;
}

AttentionDistanceTable analyze_tensors(std::span<const AttentionTensor> tensors,
                                       DistanceUnits units) {
  if (tensors.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no attention tensors given");
  }
  for (const auto& t : tensors) {
    if (!t.same_shape(tensors.front())) {
      throw Error(ErrorCode::kShapeMismatch,
                  "attention tensors disagree in shape");
    }
  }
  AttentionDistanceTable table;
  table.rows = head_distances(tensors.front(), units);
  for (std::size_t i = 1; i < tensors.size(); ++i) {
    const auto rows = head_distances(tensors[i], units);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      table.rows[r].mean_distance += rows[r].mean_distance;
    }
  }
  for (auto& r : table.rows) {
    r.mean_distance /= static_cast<double>(tensors.size());
  }
  table.n_datapoints = tensors.size();
  return table;
}

AttentionDistanceTable analyze(std::vector<fs::path> files,
                               DistanceUnits units) {
  std::sort(files.begin(), files.end());
  std::vector<AttentionTensor> tensors;
  tensors.reserve(files.size());
  for (const auto& f : files) {
    tensors.push_back(read_atnw(f));
    if (!tensors.back().same_shape(tensors.front())) {
      throw Error(ErrorCode::kShapeMismatch,
                  f.string() + " differs in shape from " + files.front().string());
    }
  }
  return analyze_tensors(tensors, units);
}

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint32_t>(b[off]) |
         (static_cast<std::uint32_t>(b[off + 1]) << 8) |
         (static_cast<std::uint32_t>(b[off + 2]) << 16) |
         (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

}  // namespace

std::vector<std::uint8_t> encode_atnw(const AttentionTensor& t) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + t.weights.size() * 4);
  for (const char c : {'A', 'T', 'N', 'W'}) out.push_back(static_cast<std::uint8_t>(c));
  put_u16(out, kAtnwVersion);
  for (const std::uint32_t v : {t.layers, t.heads, t.tokens, t.grid_rows,
                                t.grid_cols, t.cls_count, t.patch_pixels}) {
    put_u32(out, v);
  }
  for (const float w : t.weights) put_u32(out, std::bit_cast<std::uint32_t>(w));
  return out;
}

AttentionTensor decode_atnw(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), "ATNW", 4) != 0) {
    throw Error(ErrorCode::kFormatError, "missing ATNW header");
  }
  const auto version =
      static_cast<std::uint16_t>(bytes[4] | (static_cast<unsigned>(bytes[5]) << 8));
  if (version != kAtnwVersion) {
    throw Error(ErrorCode::kFormatError,
                "unsupported ATNW version " + std::to_string(version));
  }
  AttentionTensor t;
  std::size_t off = 6;
  for (std::uint32_t* field : {&t.layers, &t.heads, &t.tokens, &t.grid_rows,
                               &t.grid_cols, &t.cls_count, &t.patch_pixels}) {
    *field = get_u32(bytes, off);
    off += 4;
  }
  const std::uint64_t count = static_cast<std::uint64_t>(t.layers) * t.heads *
                              t.tokens * t.tokens;
  if (count > (bytes.size() - kHeaderBytes) / 4 ||
      bytes.size() != kHeaderBytes + count * 4) {
    throw Error(ErrorCode::kFormatError,
                "ATNW payload size does not match its header");
  }
  t.weights.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    t.weights[i] = std::bit_cast<float>(get_u32(bytes, off));
    off += 4;
  }
  t.validate();
  return t;
}

void write_atnw(const AttentionTensor& tensor, const fs::path& path) {
  const auto bytes = encode_atnw(tensor);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, path.string() + ": cannot open");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, path.string() + ": write failed");
}

AttentionTensor read_atnw(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_atnw(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

std::string table_to_csv(const AttentionDistanceTable& table) {
  std::string out = "layer,head,mean_distance,n\n";
  char buf[96];
  for (const auto& r : table.rows) {
    std::snprintf(buf, sizeof(buf), "%u,%u,%.6f,%zu\n", r.layer, r.head,
                  r.mean_distance, table.n_datapoints);
    out += buf;
  }
  return out;
}

std::vector<fs::path> expand_glob(const std::string& pattern) {
  glob_t g{};
  std::vector<fs::path> out;
  if (::glob(pattern.c_str(), 0, nullptr, &g) == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  }
  ::globfree(&g);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace occlumark
