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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "occlumark/composer.hpp"
#include "occlumark/gridmask.hpp"
#include "occlumark/maskio.hpp"

namespace occlumark {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kManifestFileName = "manifest.jsonl";

// One benchmark variant: grid count, placement and occlusion level.
struct VariantDescriptor {
  int n_grids = 2;
  PlacementMode mode = PlacementMode::kInside;
  OcclusionLevel level = OcclusionLevel::k25;

  // "g<n>_<inside|outside>_<25|50|75>", e.g. "g5_outside_50".
  std::string id() const;
  // Inverse of id(). Throws ConfigError.
  static VariantDescriptor parse(std::string_view id);

  bool operator==(const VariantDescriptor&) const = default;
};

struct OcclusionConfig {
  std::vector<VariantDescriptor> variants;
  std::uint64_t global_seed = 0;
  std::uint8_t fill = 0;
  bool invert_compose = false;

  // Inside variants for every grid count, then outside variants for every
  // outside grid count, each crossed with all ratios (percent). The
  // defaults give the 12-variant benchmark set.
  static std::vector<VariantDescriptor> make_variants(
      const std::vector<int>& grids = {2, 5, 9},
      const std::vector<int>& ratios = {25, 50, 75},
      const std::vector<int>& outside_grids = {5});
};

enum class RecordStatus { kOk, kSkippedNoMask, kSkippedEmptyMask, kError };

std::string_view to_string(RecordStatus status) noexcept;
RecordStatus status_from_string(std::string_view s);

struct VariantRecord {
  std::string image_relpath;
  std::string domain;
  std::string class_label;
  std::string variant_id;
  std::uint64_t seed_used = 0;
  int delta_x = 0;
  int delta_y = 0;
  int unit_side_d = 0;
  double target_ratio = 0.0;
  std::optional<double> measured_ratio;
  RecordStatus status = RecordStatus::kError;
  std::optional<std::string> output_relpath;

  bool operator==(const VariantRecord&) const = default;
};

struct Manifest {
  std::string tool_version{kToolVersion};
  std::uint64_t global_seed = 0;
  std::string corpus_root;
  std::string mask_root;
  std::string out_root;
  std::uint8_t fill = 0;
  bool invert_compose = false;
  // Sorted by (image_relpath, variant_id).
  std::vector<VariantRecord> records;
};

// One image of a domain/class/file corpus. relpath uses '/' separators.
struct CorpusEntry {
  std::string relpath;
  std::string domain;
  std::string class_label;
  // Output file name inside variant_id/domain/class/.
  std::string output_name;
};

// Lists corpus_root/<domain>/<class>/<image> for PNG and JPEG files, sorted
// by relpath. Files at other depths are ignored. Throws IoError when the
// root cannot be read.
std::vector<CorpusEntry> scan_corpus(const std::filesystem::path& corpus_root);

// mask_root/<relpath with its extension replaced by .png>.
std::filesystem::path mask_path_for(const std::filesystem::path& mask_root,
                                    std::string_view image_relpath);

// Grid geometry for one (image size, variant, seed): d from the grid count,
// then delta_x and delta_y drawn in that order from splitmix64(seed).
GridSpec variant_grid_spec(int width, int height,
                           const VariantDescriptor& variant,
                           std::uint64_t seed);

struct GeneratedVariant {
  std::optional<Image> image;  // set iff record.status == kOk
  VariantRecord record;
};

// Builds one variant of one image. Composer failures become a record
// status: an empty object mask gives kSkippedEmptyMask, any other library
// error gives kError. The record's corpus fields and output_relpath are left
// for the caller; seed_used is `seed`.
GeneratedVariant generate_variant(const Image& image, const BinaryMask& object,
                                  const VariantDescriptor& variant,
                                  std::uint64_t seed, std::uint8_t fill,
                                  bool invert_compose = false);

struct GenerateOptions {
  unsigned workers = 1;
};

// Generates every configured variant for every corpus image, writes the
// images under out_root/<variant_id>/<domain>/<class>/ and the manifest to
// out_root/manifest.jsonl. Throws IoError only for unreadable roots or an
// unwritable manifest.
Manifest run_generate(const std::filesystem::path& corpus_root,
                      const std::filesystem::path& mask_root,
                      const std::filesystem::path& out_root,
                      const OcclusionConfig& config,
                      const GenerateOptions& options = {});

// JSON Lines: a header object on line 1, then one VariantRecord per line
// with keys in declaration order.
std::string serialize_manifest(const Manifest& manifest);
Manifest parse_manifest(std::string_view text);
void write_manifest(const Manifest& manifest,
                    const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

std::string record_to_json(const VariantRecord& record);
VariantRecord record_from_json(std::string_view line);

struct MeasureIssue {
  std::string image_relpath;
  std::string variant_id;
  std::string problem;
};

struct MeasureReport {
  std::size_t checked = 0;
  std::size_t passed = 0;
  std::vector<MeasureIssue> issues;
  bool ok() const noexcept { return issues.empty(); }
};

// Re-derives every ok record from the corpus and mask roots named in the
// manifest and checks seed, offsets, unit side, measured ratio and the
// emitted pixels.
MeasureReport measure(const std::filesystem::path& out_root);

}  // namespace occlumark
