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

#include "occlumark/benchgen.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>
#include <thread>

#include "json.hpp"
#include "occlumark/error.hpp"
#include "occlumark/seeding.hpp"

namespace occlumark {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string VariantDescriptor::id() const {
  return "g" + std::to_string(n_grids) + "_" + std::string(to_string(mode)) +
         "_" + std::to_string(target_percent(level));
}

VariantDescriptor VariantDescriptor::parse(std::string_view id) {
  auto fail = [&]() -> VariantDescriptor {
    throw Error(ErrorCode::kConfigError,
                "malformed variant id '" + std::string(id) + "'");
  };
  if (id.size() < 2 || id[0] != 'g') return fail();
  const auto us1 = id.find('_');
  if (us1 == std::string_view::npos) return fail();
  const auto us2 = id.find('_', us1 + 1);
  if (us2 == std::string_view::npos) return fail();

  VariantDescriptor v;
  const std::string_view grids = id.substr(1, us1 - 1);
  auto [p1, e1] =
      std::from_chars(grids.data(), grids.data() + grids.size(), v.n_grids);
  if (e1 != std::errc{} || p1 != grids.data() + grids.size() ||
      v.n_grids < 1) {
    return fail();
  }
  const std::string_view mode = id.substr(us1 + 1, us2 - us1 - 1);
  if (mode == "inside") {
    v.mode = PlacementMode::kInside;
  } else if (mode == "outside") {
    v.mode = PlacementMode::kOutsideEdges;
  } else {
    return fail();
  }
  const std::string_view ratio = id.substr(us2 + 1);
  int percent = 0;
  auto [p2, e2] =
      std::from_chars(ratio.data(), ratio.data() + ratio.size(), percent);
  if (e2 != std::errc{} || p2 != ratio.data() + ratio.size()) return fail();
  v.level = level_from_percent(percent);
  return v;
}

std::vector<VariantDescriptor> OcclusionConfig::make_variants(
    const std::vector<int>& grids, const std::vector<int>& ratios,
    const std::vector<int>& outside_grids) {
  std::vector<VariantDescriptor> out;
  for (const int n : grids) {
    for (const int r : ratios) {
      out.push_back({n, PlacementMode::kInside, level_from_percent(r)});
    }
  }
  for (const int n : outside_grids) {
    for (const int r : ratios) {
      out.push_back({n, PlacementMode::kOutsideEdges, level_from_percent(r)});
    }
  }
  for (const auto& v : out) {
    if (v.n_grids < 1) {
      throw Error(ErrorCode::kConfigError, "grid counts must be >= 1");
    }
  }
  std::vector<std::string> ids;
  for (const auto& v : out) ids.push_back(v.id());
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw Error(ErrorCode::kConfigError, "duplicate variant in configuration");
  }
  return out;
}

std::string_view to_string(RecordStatus status) noexcept {
  switch (status) {
    case RecordStatus::kOk: return "ok";
    case RecordStatus::kSkippedNoMask: return "skipped_no_mask";
    case RecordStatus::kSkippedEmptyMask: return "skipped_empty_mask";
    case RecordStatus::kError: return "error";
  }
  return "error";
}

RecordStatus status_from_string(std::string_view s) {
  if (s == "ok") return RecordStatus::kOk;
  if (s == "skipped_no_mask") return RecordStatus::kSkippedNoMask;
  if (s == "skipped_empty_mask") return RecordStatus::kSkippedEmptyMask;
  if (s == "error") return RecordStatus::kError;
  throw Error(ErrorCode::kFormatError, "unknown status '" + std::string(s) + "'");
}

namespace {

bool is_image_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::vector<fs::path> sorted_children(const fs::path& dir, bool want_dirs) {
  std::vector<fs::path> out;
  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, dir.string() + ": " + ec.message());
  for (const auto& e : it) {
    std::error_code tec;
    const bool is_dir = e.is_directory(tec);
    if (tec) continue;
    if (want_dirs && is_dir) out.push_back(e.path());
    if (!want_dirs && !is_dir && e.is_regular_file(tec)) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  return out;
}

}  // namespace

std::vector<CorpusEntry> scan_corpus(const fs::path& corpus_root) {
  std::error_code ec;
  if (!fs::is_directory(corpus_root, ec)) {
    throw Error(ErrorCode::kIoError,
                corpus_root.string() + ": corpus root is not a directory");
  }
  std::vector<CorpusEntry> entries;
  for (const auto& domain_dir : sorted_children(corpus_root, true)) {
    for (const auto& class_dir : sorted_children(domain_dir, true)) {
      std::vector<fs::path> files;
      for (const auto& f : sorted_children(class_dir, false)) {
        if (is_image_extension(f)) files.push_back(f);
      }
      std::map<std::string, int> stem_count;
      for (const auto& f : files) ++stem_count[f.stem().string()];
      for (const auto& f : files) {
        CorpusEntry e;
        e.domain = domain_dir.filename().string();
        e.class_label = class_dir.filename().string();
        e.relpath = e.domain + "/" + e.class_label + "/" + f.filename().string();
        // a.jpg and a.png in one class would both map to a.png.
        e.output_name = stem_count[f.stem().string()] > 1
                            ? f.filename().string() + ".png"
                            : f.stem().string() + ".png";
        entries.push_back(std::move(e));
      }
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const CorpusEntry& a, const CorpusEntry& b) {
              return a.relpath < b.relpath;
            });
  return entries;
}

fs::path mask_path_for(const fs::path& mask_root,
                       std::string_view image_relpath) {
  fs::path rel{std::string(image_relpath)};
  rel.replace_extension(".png");
  return mask_root / rel;
}

GridSpec variant_grid_spec(int width, int height,
                           const VariantDescriptor& variant,
                           std::uint64_t seed) {
  GridSpec spec;
  spec.n_grids = variant.n_grids;
  spec.level = variant.level;
  spec.unit_side = unit_side(width, height, variant.n_grids);
  SplitMix64 rng(seed);
  const auto d = static_cast<std::uint64_t>(spec.unit_side);
  spec.offset_x = static_cast<int>(rng.below(d));
  spec.offset_y = static_cast<int>(rng.below(d));
  return spec;
}

GeneratedVariant generate_variant(const Image& image, const BinaryMask& object,
                                  const VariantDescriptor& variant,
                                  std::uint64_t seed, std::uint8_t fill,
                                  bool invert_compose) {
  GeneratedVariant out;
  VariantRecord& rec = out.record;
  rec.variant_id = variant.id();
  rec.seed_used = seed;
  rec.target_ratio = target_fraction(variant.level);
  try {
    const GridSpec spec =
        variant_grid_spec(image.width(), image.height(), variant, seed);
    rec.unit_side_d = spec.unit_side;
    rec.delta_x = spec.offset_x;
    rec.delta_y = spec.offset_y;
    if (object.width() == image.width() &&
        object.height() == image.height() && mask_area(object) == 0) {
      rec.status = RecordStatus::kSkippedEmptyMask;
      return out;
    }
    OcclusionResult result =
        compose_variant(image, object, spec, variant.mode, fill, invert_compose);
    rec.measured_ratio = result.measured_ratio;
    rec.status = RecordStatus::kOk;
    out.image = std::move(result.occluded_image);
  } catch (const Error&) {
    rec.status = RecordStatus::kError;
    rec.measured_ratio.reset();
  }
  return out;
}

namespace {

VariantRecord base_record(const CorpusEntry& entry,
                          const VariantDescriptor& variant,
                          const OcclusionConfig& config) {
  VariantRecord rec;
  rec.image_relpath = entry.relpath;
  rec.domain = entry.domain;
  rec.class_label = entry.class_label;
  rec.variant_id = variant.id();
  rec.seed_used = derive_seed(config.global_seed, entry.relpath, rec.variant_id);
  rec.target_ratio = target_fraction(variant.level);
  return rec;
}

void fill_geometry(VariantRecord& rec, const Image& image,
                   const VariantDescriptor& variant) {
  try {
    const GridSpec spec = variant_grid_spec(image.width(), image.height(),
                                            variant, rec.seed_used);
    rec.unit_side_d = spec.unit_side;
    rec.delta_x = spec.offset_x;
    rec.delta_y = spec.offset_y;
  } catch (const Error&) {
  }
}

std::vector<VariantRecord> process_entry(const CorpusEntry& entry,
                                         const fs::path& corpus_root,
                                         const fs::path& mask_root,
                                         const fs::path& out_root,
                                         const OcclusionConfig& config) {
  std::vector<VariantRecord> records;
  records.reserve(config.variants.size());
  for (const auto& v : config.variants) {
    records.push_back(base_record(entry, v, config));
  }
  auto mark_all = [&](RecordStatus s) {
    for (auto& r : records) r.status = s;
    return records;
  };

  Image image;
  try {
    image = load_image(corpus_root / entry.relpath);
  } catch (const Error&) {
    return mark_all(RecordStatus::kError);
  }

  const fs::path mask_path = mask_path_for(mask_root, entry.relpath);
  std::error_code ec;
  if (!fs::is_regular_file(mask_path, ec)) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      fill_geometry(records[i], image, config.variants[i]);
    }
    return mark_all(RecordStatus::kSkippedNoMask);
  }
  BinaryMask object;
  try {
    object = load_mask(mask_path, image.width(), image.height());
  } catch (const Error&) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      fill_geometry(records[i], image, config.variants[i]);
    }
    return mark_all(RecordStatus::kError);
  }

  for (std::size_t i = 0; i < records.size(); ++i) {
    const VariantDescriptor& v = config.variants[i];
    VariantRecord& rec = records[i];
    GeneratedVariant gen = generate_variant(image, object, v, rec.seed_used,
                                            config.fill, config.invert_compose);
    rec.unit_side_d = gen.record.unit_side_d;
    rec.delta_x = gen.record.delta_x;
    rec.delta_y = gen.record.delta_y;
    rec.status = gen.record.status;
    rec.measured_ratio = gen.record.measured_ratio;
    if (rec.status != RecordStatus::kOk) continue;
    const std::string rel = rec.variant_id + "/" + entry.domain + "/" +
                            entry.class_label + "/" + entry.output_name;
    try {
      write_image(*gen.image, out_root / rel);
      rec.output_relpath = rel;
    } catch (const Error&) {
      rec.status = RecordStatus::kError;
      rec.measured_ratio.reset();
    }
  }
  return records;
}

std::string absolute_string(const fs::path& p) {
  std::error_code ec;
  fs::path abs = fs::absolute(p, ec);
  if (ec) abs = p;
  std::string s = abs.lexically_normal().generic_string();
  while (s.size() > 1 && s.back() == '/') s.pop_back();
  return s;
}

}  // namespace

Manifest run_generate(const fs::path& corpus_root, const fs::path& mask_root,
                      const fs::path& out_root, const OcclusionConfig& config,
                      const GenerateOptions& options) {
  std::error_code ec;
  if (!fs::is_directory(mask_root, ec)) {
    throw Error(ErrorCode::kIoError,
                mask_root.string() + ": mask root is not a directory");
  }
  const std::vector<CorpusEntry> entries = scan_corpus(corpus_root);
  fs::create_directories(out_root, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError, out_root.string() + ": " + ec.message());
  }

  std::vector<std::vector<VariantRecord>> per_entry(entries.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < entries.size();
         i = next.fetch_add(1)) {
      per_entry[i] =
          process_entry(entries[i], corpus_root, mask_root, out_root, config);
    }
  };
  unsigned workers = options.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(
      std::min<std::size_t>(workers, std::max<std::size_t>(entries.size(), 1)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  Manifest manifest;
  manifest.global_seed = config.global_seed;
  manifest.corpus_root = absolute_string(corpus_root);
  manifest.mask_root = absolute_string(mask_root);
  manifest.out_root = absolute_string(out_root);
  manifest.fill = config.fill;
  manifest.invert_compose = config.invert_compose;
  for (auto& recs : per_entry) {
    for (auto& r : recs) manifest.records.push_back(std::move(r));
  }
  std::sort(manifest.records.begin(), manifest.records.end(),
            [](const VariantRecord& a, const VariantRecord& b) {
              if (a.image_relpath != b.image_relpath) {
                return a.image_relpath < b.image_relpath;
              }
              return a.variant_id < b.variant_id;
            });
  write_manifest(manifest, out_root / kManifestFileName);
  return manifest;
}

std::string record_to_json(const VariantRecord& r) {
  ordered_json j;
  j["image_relpath"] = r.image_relpath;
  j["domain"] = r.domain;
  j["class_label"] = r.class_label;
  j["variant_id"] = r.variant_id;
  j["seed_used"] = r.seed_used;
  j["delta_x"] = r.delta_x;
  j["delta_y"] = r.delta_y;
  j["unit_side_d"] = r.unit_side_d;
  j["target_ratio"] = r.target_ratio;
  j["measured_ratio"] =
      r.measured_ratio ? ordered_json(*r.measured_ratio) : ordered_json(nullptr);
  j["status"] = std::string(to_string(r.status));
  j["output_relpath"] =
      r.output_relpath ? ordered_json(*r.output_relpath) : ordered_json(nullptr);
  return j.dump();
}

VariantRecord record_from_json(std::string_view line) {
  try {
    const auto j = ordered_json::parse(line);
    VariantRecord r;
    r.image_relpath = j.at("image_relpath").get<std::string>();
    r.domain = j.at("domain").get<std::string>();
    r.class_label = j.at("class_label").get<std::string>();
    r.variant_id = j.at("variant_id").get<std::string>();
    r.seed_used = j.at("seed_used").get<std::uint64_t>();
    r.delta_x = j.at("delta_x").get<int>();
    r.delta_y = j.at("delta_y").get<int>();
    r.unit_side_d = j.at("unit_side_d").get<int>();
    r.target_ratio = j.at("target_ratio").get<double>();
    if (!j.at("measured_ratio").is_null()) {
      r.measured_ratio = j.at("measured_ratio").get<double>();
    }
    r.status = status_from_string(j.at("status").get<std::string>());
    if (!j.at("output_relpath").is_null()) {
      r.output_relpath = j.at("output_relpath").get<std::string>();
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("manifest record: ") + e.what());
  }
}

std::string serialize_manifest(const Manifest& m) {
  ordered_json header;
  header["tool_version"] = m.tool_version;
  header["global_seed"] = m.global_seed;
  header["corpus_root"] = m.corpus_root;
  header["mask_root"] = m.mask_root;
  header["out_root"] = m.out_root;
  header["fill"] = m.fill;
  header["invert_compose"] = m.invert_compose;
  header["record_count"] = m.records.size();
  std::string out = header.dump();
  out += '\n';
  for (const auto& r : m.records) {
    out += record_to_json(r);
    out += '\n';
  }
  return out;
}

Manifest parse_manifest(std::string_view text) {
  Manifest m;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kFormatError, "manifest is empty");
  }
  std::size_t expected = 0;
  try {
    const auto h = ordered_json::parse(line);
    m.tool_version = h.at("tool_version").get<std::string>();
    m.global_seed = h.at("global_seed").get<std::uint64_t>();
    m.corpus_root = h.at("corpus_root").get<std::string>();
    m.mask_root = h.at("mask_root").get<std::string>();
    m.out_root = h.at("out_root").get<std::string>();
    m.fill = h.at("fill").get<std::uint8_t>();
    m.invert_compose = h.at("invert_compose").get<bool>();
    expected = h.at("record_count").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("manifest header: ") + e.what());
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    m.records.push_back(record_from_json(line));
  }
  if (m.records.size() != expected) {
    throw Error(ErrorCode::kFormatError,
                "manifest declares " + std::to_string(expected) +
                    " records but holds " + std::to_string(m.records.size()));
  }
  return m;
}

void write_manifest(const Manifest& manifest, const fs::path& path) {
  const std::string text = serialize_manifest(manifest);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, path.string() + ": cannot open");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw Error(ErrorCode::kIoError, path.string() + ": write failed");
}

Manifest read_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str());
}

MeasureReport measure(const fs::path& out_root) {
  const Manifest m = read_manifest(out_root / kManifestFileName);
  MeasureReport report;
  for (const auto& rec : m.records) {
    if (rec.status != RecordStatus::kOk) continue;
    ++report.checked;
    auto issue = [&](std::string problem) {
      report.issues.push_back({rec.image_relpath, rec.variant_id, std::move(problem)});
    };
    try {
      const VariantDescriptor v = VariantDescriptor::parse(rec.variant_id);
      if (derive_seed(m.global_seed, rec.image_relpath, rec.variant_id) !=
          rec.seed_used) {
        issue("seed_used does not match the derived seed");
        continue;
      }
      const Image image = load_image(fs::path(m.corpus_root) / rec.image_relpath);
      const BinaryMask object =
          load_mask(mask_path_for(m.mask_root, rec.image_relpath),
                    image.width(), image.height());
      const GridSpec spec = variant_grid_spec(image.width(), image.height(), v,
                                              rec.seed_used);
      if (spec.unit_side != rec.unit_side_d || spec.offset_x != rec.delta_x ||
          spec.offset_y != rec.delta_y) {
        issue("grid geometry does not match the record");
        continue;
      }
      const OcclusionResult result = compose_variant(
          image, object, spec, v.mode, m.fill, m.invert_compose);
      if (!rec.measured_ratio || *rec.measured_ratio != result.measured_ratio) {
        issue("measured_ratio differs from the recomputed value");
        continue;
      }
      if (!rec.output_relpath) {
        issue("ok record without output_relpath");
        continue;
      }
      const Image emitted = load_image(out_root / *rec.output_relpath);
      if (!(emitted == result.occluded_image)) {
        issue("emitted pixels differ from the recomposed image");
        continue;
      }
      ++report.passed;
    } catch (const Error& e) {
      issue(e.what());
    }
  }
  return report;
}

}  // namespace occlumark
