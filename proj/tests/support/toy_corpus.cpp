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

#include "toy_corpus.hpp"

#include <jpeglib.h>

#include <cstdio>
#include <stdexcept>

namespace occlumark::testing {

namespace fs = std::filesystem;

namespace {

double uniform01(SplitMix64& rng) {
  return static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
}

int uniform_int(SplitMix64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

}  // namespace

BinaryMask random_mask(int width, int height, SplitMix64& rng, double density) {
  BinaryMask m(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) m.set(x, y, uniform01(rng) < density);
  }
  return m;
}

BinaryMask random_blob(int width, int height, SplitMix64& rng) {
  BinaryMask m(width, height);
  const int count = uniform_int(rng, 3, 6);
  for (int e = 0; e < count; ++e) {
    const double cx = width * (0.3 + 0.4 * uniform01(rng));
    const double cy = height * (0.3 + 0.4 * uniform01(rng));
    const double rx = width * (0.18 + 0.22 * uniform01(rng));
    const double ry = height * (0.18 + 0.22 * uniform01(rng));
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double dx = (x + 0.5 - cx) / rx;
        const double dy = (y + 0.5 - cy) / ry;
        if (dx * dx + dy * dy <= 1.0) m.set(x, y, true);
      }
    }
  }
  return m;
}

Image random_image(int width, int height, int channels, SplitMix64& rng) {
  Image img(width, height, channels);
  const int base = uniform_int(rng, 40, 200);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        const int noise = static_cast<int>(rng.below(32));
        const int v = (base + x + 2 * y + 50 * c + noise) % 256;
        img.at(x, y, c) = static_cast<std::uint8_t>(v);
      }
    }
  }
  return img;
}

AttentionTensor random_attention(std::uint32_t layers, std::uint32_t heads,
                                 std::uint32_t grid_rows, std::uint32_t grid_cols,
                                 std::uint32_t cls_count, SplitMix64& rng) {
  AttentionTensor t;
  t.layers = layers;
  t.heads = heads;
  t.grid_rows = grid_rows;
  t.grid_cols = grid_cols;
  t.cls_count = cls_count;
  t.tokens = grid_rows * grid_cols + cls_count;
  t.patch_pixels = 16;
  t.weights.resize(static_cast<std::size_t>(layers) * heads * t.slice_size());
  const std::size_t n = t.tokens;
  for (std::size_t r = 0; r < t.weights.size() / n; ++r) {
    double sum = 0.0;
    std::vector<double> row(n);
    for (auto& w : row) {
      w = 0.05 + uniform01(rng);
      sum += w;
    }
    for (std::size_t k = 0; k < n; ++k) {
      t.weights[r * n + k] = static_cast<float>(row[k] / sum);
    }
  }
  return t;
}

std::vector<PredictionRecord> log_with_hits(std::size_t n, std::size_t top1_hits,
                                            std::size_t top5_hits,
                                            const std::string& domain) {
  if (top1_hits > top5_hits || top5_hits > n) {
    throw std::invalid_argument("hit counts must satisfy top1 <= top5 <= n");
  }
  const std::vector<std::string> labels = {"c0", "c1", "c2", "c3", "c4", "c5", "c6"};
  std::vector<PredictionRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Scores rank c0 > c1 > ... > c6; the true label sits at rank 0, 2 or 6.
    std::vector<ScoredLabel> preds;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      preds.push_back({labels[j], 1.0 - 0.1 * static_cast<double>(j)});
    }
    const std::size_t rank = i < top1_hits ? 0 : i < top5_hits ? 2 : 6;
    out.push_back(make_prediction_record("img" + std::to_string(i), domain,
                                         labels[rank], std::move(preds)));
  }
  return out;
}

std::vector<PredictionRecord> random_prediction_log(std::size_t n, int n_classes,
                                                    SplitMix64& rng) {
  const char* domains[] = {"art", "cartoon", "photo", ""};
  std::vector<PredictionRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<ScoredLabel> preds;
    for (int c = 0; c < n_classes; ++c) {
      preds.push_back({"k" + std::to_string(c), static_cast<double>(rng.below(20))});
    }
    const std::string truth = "k" + std::to_string(rng.below(n_classes));
    out.push_back(make_prediction_record("r" + std::to_string(i),
                                         domains[rng.below(4)], truth,
                                         std::move(preds)));
  }
  return out;
}

void write_jpeg(const Image& image, const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) throw std::runtime_error("cannot open " + path.string());
  jpeg_compress_struct cinfo{};
  jpeg_error_mgr jerr{};
  cinfo.err = jpeg_std_error(&jerr);
  jpeg_create_compress(&cinfo);
  jpeg_stdio_dest(&cinfo, f);
  cinfo.image_width = static_cast<JDIMENSION>(image.width());
  cinfo.image_height = static_cast<JDIMENSION>(image.height());
  cinfo.input_components = image.channels();
  cinfo.in_color_space = image.channels() == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, 95, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  const std::size_t stride =
      static_cast<std::size_t>(image.width()) * image.channels();
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(image.pixels().data() +
                                        stride * cinfo.next_scanline);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  std::fclose(f);
}

std::vector<ToyEntry> write_toy_corpus(const fs::path& root) {
  const fs::path images = root / "images";
  const fs::path masks = root / "masks";
  SplitMix64 rng(0x70C0DE5EEDULL);
  std::vector<ToyEntry> entries;

  const char* domains[] = {"art", "photo"};
  int blob_index = 0;
  int rect_index = 0;
  for (const char* domain : domains) {
    for (int i = 0; i < 5; ++i) {
      // Blob image.
      {
        const bool jpeg = blob_index == 1 || blob_index == 6;
        const int channels = blob_index == 3 ? 1 : 3;
        const std::string stem = "blob_" + std::to_string(blob_index);
        const std::string rel = std::string(domain) + "/blob/" + stem +
                                (jpeg ? ".jpg" : ".png");
        const Image img = random_image(224, 224, channels, rng);
        const BinaryMask obj = random_blob(224, 224, rng);
        if (jpeg) {
          write_jpeg(img, images / rel);
        } else {
          write_image(img, images / rel);
        }
        write_mask(obj, masks / domain / "blob" / (stem + ".png"));
        entries.push_back({rel, false});
        ++blob_index;
      }
      // Rect image: two bars of side `cell` separated by a gap.
      {
        const bool tall = rect_index % 2 == 1;
        const int height = tall ? 180 : 80;  // unit sides 90/36/20 or 40/16/8
        const int width = tall ? 600 : 400;
        const int cell = height;             // lcm of the unit sides
        const int gap_cells = !tall && rng.below(2) == 1 ? 2 : 1;
        const int total = cell * (2 + gap_cells);
        const int x0 = uniform_int(rng, 0, width - total);
        BinaryMask obj(width, height);
        for (int y = 0; y < height; ++y) {
          for (int x = 0; x < cell; ++x) {
            obj.set(x0 + x, y, true);
            obj.set(x0 + cell * (1 + gap_cells) + x, y, true);
          }
        }
        const std::string stem = "rect_" + std::to_string(rect_index);
        const std::string rel = std::string(domain) + "/rect/" + stem + ".png";
        write_image(random_image(width, height, 3, rng), images / rel);
        write_mask(obj, masks / domain / "rect" / (stem + ".png"));
        entries.push_back({rel, true});
        ++rect_index;
      }
    }
  }
  return entries;
}

}  // namespace occlumark::testing
