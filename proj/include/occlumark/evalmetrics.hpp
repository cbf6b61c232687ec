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

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace occlumark {

inline constexpr std::string_view kUnknownDomain = "unknown";

struct ScoredLabel {
  std::string label;
  double score = 0.0;
  bool operator==(const ScoredLabel&) const = default;
};

// One image's ground truth and its ranked predictions. Construct through
// make_prediction_record() to get the canonical ranking.
struct PredictionRecord {
  std::string image_id;
  std::string domain;
  std::string true_label;
  std::vector<ScoredLabel> ranked_predictions;
};

// Sorts predictions by (score desc, label asc), maps an empty domain to
// "unknown". Throws FormatError on an empty prediction list or a duplicate
// label.
PredictionRecord make_prediction_record(std::string image_id, std::string domain,
                                        std::string true_label,
                                        std::vector<ScoredLabel> predictions);

struct DomainAccuracy {
  double top1 = 0.0;
  double top5 = 0.0;
  std::size_t count = 0;
};

struct MetricsReport {
  double top1 = 0.0;
  double top5 = 0.0;
  double macro_precision = 0.0;
  std::map<std::string, DomainAccuracy> per_domain;  // ordered by name
  std::size_t n_records = 0;
};

struct GapReport {
  MetricsReport baseline;
  MetricsReport occluded;
  double top1_gap = 0.0;  // occluded - baseline
  double top5_gap = 0.0;
};

bool topk_hit(const PredictionRecord& record, std::size_t k);

// Throws EmptyInput.
double accuracy(std::span<const PredictionRecord> records, std::size_t k);

// Unweighted mean of top-1 precision over every class that is predicted or
// true somewhere in the log; a never-predicted class counts as 0.
double macro_precision(std::span<const PredictionRecord> records);

// domain -> (top-k accuracy, count), sorted by domain name.
std::map<std::string, std::pair<double, std::size_t>> per_domain(
    std::span<const PredictionRecord> records, std::size_t k);

MetricsReport evaluate(std::span<const PredictionRecord> records);

GapReport gap(const MetricsReport& baseline, const MetricsReport& occluded);

// Two-decimal display value, rounded half away from zero ("-0.04").
std::string format_gap(double gap);

// JSON Lines: {"image_id", "domain", "true_label", "predictions": [[label,
// score], ...]}. Throws FormatError with the offending line number.
std::vector<PredictionRecord> parse_prediction_log(std::string_view text);
std::vector<PredictionRecord> read_prediction_log(
    const std::filesystem::path& path);
std::string prediction_to_json(const PredictionRecord& record);

}  // namespace occlumark
