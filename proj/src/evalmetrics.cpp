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

#include "occlumark/evalmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "occlumark/error.hpp"

namespace occlumark {

using ordered_json = nlohmann::ordered_json;

PredictionRecord make_prediction_record(std::string image_id, std::string domain,
                                        std::string true_label,
                                        std::vector<ScoredLabel> predictions) {
  if (predictions.empty()) {
    throw Error(ErrorCode::kFormatError,
                "record '" + image_id + "' has no predictions");
  }
  std::sort(predictions.begin(), predictions.end(),
            [](const ScoredLabel& a, const ScoredLabel& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.label < b.label;
            });
  std::set<std::string_view> seen;
  for (const auto& p : predictions) {
    if (!seen.insert(p.label).second) {
      throw Error(ErrorCode::kFormatError,
                  "record '" + image_id + "' repeats label '" + p.label + "'");
    }
  }
  PredictionRecord r;
  r.image_id = std::move(image_id);
  r.domain = domain.empty() ? std::string(kUnknownDomain) : std::move(domain);
  r.true_label = std::move(true_label);
  r.ranked_predictions = std::move(predictions);
  return r;
}

bool topk_hit(const PredictionRecord& record, std::size_t k) {
  const std::size_t n = std::min(k, record.ranked_predictions.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (record.ranked_predictions[i].label == record.true_label) return true;
  }
  return false;
}

double accuracy(std::span<const PredictionRecord> records, std::size_t k) {
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "no records");
  std::size_t hits = 0;
  for (const auto& r : records) hits += topk_hit(r, k) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

double macro_precision(std::span<const PredictionRecord> records) {
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "no records");
  struct Counts {
    std::size_t tp = 0;
    std::size_t predicted = 0;
  };
  std::map<std::string, Counts> classes;
  for (const auto& r : records) {
    classes.try_emplace(r.true_label);
    if (r.ranked_predictions.empty()) continue;
    const std::string& top = r.ranked_predictions.front().label;
    Counts& c = classes[top];
    ++c.predicted;
    if (top == r.true_label) ++c.tp;
  }
  double sum = 0.0;
  for (const auto& [label, c] : classes) {
    if (c.predicted > 0) {
      sum += static_cast<double>(c.tp) / static_cast<double>(c.predicted);
    }
  }
  return sum / static_cast<double>(classes.size());
}

std::map<std::string, std::pair<double, std::size_t>> per_domain(
    std::span<const PredictionRecord> records, std::size_t k) {
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "no records");
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
  for (const auto& r : records) {
    const std::string& d =
        r.domain.empty() ? std::string(kUnknownDomain) : r.domain;
    auto& [hits, n] = counts[d];
    hits += topk_hit(r, k) ? 1 : 0;
    ++n;
  }
  std::map<std::string, std::pair<double, std::size_t>> out;
  for (const auto& [d, hn] : counts) {
    out[d] = {static_cast<double>(hn.first) / static_cast<double>(hn.second),
              hn.second};
  }
  return out;
}

MetricsReport evaluate(std::span<const PredictionRecord> records) {
  MetricsReport m;
  m.top1 = accuracy(records, 1);
  m.top5 = accuracy(records, 5);
  m.macro_precision = macro_precision(records);
  m.n_records = records.size();
  const auto d1 = per_domain(records, 1);
  const auto d5 = per_domain(records, 5);
  for (const auto& [d, acc_n] : d1) {
    m.per_domain[d] = {acc_n.first, d5.at(d).first, acc_n.second};
  }
  return m;
}

GapReport gap(const MetricsReport& baseline, const MetricsReport& occluded) {
  GapReport g;
  g.baseline = baseline;
  g.occluded = occluded;
  g.top1_gap = occluded.top1 - baseline.top1;
  g.top5_gap = occluded.top5 - baseline.top5;
  return g;
}

std::string format_gap(double gap) {
  double rounded = std::round(gap * 100.0) / 100.0;
  if (rounded == 0.0) rounded = 0.0;  // no "-0.00"
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", rounded);
  return buf;
}

std::vector<PredictionRecord> parse_prediction_log(std::string_view text) {
  std::vector<PredictionRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = ordered_json::parse(line);
      std::vector<ScoredLabel> preds;
      for (const auto& p : j.at("predictions")) {
        if (!p.is_array() || p.size() != 2) {
          throw Error(ErrorCode::kFormatError,
                      "prediction entries must be [label, score] pairs");
        }
        preds.push_back({p.at(0).get<std::string>(), p.at(1).get<double>()});
      }
      std::string domain =
          j.contains("domain") && !j["domain"].is_null()
              ? j["domain"].get<std::string>()
              : std::string();
      out.push_back(make_prediction_record(j.at("image_id").get<std::string>(),
                                           std::move(domain),
                                           j.at("true_label").get<std::string>(),
                                           std::move(preds)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kFormatError,
                  "line " + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(lineno) + ": " + e.detail());
    }
  }
  return out;
}

std::vector<PredictionRecord> read_prediction_log(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_prediction_log(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

std::string prediction_to_json(const PredictionRecord& r) {
  ordered_json j;
  j["image_id"] = r.image_id;
  j["domain"] = r.domain;
  j["true_label"] = r.true_label;
  j["predictions"] = ordered_json::array();
  for (const auto& p : r.ranked_predictions) {
    j["predictions"].push_back(ordered_json::array({p.label, p.score}));
  }
  return j.dump();
}

}  // namespace occlumark
