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

#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "occlumark/attnmetrics.hpp"
#include "occlumark/benchgen.hpp"
#include "occlumark/error.hpp"
#include "occlumark/evalmetrics.hpp"

namespace occlumark::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::vector<int> parse_int_list(const std::string& text,
                                const std::string& flag) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfigError,
                  flag + ": '" + item + "' is not an integer");
    }
  }
  return out;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigError:
    case ErrorCode::kDomainError:
    case ErrorCode::kTooManyGrids:
    case ErrorCode::kSpecError:
      return kExitConfig;
    default:
      return kExitIo;
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::kIoError, path.string() + ": cannot open");
  f << text;
  f.close();
  if (!f) throw Error(ErrorCode::kIoError, path.string() + ": write failed");
}

ordered_json metrics_json(const std::string& log, const MetricsReport& m,
                          std::span<const PredictionRecord> records,
                          const std::vector<int>& ks) {
  ordered_json j;
  j["log"] = log;
  j["n_records"] = m.n_records;
  j["top1"] = m.top1;
  j["top5"] = m.top5;
  ordered_json topk = ordered_json::object();
  for (const int k : ks) {
    topk["top" + std::to_string(k)] =
        accuracy(records, static_cast<std::size_t>(k));
  }
  j["topk"] = topk;
  j["macro_precision"] = m.macro_precision;
  ordered_json dom = ordered_json::object();
  for (const auto& [name, d] : m.per_domain) {
    dom[name] = {{"top1", d.top1}, {"top5", d.top5}, {"count", d.count}};
  }
  j["per_domain"] = dom;
  return j;
}

std::string fixed4(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(4) << v;
  return ss.str();
}

int cmd_generate(const std::string& corpus, const std::string& masks,
                 const std::string& out_dir, std::uint64_t seed,
                 const std::string& grids, const std::string& ratios,
                 const std::string& outside, int fill, bool invert,
                 unsigned workers, std::ostream& out) {
  if (fill < 0 || fill > 255) {
    throw Error(ErrorCode::kConfigError, "--fill must be in [0, 255]");
  }
  OcclusionConfig config;
  config.global_seed = seed;
  config.fill = static_cast<std::uint8_t>(fill);
  config.invert_compose = invert;
  config.variants = OcclusionConfig::make_variants(
      parse_int_list(grids, "--grids"), parse_int_list(ratios, "--ratios"),
      parse_int_list(outside, "--outside-grids"));
  if (config.variants.empty()) {
    throw Error(ErrorCode::kConfigError, "no variants configured");
  }
  const Manifest m = run_generate(corpus, masks, out_dir, config, {workers});
  std::size_t counts[4] = {0, 0, 0, 0};
  for (const auto& r : m.records) ++counts[static_cast<int>(r.status)];
  out << "variants: " << config.variants.size()
      << "  records: " << m.records.size() << "  ok: " << counts[0]
      << "  skipped_no_mask: " << counts[1]
      << "  skipped_empty_mask: " << counts[2] << "  error: " << counts[3]
      << "\nmanifest: " << (fs::path(out_dir) / kManifestFileName).string()
      << "\n";
  return kExitOk;
}

int cmd_measure(const std::string& out_dir, std::ostream& out) {
  const MeasureReport report = measure(out_dir);
  for (const auto& issue : report.issues) {
    out << "MISMATCH " << issue.image_relpath << " " << issue.variant_id
        << ": " << issue.problem << "\n";
  }
  out << "checked: " << report.checked << "  passed: " << report.passed
      << "  mismatches: " << report.issues.size() << "\n";
  return report.ok() ? kExitOk : kExitVerifyFailed;
}

int cmd_attn(const std::vector<std::string>& inputs, const std::string& units,
             const std::string& out_path, std::ostream& out) {
  std::vector<fs::path> files;
  for (const auto& pattern : inputs) {
    const auto matched = expand_glob(pattern);
    files.insert(files.end(), matched.begin(), matched.end());
  }
  std::sort(files.begin(), files.end());
  files.erase(std::unique(files.begin(), files.end()), files.end());
  if (files.empty()) {
    throw Error(ErrorCode::kConfigError, "--inputs matched no files");
  }
  const AttentionDistanceTable table = analyze(
      files, units == "patches" ? DistanceUnits::kPatches : DistanceUnits::kPixels);
  const std::string csv = table_to_csv(table);
  if (out_path.empty() || out_path == "-") {
    out << csv;
  } else {
    write_text(out_path, csv);
    out << "wrote " << table.rows.size() << " rows over " << table.n_datapoints
        << " tensors to " << out_path << "\n";
  }
  return kExitOk;
}

int cmd_eval(const std::string& baseline, const std::vector<std::string>& occluded,
             const std::string& log, bool per_domain_flag, const std::string& ks_text,
             const std::string& out_path, const std::string& csv_path,
             std::ostream& out) {
  std::vector<int> ks = parse_int_list(ks_text, "--k");
  for (const int k : ks) {
    if (k < 1) throw Error(ErrorCode::kConfigError, "--k values must be >= 1");
  }

  if (!log.empty()) {
    if (!baseline.empty() || !occluded.empty()) {
      throw Error(ErrorCode::kConfigError,
                  "--log cannot be combined with --baseline/--occluded");
    }
    const auto records = read_prediction_log(log);
    const MetricsReport m = evaluate(records);
    const ordered_json j = metrics_json(log, m, records, ks);
    if (per_domain_flag) {
      out << "domain,top1,top5,count\n";
      for (const auto& [name, d] : m.per_domain) {
        out << name << "," << fixed4(d.top1) << "," << fixed4(d.top5) << ","
            << d.count << "\n";
      }
    }
    out << "overall top1=" << fixed4(m.top1) << " top5=" << fixed4(m.top5)
        << " precision=" << fixed4(m.macro_precision) << " n=" << m.n_records
        << "\n";
    if (!out_path.empty()) write_text(out_path, j.dump(2) + "\n");
    return kExitOk;
  }

  if (baseline.empty()) {
    throw Error(ErrorCode::kConfigError, "eval needs --log or --baseline");
  }
  const auto base_records = read_prediction_log(baseline);
  const MetricsReport base = evaluate(base_records);
  ordered_json report;
  report["k"] = ks;
  report["baseline"] = metrics_json(baseline, base, base_records, ks);
  report["occluded"] = ordered_json::array();

  std::string csv = "Dataset,Top1 Acc,Top5 Acc,Top1 Gap,Top5 Gap\n";
  csv += fs::path(baseline).stem().string() + "," + fixed4(base.top1) + "," +
         fixed4(base.top5) + ",-,-\n";
  for (const auto& path : occluded) {
    const auto records = read_prediction_log(path);
    const MetricsReport m = evaluate(records);
    const GapReport g = gap(base, m);
    ordered_json j = metrics_json(path, m, records, ks);
    j["top1_gap"] = g.top1_gap;
    j["top5_gap"] = g.top5_gap;
    j["top1_gap_display"] = format_gap(g.top1_gap);
    j["top5_gap_display"] = format_gap(g.top5_gap);
    report["occluded"].push_back(j);
    csv += fs::path(path).stem().string() + "," + fixed4(m.top1) + "," +
           fixed4(m.top5) + "," + format_gap(g.top1_gap) + "," +
           format_gap(g.top5_gap) + "\n";
  }
  if (!out_path.empty()) {
    write_text(out_path, report.dump(2) + "\n");
  } else {
    out << report.dump(2) << "\n";
  }
  if (!csv_path.empty()) write_text(csv_path, csv);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Occlusion benchmark generation and model-behaviour analysis"};
  app.name(args.empty() ? "occlumark" : args.front());
  app.require_subcommand(1);

  std::string corpus, masks, gen_out;
  std::uint64_t seed = 0;
  std::string grids = "2,5,9", ratios = "25,50,75", outside = "5";
  int fill = 0;
  bool invert = false;
  unsigned workers = 1;
  auto* gen = app.add_subcommand("generate", "Generate occluded benchmark variants");
  gen->add_option("--corpus", corpus, "Corpus root (domain/class/image)")->required();
  gen->add_option("--masks", masks, "Mask root mirroring the corpus")->required();
  gen->add_option("--out", gen_out, "Output root")->required();
  gen->add_option("--seed", seed, "Global seed")->required();
  gen->add_option("--grids", grids, "Inside-mode grid counts");
  gen->add_option("--ratios", ratios, "Occlusion ratios in percent");
  gen->add_option("--outside-grids", outside,
                  "Grid counts that also get an outside-edges variant; empty for none");
  gen->add_option("--fill", fill, "Fill value for occluded pixels");
  gen->add_flag("--invert-compose", invert,
                "Keep only the effective-mask pixels instead of removing them");
  gen->add_option("--workers", workers, "Worker threads (0 = all cores)");

  std::string measure_out;
  auto* meas = app.add_subcommand("measure", "Re-verify a generated benchmark");
  meas->add_option("--out", measure_out, "Output root of a generate run")->required();

  std::vector<std::string> attn_inputs;
  std::string units = "pixels", attn_out;
  auto* attn = app.add_subcommand("attn-dist", "Mean attention distance per head");
  attn->add_option("--inputs", attn_inputs, "ATNW files or glob patterns")
      ->required();
  attn->add_option("--units", units, "pixels or patches")
      ->check(CLI::IsMember({"pixels", "patches"}));
  attn->add_option("--out", attn_out, "CSV output path ('-' for stdout)");

  std::string baseline, log, ks = "1,5", eval_out, csv_out;
  std::vector<std::string> occluded;
  bool per_domain_flag = false;
  auto* ev = app.add_subcommand("eval", "Top-k accuracy, gaps and precision");
  ev->add_option("--baseline", baseline, "Baseline prediction log");
  ev->add_option("--occluded", occluded, "Occluded prediction logs");
  ev->add_option("--log", log, "Single prediction log");
  ev->add_flag("--per-domain", per_domain_flag, "Print per-domain accuracy");
  ev->add_option("--k", ks, "Extra top-k cut-offs");
  ev->add_option("--out", eval_out, "JSON report path");
  ev->add_option("--csv", csv_out, "CSV table path (Dataset, Top1 Acc, ...)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen) {
      return cmd_generate(corpus, masks, gen_out, seed, grids, ratios, outside,
                          fill, invert, workers, out);
    }
    if (*meas) return cmd_measure(measure_out, out);
    if (*attn) return cmd_attn(attn_inputs, units, attn_out, out);
    if (*ev) {
      return cmd_eval(baseline, occluded, log, per_domain_flag, ks, eval_out,
                      csv_out, out);
    }
  } catch (const Error& e) {
    err << "occlumark: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "occlumark: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitConfig;
}

}  // namespace occlumark::cli
