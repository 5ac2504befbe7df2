/*
 * Copyright 2026 The PriorBoost Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <algorithm>
#include <filesystem>
#include <sstream>

#include "bench/runner.hpp"
#include "common/error.hpp"
#include "common/text.hpp"

namespace priorboost::bench {
namespace {

constexpr const char* kRecordsHeader = "dataset,size,seed,method,val_auc,test_auc";
constexpr const char* kShapesHeader = "dataset,size,train,val,test";

std::string Cell(const metrics::CellStats& s) {
  return text::FormatFixed(s.mean_test_auc, 4) + " ± " + text::FormatFixed(s.std_error, 4);
}

// Index set of the best entries; `higher` selects max, else min.
std::vector<bool> BestMask(const std::vector<double>& values, bool higher) {
  std::vector<bool> mask(values.size(), false);
  if (values.empty()) return mask;
  const double best = higher ? *std::max_element(values.begin(), values.end())
                             : *std::min_element(values.begin(), values.end());
  for (std::size_t i = 0; i < values.size(); ++i) mask[i] = values[i] == best;
  return mask;
}

std::string Bold(const std::string& s, bool on) { return on ? "**" + s + "**" : s; }

std::string MethodHeader(const std::vector<metrics::MethodTag>& methods) {
  std::string s;
  for (metrics::MethodTag m : methods) s += " " + std::string(metrics::ToString(m)) + " |";
  return s;
}

std::string Rule(std::size_t lead, std::size_t methods) {
  std::string s = "|";
  for (std::size_t i = 0; i < lead + methods; ++i) s += "---:|";
  return s;
}

}  // namespace

std::string FormatRecords(const std::vector<metrics::EvalRecord>& records) {
  std::ostringstream out;
  out << kRecordsHeader << "\n";
  for (const metrics::EvalRecord& r : records) {
    out << text::CsvField(r.dataset) << "," << data::SizeToString(r.size) << "," << r.seed << ","
        << metrics::ToString(r.method) << "," << text::FormatDouble(r.val_auc) << ","
        << text::FormatDouble(r.test_auc) << "\n";
  }
  return out.str();
}

std::vector<metrics::EvalRecord> ParseRecords(const std::string& body, std::size_t* discarded) {
  std::vector<metrics::EvalRecord> out;
  std::size_t bad = 0;
  std::istringstream in(body);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first && line == kRecordsHeader) {
      first = false;
      continue;
    }
    first = false;
    if (text::Trim(line).empty()) continue;
    const std::vector<std::string> f = text::SplitCsvLine(line);
    try {
      Check(f.size() == 6 && !f[0].empty(), ErrorCode::kParse, "bad record");
      metrics::EvalRecord r{f[0], 0, 0, metrics::ParseMethod(f[3]), 0.0, 0.0};
      const auto size = data::ParseSize(f[1]);
      const auto seed = text::ParseUint(f[2]);
      const auto val = text::ParseDouble(f[4]);
      const auto test = text::ParseDouble(f[5]);
      Check(size && seed && val && test, ErrorCode::kParse, "bad record");
      r.size = *size;
      r.seed = *seed;
      r.val_auc = *val;
      r.test_auc = *test;
      Check(r.val_auc >= 0 && r.val_auc <= 1 && r.test_auc >= 0 && r.test_auc <= 1, ErrorCode::kParse, "bad record");
      out.push_back(std::move(r));
    } catch (const Error&) {
      ++bad;
    }
  }
  if (discarded) *discarded = bad;
  return out;
}

std::string FormatShapes(const ShapeMap& shapes) {
  std::ostringstream out;
  out << kShapesHeader << "\n";
  for (const auto& [key, s] : shapes) {
    out << text::CsvField(key.first) << "," << data::SizeToString(key.second) << "," << s.train << ","
        << s.val << "," << s.test << "\n";
  }
  return out.str();
}

ShapeMap ParseShapes(const std::string& body) {
  ShapeMap out;
  std::istringstream in(body);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line == kShapesHeader) continue;
    if (text::Trim(line).empty()) continue;
    const std::vector<std::string> f = text::SplitCsvLine(line);
    Check(f.size() == 5, ErrorCode::kParse, "splits.csv line " + std::to_string(line_no) + ": expected 5 fields");
    const auto size = data::ParseSize(f[1]);
    const auto train = text::ParseUint(f[2]);
    const auto val = text::ParseUint(f[3]);
    const auto test = text::ParseUint(f[4]);
    Check(size && train && val && test, ErrorCode::kParse,
          "splits.csv line " + std::to_string(line_no) + ": bad number");
    out[{f[0], *size}] = {*train, *val, *test};
  }
  return out;
}

std::string FormatSummaryBySize(const metrics::AggregateReport& report) {
  std::ostringstream out;
  out << "size,method,n_datasets,mean_auc,mean_rank,mean_z\n";
  for (const metrics::SizeSummary& s : report.sizes) {
    for (std::size_t k = 0; k < s.methods.size(); ++k) {
      out << data::SizeToString(s.size) << "," << metrics::ToString(s.methods[k]) << "," << s.n_datasets << ","
          << text::FormatDouble(s.mean_auc[k]) << "," << text::FormatDouble(s.mean_rank[k]) << ","
          << text::FormatDouble(s.mean_z[k]) << "\n";
    }
  }
  return out.str();
}

std::string FormatTables(const metrics::AggregateReport& report, const ShapeMap& shapes,
                         const BenchConfig* config) {
  std::ostringstream out;
  out << "# Benchmark results\n\n";
  out << "Mean test AUC ± standard error over seeds. The best method per row is bold.\n";
  if (config) {
    std::vector<std::string> parts;
    if (config->Wants(metrics::MethodTag::kFused)) {
      parts.push_back("fused " + std::to_string(config->budget_gbdt) + " + " + std::to_string(config->budget_scale));
    }
    for (const metrics::MethodTag m : {metrics::MethodTag::kGbdt, metrics::MethodTag::kStacking}) {
      if (config->Wants(m)) parts.push_back(std::string(metrics::ToString(m)) + " " + std::to_string(config->budget_baseline));
    }
    if (!parts.empty()) {
      out << "\nHPO trials per cell:";
      for (std::size_t i = 0; i < parts.size(); ++i) out << (i ? ", " : " ") << parts[i];
      out << " (space " << hpo::ToString(config->space) << ").\n";
    }
  }
  std::string current;
  for (const metrics::RowSummary& row : report.rows) {
    if (row.dataset != current) {
      current = row.dataset;
      out << "\n## " << current << "\n\n";
      out << "| Train | Val | Test |" << MethodHeader(row.methods) << "\n";
      out << Rule(3, row.methods.size()) << "\n";
    }
    const auto it = shapes.find({row.dataset, row.size});
    if (it != shapes.end()) {
      out << "| " << it->second.train << " | " << it->second.val << " | " << it->second.test << " |";
    } else {
      out << "| " << data::SizeToString(row.size) << " | - | - |";
    }
    std::vector<double> means;
    for (const metrics::CellStats& s : row.stats) means.push_back(s.mean_test_auc);
    const std::vector<bool> best = BestMask(means, true);
    for (std::size_t k = 0; k < row.stats.size(); ++k) out << " " << Bold(Cell(row.stats[k]), best[k]) << " |";
    out << "\n";
  }

  if (!report.sizes.empty()) {
    const std::vector<metrics::MethodTag>& methods = report.sizes.front().methods;
    const auto block = [&](const char* title, auto pick, bool higher) {
      out << "\n## " << title << "\n\n| Size | Datasets |" << MethodHeader(methods) << "\n";
      out << Rule(2, methods.size()) << "\n";
      for (const metrics::SizeSummary& s : report.sizes) {
        const std::vector<double>& values = pick(s);
        const std::vector<bool> best = BestMask(values, higher);
        out << "| " << data::SizeToString(s.size) << " | " << s.n_datasets << " |";
        for (std::size_t k = 0; k < values.size(); ++k) {
          out << " " << Bold(text::FormatFixed(values[k], 4), best[k]) << " |";
        }
        out << "\n";
      }
    };
    block("Average AUC by size", [](const metrics::SizeSummary& s) -> const std::vector<double>& { return s.mean_auc; }, true);
    block("Average rank by size", [](const metrics::SizeSummary& s) -> const std::vector<double>& { return s.mean_rank; }, false);
    block("Average z-score by size", [](const metrics::SizeSummary& s) -> const std::vector<double>& { return s.mean_z; }, true);
  }
  return out.str();
}

void EmitReport(const metrics::AggregateReport& report, const ShapeMap& shapes, const std::string& out_dir,
                const BenchConfig* config) {
  Check(!report.records.empty(), ErrorCode::kInvalidArgument, "empty report");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  Check(!ec, ErrorCode::kIo, "cannot create output directory " + out_dir + ": " + ec.message());
  const fs::path dir(out_dir);
  text::WriteFile((dir / "records.csv").string(), FormatRecords(report.records));
  text::WriteFile((dir / "splits.csv").string(), FormatShapes(shapes));
  text::WriteFile((dir / "summary_by_size.csv").string(), FormatSummaryBySize(report));
  text::WriteFile((dir / "tables.md").string(), FormatTables(report, shapes, config));
  std::string notes;
  for (const std::string& n : report.notes) notes += n + "\n";
  text::WriteFile((dir / "notes.txt").string(), notes);
}

}  // namespace priorboost::bench
