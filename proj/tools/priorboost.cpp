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


// priorboost command-line tool. Links only the public C API.
//
// Exit codes: 0 success, 1 usage / configuration / input error, 2 a benchmark
// run that produced no records at all.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "priorboost/priorboost.h"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRunFailed = 2;

// Owns a string returned by the C API.
struct CString {
  char* p = nullptr;
  ~CString() { pb_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

int Report(pb_status status) {
  if (status == PB_OK) return 0;
  std::cerr << "priorboost: " << pb_status_name(status) << ": " << pb_last_error() << "\n";
  return status == PB_ERR_RUN_FAILED ? kExitRunFailed : kExitConfig;
}

int Emit(const std::string& body, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << body;
    return 0;
  }
  std::ofstream file(out, std::ios::binary);
  file << body;
  if (!file) {
    std::cerr << "priorboost: cannot write " << out << "\n";
    return kExitConfig;
  }
  return 0;
}

void LogLine(const char* line, void* user) {
  if (*static_cast<bool*>(user)) return;
  std::cerr << line << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"priorboost: gradient-boosted trees seeded with transformer prior scores"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pb_version()));
  int code = 0;

  std::string data, target, out;

  auto* schema = app.add_subcommand("schema", "Infer the schema of a CSV file");
  schema->add_option("--data", data, "CSV file")->required();
  schema->add_option("--target", target, "Target column")->required();
  schema->add_option("--out", out, "Output file (default stdout)");
  schema->callback([&] {
    CString s;
    code = Report(pb_schema_infer(data.c_str(), target.c_str(), &s.p));
    if (code == 0) code = Emit(s.str(), out);
  });

  std::string name = "dataset", sizes = "10,25,50,100,250", seeds = "0,1,2,3,4";
  double test_fraction = 0.2;
  std::int64_t test_size = -1;
  auto* split = app.add_subcommand("split", "Write the train/val/test split manifest");
  split->add_option("--data", data, "CSV file")->required();
  split->add_option("--target", target, "Target column")->required();
  split->add_option("--name", name, "Dataset name in the manifest");
  split->add_option("--sizes", sizes, "Comma list of nominal sizes, 'full' allowed");
  split->add_option("--seeds", seeds, "Comma list of seeds");
  split->add_option("--test-fraction", test_fraction, "Test fraction")->check(CLI::Range(0.0, 1.0));
  split->add_option("--test-size", test_size, "Explicit test row count")->check(CLI::NonNegativeNumber);
  split->add_option("--out", out, "Output file (default stdout)");
  split->callback([&] {
    pb_dataset* ds = nullptr;
    code = Report(pb_dataset_load(data.c_str(), target.c_str(), &ds));
    if (code != 0) return;
    CString manifest, notes;
    code = Report(pb_split_manifest(ds, name.c_str(), sizes.c_str(), seeds.c_str(), test_fraction, test_size,
                                    &manifest.p, &notes.p));
    pb_dataset_free(ds);
    if (code != 0) return;
    std::cerr << notes.str();
    code = Emit(manifest.str(), out);
  });

  std::string spec, out_data, out_scores;
  std::uint64_t seed = 0;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset and its prior score file");
  synth->add_option("--spec", spec, "key=value list, e.g. n_rows=2000,classes=3,quality=0.9")->required();
  synth->add_option("--seed", seed, "Generation seed");
  synth->add_option("--out-data", out_data, "CSV output")->required();
  synth->add_option("--out-scores", out_scores, "Score-file output")->required();
  synth->callback([&] {
    code = Report(pb_synth_write(spec.c_str(), seed, out_data.c_str(), out_scores.c_str()));
  });

  std::string config_path;
  std::vector<std::string> overrides;
  std::int64_t max_cells = -1;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run or resume a benchmark");
  run->add_option("--config", config_path, "Benchmark config file");
  run->add_option("--set", overrides, "key=value override (repeatable)");
  run->add_option("--max-cells", max_cells, "Stop after computing this many new cells");
  run->add_flag("--quiet", quiet, "No progress lines");
  run->callback([&] {
    pb_config* cfg = nullptr;
    code = Report(config_path.empty() ? pb_config_new(&cfg) : pb_config_load(config_path.c_str(), &cfg));
    if (code != 0) return;
    for (const std::string& o : overrides) {
      if ((code = Report(pb_config_set(cfg, o.c_str()))) != 0) break;
    }
    if (code == 0) code = Report(pb_config_validate(cfg));
    if (code == 0) {
      pb_run_info info{};
      code = Report(pb_benchmark_run(cfg, max_cells, LogLine, &quiet, &info));
      if (!quiet) {
        std::cerr << "cells: " << info.cells_total << " total, " << info.cells_reused << " reused, "
                  << info.cells_computed << " computed, " << info.cells_failed << " failed"
                  << (info.interrupted ? ", stopped early" : "") << "\n";
      }
    }
    pb_config_free(cfg);
  });

  std::string records, splits_path;
  auto* report = app.add_subcommand("report", "Rebuild report files from records.csv");
  report->add_option("--records", records, "records.csv")->required();
  report->add_option("--splits", splits_path, "splits.csv with train/val/test counts");
  report->add_option("--out", out, "Output directory")->required();
  report->callback([&] {
    code = Report(pb_report_from_records(records.c_str(), splits_path.empty() ? nullptr : splits_path.c_str(),
                                         out.c_str()));
  });

  std::string schema_path;
  auto* shuffle = app.add_subcommand("shuffle-headers", "Permute feature names of a schema");
  shuffle->add_option("--schema", schema_path, "Schema file (as written by `schema`)");
  shuffle->add_option("--data", data, "CSV file, used when --schema is absent");
  shuffle->add_option("--target", target, "Target column, with --data");
  shuffle->add_option("--seed", seed, "Permutation seed");
  shuffle->add_option("--out", out, "Output file (default stdout)");
  shuffle->callback([&] {
    std::string text;
    if (!schema_path.empty()) {
      std::ifstream in(schema_path, std::ios::binary);
      if (!in) {
        std::cerr << "priorboost: cannot read " << schema_path << "\n";
        code = kExitConfig;
        return;
      }
      text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    } else if (!data.empty() && !target.empty()) {
      CString s;
      if ((code = Report(pb_schema_infer(data.c_str(), target.c_str(), &s.p))) != 0) return;
      text = s.str();
    } else {
      std::cerr << "priorboost: shuffle-headers needs --schema or --data with --target\n";
      code = kExitConfig;
      return;
    }
    CString shuffled;
    code = Report(pb_schema_shuffle_headers(text.c_str(), seed, &shuffled.p));
    if (code == 0) code = Emit(shuffled.str(), out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  return code;
}
