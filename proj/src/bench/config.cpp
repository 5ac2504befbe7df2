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


#include "bench/config.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include "common/error.hpp"
#include "common/text.hpp"

namespace priorboost::bench {
namespace {

std::string Resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty()) return path;
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

[[noreturn]] void BadValue(const std::string& key, const std::string& value) {
  Fail(ErrorCode::kParse, "bad value for " + key + ": '" + value + "'");
}

std::uint64_t ParseU64(const std::string& key, const std::string& value) {
  const auto v = text::ParseUint(value);
  if (!v) BadValue(key, value);
  return *v;
}

int ParseBudget(const std::string& key, const std::string& value) {
  const auto v = text::ParseInt(value);
  if (!v || *v < 1 || *v > 1000000) BadValue(key, value);
  return static_cast<int>(*v);
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  BadValue(key, value);
}

std::vector<std::string> ListItems(const std::string& value) {
  std::vector<std::string> out;
  for (const std::string& item : text::Split(value, ',')) {
    const std::string_view t = text::Trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

void SetGlobal(BenchConfig& config, const std::string& key, const std::string& value,
               const std::string& base_dir) {
  if (key == "sizes") {
    config.sizes.clear();
    for (const std::string& item : ListItems(value)) {
      const auto size = data::ParseSize(item);
      if (!size) BadValue(key, value);
      config.sizes.push_back(*size);
    }
  } else if (key == "seeds") {
    config.seeds.clear();
    for (const std::string& item : ListItems(value)) config.seeds.push_back(ParseU64(key, item));
  } else if (key == "budget_gbdt") {
    config.budget_gbdt = ParseBudget(key, value);
  } else if (key == "budget_scale") {
    config.budget_scale = ParseBudget(key, value);
  } else if (key == "budget_baseline") {
    config.budget_baseline = ParseBudget(key, value);
  } else if (key == "space") {
    config.space = hpo::ParseEngineStyle(value);
  } else if (key == "methods") {
    config.methods.clear();
    for (const std::string& item : ListItems(value)) config.methods.push_back(metrics::ParseMethod(item));
  } else if (key == "output") {
    config.output = Resolve(value, base_dir);
  } else if (key == "centering") {
    config.centering = fusion::ParseAxis(value);
  } else if (key == "shuffle_headers") {
    config.shuffle_headers = ParseBool(key, value);
  } else if (key == "shuffle_seed") {
    config.shuffle_seed = ParseU64(key, value);
  } else if (key == "workers") {
    config.workers = static_cast<std::size_t>(ParseU64(key, value));
  } else if (key == "test_fraction") {
    const auto v = text::ParseDouble(value);
    if (!v || *v <= 0.0 || *v >= 1.0) BadValue(key, value);
    config.test_fraction = *v;
  } else {
    Fail(ErrorCode::kParse, "unknown config key: " + key);
  }
}

void SetDatasetKey(DatasetEntry& entry, const std::string& key, const std::string& value,
                   const std::string& base_dir) {
  if (key == "data") {
    entry.data_path = Resolve(value, base_dir);
  } else if (key == "scores") {
    entry.scores_path = Resolve(value, base_dir);
  } else if (key == "target") {
    entry.target = value;
  } else if (key == "test_size") {
    entry.test_size = static_cast<std::size_t>(ParseU64(key, value));
  } else if (key == "synthetic") {
    entry.synthetic = synth::SyntheticSpec::FromString(value);
  } else if (key == "seed") {
    entry.synthetic_seed = ParseU64(key, value);
  } else {
    Fail(ErrorCode::kParse, "unknown dataset key: " + key);
  }
}

DatasetEntry& FindOrAddDataset(BenchConfig& config, const std::string& name) {
  for (DatasetEntry& d : config.datasets) {
    if (d.name == name) return d;
  }
  Check(!name.empty() && name.find_first_of(", \t") == std::string::npos, ErrorCode::kParse,
        "bad dataset name: '" + name + "'");
  config.datasets.push_back({});
  config.datasets.back().name = name;
  return config.datasets.back();
}

std::pair<std::string, std::string> SplitAssignment(std::string_view line) {
  const auto eq = line.find('=');
  Check(eq != std::string_view::npos, ErrorCode::kParse, "expected key = value: '" + std::string(line) + "'");
  return {std::string(text::Trim(line.substr(0, eq))), std::string(text::Trim(line.substr(eq + 1)))};
}

}  // namespace

bool BenchConfig::Wants(metrics::MethodTag method) const {
  return std::find(methods.begin(), methods.end(), method) != methods.end();
}

bool BenchConfig::NeedsPrior() const {
  return std::any_of(methods.begin(), methods.end(),
                     [](metrics::MethodTag m) { return m != metrics::MethodTag::kGbdt; });
}

void BenchConfig::Validate() const {
  Check(!datasets.empty(), ErrorCode::kInvalidArgument, "config has no datasets");
  Check(!sizes.empty(), ErrorCode::kInvalidArgument, "config has no sizes");
  Check(!seeds.empty(), ErrorCode::kInvalidArgument, "config has no seeds");
  Check(!methods.empty(), ErrorCode::kInvalidArgument, "config has no methods");
  Check(budget_gbdt >= 1 && budget_scale >= 1 && budget_baseline >= 1, ErrorCode::kInvalidArgument,
        "budgets must be positive");
  Check(budget_gbdt + budget_scale == budget_baseline, ErrorCode::kInvalidArgument,
        "unbalanced budgets: budget_gbdt + budget_scale must equal budget_baseline (" +
            std::to_string(budget_gbdt) + " + " + std::to_string(budget_scale) +
            " != " + std::to_string(budget_baseline) + ")");
  for (data::NominalSize size : sizes) {
    Check(size == data::kFullSize || size >= 1, ErrorCode::kInvalidArgument, "bad size in ladder");
  }
  Check(std::set<data::NominalSize>(sizes.begin(), sizes.end()).size() == sizes.size(),
        ErrorCode::kInvalidArgument, "duplicate size in ladder");
  Check(std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() == seeds.size(),
        ErrorCode::kInvalidArgument, "duplicate seed");
  Check(std::set<metrics::MethodTag>(methods.begin(), methods.end()).size() == methods.size(),
        ErrorCode::kInvalidArgument, "duplicate method");
  Check(!output.empty(), ErrorCode::kInvalidArgument, "output directory is empty");
  for (const DatasetEntry& d : datasets) {
    if (d.synthetic) {
      Check(d.data_path.empty() && d.scores_path.empty(), ErrorCode::kInvalidArgument,
            "dataset " + d.name + ": synthetic entries take no data or scores files");
      continue;
    }
    Check(!d.data_path.empty(), ErrorCode::kInvalidArgument, "dataset " + d.name + ": missing data path");
    Check(!d.target.empty(), ErrorCode::kInvalidArgument, "dataset " + d.name + ": missing target");
    Check(!NeedsPrior() || !d.scores_path.empty(), ErrorCode::kInvalidArgument,
          "dataset " + d.name + ": methods need prior scores but no scores file is set");
  }
}

void BenchConfig::Set(const std::string& assignment, const std::string& base_dir) {
  const auto [key, value] = SplitAssignment(assignment);
  if (key.rfind("dataset.", 0) == 0) {
    const std::string rest = key.substr(8);
    const auto dot = rest.rfind('.');
    Check(dot != std::string::npos, ErrorCode::kParse, "expected dataset.NAME.key: " + key);
    SetDatasetKey(FindOrAddDataset(*this, rest.substr(0, dot)), rest.substr(dot + 1), value, base_dir);
    return;
  }
  SetGlobal(*this, key, value, base_dir);
}

std::string BenchConfig::ToText() const {
  std::ostringstream out;
  const auto join = [&](const auto& items, auto render) {
    std::string s;
    for (const auto& item : items) s += (s.empty() ? "" : ",") + render(item);
    return s;
  };
  out << "sizes = " << join(sizes, data::SizeToString) << "\n";
  out << "seeds = " << join(seeds, [](std::uint64_t s) { return std::to_string(s); }) << "\n";
  out << "budget_gbdt = " << budget_gbdt << "\n";
  out << "budget_scale = " << budget_scale << "\n";
  out << "budget_baseline = " << budget_baseline << "\n";
  out << "space = " << hpo::ToString(space) << "\n";
  out << "methods = " << join(methods, [](metrics::MethodTag m) { return std::string(metrics::ToString(m)); })
      << "\n";
  out << "output = " << output << "\n";
  out << "centering = " << fusion::ToString(centering) << "\n";
  out << "shuffle_headers = " << (shuffle_headers ? "true" : "false") << "\n";
  out << "shuffle_seed = " << shuffle_seed << "\n";
  out << "workers = " << workers << "\n";
  out << "test_fraction = " << text::FormatDouble(test_fraction) << "\n";
  for (const DatasetEntry& d : datasets) {
    out << "\n[dataset " << d.name << "]\n";
    if (d.synthetic) {
      out << "synthetic = " << d.synthetic->ToString() << "\n";
      out << "seed = " << d.synthetic_seed << "\n";
    }
    if (!d.data_path.empty()) out << "data = " << d.data_path << "\n";
    if (!d.scores_path.empty()) out << "scores = " << d.scores_path << "\n";
    if (!d.target.empty()) out << "target = " << d.target << "\n";
    if (d.test_size) out << "test_size = " << *d.test_size << "\n";
  }
  return out.str();
}

BenchConfig ParseConfig(const std::string& text_in, const std::string& base_dir) {
  BenchConfig config;
  DatasetEntry* section = nullptr;
  std::size_t line_no = 0;
  std::istringstream in(text_in);
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = text::Trim(raw);
    if (line.empty() || line.front() == '#') continue;
    try {
      if (line.front() == '[') {
        Check(line.back() == ']', ErrorCode::kParse, "unterminated section header");
        const std::string_view inner = text::Trim(line.substr(1, line.size() - 2));
        Check(inner.rfind("dataset", 0) == 0 && inner.size() > 7 && (inner[7] == ' ' || inner[7] == '\t'),
              ErrorCode::kParse, "expected [dataset NAME]");
        const std::string name(text::Trim(inner.substr(7)));
        const bool exists = std::any_of(config.datasets.begin(), config.datasets.end(),
                                        [&](const DatasetEntry& d) { return d.name == name; });
        Check(!exists, ErrorCode::kParse, "duplicate dataset section: " + name);
        section = &FindOrAddDataset(config, name);
        continue;
      }
      const auto [key, value] = SplitAssignment(line);
      if (section) {
        SetDatasetKey(*section, key, value, base_dir);
      } else {
        SetGlobal(config, key, value, base_dir);
      }
    } catch (const Error& e) {
      Fail(e.code(), "config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

BenchConfig LoadConfig(const std::string& path) {
  const std::string base = std::filesystem::path(path).parent_path().string();
  return ParseConfig(text::ReadFile(path), base);
}

}  // namespace priorboost::bench
