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

#include "synthetic/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "common/text.hpp"

namespace priorboost::synth {

void SyntheticSpec::Validate() const {
  Check(n_rows >= 2, ErrorCode::kInvalidArgument, "n_rows must be >= 2");
  Check(n_features >= 1, ErrorCode::kInvalidArgument, "n_features must be >= 1");
  Check(n_informative <= n_features, ErrorCode::kInvalidArgument, "n_informative exceeds n_features");
  Check(n_classes >= 2 && n_classes <= data::kMaxClasses, ErrorCode::kInvalidArgument,
        "classes must lie in [2, 5]");
  Check(label_noise >= 0.0 && label_noise <= 1.0, ErrorCode::kInvalidArgument,
        "label_noise must lie in [0, 1]");
  Check(prior_quality >= 0.0 && prior_quality <= 1.0, ErrorCode::kInvalidArgument,
        "quality must lie in [0, 1]");
}

std::string SyntheticSpec::ToString() const {
  std::ostringstream out;
  out << "n_rows=" << n_rows << ",n_features=" << n_features << ",n_informative=" << n_informative
      << ",classes=" << n_classes << ",weight_seed=" << weight_seed
      << ",label_noise=" << text::FormatDouble(label_noise)
      << ",quality=" << text::FormatDouble(prior_quality);
  return out.str();
}

SyntheticSpec SyntheticSpec::FromString(const std::string& s) {
  SyntheticSpec spec;
  for (const std::string& token : text::Split(s, ',')) {
    const std::string_view t = text::Trim(token);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    Check(eq != std::string_view::npos, ErrorCode::kParse, "bad synthetic spec token: " + std::string(t));
    const std::string key(text::Trim(t.substr(0, eq)));
    const std::string value(text::Trim(t.substr(eq + 1)));
    const auto uint = [&] {
      const auto v = text::ParseUint(value);
      Check(v.has_value(), ErrorCode::kParse, "bad value for " + key + ": " + value);
      return *v;
    };
    const auto real = [&] {
      const auto v = text::ParseDouble(value);
      Check(v.has_value(), ErrorCode::kParse, "bad value for " + key + ": " + value);
      return *v;
    };
    if (key == "n_rows") spec.n_rows = uint();
    else if (key == "n_features") spec.n_features = uint();
    else if (key == "n_informative") spec.n_informative = uint();
    else if (key == "classes") spec.n_classes = uint();
    else if (key == "weight_seed") spec.weight_seed = uint();
    else if (key == "label_noise") spec.label_noise = real();
    else if (key == "quality") spec.prior_quality = real();
    else Fail(ErrorCode::kParse, "unknown synthetic spec key: " + key);
  }
  spec.Validate();
  return spec;
}

Generated Generate(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.Validate();
  const std::size_t n = spec.n_rows;
  const std::size_t f = spec.n_features;
  const std::size_t k = spec.n_classes;

  std::vector<double> weights(spec.n_informative * k);
  Rng weight_rng(DeriveSeed(spec.weight_seed, 0x3e16));
  for (double& w : weights) w = weight_rng.Normal();

  Generated out;
  data::Dataset& ds = out.dataset;
  ds.n_rows = n;
  ds.n_features = f;
  ds.features.resize(n * f);
  ds.labels.resize(n);
  ds.row_ids.resize(n);
  ds.category_maps.assign(f, std::nullopt);
  for (std::size_t j = 0; j < f; ++j) ds.schema.columns.push_back({"f" + std::to_string(j), data::ColumnKind::kNumeric});
  ds.schema.columns.push_back({"label", data::ColumnKind::kCategorical});
  ds.schema.target = "label";
  for (std::size_t c = 0; c < k; ++c) ds.schema.class_labels.push_back("c" + std::to_string(c));

  Rng feature_rng(DeriveSeed(seed, 0xfea7));
  Rng label_rng(DeriveSeed(seed, 0x1abe1));
  out.true_logits = gbdt::MarginMatrix(n, k);
  std::vector<double> prob(k);
  for (std::size_t i = 0; i < n; ++i) {
    ds.row_ids[i] = static_cast<data::RowId>(i);
    for (std::size_t j = 0; j < f; ++j) ds.features[i * f + j] = feature_rng.Normal();
    double top = -INFINITY;
    for (std::size_t c = 0; c < k; ++c) {
      double z = 0.0;
      for (std::size_t j = 0; j < spec.n_informative; ++j) z += ds.features[i * f + j] * weights[j * k + c];
      out.true_logits.at(i, c) = z;
      top = std::max(top, z);
    }
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      prob[c] = std::exp(out.true_logits.at(i, c) - top);
      total += prob[c];
    }
    double u = label_rng.Uniform() * total;
    std::size_t label = k - 1;
    for (std::size_t c = 0; c < k; ++c) {
      if (u < prob[c]) {
        label = c;
        break;
      }
      u -= prob[c];
    }
    if (label_rng.Uniform() < spec.label_noise) {
      label = (label + 1 + static_cast<std::size_t>(label_rng.Below(k - 1))) % k;
    }
    ds.labels[i] = static_cast<int>(label);
  }
  return out;
}

fusion::PriorScores MakePrior(const gbdt::MarginMatrix& true_logits,
                              const std::vector<data::RowId>& row_ids,
                              const std::vector<std::string>& class_labels, double quality,
                              std::uint64_t noise_seed) {
  Check(quality >= 0.0 && quality <= 1.0, ErrorCode::kInvalidArgument, "quality must lie in [0, 1]");
  Check(row_ids.size() == true_logits.rows && class_labels.size() == true_logits.cols,
        ErrorCode::kInvalidArgument, "prior shape mismatch");
  fusion::PriorScores prior;
  prior.row_ids = row_ids;
  prior.class_labels = class_labels;
  prior.source = fusion::PriorSource::kSynthetic;
  prior.model = "synthetic q=" + text::FormatDouble(quality);
  prior.scores = gbdt::MarginMatrix(true_logits.rows, true_logits.cols);
  Rng rng(DeriveSeed(noise_seed, 0x9015e));
  for (std::size_t i = 0; i < true_logits.values.size(); ++i) {
    prior.scores.values[i] = quality * true_logits.values[i] + (1.0 - quality) * rng.Normal();
  }
  return prior;
}

void WriteCsv(const data::Dataset& dataset, const std::string& path) {
  std::ostringstream out;
  const std::size_t target = dataset.schema.TargetIndex();
  for (std::size_t c = 0; c < dataset.schema.columns.size(); ++c) {
    out << (c ? "," : "") << text::CsvField(dataset.schema.columns[c].name);
  }
  out << "\n";
  for (std::size_t r = 0; r < dataset.n_rows; ++r) {
    std::size_t f = 0;
    for (std::size_t c = 0; c < dataset.schema.columns.size(); ++c) {
      if (c) out << ",";
      if (c == target) {
        out << text::CsvField(dataset.schema.class_labels[static_cast<std::size_t>(dataset.labels[r])]);
        continue;
      }
      const double v = dataset.At(r, f);
      if (!data::IsMissing(v)) {
        if (dataset.category_maps[f]) {
          out << text::CsvField(dataset.category_maps[f]->Decode(static_cast<std::int64_t>(v)));
        } else {
          out << text::FormatDouble(v);
        }
      }
      ++f;
    }
    out << "\n";
  }
  text::WriteFile(path, out.str());
}

}  // namespace priorboost::synth
