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

#include "fusion/fusion.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "common/error.hpp"
#include "common/text.hpp"

namespace priorboost::fusion {

const char* ToString(PriorSource source) {
  switch (source) {
    case PriorSource::kLlm: return "llm";
    case PriorSource::kTabpfn: return "tabpfn";
    case PriorSource::kSynthetic: return "synthetic";
  }
  return "?";
}

PriorSource ParseSource(const std::string& name) {
  if (name == "llm") return PriorSource::kLlm;
  if (name == "tabpfn") return PriorSource::kTabpfn;
  if (name == "synthetic") return PriorSource::kSynthetic;
  Fail(ErrorCode::kParse, "unknown prior source: " + name);
}

const char* ToString(CenteringAxis axis) { return axis == CenteringAxis::kRow ? "row" : "column"; }

CenteringAxis ParseAxis(const std::string& name) {
  if (name == "row") return CenteringAxis::kRow;
  if (name == "column") return CenteringAxis::kColumn;
  Fail(ErrorCode::kParse, "unknown centering axis: " + name);
}

std::vector<std::size_t> PriorScores::Lookup(std::span<const data::RowId> ids) const {
  std::unordered_map<data::RowId, std::size_t> position;
  position.reserve(row_ids.size());
  for (std::size_t i = 0; i < row_ids.size(); ++i) position.emplace(row_ids[i], i);
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  std::vector<data::RowId> missing;
  for (data::RowId id : ids) {
    const auto it = position.find(id);
    if (it == position.end()) {
      missing.push_back(id);
      continue;
    }
    out.push_back(it->second);
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) {
      list += (i ? "," : "") + std::to_string(missing[i]);
    }
    if (missing.size() > 10) list += ",...";
    Fail(ErrorCode::kFailedPrecondition,
         "uncovered rows: " + std::to_string(missing.size()) + " row(s) lack prior scores (" + list + ")");
  }
  return out;
}

std::uint64_t PriorScores::Hash() const {
  std::uint64_t h = text::Fnv1a(centered ? (axis == CenteringAxis::kRow ? "c:row" : "c:col") : "raw");
  for (const auto& label : class_labels) {
    h = text::Fnv1a(label, h);
    h = text::Fnv1a(std::string_view("\0", 1), h);
  }
  const auto mix = [&h](std::uint64_t bits) {
    for (int i = 0; i < 8; ++i) {
      const char byte = static_cast<char>((bits >> (8 * i)) & 0xff);
      h = text::Fnv1a(std::string_view(&byte, 1), h);
    }
  };
  for (data::RowId id : row_ids) mix(static_cast<std::uint64_t>(id));
  for (double v : scores.values) mix(std::bit_cast<std::uint64_t>(v));
  return h;
}

void PriorScores::Validate() const {
  Check(scores.rows == row_ids.size(), ErrorCode::kInvalidArgument, "score rows do not match row ids");
  Check(scores.cols == class_labels.size() && scores.cols >= 2, ErrorCode::kInvalidArgument,
        "score columns do not match class labels");
  scores.Validate();
  std::unordered_set<data::RowId> seen(row_ids.begin(), row_ids.end());
  Check(seen.size() == row_ids.size(), ErrorCode::kInvalidArgument, "duplicate row id in prior scores");
  if (centered && axis == CenteringAxis::kRow) {
    for (std::size_t i = 0; i < scores.rows; ++i) {
      double sum = 0.0;
      double scale = 1.0;
      for (std::size_t c = 0; c < scores.cols; ++c) {
        sum += scores.at(i, c);
        scale = std::max(scale, std::abs(scores.at(i, c)));
      }
      Check(std::abs(sum) <= 1e-9 * scale, ErrorCode::kInvalidArgument, "centered row does not sum to 0");
    }
  }
}

PriorScores ReadScoreFile(const std::string& path, std::span<const std::string> expected_labels) {
  const std::vector<std::string> lines = text::ReadLines(path);
  PriorScores out;
  std::size_t at = 0;
  while (at < lines.size() && text::Trim(lines[at]).empty()) ++at;
  if (at < lines.size() && lines[at].rfind('#', 0) == 0) {
    // # source=<...> model=<free text to end of line>
    const std::string comment(text::Trim(std::string_view(lines[at]).substr(1)));
    const auto src = comment.find("source=");
    if (src != std::string::npos) {
      const auto end = comment.find(' ', src);
      out.source = ParseSource(comment.substr(src + 7, end == std::string::npos ? std::string::npos : end - src - 7));
    }
    const auto model = comment.find("model=");
    if (model != std::string::npos) out.model = comment.substr(model + 6);
    ++at;
  }
  Check(at < lines.size(), ErrorCode::kParse, "score file has no header: " + path);
  const std::vector<std::string> header = text::SplitCsvLine(lines[at++]);
  Check(header.size() >= 3 && header[0] == "row_id", ErrorCode::kParse,
        "score file header must be row_id,<class_0>,...: " + path);
  out.class_labels.assign(header.begin() + 1, header.end());
  Check(out.class_labels.size() == expected_labels.size() &&
            std::equal(out.class_labels.begin(), out.class_labels.end(), expected_labels.begin()),
        ErrorCode::kInvalidArgument, "score file class names do not match the schema's class labels");

  const std::size_t k = out.class_labels.size();
  std::vector<double> values;
  for (; at < lines.size(); ++at) {
    if (text::Trim(lines[at]).empty()) continue;
    const std::vector<std::string> f = text::SplitCsvLine(lines[at]);
    Check(f.size() == k + 1, ErrorCode::kParse, "ragged score row: " + lines[at]);
    const auto id = text::ParseInt(f[0]);
    Check(id.has_value(), ErrorCode::kParse, "bad row id: " + f[0]);
    out.row_ids.push_back(*id);
    for (std::size_t c = 0; c < k; ++c) {
      const auto v = text::ParseDouble(f[c + 1]);
      Check(v.has_value(), ErrorCode::kParse, "bad or non-finite score: " + f[c + 1]);
      values.push_back(*v);
    }
  }
  out.scores.rows = out.row_ids.size();
  out.scores.cols = k;
  out.scores.values = std::move(values);
  out.Validate();
  return out;
}

std::string FormatScoreFile(const PriorScores& scores) {
  std::ostringstream out;
  out << "# source=" << ToString(scores.source) << " model=" << scores.model << "\n";
  out << "row_id";
  for (const auto& label : scores.class_labels) out << "," << text::CsvField(label);
  out << "\n";
  for (std::size_t i = 0; i < scores.scores.rows; ++i) {
    out << scores.row_ids[i];
    for (std::size_t c = 0; c < scores.scores.cols; ++c) {
      out << "," << text::FormatDouble(scores.scores.at(i, c));
    }
    out << "\n";
  }
  return out.str();
}

void WriteScoreFile(const PriorScores& scores, const std::string& path) {
  Check(!scores.centered, ErrorCode::kFailedPrecondition, "score files hold raw, uncentered scores");
  text::WriteFile(path, FormatScoreFile(scores));
}

PriorScores CenterScores(const PriorScores& raw, CenteringAxis axis) {
  Check(!raw.centered, ErrorCode::kFailedPrecondition, "scores are already centered");
  raw.scores.Validate();
  PriorScores out = raw;
  out.centered = true;
  out.axis = axis;
  gbdt::MarginMatrix& m = out.scores;
  const double k = static_cast<double>(m.cols);
  if (axis == CenteringAxis::kRow) {
    for (std::size_t i = 0; i < m.rows; ++i) {
      double sum = 0.0;
      for (std::size_t c = 0; c < m.cols; ++c) sum += m.at(i, c);
      const double mean = sum / k;
      for (std::size_t c = 0; c < m.cols; ++c) m.at(i, c) -= mean;
    }
  } else if (m.rows > 0) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      double sum = 0.0;
      for (std::size_t i = 0; i < m.rows; ++i) sum += m.at(i, c);
      const double mean = sum / static_cast<double>(m.rows);
      for (std::size_t i = 0; i < m.rows; ++i) m.at(i, c) -= mean;
    }
  }
  return out;
}

ScaleParam::ScaleParam(double s) : s_(s) {
  Check(s == 0.0 || (s >= kMin && s <= kMax), ErrorCode::kInvalidArgument,
        "scale must be 0 or lie in [1e-4, 1e4]");
  if (s == 0.0) s_ = 0.0;  // normalizes -0.0
}

namespace {

gbdt::MarginMatrix MarginsAt(const PriorScores& centered, ScaleParam s, gbdt::Objective objective,
                             std::span<const std::size_t> positions) {
  Check(centered.centered, ErrorCode::kFailedPrecondition, "prior scores must be centered first");
  const std::size_t k = centered.NumClasses();
  const bool binary = objective == gbdt::Objective::kBinaryLogistic;
  Check(binary ? k == 2 : k >= 3, ErrorCode::kInvalidArgument,
        "prior has " + std::to_string(k) + " classes, objective is " + gbdt::ToString(objective));
  const std::size_t width = gbdt::MarginWidth(objective, k);
  gbdt::MarginMatrix out(positions.size(), width);
  if (s.value() == 0.0) return out;
  const double scale = s.value();
  for (std::size_t r = 0; r < positions.size(); ++r) {
    const std::size_t i = positions[r];
    if (!binary) {
      for (std::size_t c = 0; c < k; ++c) out.at(r, c) = scale * centered.scores.at(i, c);
    } else if (centered.axis == CenteringAxis::kRow) {
      out.at(r, 0) = scale * centered.scores.at(i, 1);
    } else {
      out.at(r, 0) = scale * (centered.scores.at(i, 1) - centered.scores.at(i, 0)) * 0.5;
    }
  }
  return out;
}

}  // namespace

gbdt::MarginMatrix ScoresToMargins(const PriorScores& centered, ScaleParam s,
                                   gbdt::Objective objective) {
  std::vector<std::size_t> all(centered.scores.rows);
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return MarginsAt(centered, s, objective, all);
}

gbdt::MarginMatrix MarginsForRows(const PriorScores& centered, ScaleParam s,
                                  gbdt::Objective objective, std::span<const data::RowId> ids) {
  return MarginsAt(centered, s, objective, centered.Lookup(ids));
}

FusedModel TrainFused(const data::Dataset& dataset, const data::SplitSpec& split,
                      const PriorScores& centered, ScaleParam s, const gbdt::GbdtParams& params,
                      std::uint64_t seed) {
  Check(centered.class_labels == dataset.schema.class_labels, ErrorCode::kInvalidArgument,
        "prior class labels do not match the dataset");
  centered.Lookup(split.val_ids);
  centered.Lookup(split.test_ids);
  const gbdt::Objective objective = gbdt::ObjectiveFor(dataset.NumClasses());
  const data::Dataset train = dataset.Subset(split.train_ids);
  const gbdt::MarginMatrix base = MarginsForRows(centered, s, objective, split.train_ids);

  FusedModel model;
  gbdt::TrainOptions options;
  options.seed = seed;
  model.ensemble = gbdt::Train(train, params, base, objective, gbdt::BaseMarginKind::kExternal, options);
  model.scale = s;
  model.prior_hash = centered.Hash();
  model.class_labels = dataset.schema.class_labels;
  model.axis = centered.axis;
  return model;
}

gbdt::MarginMatrix PredictFusedMargin(const FusedModel& model, const data::Dataset& dataset,
                                      std::span<const data::RowId> ids, const PriorScores& centered) {
  Check(centered.Hash() == model.prior_hash, ErrorCode::kFailedPrecondition,
        "prior scores do not match the ones the model was trained with");
  const data::Dataset rows = dataset.Subset(ids);
  const gbdt::MarginMatrix base = MarginsForRows(centered, model.scale, model.ensemble.objective, ids);
  return gbdt::PredictMargin(model.ensemble, gbdt::FeatureView::Of(rows), base);
}

gbdt::MarginMatrix PredictFused(const FusedModel& model, const data::Dataset& dataset,
                                std::span<const data::RowId> ids, const PriorScores& centered) {
  return gbdt::PredictProba(PredictFusedMargin(model, dataset, ids, centered), model.ensemble.objective);
}

std::string SaveFusedModel(const FusedModel& model) {
  std::ostringstream out;
  out << "priorboost-fused 1\n";
  out << "scale " << text::FormatDouble(model.scale.value()) << "\n";
  out << "prior_hash " << model.prior_hash << "\n";
  out << "centering " << ToString(model.axis) << "\n";
  out << "classes";
  for (const auto& label : model.class_labels) out << "," << text::CsvField(label);
  out << "\n";
  out << gbdt::SaveEnsemble(model.ensemble);
  return out.str();
}

FusedModel LoadFusedModel(const std::string& model_text) {
  const std::vector<std::string> lines = text::Split(model_text, '\n');
  Check(lines.size() > 5 && lines[0] == "priorboost-fused 1", ErrorCode::kParse, "not a fused model");
  const auto value_of = [&](std::size_t i, const std::string& key) {
    Check(lines[i].rfind(key + " ", 0) == 0, ErrorCode::kParse, "expected '" + key + "': " + lines[i]);
    return lines[i].substr(key.size() + 1);
  };
  FusedModel model;
  const auto s = text::ParseDouble(value_of(1, "scale"));
  Check(s.has_value(), ErrorCode::kParse, "bad scale");
  model.scale = ScaleParam(*s);
  const auto hash = text::ParseUint(value_of(2, "prior_hash"));
  Check(hash.has_value(), ErrorCode::kParse, "bad prior hash");
  model.prior_hash = *hash;
  model.axis = ParseAxis(value_of(3, "centering"));
  std::vector<std::string> classes = text::SplitCsvLine(lines[4]);
  Check(!classes.empty() && classes[0] == "classes", ErrorCode::kParse, "expected 'classes'");
  model.class_labels.assign(classes.begin() + 1, classes.end());
  std::string rest;
  for (std::size_t i = 5; i < lines.size(); ++i) rest += lines[i] + "\n";
  model.ensemble = gbdt::LoadEnsemble(rest);
  Check(model.ensemble.base_margin_kind == gbdt::BaseMarginKind::kExternal, ErrorCode::kParse,
        "fused model must use an external base margin");
  return model;
}

}  // namespace priorboost::fusion
