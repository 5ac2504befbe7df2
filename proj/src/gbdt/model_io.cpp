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

// Text model format, version 1:
//
//   priorboost-ensemble 1
//   objective <binary_logistic|multiclass_softmax>
//   n_classes <K>
//   n_features <F>
//   base_margin external | base_margin constant <v_0> ... <v_{w-1}>
//   params <key=value ...>
//   trees <T>
//   tree,round,class,node,feature,threshold,default_left,left,right,weight,gain
//   <one line per node, trees in round-major order, nodes in arena order>
//
// Reals use the shortest round-trip representation, so load(save(e))
// reproduces predictions bit for bit.

#include <sstream>
#include <type_traits>

#include "common/error.hpp"
#include "common/text.hpp"
#include "gbdt/gbdt.hpp"

namespace priorboost::gbdt {
namespace {

constexpr const char* kMagic = "priorboost-ensemble";
constexpr const char* kNodeHeader =
    "tree,round,class,node,feature,threshold,default_left,left,right,weight,gain";

std::string Expect(const std::vector<std::string>& lines, std::size_t& at, const std::string& key) {
  Check(at < lines.size(), ErrorCode::kParse, "model truncated before '" + key + "'");
  const std::string& line = lines[at++];
  Check(line.rfind(key + " ", 0) == 0 || line == key, ErrorCode::kParse,
        "expected '" + key + "', got: " + line);
  return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
}

template <typename T>
T Number(const std::string& s, const char* what) {
  if constexpr (std::is_floating_point_v<T>) {
    const auto v = text::ParseDouble(s);
    Check(v.has_value(), ErrorCode::kParse, std::string("bad ") + what + ": " + s);
    return *v;
  } else {
    const auto v = text::ParseInt(s);
    Check(v.has_value(), ErrorCode::kParse, std::string("bad ") + what + ": " + s);
    return static_cast<T>(*v);
  }
}

}  // namespace

std::string SaveEnsemble(const Ensemble& e) {
  std::ostringstream out;
  out << kMagic << " 1\n";
  out << "objective " << ToString(e.objective) << "\n";
  out << "n_classes " << e.n_classes << "\n";
  out << "n_features " << e.n_features << "\n";
  if (e.base_margin_kind == BaseMarginKind::kExternal) {
    out << "base_margin external\n";
  } else {
    out << "base_margin constant";
    for (double v : e.constant_margin) out << " " << text::FormatDouble(v);
    out << "\n";
  }
  out << "params " << e.params.ToString() << "\n";
  out << "trees " << e.trees.size() << "\n";
  out << kNodeHeader << "\n";
  for (std::size_t t = 0; t < e.trees.size(); ++t) {
    const TreeRecord& rec = e.trees[t];
    for (std::size_t i = 0; i < rec.tree.nodes.size(); ++i) {
      const TreeNode& n = rec.tree.nodes[i];
      out << t << "," << rec.round << "," << rec.class_index << "," << i << "," << n.feature << ","
          << text::FormatDouble(n.threshold) << "," << (n.default_left ? 1 : 0) << "," << n.left
          << "," << n.right << "," << text::FormatDouble(n.weight) << ","
          << text::FormatDouble(n.gain) << "\n";
    }
  }
  return out.str();
}

Ensemble LoadEnsemble(const std::string& model_text) {
  std::vector<std::string> lines = text::Split(model_text, '\n');
  while (!lines.empty() && text::Trim(lines.back()).empty()) lines.pop_back();
  std::size_t at = 0;
  const std::string version = Expect(lines, at, kMagic);
  Check(version == "1", ErrorCode::kParse, "unsupported model version: " + version);

  Ensemble e;
  e.objective = ParseObjective(Expect(lines, at, "objective"));
  e.n_classes = Number<std::size_t>(Expect(lines, at, "n_classes"), "n_classes");
  e.n_features = Number<std::size_t>(Expect(lines, at, "n_features"), "n_features");
  const std::vector<std::string> base = text::Split(Expect(lines, at, "base_margin"), ' ');
  if (base[0] == "external") {
    e.base_margin_kind = BaseMarginKind::kExternal;
  } else {
    Check(base[0] == "constant", ErrorCode::kParse, "bad base_margin kind: " + base[0]);
    e.base_margin_kind = BaseMarginKind::kConstant;
    for (std::size_t i = 1; i < base.size(); ++i) {
      e.constant_margin.push_back(Number<double>(base[i], "constant margin"));
    }
  }
  e.params = GbdtParams::FromString(Expect(lines, at, "params"));
  const auto n_trees = Number<std::size_t>(Expect(lines, at, "trees"), "tree count");
  Check(at < lines.size() && lines[at] == kNodeHeader, ErrorCode::kParse, "missing node header");
  ++at;

  e.trees.resize(n_trees);
  for (; at < lines.size(); ++at) {
    const std::vector<std::string> f = text::Split(lines[at], ',');
    Check(f.size() == 11, ErrorCode::kParse, "bad node record: " + lines[at]);
    const auto tree = Number<std::size_t>(f[0], "tree id");
    Check(tree < n_trees, ErrorCode::kParse, "tree id out of range: " + f[0]);
    TreeRecord& rec = e.trees[tree];
    rec.round = Number<int>(f[1], "round");
    rec.class_index = Number<int>(f[2], "class");
    const auto node = Number<std::size_t>(f[3], "node id");
    Check(node == rec.tree.nodes.size(), ErrorCode::kParse, "nodes out of order: " + lines[at]);
    TreeNode n;
    n.feature = Number<int>(f[4], "feature");
    n.threshold = Number<double>(f[5], "threshold");
    n.default_left = f[6] == "1";
    n.left = Number<int>(f[7], "left");
    n.right = Number<int>(f[8], "right");
    n.weight = Number<double>(f[9], "weight");
    n.gain = Number<double>(f[10], "gain");
    rec.tree.nodes.push_back(n);
  }
  e.Validate();
  return e;
}

}  // namespace priorboost::gbdt
