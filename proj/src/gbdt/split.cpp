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
#include <cmath>
#include <utility>

#include "common/error.hpp"
#include "gbdt/gbdt.hpp"

namespace priorboost::gbdt {

double SplitGain(double grad_left, double hess_left, double grad_right, double hess_right,
                 double lambda, double gamma) {
  const double grad_sum = grad_left + grad_right;
  const double hess_sum = hess_left + hess_right;
  return 0.5 * (grad_left * grad_left / (hess_left + lambda) +
                grad_right * grad_right / (hess_right + lambda) -
                grad_sum * grad_sum / (hess_sum + lambda)) -
         gamma;
}

double LeafWeight(double grad_sum, double hess_sum, double lambda, double alpha) {
  Check(hess_sum >= 0.0, ErrorCode::kInvalidArgument, "negative Hessian sum");
  const double denom = hess_sum + lambda;
  Check(denom != 0.0, ErrorCode::kInvalidArgument, "degenerate leaf");
  const double shrunk = std::max(std::abs(grad_sum) - alpha, 0.0);
  if (shrunk == 0.0) return 0.0;
  return grad_sum > 0.0 ? -shrunk / denom : shrunk / denom;
}

namespace {

// Threshold strictly above `lo` and at most `hi`, so that x < t sends lo left
// and hi right even when the two are adjacent doubles.
double Midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) * 0.5;
  return (mid > lo && mid <= hi) ? mid : hi;
}

bool Better(const SplitCandidate& c, const std::optional<SplitCandidate>& best) {
  if (!best) return true;
  if (c.gain != best->gain) return c.gain > best->gain;
  if (c.feature != best->feature) return c.feature < best->feature;
  return c.threshold < best->threshold;
}

}  // namespace

std::optional<SplitCandidate> FindBestSplit(const FeatureView& features,
                                            std::span<const std::uint32_t> rows,
                                            std::span<const double> grads,
                                            std::span<const double> hess,
                                            std::span<const int> candidate_features,
                                            const GbdtParams& params) {
  std::optional<SplitCandidate> best;
  std::vector<std::pair<double, std::uint32_t>> sorted;
  sorted.reserve(rows.size());
  const auto min_count = static_cast<std::size_t>(std::max(params.min_child_samples, 0));

  for (int feature : candidate_features) {
    sorted.clear();
    double grad_missing = 0.0;
    double hess_missing = 0.0;
    std::size_t n_missing = 0;
    double grad_present = 0.0;
    double hess_present = 0.0;
    for (std::uint32_t r : rows) {
      const double v = features.At(r, static_cast<std::size_t>(feature));
      if (data::IsMissing(v)) {
        grad_missing += grads[r];
        hess_missing += hess[r];
        ++n_missing;
      } else {
        sorted.emplace_back(v, r);
        grad_present += grads[r];
        hess_present += hess[r];
      }
    }
    if (sorted.size() < 2) continue;
    std::sort(sorted.begin(), sorted.end());

    double grad_prefix = 0.0;
    double hess_prefix = 0.0;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
      grad_prefix += grads[sorted[i].second];
      hess_prefix += hess[sorted[i].second];
      if (sorted[i].first == sorted[i + 1].first) continue;
      const double threshold = Midpoint(sorted[i].first, sorted[i + 1].first);
      const std::size_t n_left_present = i + 1;
      const std::size_t n_right_present = sorted.size() - n_left_present;
      const double grad_rest = grad_present - grad_prefix;
      const double hess_rest = hess_present - hess_prefix;

      // Missing rows left first; right wins only on a strictly larger gain.
      for (const bool missing_left : {true, false}) {
        if (!missing_left && n_missing == 0) break;
        SplitCandidate c;
        c.feature = feature;
        c.threshold = threshold;
        c.default_left = missing_left;
        c.grad_left = missing_left ? grad_prefix + grad_missing : grad_prefix;
        c.hess_left = missing_left ? hess_prefix + hess_missing : hess_prefix;
        c.grad_right = missing_left ? grad_rest : grad_rest + grad_missing;
        c.hess_right = missing_left ? hess_rest : hess_rest + hess_missing;
        const std::size_t n_left = n_left_present + (missing_left ? n_missing : 0);
        const std::size_t n_right = n_right_present + (missing_left ? 0 : n_missing);
        if (c.hess_left < params.min_child_weight || c.hess_right < params.min_child_weight) {
          continue;
        }
        if (n_left < min_count || n_right < min_count) continue;
        c.gain = SplitGain(c.grad_left, c.hess_left, c.grad_right, c.hess_right, params.lambda,
                           params.gamma);
        if (!(c.gain > 0.0)) continue;
        if (Better(c, best)) best = c;
      }
    }
  }
  return best;
}

}  // namespace priorboost::gbdt
