// Copyright 2026 The ageoi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ageoi/dummy_gen.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace ageoi {

void DummyConfig::Validate() const {
  if (m < 1) throw ValidationError("m must be at least 1");
  if (!(max_speed > 0.0)) throw ValidationError(fmt::format("max_speed must be > 0, got {}", max_speed));
}

std::vector<SegmentId> GenerateDummies(const RoadNetwork& net, const EdgeCoverage& coverage,
                                       const QueryVector* prev, double elapsed_s,
                                       const DummyConfig& cfg, Rng& rng) {
  cfg.Validate();
  if (coverage.segments.empty()) throw ValidationError("coverage is empty");
  const std::size_t count = cfg.m - 1;
  if (count == 0) return {};

  std::vector<SegmentId> feasible;
  if (prev == nullptr || cfg.feasibility == Feasibility::kUnconstrainedFirstQuery) {
    feasible = coverage.segments;
  } else {
    if (!(elapsed_s > 0.0)) {
      throw ValidationError(fmt::format("elapsed time must be > 0, got {}", elapsed_s));
    }
    const Meters budget = cfg.max_speed * elapsed_s;
    std::vector<Meters> best(net.num_nodes(), kUnreachable);
    for (SegmentId p : prev->locations) {
      const std::vector<Meters> row = net.DistancesFrom(p);
      for (std::size_t y = 0; y < row.size(); ++y) best[y] = std::min(best[y], row[y]);
    }
    for (SegmentId y : coverage.segments) {
      if (best[y] <= budget) feasible.push_back(y);
    }
    if (feasible.empty()) {
      throw InfeasibleContinuation(fmt::format(
          "no covered segment is within {} m of the previous query of {}", budget, prev->ev_id));
    }
  }

  std::vector<SegmentId> dummies;
  dummies.reserve(count);
  if (feasible.size() >= count) {
    // Partial Fisher-Yates: the first `count` slots are a uniform sample.
    for (std::size_t i = 0; i < count; ++i) {
      std::swap(feasible[i], feasible[i + rng.Index(feasible.size() - i)]);
      dummies.push_back(feasible[i]);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) dummies.push_back(feasible[rng.Index(feasible.size())]);
  }
  return dummies;
}

double TrajectoryHypothesesLowerBound(std::size_t k_queries, std::size_t m) {
  if (k_queries < 1 || m < 1) throw ValidationError("k and m must be at least 1");
  return std::pow(static_cast<double>(m), -static_cast<double>(k_queries));
}

ObfuscationChannel MixedChannel(const ObfuscationChannel& ch, std::size_t m,
                                const EdgeCoverage& coverage, const RoadNetwork& net) {
  if (m < 1) throw ValidationError("m must be at least 1");
  if (coverage.segments.empty()) throw ValidationError("coverage is empty");
  if (m == 1) return ch;

  std::vector<SegmentId> codomain = ch.codomain();
  for (SegmentId s : coverage.segments) {
    if (!ch.CodomainIndex(s)) codomain.push_back(s);
  }
  const std::size_t old_cols = ch.cols();
  const std::size_t cols = codomain.size();
  const double w_lap = 1.0 / static_cast<double>(m);
  const double w_uni = 1.0 - w_lap;
  const double uniform = 1.0 / static_cast<double>(coverage.segments.size());

  std::vector<double> matrix(ch.rows() * cols, 0.0);
  std::vector<double> distances(ch.rows() * cols, kUnreachable);
  std::vector<double> normalizers(ch.rows());
  for (std::size_t r = 0; r < ch.rows(); ++r) {
    normalizers[r] = ch.Normalizer(r);
    for (std::size_t c = 0; c < cols; ++c) {
      double p = c < old_cols ? w_lap * ch.Prob(r, c) : 0.0;
      if (coverage.Contains(codomain[c])) p += w_uni * uniform;
      matrix[r * cols + c] = p;
      distances[r * cols + c] =
          c < old_cols ? ch.UnitDistance(r, c)
                       : net.RawDistance(ch.domain()[r], codomain[c]) / ch.params().distance_unit;
    }
  }
  return ObfuscationChannel(ch.domain(), std::move(codomain), std::move(matrix),
                            std::move(distances), std::move(normalizers), ch.params());
}

}  // namespace ageoi
