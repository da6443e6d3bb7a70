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

#ifndef AGEOI_DUMMY_GEN_H_
#define AGEOI_DUMMY_GEN_H_

#include <cstddef>
#include <vector>

#include "ageoi/mechanism.h"
#include "ageoi/rng.h"
#include "ageoi/road_network.h"
#include "ageoi/types.h"

namespace ageoi {

enum class Feasibility {
  // Dummies drawn uniformly from the coverage, ignoring history.
  kUnconstrainedFirstQuery,
  // Dummies must be reachable within max_speed * elapsed from at least one
  // location of the previous reported vector.
  kLinked,
};

struct DummyConfig {
  std::size_t m = 1;           // locations per query, privatized one included
  double max_speed = 13.9;     // m/s
  Feasibility feasibility = Feasibility::kLinked;

  void Validate() const;
};

// One reported query. locations[0] is the privatized true location until
// the Edge shuffles the batch.
struct QueryVector {
  EvId ev_id;
  Tick tick = 0;
  double timestamp_s = 0.0;
  std::vector<SegmentId> locations;
};

// m-1 dummy segments from `coverage`, uniform over the feasible set. With no
// previous query (or kUnconstrainedFirstQuery) the feasible set is the whole
// coverage. Samples without replacement when the feasible set is large
// enough, with replacement otherwise. Throws InfeasibleContinuation when the
// linked feasible set is empty.
std::vector<SegmentId> GenerateDummies(const RoadNetwork& net, const EdgeCoverage& coverage,
                                       const QueryVector* prev, double elapsed_s,
                                       const DummyConfig& cfg, Rng& rng);

// Lower bound m^{-k} on the probability an interpolated trajectory is the
// real one after k linked queries of m locations each.
double TrajectoryHypothesesLowerBound(std::size_t k_queries, std::size_t m);

// (1/m) ch + ((m-1)/m) U, with U uniform over the coverage. The result's
// codomain is ch.codomain() followed by any coverage segments it lacks.
ObfuscationChannel MixedChannel(const ObfuscationChannel& ch, std::size_t m,
                                const EdgeCoverage& coverage, const RoadNetwork& net);

}  // namespace ageoi

#endif  // AGEOI_DUMMY_GEN_H_
