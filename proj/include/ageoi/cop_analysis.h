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

#ifndef AGEOI_COP_ANALYSIS_H_
#define AGEOI_COP_ANALYSIS_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ageoi/mechanism.h"
#include "ageoi/road_network.h"
#include "ageoi/types.h"

namespace ageoi {

// Partition of segments by nearest available station under d_G (outbound
// from the segment), lowest station id claiming ties.
struct VoronoiDecomposition {
  std::map<StationId, std::vector<SegmentId>> cells;  // sorted segments
  std::vector<std::optional<StationId>> assignment;   // indexed by segment
  std::vector<Meters> distance;                       // to the assigned station
  std::vector<SegmentId> unassigned;                  // no reachable station
  std::map<StationId, SegmentId> sites;               // available station locations

  std::optional<StationId> Owner(SegmentId s) const { return assignment.at(s); }
};

// Multi-source Dijkstra on the reversed graph with (distance, station id)
// labels. Throws ValidationError when no station is available.
VoronoiDecomposition Voronoi(const RoadNetwork& net, const StationSet& stations);

// V_i^{-r} = {x in V_i : closed_ball(x, r) subset of V_i}.
struct FencedCells {
  Meters radius = 0.0;
  std::map<StationId, std::vector<SegmentId>> fenced;

  bool Contains(StationId station, SegmentId s) const;
  // True when `s` is fenced in whichever cell owns it.
  bool IsFenced(SegmentId s) const;
};

FencedCells FencedVoronoi(const VoronoiDecomposition& dec, const RoadNetwork& net, Meters r);

// d_G(true_x, nearest(privatized_x)) - d_G(true_x, nearest(true_x)).
// Throws NoReachableStation when either station lookup or the detour fails.
Meters CostOfPrivacy(const RoadNetwork& net, const StationSet& stations, SegmentId true_x,
                     SegmentId privatized_x);

struct ZeroCopProbability {
  // P[CoP = 0] from the channel row: mass on outputs whose nearest station
  // is as close to true_x as true_x's own nearest station.
  double exact = 0.0;
  // Mass of the row inside true_x's Voronoi cell (the complement-sum form).
  // Differs from `exact` only when another station ties in distance.
  double cell_form = 0.0;
  bool fenced = false;
};

ZeroCopProbability ZeroCopProbabilityAt(const RoadNetwork& net, const StationSet& stations,
                                        const ObfuscationChannel& ch, SegmentId true_x);
// Variant reusing a decomposition of the same station set.
ZeroCopProbability ZeroCopProbabilityAt(const RoadNetwork& net, const VoronoiDecomposition& dec,
                                        const ObfuscationChannel& ch, SegmentId true_x);

struct Identifiability {
  // max over x of (1/m) P_L[d(x,y) < alpha] + ((m-1)/m) |{y in cov : d(x,y) < alpha}| / |cov|
  double exact = 0.0;
  SegmentId worst_x = 0;
  // (1/m) c_x e^{-eps alpha} at worst_x, alpha in distance units.
  double closed_form = 0.0;
};

// `laplace` is the truncated Laplace channel (not the mixed one).
Identifiability ComputeIdentifiability(const ObfuscationChannel& laplace, const RoadNetwork& net,
                                       const EdgeCoverage& coverage, std::size_t m, Meters alpha);

// Identifiability at a single true location.
double IdentifiabilityAt(const ObfuscationChannel& laplace, const RoadNetwork& net,
                         const EdgeCoverage& coverage, std::size_t m, Meters alpha,
                         std::size_t row);

// epsilon / ln(m): the no-dummy epsilon used to match identifiability.
double EpsilonRescaleWithoutDummies(double epsilon, std::size_t m);

struct CopSummary {
  std::size_t count = 0;
  double mean_cop = 0.0;
  double frac_zero = 0.0;
  double ci_low = 0.0;   // Wilson 95% interval on frac_zero
  double ci_high = 0.0;
};

CopSummary SummarizeCop(std::span<const Meters> cops);

// Wilson score interval for `successes` out of `n` at z = 1.96.
std::pair<double, double> WilsonInterval(std::size_t successes, std::size_t n);

}  // namespace ageoi

#endif  // AGEOI_COP_ANALYSIS_H_
