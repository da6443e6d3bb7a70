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

#ifndef AGEOI_EDGE_SIM_H_
#define AGEOI_EDGE_SIM_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ageoi/dummy_gen.h"
#include "ageoi/mechanism.h"
#include "ageoi/rng.h"
#include "ageoi/road_network.h"
#include "ageoi/types.h"

namespace ageoi {

struct TrajectoryPoint {
  Tick tick = 0;
  SegmentId segment = 0;
};

struct EvState {
  EvId ev_id;
  std::vector<TrajectoryPoint> trajectory;  // ascending ticks
  std::set<Tick> query_ticks;
  PrivacyBudget budget;
  std::optional<QueryVector> last_query;

  // Segment at `tick`; throws ValidationError when the trajectory has none.
  SegmentId LocationAt(Tick tick) const;
};

// Everything a vehicle needs to prepare one query.
struct QueryContext {
  const RoadNetwork* net = nullptr;
  const EdgeCoverage* coverage = nullptr;
  const ObfuscationChannel* channel = nullptr;
  double delta = 0.0;  // ComputeDelta(*channel), computed once per channel
  DummyConfig dummies;
  double tick_seconds = 1.0;
};

// Privatizes the true location, appends m-1 dummies and charges the budget
// with (epsilon, delta). Updates ev.last_query.
QueryVector SubmitQuery(EvState& ev, Tick tick, const QueryContext& ctx, Rng& rng);

struct LedgerEntry {
  EvId ev_id;
  std::size_t position = 0;  // index within that EV's QueryVector
};

// The Edge's shuffled batch. `ledger[i]` says where scrambled[i] came from;
// it stays inside the Edge.
struct ShuffleBatch {
  Tick tick = 0;
  std::vector<SegmentId> scrambled;
  std::vector<LedgerEntry> ledger;
};

// What crosses the Edge -> third-party boundary: locations only.
struct ThirdPartyRequest {
  Tick tick = 0;
  std::vector<SegmentId> locations;
};

// Per-location answers, aligned with the request. nullopt marks a location
// with no reachable available station.
struct ThirdPartyResponse {
  std::vector<std::optional<NearestStation>> answers;
};

struct ResponseBatch {
  ThirdPartyResponse raw;
  // Reassembled l-hat vectors, entry i answering that EV's location i.
  std::map<EvId, std::vector<std::optional<NearestStation>>> per_ev;
};

// Uniformly permutes all locations of same-tick queries. Throws
// ValidationError on mixed ticks or an empty batch.
ShuffleBatch ShuffleAndForward(const std::vector<QueryVector>& queries, Rng& rng);

ThirdPartyRequest ToThirdPartyRequest(const ShuffleBatch& batch);
// JSON wire form of the request.
std::string SerializeRequest(const ThirdPartyRequest& request);

// The third party: nearest available station for every location.
ThirdPartyResponse AnswerNearest(const ThirdPartyRequest& request, const RoadNetwork& net,
                                 const StationSet& stations);

// Inverts the shuffle through the ledger.
ResponseBatch Reassemble(const ShuffleBatch& batch, ThirdPartyResponse response);

// Request, third-party answer and reassembly in one call.
ResponseBatch RespondNearest(const ShuffleBatch& batch, const RoadNetwork& net,
                             const StationSet& stations);

// The returned station minimizing d_G(true_x, station), lowest id on ties.
// Failed entries are skipped; throws ValidationError if none remain.
NearestStation ChooseDestination(SegmentId true_x,
                                 const std::vector<std::optional<NearestStation>>& response,
                                 const RoadNetwork& net);

struct AvailabilityChange {
  Tick tick = 0;
  StationId station_id = 0;
  bool available = true;
};

// One line of the simulation trace. Optional fields are empty when the
// corresponding station lookup failed.
struct TraceRow {
  Tick tick = 0;
  EvId ev_id;
  SegmentId true_segment = 0;
  SegmentId privatized_segment = 0;
  std::optional<StationId> chosen_station;
  std::optional<StationId> true_nearest_station;
  std::optional<Meters> cop_meters;
  double epsilon_total = 0.0;
  double delta_total = 0.0;
};

struct SimulationInput {
  const RoadNetwork* net = nullptr;
  StationSet stations;
  const EdgeCoverage* coverage = nullptr;
  const ObfuscationChannel* channel = nullptr;
  DummyConfig dummies;
  double tick_seconds = 1.0;
  std::vector<AvailabilityChange> schedule;
  std::vector<EvState> evs;
  Tick first_tick = 0;
  Tick last_tick = 0;  // inclusive
};

// Runs the vehicle / Edge / third-party loop tick by tick. CoP is charged
// from the privatized location's answer only (worst-case utility).
std::vector<TraceRow> RunSimulation(SimulationInput input, std::uint64_t seed);

void WriteTraceCsv(std::ostream& out, const std::vector<TraceRow>& rows);

}  // namespace ageoi

#endif  // AGEOI_EDGE_SIM_H_
