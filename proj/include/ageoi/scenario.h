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

#ifndef AGEOI_SCENARIO_H_
#define AGEOI_SCENARIO_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ageoi/edge_sim.h"
#include "ageoi/ibu.h"
#include "ageoi/rng.h"
#include "ageoi/road_network.h"

namespace ageoi {

// --- CSV formats -----------------------------------------------------------
// graph:        from,to,weight_m
// stations:     station_id,segment_id,available
// trajectories: ev_id,tick,segment_id
// distribution: segment_id,mass

std::vector<RoadEdge> ReadGraphCsv(std::istream& in);
void WriteGraphCsv(std::ostream& out, const std::vector<RoadEdge>& edges);

std::vector<Station> ReadStationsCsv(std::istream& in);
void WriteStationsCsv(std::ostream& out, const std::vector<Station>& stations);

using TrajectoryMap = std::map<EvId, std::vector<TrajectoryPoint>>;
TrajectoryMap ReadTrajectoriesCsv(std::istream& in);
void WriteTrajectoriesCsv(std::ostream& out, const TrajectoryMap& trajectories);

DiscreteDistribution ReadDistributionCsv(std::istream& in);
void WriteDistributionCsv(std::ostream& out, const DiscreteDistribution& dist);

// Inverse of WriteTraceCsv.
std::vector<TraceRow> ReadTraceCsv(std::istream& in);

// --- Scenario ----------------------------------------------------------------

struct QueryTickPolicy {
  enum class Kind { kRandom, kEvery, kExplicit };
  Kind kind = Kind::kRandom;
  std::size_t per_trajectory = 3;  // kRandom
  std::size_t period = 1;          // kEvery
  std::vector<Tick> ticks;         // kExplicit, applied to every EV
};

struct GridShape {
  std::size_t rows = 0;
  std::size_t cols = 0;
};

struct Scenario {
  std::filesystem::path source;  // the JSON file, empty when built in memory
  RoadNetwork net;
  StationSet stations;
  EdgeCoverage coverage;
  TrajectoryMap trajectories;
  QueryTickPolicy query_ticks;
  std::size_t m = 1;
  double epsilon = 1.0;          // per segment
  double radius_segments = 1.0;  // truncation radius in segments
  double max_speed = 13.9;       // m/s
  std::uint64_t seed = 0;
  Tick ticks = 0;                // simulated ticks 0..ticks-1
  double tick_seconds = 1.0;
  std::vector<AvailabilityChange> availability_schedule;
  std::optional<DiscreteDistribution> truth;
  std::optional<GridShape> grid;

  Meters segment_length() const { return net.segment_length(); }
};

// Parses and validates a scenario JSON file; relative paths resolve against
// the file's directory. Throws ValidationError listing every problem found.
Scenario LoadScenario(const std::filesystem::path& path);

// Checks cross-file consistency (coverage, trajectories, schedule, truth).
// Returns human-readable problems; empty means valid.
std::vector<std::string> ValidateScenario(const Scenario& s);

// Per-EV query ticks drawn according to the scenario policy.
std::vector<EvState> AssignQueryTicks(const Scenario& s, Rng& rng);

// --- Synthetic data ----------------------------------------------------------

enum class SyntheticKind { kGrid, kTwoCluster };

struct SyntheticOptions {
  SyntheticKind kind = SyntheticKind::kGrid;
  std::size_t size = 10;             // grid side
  std::size_t num_stations = 5;
  std::uint64_t seed = 1;
  std::size_t num_evs = 100;
  std::size_t trajectory_length = 30;
  Meters segment_length = 100.0;
};

// Writes graph.csv, stations.csv, trajectories.csv, scenario.json (and
// truth.csv for kTwoCluster) into `out_dir`. Returns the scenario path.
std::filesystem::path GenerateSyntheticScenario(const SyntheticOptions& opts,
                                                const std::filesystem::path& out_dir);

}  // namespace ageoi

#endif  // AGEOI_SCENARIO_H_
