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

#ifndef AGEOI_ROAD_NETWORK_H_
#define AGEOI_ROAD_NETWORK_H_

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ageoi/types.h"

namespace ageoi {

struct RoadEdge {
  SegmentId from = 0;
  SegmentId to = 0;
  Meters weight = 0.0;
};

// Discretized road network: a weighted directed graph whose nodes are road
// segments of (nominal) length `segment_length()`.
//
// Distances d_G(i, j) are shortest directed travel distances. For networks
// up to `table_threshold` nodes the full table is computed at construction;
// above it, rows are computed on demand and memoized in a bounded cache.
// A built network is logically immutable and safe to share across threads.
class RoadNetwork {
 public:
  static constexpr std::size_t kDefaultTableThreshold = 5000;

  // Empty network; only useful as a placeholder before assignment.
  RoadNetwork() = default;

  // Validates and builds. Node ids must be exactly 0..max_id (every id
  // appearing as an edge endpoint). Throws ValidationError on an empty edge
  // list, negative or non-finite weights, or gaps in the id range.
  static RoadNetwork Build(std::span<const RoadEdge> edges, Meters segment_length,
                           std::size_t table_threshold = kDefaultTableThreshold);

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return edges_.size(); }
  Meters segment_length() const { return segment_length_; }
  const std::vector<RoadEdge>& edges() const { return edges_; }
  bool has_distance_table() const { return !table_.empty(); }

  bool IsValid(SegmentId s) const { return s < num_nodes_; }
  // Throws ValidationError when `s` is not a node.
  void CheckSegment(SegmentId s) const;

  // d_G(i, j), or nullopt when no directed path exists.
  std::optional<Meters> Distance(SegmentId i, SegmentId j) const;

  // d_G(i, j) with kUnreachable for missing paths. Unchecked ids.
  Meters RawDistance(SegmentId i, SegmentId j) const;

  // All d_G(source, *), kUnreachable where no path exists.
  std::vector<Meters> DistancesFrom(SegmentId source) const;

  // Out-neighbours of `s` (edge targets, may repeat for parallel edges).
  std::span<const SegmentId> Successors(SegmentId s) const;

  // Reverse adjacency: (predecessor, weight) pairs for edges ending at `s`.
  struct InEdge {
    SegmentId from;
    Meters weight;
  };
  std::span<const InEdge> Predecessors(SegmentId s) const;

 private:
  struct RowCache;

  std::vector<Meters> Dijkstra(SegmentId source) const;
  std::shared_ptr<const std::vector<Meters>> CachedRow(SegmentId source) const;

  std::size_t num_nodes_ = 0;
  Meters segment_length_ = 0.0;
  std::vector<RoadEdge> edges_;
  // CSR forward adjacency.
  std::vector<std::size_t> out_offsets_;
  std::vector<SegmentId> out_targets_;
  std::vector<Meters> out_weights_;
  // CSR reverse adjacency.
  std::vector<std::size_t> in_offsets_;
  std::vector<InEdge> in_edges_;

  std::vector<Meters> table_;  // row-major num_nodes_ x num_nodes_, or empty
  std::shared_ptr<RowCache> cache_;
};

// Closed ball {y : d_G(x, y) <= r} in ascending segment order.
std::vector<SegmentId> ClosedBall(const RoadNetwork& net, SegmentId x, Meters r);

// Edges of a rows x cols 4-connected grid with both directions per road.
// Node id of (row, col) is row * cols + col.
std::vector<RoadEdge> GridEdges(std::size_t rows, std::size_t cols, Meters weight);

// Segments covered by one Edge (roadside unit), sorted and unique.
struct EdgeCoverage {
  std::string edge_id;
  std::vector<SegmentId> segments;

  bool Contains(SegmentId s) const;
};

// Sorts, dedups and validates against the network. Throws ValidationError
// on an empty set or unknown segments.
EdgeCoverage MakeCoverage(const RoadNetwork& net, std::vector<SegmentId> segments,
                          std::string edge_id = "I");

// Coverage spanning the whole network.
EdgeCoverage FullCoverage(const RoadNetwork& net, std::string edge_id = "I");

struct Station {
  StationId id = 0;
  SegmentId location = 0;
  bool available = true;
};

// Charging stations. Ids are unique; availability is the only mutable part.
class StationSet {
 public:
  StationSet() = default;
  // Throws ValidationError on duplicate ids or locations outside `net`.
  StationSet(const RoadNetwork& net, std::vector<Station> stations);

  const std::vector<Station>& stations() const { return stations_; }
  std::size_t size() const { return stations_.size(); }
  std::size_t num_available() const;

  const Station* Find(StationId id) const;
  // Throws ValidationError for unknown ids.
  void SetAvailable(StationId id, bool available);

 private:
  std::vector<Station> stations_;  // sorted by id
};

struct NearestStation {
  StationId station_id = 0;
  SegmentId location = 0;
  Meters distance = 0.0;

  friend bool operator==(const NearestStation&, const NearestStation&) = default;
};

// The available station minimizing d_G(x, station), lowest id on ties.
// Throws NoReachableStation when none is available and reachable.
NearestStation NearestAvailableStation(const RoadNetwork& net, const StationSet& stations,
                                       SegmentId x);

}  // namespace ageoi

#endif  // AGEOI_ROAD_NETWORK_H_
