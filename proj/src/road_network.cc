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

#include "ageoi/road_network.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <queue>
#include <unordered_map>
#include <utility>

#include <fmt/format.h>

namespace ageoi {

// Memoized Dijkstra rows for networks above the table threshold.
struct RoadNetwork::RowCache {
  static constexpr std::size_t kCapacity = 512;

  std::mutex mu;
  std::unordered_map<SegmentId, std::shared_ptr<const std::vector<Meters>>> rows;
};

RoadNetwork RoadNetwork::Build(std::span<const RoadEdge> edges, Meters segment_length,
                               std::size_t table_threshold) {
  if (edges.empty()) throw ValidationError("edge list is empty");
  if (!(segment_length > 0.0) || !std::isfinite(segment_length)) {
    throw ValidationError(fmt::format("segment length must be positive, got {}", segment_length));
  }

  SegmentId max_id = 0;
  for (const RoadEdge& e : edges) {
    if (!std::isfinite(e.weight)) {
      throw ValidationError(fmt::format("non-finite weight on edge {}->{}", e.from, e.to));
    }
    if (e.weight < 0.0) {
      throw ValidationError(
          fmt::format("negative weight {} on edge {}->{}", e.weight, e.from, e.to));
    }
    max_id = std::max({max_id, e.from, e.to});
  }
  const std::size_t n = static_cast<std::size_t>(max_id) + 1;
  std::vector<bool> seen(n, false);
  for (const RoadEdge& e : edges) seen[e.from] = seen[e.to] = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen[i]) {
      throw ValidationError(
          fmt::format("segment ids are not contiguous: {} is missing below {}", i, max_id));
    }
  }

  RoadNetwork net;
  net.num_nodes_ = n;
  net.segment_length_ = segment_length;
  net.edges_.assign(edges.begin(), edges.end());

  net.out_offsets_.assign(n + 1, 0);
  net.in_offsets_.assign(n + 1, 0);
  for (const RoadEdge& e : edges) {
    ++net.out_offsets_[e.from + 1];
    ++net.in_offsets_[e.to + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    net.out_offsets_[i + 1] += net.out_offsets_[i];
    net.in_offsets_[i + 1] += net.in_offsets_[i];
  }
  net.out_targets_.resize(edges.size());
  net.out_weights_.resize(edges.size());
  net.in_edges_.resize(edges.size());
  std::vector<std::size_t> out_fill(net.out_offsets_.begin(), net.out_offsets_.end() - 1);
  std::vector<std::size_t> in_fill(net.in_offsets_.begin(), net.in_offsets_.end() - 1);
  for (const RoadEdge& e : edges) {
    const std::size_t o = out_fill[e.from]++;
    net.out_targets_[o] = e.to;
    net.out_weights_[o] = e.weight;
    net.in_edges_[in_fill[e.to]++] = InEdge{e.from, e.weight};
  }

  if (n <= table_threshold) {
    net.table_.resize(n * n);
    for (SegmentId s = 0; s < n; ++s) {
      std::vector<Meters> row = net.Dijkstra(s);
      std::copy(row.begin(), row.end(), net.table_.begin() + static_cast<std::ptrdiff_t>(s * n));
    }
  } else {
    net.cache_ = std::make_shared<RowCache>();
  }
  return net;
}

void RoadNetwork::CheckSegment(SegmentId s) const {
  if (!IsValid(s)) {
    throw ValidationError(fmt::format("invalid segment id {} (network has {})", s, num_nodes_));
  }
}

std::vector<Meters> RoadNetwork::Dijkstra(SegmentId source) const {
  std::vector<Meters> dist(num_nodes_, kUnreachable);
  using Item = std::pair<Meters, SegmentId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (std::size_t k = out_offsets_[u]; k < out_offsets_[u + 1]; ++k) {
      const Meters nd = d + out_weights_[k];
      const SegmentId v = out_targets_[k];
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.emplace(nd, v);
      }
    }
  }
  return dist;
}

std::shared_ptr<const std::vector<Meters>> RoadNetwork::CachedRow(SegmentId source) const {
  {
    std::lock_guard lock(cache_->mu);
    if (auto it = cache_->rows.find(source); it != cache_->rows.end()) return it->second;
  }
  auto row = std::make_shared<const std::vector<Meters>>(Dijkstra(source));
  std::lock_guard lock(cache_->mu);
  if (cache_->rows.size() >= RowCache::kCapacity) cache_->rows.clear();
  cache_->rows.emplace(source, row);
  return row;
}

std::optional<Meters> RoadNetwork::Distance(SegmentId i, SegmentId j) const {
  CheckSegment(i);
  CheckSegment(j);
  const Meters d = RawDistance(i, j);
  if (!IsReachable(d)) return std::nullopt;
  return d;
}

Meters RoadNetwork::RawDistance(SegmentId i, SegmentId j) const {
  if (!table_.empty()) return table_[static_cast<std::size_t>(i) * num_nodes_ + j];
  return (*CachedRow(i))[j];
}

std::vector<Meters> RoadNetwork::DistancesFrom(SegmentId source) const {
  CheckSegment(source);
  if (!table_.empty()) {
    auto first = table_.begin() + static_cast<std::ptrdiff_t>(source * num_nodes_);
    return {first, first + static_cast<std::ptrdiff_t>(num_nodes_)};
  }
  return *CachedRow(source);
}

std::span<const SegmentId> RoadNetwork::Successors(SegmentId s) const {
  CheckSegment(s);
  return {out_targets_.data() + out_offsets_[s], out_offsets_[s + 1] - out_offsets_[s]};
}

std::span<const RoadNetwork::InEdge> RoadNetwork::Predecessors(SegmentId s) const {
  CheckSegment(s);
  return {in_edges_.data() + in_offsets_[s], in_offsets_[s + 1] - in_offsets_[s]};
}

std::vector<SegmentId> ClosedBall(const RoadNetwork& net, SegmentId x, Meters r) {
  net.CheckSegment(x);
  if (!(r >= 0.0)) throw ValidationError(fmt::format("ball radius must be >= 0, got {}", r));
  const std::vector<Meters> row = net.DistancesFrom(x);
  std::vector<SegmentId> ball;
  for (SegmentId y = 0; y < row.size(); ++y) {
    if (row[y] <= r) ball.push_back(y);
  }
  return ball;
}

std::vector<RoadEdge> GridEdges(std::size_t rows, std::size_t cols, Meters weight) {
  if (rows == 0 || cols == 0) throw ValidationError("grid dimensions must be positive");
  std::vector<RoadEdge> edges;
  edges.reserve(4 * rows * cols);
  auto id = [cols](std::size_t r, std::size_t c) { return static_cast<SegmentId>(r * cols + c); };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c + 1 < cols) {
        edges.push_back({id(r, c), id(r, c + 1), weight});
        edges.push_back({id(r, c + 1), id(r, c), weight});
      }
      if (r + 1 < rows) {
        edges.push_back({id(r, c), id(r + 1, c), weight});
        edges.push_back({id(r + 1, c), id(r, c), weight});
      }
    }
  }
  if (edges.empty()) throw ValidationError("a 1x1 grid has no roads");
  return edges;
}

bool EdgeCoverage::Contains(SegmentId s) const {
  return std::binary_search(segments.begin(), segments.end(), s);
}

EdgeCoverage MakeCoverage(const RoadNetwork& net, std::vector<SegmentId> segments,
                          std::string edge_id) {
  if (segments.empty()) throw ValidationError("coverage is empty");
  std::sort(segments.begin(), segments.end());
  segments.erase(std::unique(segments.begin(), segments.end()), segments.end());
  for (SegmentId s : segments) net.CheckSegment(s);
  return EdgeCoverage{std::move(edge_id), std::move(segments)};
}

EdgeCoverage FullCoverage(const RoadNetwork& net, std::string edge_id) {
  std::vector<SegmentId> all(net.num_nodes());
  for (SegmentId s = 0; s < all.size(); ++s) all[s] = s;
  return EdgeCoverage{std::move(edge_id), std::move(all)};
}

StationSet::StationSet(const RoadNetwork& net, std::vector<Station> stations)
    : stations_(std::move(stations)) {
  std::sort(stations_.begin(), stations_.end(),
            [](const Station& a, const Station& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < stations_.size(); ++i) {
    if (i > 0 && stations_[i].id == stations_[i - 1].id) {
      throw ValidationError(fmt::format("duplicate station id {}", stations_[i].id));
    }
    if (!net.IsValid(stations_[i].location)) {
      throw ValidationError(fmt::format("station {} references unknown segment {}",
                                        stations_[i].id, stations_[i].location));
    }
  }
}

std::size_t StationSet::num_available() const {
  return static_cast<std::size_t>(
      std::count_if(stations_.begin(), stations_.end(), [](const Station& s) { return s.available; }));
}

const Station* StationSet::Find(StationId id) const {
  auto it = std::lower_bound(stations_.begin(), stations_.end(), id,
                             [](const Station& s, StationId v) { return s.id < v; });
  return it != stations_.end() && it->id == id ? &*it : nullptr;
}

void StationSet::SetAvailable(StationId id, bool available) {
  auto it = std::lower_bound(stations_.begin(), stations_.end(), id,
                             [](const Station& s, StationId v) { return s.id < v; });
  if (it == stations_.end() || it->id != id) {
    throw ValidationError(fmt::format("unknown station id {}", id));
  }
  it->available = available;
}

NearestStation NearestAvailableStation(const RoadNetwork& net, const StationSet& stations,
                                       SegmentId x) {
  net.CheckSegment(x);
  std::optional<NearestStation> best;
  // Stations are id-sorted, so strict < keeps the lowest id on ties.
  for (const Station& s : stations.stations()) {
    if (!s.available) continue;
    const Meters d = net.RawDistance(x, s.location);
    if (!IsReachable(d)) continue;
    if (!best || d < best->distance) best = NearestStation{s.id, s.location, d};
  }
  if (!best) {
    throw NoReachableStation(fmt::format("no available station reachable from segment {}", x));
  }
  return *best;
}

}  // namespace ageoi
