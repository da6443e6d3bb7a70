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

#include "ageoi/cop_analysis.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <tuple>

#include <fmt/format.h>

namespace ageoi {
namespace {

// CoP values within this many meters of zero count as "privacy for free".
constexpr Meters kZeroCopTolerance = 1e-9;

bool FencedAt(const VoronoiDecomposition& dec, const RoadNetwork& net, SegmentId x, Meters r) {
  const auto owner = dec.assignment[x];
  if (!owner) return false;
  const std::vector<Meters> row = net.DistancesFrom(x);
  for (SegmentId y = 0; y < row.size(); ++y) {
    if (row[y] <= r && dec.assignment[y] != owner) return false;
  }
  return true;
}

}  // namespace

VoronoiDecomposition Voronoi(const RoadNetwork& net, const StationSet& stations) {
  if (stations.num_available() == 0) throw ValidationError("no available stations");
  const std::size_t n = net.num_nodes();

  VoronoiDecomposition dec;
  dec.assignment.assign(n, std::nullopt);
  dec.distance.assign(n, kUnreachable);

  // Labels (distance, station id) compared lexicographically; extending a
  // path keeps the station, so the settled label is the lexicographic min.
  using Label = std::tuple<Meters, StationId, SegmentId>;
  std::priority_queue<Label, std::vector<Label>, std::greater<>> heap;
  for (const Station& s : stations.stations()) {
    if (!s.available) continue;
    dec.sites[s.id] = s.location;
    heap.emplace(0.0, s.id, s.location);
  }
  std::vector<bool> settled(n, false);
  while (!heap.empty()) {
    auto [d, sid, v] = heap.top();
    heap.pop();
    if (settled[v]) continue;
    settled[v] = true;
    dec.assignment[v] = sid;
    dec.distance[v] = d;
    for (const RoadNetwork::InEdge& e : net.Predecessors(v)) {
      if (!settled[e.from]) heap.emplace(d + e.weight, sid, e.from);
    }
  }
  for (SegmentId s = 0; s < n; ++s) {
    if (dec.assignment[s]) {
      dec.cells[*dec.assignment[s]].push_back(s);
    } else {
      dec.unassigned.push_back(s);
    }
  }
  return dec;
}

bool FencedCells::Contains(StationId station, SegmentId s) const {
  auto it = fenced.find(station);
  return it != fenced.end() && std::binary_search(it->second.begin(), it->second.end(), s);
}

bool FencedCells::IsFenced(SegmentId s) const {
  for (const auto& [id, segs] : fenced) {
    if (std::binary_search(segs.begin(), segs.end(), s)) return true;
  }
  return false;
}

FencedCells FencedVoronoi(const VoronoiDecomposition& dec, const RoadNetwork& net, Meters r) {
  if (!(r >= 0.0)) throw ValidationError(fmt::format("fence radius must be >= 0, got {}", r));
  FencedCells out;
  out.radius = r;
  for (const auto& [id, cell] : dec.cells) {
    auto& fenced = out.fenced[id];
    for (SegmentId x : cell) {
      if (FencedAt(dec, net, x, r)) fenced.push_back(x);
    }
  }
  return out;
}

Meters CostOfPrivacy(const RoadNetwork& net, const StationSet& stations, SegmentId true_x,
                     SegmentId privatized_x) {
  net.CheckSegment(true_x);
  net.CheckSegment(privatized_x);
  const NearestStation own = NearestAvailableStation(net, stations, true_x);
  const NearestStation reported = NearestAvailableStation(net, stations, privatized_x);
  const Meters detour = net.RawDistance(true_x, reported.location);
  if (!IsReachable(detour)) {
    throw NoReachableStation(fmt::format("station {} is unreachable from segment {}",
                                         reported.station_id, true_x));
  }
  return detour - own.distance;
}

ZeroCopProbability ZeroCopProbabilityAt(const RoadNetwork& net, const StationSet& stations,
                                        const ObfuscationChannel& ch, SegmentId true_x) {
  return ZeroCopProbabilityAt(net, Voronoi(net, stations), ch, true_x);
}

ZeroCopProbability ZeroCopProbabilityAt(const RoadNetwork& net, const VoronoiDecomposition& dec,
                                        const ObfuscationChannel& ch, SegmentId true_x) {
  const auto row = ch.DomainIndex(true_x);
  if (!row) throw ValidationError(fmt::format("segment {} is not in the channel domain", true_x));
  const auto owner = dec.assignment.at(true_x);
  if (!owner) {
    throw NoReachableStation(fmt::format("segment {} has no reachable station", true_x));
  }

  ZeroCopProbability out;
  out.fenced = FencedAt(dec, net, true_x, ch.params().radius);
  if (out.fenced) {
    out.exact = out.cell_form = 1.0;
    return out;
  }
  const Meters own = net.RawDistance(true_x, dec.sites.at(*owner));
  for (std::size_t c = 0; c < ch.cols(); ++c) {
    const double p = ch.Prob(*row, c);
    if (p == 0.0) continue;
    const auto y_owner = dec.assignment[ch.codomain()[c]];
    if (!y_owner) continue;
    if (*y_owner == *owner) out.cell_form += p;
    if (net.RawDistance(true_x, dec.sites.at(*y_owner)) == own) out.exact += p;
  }
  out.exact = std::min(out.exact, 1.0);
  out.cell_form = std::min(out.cell_form, 1.0);
  return out;
}

double IdentifiabilityAt(const ObfuscationChannel& laplace, const RoadNetwork& net,
                         const EdgeCoverage& coverage, std::size_t m, Meters alpha,
                         std::size_t row) {
  const SegmentId x = laplace.domain().at(row);
  const std::vector<Meters> dist = net.DistancesFrom(x);
  double lap = 0.0;
  for (std::size_t c = 0; c < laplace.cols(); ++c) {
    if (dist[laplace.codomain()[c]] < alpha) lap += laplace.Prob(row, c);
  }
  std::size_t near = 0;
  for (SegmentId y : coverage.segments) {
    if (dist[y] < alpha) ++near;
  }
  const double md = static_cast<double>(m);
  return lap / md + (md - 1.0) / md * static_cast<double>(near) /
                        static_cast<double>(coverage.segments.size());
}

Identifiability ComputeIdentifiability(const ObfuscationChannel& laplace, const RoadNetwork& net,
                                       const EdgeCoverage& coverage, std::size_t m, Meters alpha) {
  if (m < 1) throw ValidationError("m must be at least 1");
  if (!(alpha >= 0.0)) throw ValidationError(fmt::format("alpha must be >= 0, got {}", alpha));
  if (coverage.segments.empty()) throw ValidationError("coverage is empty");

  Identifiability out;
  std::size_t worst_row = 0;
  for (std::size_t r = 0; r < laplace.rows(); ++r) {
    const double beta = IdentifiabilityAt(laplace, net, coverage, m, alpha, r);
    if (r == 0 || beta > out.exact) {
      out.exact = beta;
      worst_row = r;
    }
  }
  out.worst_x = laplace.domain()[worst_row];
  const auto& p = laplace.params();
  out.closed_form = laplace.Normalizer(worst_row) *
                    std::exp(-p.epsilon * alpha / p.distance_unit) / static_cast<double>(m);
  return out;
}

double EpsilonRescaleWithoutDummies(double epsilon, std::size_t m) {
  if (m < 2) throw ValidationError("rescaling needs m >= 2");
  if (!(epsilon > 0.0)) throw ValidationError(fmt::format("epsilon must be > 0, got {}", epsilon));
  return epsilon / std::log(static_cast<double>(m));
}

std::pair<double, double> WilsonInterval(std::size_t successes, std::size_t n) {
  if (n == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double nd = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nd;
  const double denom = 1.0 + z * z / nd;
  const double centre = (p + z * z / (2.0 * nd)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nd + z * z / (4.0 * nd * nd)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

CopSummary SummarizeCop(std::span<const Meters> cops) {
  CopSummary s;
  s.count = cops.size();
  if (cops.empty()) return s;
  std::size_t zeros = 0;
  double sum = 0.0;
  for (Meters c : cops) {
    sum += c;
    if (std::abs(c) <= kZeroCopTolerance) ++zeros;
  }
  s.mean_cop = sum / static_cast<double>(cops.size());
  s.frac_zero = static_cast<double>(zeros) / static_cast<double>(cops.size());
  std::tie(s.ci_low, s.ci_high) = WilsonInterval(zeros, cops.size());
  return s;
}

}  // namespace ageoi
