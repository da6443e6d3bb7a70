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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "ageoi/ibu.h"

namespace ageoi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Remaining supply/demand below this fraction of the total is treated as
// rounding residue.
constexpr double kMassEpsilon = 1e-13;

}  // namespace

// Successive shortest paths with Johnson potentials on the dense bipartite
// residual graph. Forward arcs source -> sink are uncapacitated; backward
// arcs carry the current flow.
double SolveTransport(std::span<const double> supply, std::span<const double> demand,
                      std::span<const double> cost) {
  const std::size_t n = supply.size();
  const std::size_t m = demand.size();
  if (cost.size() != n * m) throw ValidationError("cost matrix has the wrong size");

  std::vector<double> a(supply.begin(), supply.end());
  std::vector<double> b(demand.begin(), demand.end());
  double total = 0.0;
  for (double v : a) total += v;
  if (total <= 0.0) return 0.0;
  const double tiny = kMassEpsilon * total;

  std::vector<double> flow(n * m, 0.0);
  std::vector<double> pot(n + m, 0.0);
  std::vector<double> dist(n + m);
  std::vector<std::ptrdiff_t> parent(n + m);
  std::vector<bool> done(n + m);

  double remaining = total;
  while (remaining > tiny) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(done.begin(), done.end(), false);
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i] > tiny) dist[i] = 0.0;
    }
    // Dense Dijkstra: nodes [0, n) are sources, [n, n + m) sinks.
    std::ptrdiff_t target = -1;
    for (;;) {
      std::ptrdiff_t u = -1;
      for (std::size_t v = 0; v < n + m; ++v) {
        if (!done[v] && dist[v] < kInf && (u < 0 || dist[v] < dist[static_cast<std::size_t>(u)])) {
          u = static_cast<std::ptrdiff_t>(v);
        }
      }
      if (u < 0) break;
      const auto uu = static_cast<std::size_t>(u);
      done[uu] = true;
      if (uu >= n && b[uu - n] > tiny) {
        target = u;
        break;
      }
      if (uu < n) {
        for (std::size_t j = 0; j < m; ++j) {
          const double c = cost[uu * m + j];
          if (c == kInf || done[n + j]) continue;
          const double nd = dist[uu] + std::max(0.0, c + pot[uu] - pot[n + j]);
          if (nd < dist[n + j]) {
            dist[n + j] = nd;
            parent[n + j] = u;
          }
        }
      } else {
        const std::size_t j = uu - n;
        for (std::size_t i = 0; i < n; ++i) {
          if (flow[i * m + j] <= 0.0 || done[i]) continue;
          const double nd = dist[uu] + std::max(0.0, -cost[i * m + j] + pot[uu] - pot[i]);
          if (nd < dist[i]) {
            dist[i] = nd;
            parent[i] = u;
          }
        }
      }
    }
    if (target < 0) {
      throw UnreachableMass(
          fmt::format("{} units of mass cannot reach any demand over finite-cost pairs", remaining));
    }
    const double dt = dist[static_cast<std::size_t>(target)];
    for (std::size_t v = 0; v < n + m; ++v) pot[v] += std::min(dist[v], dt);

    // Walk back to the originating source to find the bottleneck.
    const std::size_t sink = static_cast<std::size_t>(target) - n;
    double push = b[sink];
    std::size_t v = static_cast<std::size_t>(target);
    while (parent[v] >= 0) {
      const auto p = static_cast<std::size_t>(parent[v]);
      if (v < n) push = std::min(push, flow[v * m + (p - n)]);  // backward arc p -> v
      v = p;
    }
    push = std::min(push, a[v]);

    v = static_cast<std::size_t>(target);
    while (parent[v] >= 0) {
      const auto p = static_cast<std::size_t>(parent[v]);
      if (v >= n) {
        flow[p * m + (v - n)] += push;
      } else {
        double& f = flow[v * m + (p - n)];
        f -= push;
        if (f < tiny * 1e-3) f = 0.0;
      }
      v = p;
    }
    a[v] -= push;
    b[sink] -= push;
    remaining -= push;
  }

  double cost_total = 0.0;
  for (std::size_t k = 0; k < flow.size(); ++k) {
    if (flow[k] > 0.0) cost_total += flow[k] * cost[k];
  }
  return cost_total;
}

Meters Emd(const RoadNetwork& net, const DiscreteDistribution& p, const DiscreteDistribution& q) {
  // Mass shared by both sides stays put at zero cost; only the excess moves.
  std::map<SegmentId, double> net_mass;
  for (std::size_t i = 0; i < p.size(); ++i) {
    net.CheckSegment(p.support()[i]);
    net_mass[p.support()[i]] += p.mass()[i];
  }
  for (std::size_t i = 0; i < q.size(); ++i) {
    net.CheckSegment(q.support()[i]);
    net_mass[q.support()[i]] -= q.mass()[i];
  }
  std::vector<SegmentId> src, dst;
  std::vector<double> supply, demand;
  for (const auto& [s, v] : net_mass) {
    if (v > 0.0) {
      src.push_back(s);
      supply.push_back(v);
    } else if (v < 0.0) {
      dst.push_back(s);
      demand.push_back(-v);
    }
  }
  if (src.empty() || dst.empty()) return 0.0;

  // Both sides are normalized, so totals agree up to rounding; trim the
  // larger side so the transport problem is balanced.
  double ts = 0.0, td = 0.0;
  for (double v : supply) ts += v;
  for (double v : demand) td += v;
  if (ts > td) {
    for (double& v : supply) v *= td / ts;
  } else {
    for (double& v : demand) v *= ts / td;
  }

  std::vector<double> cost(src.size() * dst.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    for (std::size_t j = 0; j < dst.size(); ++j) {
      const Meters there = net.RawDistance(src[i], dst[j]);
      const Meters back = net.RawDistance(dst[j], src[i]);
      cost[i * dst.size() + j] =
          IsReachable(there) && IsReachable(back) ? (there + back) / 2.0 : kInf;
    }
  }
  return SolveTransport(supply, demand, cost);
}

}  // namespace ageoi
