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

#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"

namespace ageoi {
namespace {

RoadNetwork Line3() {
  const std::vector<RoadEdge> e{{0, 1, 100}, {1, 2, 100}};
  return RoadNetwork::Build(e, 100);
}

RoadNetwork SymmetricLine(std::size_t n) {
  std::vector<RoadEdge> e;
  for (SegmentId i = 0; i + 1 < n; ++i) {
    e.push_back({i, i + 1, 100});
    e.push_back({i + 1, i, 100});
  }
  return RoadNetwork::Build(e, 100);
}

TEST(BuildNetwork, LineGraph) {
  const RoadNetwork net = Line3();
  EXPECT_EQ(net.num_nodes(), 3u);
  EXPECT_EQ(net.num_edges(), 2u);
  EXPECT_DOUBLE_EQ(net.segment_length(), 100.0);
  EXPECT_TRUE(net.has_distance_table());
}

TEST(BuildNetwork, RejectsNegativeWeight) {
  const std::vector<RoadEdge> e{{0, 1, 100}, {1, 2, -5}};
  try {
    RoadNetwork::Build(e, 100);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& err) {
    EXPECT_NE(std::string(err.what()).find("negative weight"), std::string::npos);
  }
}

TEST(BuildNetwork, RejectsEmptyNonFiniteAndGaps) {
  EXPECT_THROW(RoadNetwork::Build(std::vector<RoadEdge>{}, 100), ValidationError);
  const std::vector<RoadEdge> nan{{0, 1, std::numeric_limits<double>::quiet_NaN()}};
  EXPECT_THROW(RoadNetwork::Build(nan, 100), ValidationError);
  const std::vector<RoadEdge> inf{{0, 1, oracle::kInf}};
  EXPECT_THROW(RoadNetwork::Build(inf, 100), ValidationError);
  // Segment 1 is referenced by nothing: the id space has a hole.
  const std::vector<RoadEdge> gap{{0, 2, 100}};
  EXPECT_THROW(RoadNetwork::Build(gap, 100), ValidationError);
  const std::vector<RoadEdge> ok{{0, 1, 100}};
  EXPECT_THROW(RoadNetwork::Build(ok, 0), ValidationError);
  EXPECT_THROW(RoadNetwork::Build(ok, -1), ValidationError);
}

TEST(BuildNetwork, ZeroWeightAndSelfLoopAccepted) {
  const std::vector<RoadEdge> e{{0, 1, 0}, {1, 1, 10}};
  const RoadNetwork net = RoadNetwork::Build(e, 100);
  EXPECT_EQ(net.Distance(0, 1), 0.0);
}

TEST(BuildNetwork, GridEdgeCount) {
  for (std::size_t n : {2u, 3u, 10u}) {
    const RoadNetwork net = RoadNetwork::Build(GridEdges(n, n, 100), 100);
    EXPECT_EQ(net.num_nodes(), n * n);
    EXPECT_EQ(net.num_edges(), 4 * n * (n - 1));
  }
  EXPECT_THROW(GridEdges(0, 3, 100), ValidationError);
  EXPECT_THROW(GridEdges(1, 1, 100), ValidationError);
}

TEST(TraversalDistance, LineExamples) {
  const RoadNetwork net = Line3();
  EXPECT_EQ(net.Distance(0, 2), 200.0);
  EXPECT_EQ(net.Distance(2, 0), std::nullopt);
  EXPECT_EQ(net.Distance(1, 1), 0.0);
  EXPECT_THROW(net.Distance(0, 3), ValidationError);
  EXPECT_THROW(net.DistancesFrom(7), ValidationError);
}

TEST(TraversalDistance, MatchesBellmanFordOnRandomGraphs) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto edges = trial % 2 == 0 ? oracle::RandomStronglyConnected(20, 30, 1, 300, gen)
                                      : oracle::RandomSparse(20, 10, 1, 300, gen);
    const RoadNetwork net = RoadNetwork::Build(edges, 100);
    const auto bf = oracle::BellmanFord(net.num_nodes(), edges);
    for (SegmentId i = 0; i < net.num_nodes(); ++i) {
      for (SegmentId j = 0; j < net.num_nodes(); ++j) {
        const auto d = net.Distance(i, j);
        if (std::isinf(bf[i][j])) {
          EXPECT_FALSE(d.has_value()) << i << "->" << j;
        } else {
          ASSERT_TRUE(d.has_value()) << i << "->" << j;
          EXPECT_NEAR(*d, bf[i][j], 1e-9);
        }
      }
    }
  }
}

TEST(TraversalDistance, OnDemandRowsMatchTable) {
  std::mt19937_64 gen(5);
  const auto edges = oracle::RandomSparse(40, 60, 1, 50, gen);
  const RoadNetwork table = RoadNetwork::Build(edges, 100);
  const RoadNetwork lazy = RoadNetwork::Build(edges, 100, /*table_threshold=*/0);
  EXPECT_FALSE(lazy.has_distance_table());
  for (SegmentId i = 0; i < 40; ++i) {
    EXPECT_EQ(table.DistancesFrom(i), lazy.DistancesFrom(i));
  }
  // A copy shares the cache and still answers.
  const RoadNetwork copy = lazy;
  EXPECT_EQ(copy.Distance(3, 4), table.Distance(3, 4));
}

TEST(ClosedBall, Examples) {
  const RoadNetwork line = Line3();
  EXPECT_EQ(ClosedBall(line, 1, 0), std::vector<SegmentId>{1});
  EXPECT_EQ(ClosedBall(line, 0, 150), (std::vector<SegmentId>{0, 1}));
  EXPECT_THROW(ClosedBall(line, 0, -1), ValidationError);
  EXPECT_THROW(ClosedBall(line, 9, 1), ValidationError);

  const auto edges = GridEdges(10, 10, 100);
  const RoadNetwork grid = RoadNetwork::Build(edges, 100);
  const auto bf = oracle::BellmanFord(100, edges);
  const SegmentId centre = 5 * 10 + 5;
  std::vector<SegmentId> expected;
  for (SegmentId y = 0; y < 100; ++y) {
    if (bf[centre][y] <= 300) expected.push_back(y);
  }
  EXPECT_EQ(ClosedBall(grid, centre, 300), expected);
  EXPECT_EQ(expected.size(), 25u);  // diamond of L1 radius 3
}

TEST(Coverage, MakeCoverageNormalizes) {
  const RoadNetwork net = Line3();
  const EdgeCoverage c = MakeCoverage(net, {2, 0, 2});
  EXPECT_EQ(c.segments, (std::vector<SegmentId>{0, 2}));
  EXPECT_TRUE(c.Contains(2));
  EXPECT_FALSE(c.Contains(1));
  EXPECT_THROW(MakeCoverage(net, {}), ValidationError);
  EXPECT_THROW(MakeCoverage(net, {5}), ValidationError);
  EXPECT_EQ(FullCoverage(net).segments.size(), 3u);
}

TEST(StationSet, Validation) {
  const RoadNetwork net = Line3();
  EXPECT_THROW(StationSet(net, {{1, 0, true}, {1, 2, true}}), ValidationError);
  EXPECT_THROW(StationSet(net, {{1, 9, true}}), ValidationError);
  StationSet s(net, {{7, 2, true}, {3, 0, false}});
  EXPECT_EQ(s.stations().front().id, 3u);
  EXPECT_EQ(s.num_available(), 1u);
  s.SetAvailable(3, true);
  EXPECT_EQ(s.num_available(), 2u);
  EXPECT_THROW(s.SetAvailable(4, true), ValidationError);
  ASSERT_NE(s.Find(7), nullptr);
  EXPECT_EQ(s.Find(7)->location, 2u);
  EXPECT_EQ(s.Find(8), nullptr);
}

TEST(NearestStation, SingleCandidate) {
  const RoadNetwork net = Line3();
  const StationSet s(net, {{4, 2, true}});
  EXPECT_EQ(NearestAvailableStation(net, s, 0), (NearestStation{4, 2, 200}));
}

TEST(NearestStation, TieGoesToLowestId) {
  const RoadNetwork net = SymmetricLine(3);
  const StationSet s(net, {{9, 0, true}, {2, 2, true}});
  EXPECT_EQ(NearestAvailableStation(net, s, 1).station_id, 2u);
  const StationSet t(net, {{1, 0, true}, {2, 2, true}});
  EXPECT_EQ(NearestAvailableStation(net, t, 1).station_id, 1u);
}

TEST(NearestStation, ErrorsWhenNothingUsable) {
  const RoadNetwork net = Line3();
  EXPECT_THROW(NearestAvailableStation(net, StationSet(net, {{1, 2, false}}), 0),
               NoReachableStation);
  // Station at 0 is unreachable from 2 on the one-way line.
  EXPECT_THROW(NearestAvailableStation(net, StationSet(net, {{1, 0, true}}), 2),
               NoReachableStation);
  EXPECT_THROW(NearestAvailableStation(net, StationSet(net, {{1, 0, true}}), 5), ValidationError);
}

TEST(NearestStation, MatchesScanOracleOnGrid) {
  const auto edges = GridEdges(10, 10, 100);
  const RoadNetwork net = RoadNetwork::Build(edges, 100);
  const auto bf = oracle::BellmanFord(100, edges);
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<SegmentId> seg(0, 99);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Station> st;
    for (StationId id = 0; id < 5; ++id) st.push_back({id, seg(gen), id != 2 || trial % 2 == 0});
    const StationSet stations(net, st);
    for (int q = 0; q < 20; ++q) {
      const SegmentId x = seg(gen);
      double best = oracle::kInf;
      StationId best_id = 0;
      for (const Station& s : st) {
        if (!s.available) continue;
        if (bf[x][s.location] < best || (bf[x][s.location] == best && s.id < best_id)) {
          best = bf[x][s.location];
          best_id = s.id;
        }
      }
      const NearestStation got = NearestAvailableStation(net, stations, x);
      EXPECT_EQ(got.station_id, best_id);
      EXPECT_DOUBLE_EQ(got.distance, best);
    }
  }
}

}  // namespace
}  // namespace ageoi
