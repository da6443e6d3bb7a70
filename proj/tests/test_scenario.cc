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

#include "ageoi/scenario.h"

#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "test_util.h"

namespace ageoi {
namespace {

TEST(Csv, GraphRoundTripAndHeaderChecks) {
  const std::vector<RoadEdge> edges{{0, 1, 100}, {1, 0, 12.5}};
  std::ostringstream out;
  WriteGraphCsv(out, edges);
  EXPECT_EQ(out.str(), "from,to,weight_m\n0,1,100\n1,0,12.5\n");
  std::istringstream in(out.str());
  const auto back = ReadGraphCsv(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].weight, 12.5);

  std::istringstream crlf("\xEF\xBB\xBF" "from,to,weight_m\r\n0,1,3\r\n\r\n");
  EXPECT_EQ(ReadGraphCsv(crlf).size(), 1u);
  std::istringstream wrong("a,b,c\n0,1,2\n");
  EXPECT_THROW(ReadGraphCsv(wrong), ValidationError);
  std::istringstream empty("");
  EXPECT_THROW(ReadGraphCsv(empty), ValidationError);
  std::istringstream junk("from,to,weight_m\n0,x,2\n");
  EXPECT_THROW(ReadGraphCsv(junk), ValidationError);
  std::istringstream short_row("from,to,weight_m\n0,1\n");
  EXPECT_THROW(ReadGraphCsv(short_row), ValidationError);
}

TEST(Csv, StationsTrajectoriesDistributions) {
  std::istringstream st("station_id,segment_id,available\n4,2,1\n5,3,0\n");
  const auto stations = ReadStationsCsv(st);
  ASSERT_EQ(stations.size(), 2u);
  EXPECT_FALSE(stations[1].available);
  std::istringstream bad("station_id,segment_id,available\n4,2,2\n");
  EXPECT_THROW(ReadStationsCsv(bad), ValidationError);

  std::istringstream tr("ev_id,tick,segment_id\nb,1,5\nb,0,4\na,0,1\n");
  const auto t = ReadTrajectoriesCsv(tr);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t.at("b").front().segment, 4u);  // sorted by tick
  std::istringstream dup("ev_id,tick,segment_id\nb,1,5\nb,1,4\n");
  EXPECT_THROW(ReadTrajectoriesCsv(dup), ValidationError);

  std::istringstream dist("segment_id,mass\n0,0.25\n3,0.75\n");
  EXPECT_DOUBLE_EQ(ReadDistributionCsv(dist).MassOf(3), 0.75);
  std::istringstream unnorm("segment_id,mass\n0,0.25\n");
  EXPECT_THROW(ReadDistributionCsv(unnorm), ValidationError);
}

TEST(Csv, TraceRoundTrip) {
  std::vector<TraceRow> rows(2);
  rows[0] = {3, "ev7", 10, 11, 2, 2, 0.0, 1.0, 0.25};
  rows[1] = {4, "ev8", 12, 19, std::nullopt, 1, 141.25, 2.0, 1.0 / 3};
  std::ostringstream out;
  WriteTraceCsv(out, rows);
  std::istringstream in(out.str());
  const auto back = ReadTraceCsv(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_FALSE(back[1].chosen_station.has_value());
  EXPECT_EQ(back[1].cop_meters, 141.25);
  EXPECT_EQ(back[1].delta_total, 1.0 / 3);
}

TEST(Synthetic, GridPassesValidation) {
  const auto dir = testutil::FreshDir("synthetic_grid");
  const auto path = GenerateSyntheticScenario({SyntheticKind::kGrid, 10, 5, 1, 20, 15, 100}, dir);
  const Scenario s = LoadScenario(path);
  EXPECT_EQ(s.net.num_nodes(), 100u);
  EXPECT_EQ(s.net.num_edges(), 360u);
  EXPECT_EQ(s.stations.size(), 5u);
  EXPECT_EQ(s.trajectories.size(), 20u);
  EXPECT_TRUE(ValidateScenario(s).empty());
  ASSERT_TRUE(s.grid.has_value());
  EXPECT_FALSE(s.truth.has_value());
}

TEST(Synthetic, TwoClusterIsDeterministic) {
  const auto a = testutil::FreshDir("two_cluster_a");
  const auto b = testutil::FreshDir("two_cluster_b");
  const SyntheticOptions o{SyntheticKind::kTwoCluster, 12, 6, 77, 30, 10, 100};
  GenerateSyntheticScenario(o, a);
  GenerateSyntheticScenario(o, b);
  EXPECT_EQ(testutil::Tree(a), testutil::Tree(b));
  const Scenario s = LoadScenario(a / "scenario.json");
  ASSERT_TRUE(s.truth.has_value());
  // Peaks sit on the two cluster centres.
  const SegmentId centre_a = 3 * 12 + 3;
  double best = 0;
  SegmentId arg = 0;
  for (std::size_t i = 0; i < s.truth->size(); ++i) {
    if (s.truth->mass()[i] > best) {
      best = s.truth->mass()[i];
      arg = s.truth->support()[i];
    }
  }
  EXPECT_EQ(arg, centre_a);
}

TEST(Synthetic, RandomWalksFollowEdges) {
  const auto dir = testutil::FreshDir("synthetic_walks");
  const auto path = GenerateSyntheticScenario({SyntheticKind::kGrid, 8, 3, 5, 50, 40, 100}, dir);
  const Scenario s = LoadScenario(path);
  std::set<std::pair<SegmentId, SegmentId>> edges;
  for (const RoadEdge& e : s.net.edges()) edges.insert({e.from, e.to});
  for (const auto& [ev, points] : s.trajectories) {
    ASSERT_EQ(points.size(), 40u);
    for (std::size_t i = 1; i < points.size(); ++i) {
      EXPECT_TRUE(edges.count({points[i - 1].segment, points[i].segment})) << ev << " step " << i;
      EXPECT_EQ(points[i].tick, points[i - 1].tick + 1);
    }
  }
}

TEST(Synthetic, RejectsBadOptions) {
  const auto dir = testutil::FreshDir("synthetic_bad");
  EXPECT_THROW(GenerateSyntheticScenario({SyntheticKind::kGrid, 3, 10, 1, 5, 5, 100}, dir),
               ValidationError);
  EXPECT_THROW(GenerateSyntheticScenario({SyntheticKind::kGrid, 3, 0, 1, 5, 5, 100}, dir),
               ValidationError);
  EXPECT_THROW(GenerateSyntheticScenario({SyntheticKind::kGrid, 1, 1, 1, 5, 5, 100}, dir),
               ValidationError);
}

TEST(LoadScenario, ReportsEveryProblem) {
  const auto dir = testutil::FreshDir("bad_scenario");
  testutil::Spit(dir / "graph.csv", "from,to,weight_m\n0,1,100\n1,0,100\n");
  testutil::Spit(dir / "stations.csv", "station_id,segment_id,available\n0,1,1\n");
  testutil::Spit(dir / "traj.csv", "ev_id,tick,segment_id\na,0,0\na,9,1\n");
  testutil::Spit(dir / "scenario.json", R"({
    "graph_file": "graph.csv", "stations_file": "stations.csv", "trajectories_file": "traj.csv",
    "coverage": [0, 1], "m": 0, "epsilon": -1, "radius_r": 2, "max_speed": 10, "seed": 1,
    "ticks": 5, "availability_schedule": [{"tick": 1, "station_id": 8, "available": false}]
  })");
  try {
    LoadScenario(dir / "scenario.json");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("m must be at least 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("epsilon must be > 0"), std::string::npos);
    EXPECT_NE(msg.find("outside [0, 5)"), std::string::npos);
    EXPECT_NE(msg.find("unknown station 8"), std::string::npos);
  }
}

TEST(LoadScenario, MissingFilesAndBadJson) {
  const auto dir = testutil::FreshDir("missing_scenario");
  EXPECT_THROW(LoadScenario(dir / "nope.json"), ValidationError);
  testutil::Spit(dir / "broken.json", "{ not json");
  EXPECT_THROW(LoadScenario(dir / "broken.json"), ValidationError);
  testutil::Spit(dir / "partial.json", R"({"graph_file": "graph.csv"})");
  EXPECT_THROW(LoadScenario(dir / "partial.json"), ValidationError);
  testutil::Spit(dir / "policy.json", R"({"graph_file": "g.csv"})");
  EXPECT_THROW(LoadScenario(dir / "policy.json"), ValidationError);
}

TEST(AssignQueryTicks, Policies) {
  const auto dir = testutil::FreshDir("policies");
  const Scenario base = LoadScenario(
      GenerateSyntheticScenario({SyntheticKind::kGrid, 5, 2, 3, 10, 12, 100}, dir));
  Rng rng(1);
  for (const EvState& ev : AssignQueryTicks(base, rng)) {
    EXPECT_EQ(ev.query_ticks.size(), 3u);
    for (Tick t : ev.query_ticks) EXPECT_NO_THROW(ev.LocationAt(t));
  }
  Scenario every = base;
  every.query_ticks = {QueryTickPolicy::Kind::kEvery, 3, 4, {}};
  for (const EvState& ev : AssignQueryTicks(every, rng)) {
    EXPECT_EQ(ev.query_ticks, (std::set<Tick>{0, 4, 8}));
  }
  Scenario expl = base;
  expl.query_ticks = {QueryTickPolicy::Kind::kExplicit, 3, 1, {2, 5, 99}};
  for (const EvState& ev : AssignQueryTicks(expl, rng)) {
    EXPECT_EQ(ev.query_ticks, (std::set<Tick>{2, 5}));
  }
}

}  // namespace
}  // namespace ageoi
