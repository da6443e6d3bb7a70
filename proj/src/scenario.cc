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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string_view>

#include <fmt/format.h>
#include <json.hpp>

namespace ageoi {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::string_view> SplitCsv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T ParseField(std::string_view text, std::size_t line_no, std::string_view what) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ValidationError(
        fmt::format("line {}: cannot parse {} from '{}'", line_no, what, std::string(text)));
  }
  return value;
}

// Reads a CSV with an exact header, calling `row` with the fields of every
// non-empty data line.
template <typename RowFn>
void ReadCsv(std::istream& in, std::string_view header, std::size_t columns, RowFn row) {
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!saw_header) {
      if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
      if (line != header) {
        throw ValidationError(fmt::format("expected header '{}', got '{}'", header, line));
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = SplitCsv(line);
    if (fields.size() != columns) {
      throw ValidationError(
          fmt::format("line {}: expected {} fields, got {}", line_no, columns, fields.size()));
    }
    row(fields, line_no);
  }
  if (!saw_header) throw ValidationError(fmt::format("missing header '{}'", header));
}

std::ifstream OpenInput(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot open {}", path.string()));
  return in;
}

template <typename Fn>
auto ReadFile(const fs::path& path, Fn fn) {
  std::ifstream in = OpenInput(path);
  try {
    return fn(in);
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void WriteFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  out << content;
}

}  // namespace

std::vector<RoadEdge> ReadGraphCsv(std::istream& in) {
  std::vector<RoadEdge> edges;
  ReadCsv(in, "from,to,weight_m", 3, [&](const auto& f, std::size_t ln) {
    edges.push_back({ParseField<SegmentId>(f[0], ln, "from"), ParseField<SegmentId>(f[1], ln, "to"),
                     ParseField<double>(f[2], ln, "weight_m")});
  });
  return edges;
}

void WriteGraphCsv(std::ostream& out, const std::vector<RoadEdge>& edges) {
  out << "from,to,weight_m\n";
  for (const RoadEdge& e : edges) out << fmt::format("{},{},{}\n", e.from, e.to, e.weight);
}

std::vector<Station> ReadStationsCsv(std::istream& in) {
  std::vector<Station> stations;
  ReadCsv(in, "station_id,segment_id,available", 3, [&](const auto& f, std::size_t ln) {
    const int avail = ParseField<int>(f[2], ln, "available");
    if (avail != 0 && avail != 1) {
      throw ValidationError(fmt::format("line {}: available must be 0 or 1", ln));
    }
    stations.push_back({ParseField<StationId>(f[0], ln, "station_id"),
                        ParseField<SegmentId>(f[1], ln, "segment_id"), avail == 1});
  });
  return stations;
}

void WriteStationsCsv(std::ostream& out, const std::vector<Station>& stations) {
  out << "station_id,segment_id,available\n";
  for (const Station& s : stations) {
    out << fmt::format("{},{},{}\n", s.id, s.location, s.available ? 1 : 0);
  }
}

TrajectoryMap ReadTrajectoriesCsv(std::istream& in) {
  TrajectoryMap trajectories;
  ReadCsv(in, "ev_id,tick,segment_id", 3, [&](const auto& f, std::size_t ln) {
    if (f[0].empty()) throw ValidationError(fmt::format("line {}: empty ev_id", ln));
    trajectories[std::string(f[0])].push_back(
        {ParseField<Tick>(f[1], ln, "tick"), ParseField<SegmentId>(f[2], ln, "segment_id")});
  });
  for (auto& [ev, points] : trajectories) {
    std::stable_sort(points.begin(), points.end(),
                     [](const TrajectoryPoint& a, const TrajectoryPoint& b) { return a.tick < b.tick; });
    for (std::size_t i = 1; i < points.size(); ++i) {
      if (points[i].tick == points[i - 1].tick) {
        throw ValidationError(fmt::format("EV {} has two points at tick {}", ev, points[i].tick));
      }
    }
  }
  return trajectories;
}

void WriteTrajectoriesCsv(std::ostream& out, const TrajectoryMap& trajectories) {
  out << "ev_id,tick,segment_id\n";
  for (const auto& [ev, points] : trajectories) {
    for (const TrajectoryPoint& p : points) out << fmt::format("{},{},{}\n", ev, p.tick, p.segment);
  }
}

DiscreteDistribution ReadDistributionCsv(std::istream& in) {
  std::vector<SegmentId> support;
  std::vector<double> mass;
  ReadCsv(in, "segment_id,mass", 2, [&](const auto& f, std::size_t ln) {
    support.push_back(ParseField<SegmentId>(f[0], ln, "segment_id"));
    mass.push_back(ParseField<double>(f[1], ln, "mass"));
  });
  return DiscreteDistribution(std::move(support), std::move(mass));
}

void WriteDistributionCsv(std::ostream& out, const DiscreteDistribution& dist) {
  out << "segment_id,mass\n";
  for (std::size_t i = 0; i < dist.size(); ++i) {
    out << fmt::format("{},{}\n", dist.support()[i], dist.mass()[i]);
  }
}

std::vector<TraceRow> ReadTraceCsv(std::istream& in) {
  std::vector<TraceRow> rows;
  ReadCsv(in,
          "tick,ev_id,true_segment,privatized_segment,chosen_station,true_nearest_station,"
          "cop_meters,epsilon_total,delta_total",
          9, [&](const auto& f, std::size_t ln) {
            TraceRow r;
            r.tick = ParseField<Tick>(f[0], ln, "tick");
            r.ev_id = std::string(f[1]);
            r.true_segment = ParseField<SegmentId>(f[2], ln, "true_segment");
            r.privatized_segment = ParseField<SegmentId>(f[3], ln, "privatized_segment");
            if (!f[4].empty()) r.chosen_station = ParseField<StationId>(f[4], ln, "chosen_station");
            if (!f[5].empty()) {
              r.true_nearest_station = ParseField<StationId>(f[5], ln, "true_nearest_station");
            }
            if (!f[6].empty()) r.cop_meters = ParseField<double>(f[6], ln, "cop_meters");
            r.epsilon_total = ParseField<double>(f[7], ln, "epsilon_total");
            r.delta_total = ParseField<double>(f[8], ln, "delta_total");
            rows.push_back(std::move(r));
          });
  return rows;
}

Scenario LoadScenario(const fs::path& path) {
  json j;
  {
    std::ifstream in = OpenInput(path);
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ValidationError(fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
    }
  }
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  Scenario s;
  s.source = path;
  try {
    const double k = j.value("segment_length_k", 100.0);
    const auto edges = ReadFile(resolve(j.at("graph_file").get<std::string>()), ReadGraphCsv);
    s.net = RoadNetwork::Build(edges, k);
    s.stations = StationSet(
        s.net, ReadFile(resolve(j.at("stations_file").get<std::string>()), ReadStationsCsv));
    s.trajectories =
        ReadFile(resolve(j.at("trajectories_file").get<std::string>()), ReadTrajectoriesCsv);

    const json& cov = j.value("coverage", json("all"));
    if (cov.is_string() && cov.get<std::string>() == "all") {
      s.coverage = FullCoverage(s.net);
    } else {
      s.coverage = MakeCoverage(s.net, cov.get<std::vector<SegmentId>>());
    }

    const json& policy = j.value("query_ticks", json::object());
    const std::string kind = policy.value("policy", "random");
    if (kind == "random") {
      s.query_ticks.kind = QueryTickPolicy::Kind::kRandom;
      s.query_ticks.per_trajectory = policy.value("per_trajectory", std::size_t{3});
    } else if (kind == "every") {
      s.query_ticks.kind = QueryTickPolicy::Kind::kEvery;
      s.query_ticks.period = policy.value("period", std::size_t{1});
    } else if (kind == "explicit") {
      s.query_ticks.kind = QueryTickPolicy::Kind::kExplicit;
      s.query_ticks.ticks = policy.at("ticks").get<std::vector<Tick>>();
    } else {
      throw ValidationError(fmt::format("unknown query_ticks policy '{}'", kind));
    }

    s.m = j.at("m").get<std::size_t>();
    s.epsilon = j.at("epsilon").get<double>();
    s.radius_segments = j.at("radius_r").get<double>();
    s.max_speed = j.at("max_speed").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.ticks = j.at("ticks").get<Tick>();
    s.tick_seconds = j.value("tick_seconds", 1.0);
    for (const json& c : j.value("availability_schedule", json::array())) {
      s.availability_schedule.push_back(
          {c.at("tick").get<Tick>(), c.at("station_id").get<StationId>(), c.at("available").get<bool>()});
    }
    if (j.contains("truth_file")) {
      s.truth = ReadFile(resolve(j.at("truth_file").get<std::string>()), ReadDistributionCsv);
    }
    if (j.contains("grid")) {
      s.grid = GridShape{j["grid"].at("rows").get<std::size_t>(), j["grid"].at("cols").get<std::size_t>()};
    }
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }

  const std::vector<std::string> problems = ValidateScenario(s);
  if (!problems.empty()) {
    std::string msg = fmt::format("{}: invalid scenario", path.string());
    for (const std::string& p : problems) msg += "\n  - " + p;
    throw ValidationError(msg);
  }
  return s;
}

std::vector<std::string> ValidateScenario(const Scenario& s) {
  std::vector<std::string> problems;
  if (s.m < 1) problems.push_back("m must be at least 1");
  if (!(s.epsilon > 0.0)) problems.push_back(fmt::format("epsilon must be > 0, got {}", s.epsilon));
  if (!(s.radius_segments >= 0.0)) {
    problems.push_back(fmt::format("radius_r must be >= 0, got {}", s.radius_segments));
  }
  if (!(s.max_speed > 0.0)) problems.push_back("max_speed must be > 0");
  if (!(s.tick_seconds > 0.0)) problems.push_back("tick_seconds must be > 0");
  if (s.ticks <= 0) problems.push_back("ticks must be positive");
  if (s.stations.size() == 0) problems.push_back("no stations");
  if (s.trajectories.empty()) problems.push_back("no trajectories");
  if (s.query_ticks.kind == QueryTickPolicy::Kind::kRandom && s.query_ticks.per_trajectory == 0) {
    problems.push_back("query_ticks.per_trajectory must be positive");
  }
  if (s.query_ticks.kind == QueryTickPolicy::Kind::kEvery && s.query_ticks.period == 0) {
    problems.push_back("query_ticks.period must be positive");
  }
  for (const auto& [ev, points] : s.trajectories) {
    for (const TrajectoryPoint& p : points) {
      if (!s.net.IsValid(p.segment)) {
        problems.push_back(fmt::format("EV {} references unknown segment {}", ev, p.segment));
        break;
      }
      if (!s.coverage.Contains(p.segment)) {
        problems.push_back(fmt::format("EV {} leaves the coverage at tick {}", ev, p.tick));
        break;
      }
      if (p.tick < 0 || p.tick >= s.ticks) {
        problems.push_back(fmt::format("EV {} has tick {} outside [0, {})", ev, p.tick, s.ticks));
        break;
      }
    }
  }
  for (const AvailabilityChange& c : s.availability_schedule) {
    if (s.stations.Find(c.station_id) == nullptr) {
      problems.push_back(fmt::format("schedule references unknown station {}", c.station_id));
    }
  }
  if (s.truth) {
    for (SegmentId seg : s.truth->support()) {
      if (!s.coverage.Contains(seg)) {
        problems.push_back(fmt::format("truth distribution has mass outside coverage ({})", seg));
        break;
      }
    }
  }
  if (s.grid && s.grid->rows * s.grid->cols != s.net.num_nodes()) {
    problems.push_back("grid shape does not match the number of segments");
  }
  return problems;
}

std::vector<EvState> AssignQueryTicks(const Scenario& s, Rng& rng) {
  std::vector<EvState> evs;
  for (const auto& [ev, points] : s.trajectories) {
    EvState state;
    state.ev_id = ev;
    state.trajectory = points;
    switch (s.query_ticks.kind) {
      case QueryTickPolicy::Kind::kRandom: {
        std::vector<std::size_t> idx(points.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        const std::size_t take = std::min(s.query_ticks.per_trajectory, idx.size());
        for (std::size_t i = 0; i < take; ++i) {
          std::swap(idx[i], idx[i + rng.Index(idx.size() - i)]);
          state.query_ticks.insert(points[idx[i]].tick);
        }
        break;
      }
      case QueryTickPolicy::Kind::kEvery:
        for (std::size_t i = 0; i < points.size(); i += s.query_ticks.period) {
          state.query_ticks.insert(points[i].tick);
        }
        break;
      case QueryTickPolicy::Kind::kExplicit:
        for (Tick t : s.query_ticks.ticks) {
          auto it = std::find_if(points.begin(), points.end(),
                                 [t](const TrajectoryPoint& p) { return p.tick == t; });
          if (it != points.end()) state.query_ticks.insert(t);
        }
        break;
    }
    evs.push_back(std::move(state));
  }
  return evs;
}

fs::path GenerateSyntheticScenario(const SyntheticOptions& opts, const fs::path& out_dir) {
  if (opts.size < 2) throw ValidationError("grid size must be at least 2");
  if (opts.num_stations == 0) throw ValidationError("station count must be positive");
  const std::size_t n = opts.size * opts.size;
  if (opts.num_stations > n) {
    throw ValidationError(
        fmt::format("{} stations do not fit on {} segments", opts.num_stations, n));
  }
  if (opts.num_evs == 0 || opts.trajectory_length == 0) {
    throw ValidationError("need at least one EV and one tick");
  }

  Rng rng(opts.seed);
  const std::vector<RoadEdge> edges = GridEdges(opts.size, opts.size, opts.segment_length);
  const RoadNetwork net = RoadNetwork::Build(edges, opts.segment_length);

  std::vector<SegmentId> all(n);
  for (SegmentId i = 0; i < n; ++i) all[i] = i;
  std::vector<SegmentId> shuffled = all;
  rng.Shuffle(std::span<SegmentId>(shuffled));
  std::vector<Station> stations;
  for (std::size_t i = 0; i < opts.num_stations; ++i) {
    stations.push_back({static_cast<StationId>(i), shuffled[i], true});
  }

  std::optional<DiscreteDistribution> truth;
  if (opts.kind == SyntheticKind::kTwoCluster) {
    const std::size_t lo = opts.size / 4;
    const std::size_t hi = (3 * opts.size) / 4;
    const SegmentId a = static_cast<SegmentId>(lo * opts.size + lo);
    const SegmentId b = static_cast<SegmentId>(hi * opts.size + hi);
    const std::vector<Meters> da = net.DistancesFrom(a);
    const std::vector<Meters> db = net.DistancesFrom(b);
    std::vector<double> mass(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mass[i] = 0.6 * std::exp(-da[i] / (1.5 * opts.segment_length)) +
                0.4 * std::exp(-db[i] / (1.5 * opts.segment_length));
      total += mass[i];
    }
    for (double& v : mass) v /= total;
    truth = DiscreteDistribution(all, std::move(mass));
  }

  TrajectoryMap trajectories;
  const int width = static_cast<int>(std::to_string(opts.num_evs - 1).size());
  for (std::size_t e = 0; e < opts.num_evs; ++e) {
    SegmentId at;
    if (truth) {
      double u = rng.Uniform();
      at = truth->support().back();
      for (std::size_t i = 0; i < n; ++i) {
        u -= truth->mass()[i];
        if (u < 0.0) {
          at = truth->support()[i];
          break;
        }
      }
    } else {
      at = static_cast<SegmentId>(rng.Index(n));
    }
    auto& points = trajectories[fmt::format("ev{:0{}}", e, width)];
    for (std::size_t t = 0; t < opts.trajectory_length; ++t) {
      points.push_back({static_cast<Tick>(t), at});
      const auto next = net.Successors(at);
      at = next[rng.Index(next.size())];
    }
  }

  fs::create_directories(out_dir);
  std::ostringstream buf;
  WriteGraphCsv(buf, edges);
  WriteFile(out_dir / "graph.csv", buf.str());
  buf.str("");
  WriteStationsCsv(buf, stations);
  WriteFile(out_dir / "stations.csv", buf.str());
  buf.str("");
  WriteTrajectoriesCsv(buf, trajectories);
  WriteFile(out_dir / "trajectories.csv", buf.str());

  nlohmann::ordered_json j;
  j["graph_file"] = "graph.csv";
  j["stations_file"] = "stations.csv";
  j["trajectories_file"] = "trajectories.csv";
  j["coverage"] = "all";
  j["query_ticks"] = {{"policy", "random"}, {"per_trajectory", 3}};
  j["m"] = 10;
  j["epsilon"] = 1.0;
  j["radius_r"] = 5;
  j["max_speed"] = 15.0;
  j["seed"] = opts.seed;
  j["ticks"] = opts.trajectory_length;
  j["tick_seconds"] = 10.0;
  j["segment_length_k"] = opts.segment_length;
  j["availability_schedule"] = nlohmann::ordered_json::array();
  j["grid"] = {{"rows", opts.size}, {"cols", opts.size}};
  if (truth) {
    buf.str("");
    WriteDistributionCsv(buf, *truth);
    WriteFile(out_dir / "truth.csv", buf.str());
    j["truth_file"] = "truth.csv";
  }
  WriteFile(out_dir / "scenario.json", j.dump(2) + "\n");
  return out_dir / "scenario.json";
}

}  // namespace ageoi
