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

#include "ageoi/experiments.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include <fmt/format.h>
#include <json.hpp>

#include "ageoi/dummy_gen.h"
#include "ageoi/ibu.h"
#include "ageoi/mechanism.h"

namespace ageoi {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

constexpr std::uint64_t kQueryStream = 0x51;
constexpr std::uint64_t kCellStream = 0xCE11;
constexpr std::uint64_t kTruthStream = 0x7247;

std::vector<double> OrDefault(const std::vector<double>& v, double fallback) {
  return v.empty() ? std::vector<double>{fallback} : v;
}

void CheckConfig(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw ValidationError("trials must be at least 1");
  for (double e : cfg.epsilons) {
    if (!(e > 0.0)) throw ValidationError(fmt::format("epsilon values must be > 0, got {}", e));
  }
  for (double r : cfg.radii_segments) {
    if (!(r >= 0.0)) throw ValidationError(fmt::format("radius values must be >= 0, got {}", r));
  }
  for (std::size_t m : cfg.m_list) {
    if (m < 1) throw ValidationError("m values must be at least 1");
  }
  if (!(cfg.alpha_segments >= 0.0)) throw ValidationError("alpha must be >= 0");
}

MechanismParams ParamsFor(const Scenario& s, double epsilon, double radius_segments) {
  return MechanismParams{epsilon, radius_segments * s.segment_length(), s.segment_length()};
}

ObfuscationChannel ChannelFor(const Scenario& s, double epsilon, double radius_segments) {
  return BuildChannel(s.net, s.coverage.segments, s.coverage.segments,
                      ParamsFor(s, epsilon, radius_segments));
}

CellResult RunCell(const Scenario& s, const ExperimentConfig& cfg, double epsilon,
                   double radius_segments, std::size_t m, std::uint64_t cell_key) {
  const ObfuscationChannel ch = ChannelFor(s, epsilon, radius_segments);
  CellResult cell;
  cell.epsilon = epsilon;
  cell.radius_segments = radius_segments;
  cell.m = m;
  cell.delta = ComputeDelta(ch);
  cell.beta = ComputeIdentifiability(ch, s.net, s.coverage, m, cfg.alpha_segments * s.segment_length());

  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    // Query placement depends on the trial only, so every cell sees the
    // same true query locations.
    Rng placement(DeriveSeed(cfg.seed, kQueryStream + trial));
    SimulationInput in;
    in.net = &s.net;
    in.stations = s.stations;
    in.coverage = &s.coverage;
    in.channel = &ch;
    in.dummies = DummyConfig{m, s.max_speed, Feasibility::kLinked};
    in.tick_seconds = s.tick_seconds;
    in.schedule = s.availability_schedule;
    in.evs = AssignQueryTicks(s, placement);
    in.first_tick = 0;
    in.last_tick = s.ticks - 1;
    std::vector<TraceRow> rows =
        RunSimulation(std::move(in), DeriveSeed(DeriveSeed(cfg.seed, kCellStream + trial), cell_key));
    cell.trace.insert(cell.trace.end(), std::make_move_iterator(rows.begin()),
                      std::make_move_iterator(rows.end()));
  }

  if (const std::size_t bad = AuditTrace(s, cell.trace); bad > 0) {
    throw Error(fmt::format("self-audit failed: {} trace rows disagree with CostOfPrivacy", bad));
  }
  std::vector<Meters> cops;
  for (const TraceRow& r : cell.trace) {
    if (r.cop_meters) cops.push_back(*r.cop_meters);
  }
  cell.cop = SummarizeCop(cops);
  return cell;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  out << text;
}

ojson CellJson(const CellResult& c) {
  ojson j;
  j["epsilon"] = c.epsilon;
  j["r"] = c.radius_segments;
  j["m"] = c.m;
  j["delta"] = c.delta;
  j["queries"] = c.cop.count;
  j["mean_cop_m"] = c.cop.mean_cop;
  j["frac_zero_cop"] = c.cop.frac_zero;
  j["ci_low"] = c.cop.ci_low;
  j["ci_high"] = c.cop.ci_high;
  j["beta_exact"] = c.beta.exact;
  j["beta_closed_form"] = c.beta.closed_form;
  j["beta_worst_segment"] = c.beta.worst_x;
  return j;
}

ojson ConfigJson(const ExperimentConfig& cfg, const Scenario& s) {
  ojson j;
  j["scenario"] = cfg.scenario.filename().string();
  j["seed"] = cfg.seed;
  j["trials"] = cfg.trials;
  j["alpha_segments"] = cfg.alpha_segments;
  j["segment_length_m"] = s.segment_length();
  j["emd_ground_metric"] = "symmetrized traversal distance (d(i,j)+d(j,i))/2";
  return j;
}

void WriteVoronoiAudit(const fs::path& dir, const Scenario& s, const std::vector<double>& radii) {
  const VoronoiDecomposition dec = Voronoi(s.net, s.stations);
  std::string text = "segment_id,station_id,distance_m\n";
  for (SegmentId x = 0; x < s.net.num_nodes(); ++x) {
    if (!dec.assignment[x]) continue;
    text += fmt::format("{},{},{}\n", x, *dec.assignment[x], dec.distance[x]);
  }
  WriteText(dir / "voronoi.csv", text);
  text = "r,station_id,segment_id\n";
  for (double r : radii) {
    const FencedCells f = FencedVoronoi(dec, s.net, r * s.segment_length());
    for (const auto& [id, segs] : f.fenced) {
      for (SegmentId x : segs) text += fmt::format("{},{},{}\n", r, id, x);
    }
  }
  WriteText(dir / "fenced.csv", text);
}

std::vector<SegmentId> TopK(const DiscreteDistribution& d, std::size_t k) {
  std::vector<std::size_t> idx(d.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (d.mass()[a] != d.mass()[b]) return d.mass()[a] > d.mass()[b];
    return d.support()[a] < d.support()[b];
  });
  std::vector<SegmentId> out;
  for (std::size_t i = 0; i < std::min(k, idx.size()); ++i) out.push_back(d.support()[idx[i]]);
  return out;
}

}  // namespace

std::size_t AuditTrace(const Scenario& scenario, const std::vector<TraceRow>& trace) {
  std::vector<AvailabilityChange> schedule = scenario.availability_schedule;
  std::stable_sort(schedule.begin(), schedule.end(),
                   [](const AvailabilityChange& a, const AvailabilityChange& b) { return a.tick < b.tick; });
  std::map<Tick, std::vector<const TraceRow*>> by_tick;
  for (const TraceRow& r : trace) by_tick[r.tick].push_back(&r);

  StationSet stations = scenario.stations;
  std::size_t next = 0;
  std::size_t bad = 0;
  for (const auto& [tick, rows] : by_tick) {
    while (next < schedule.size() && schedule[next].tick <= tick) {
      stations.SetAvailable(schedule[next].station_id, schedule[next].available);
      ++next;
    }
    for (const TraceRow* r : rows) {
      std::optional<Meters> expected;
      try {
        expected = CostOfPrivacy(scenario.net, stations, r->true_segment, r->privatized_segment);
      } catch (const NoReachableStation&) {
      }
      if (expected.has_value() != r->cop_meters.has_value() ||
          (expected && std::abs(*expected - *r->cop_meters) > 1e-9)) {
        ++bad;
      }
    }
  }
  return bad;
}

ExperimentReport RunCopSweep(const ExperimentConfig& cfg) {
  return RunCopSweep(cfg, LoadScenario(cfg.scenario));
}

ExperimentReport RunCopSweep(const ExperimentConfig& cfg, const Scenario& s) {
  CheckConfig(cfg);
  const std::vector<double> eps = OrDefault(cfg.epsilons, s.epsilon);
  const std::vector<double> radii = OrDefault(cfg.radii_segments, s.radius_segments);
  const std::vector<std::size_t> ms = cfg.m_list.empty() ? std::vector<std::size_t>{s.m} : cfg.m_list;

  ExperimentReport report;
  std::uint64_t key = 0;
  for (double e : eps) {
    for (double r : radii) {
      for (std::size_t m : ms) report.cells.push_back(RunCell(s, cfg, e, r, m, key++));
    }
  }

  if (!cfg.output_dir.empty()) {
    fs::create_directories(cfg.output_dir / "traces");
    std::string csv = "epsilon,r,m,mean_cop_m,frac_zero_cop,ci_low,ci_high\n";
    ojson cells = ojson::array();
    for (std::size_t i = 0; i < report.cells.size(); ++i) {
      const CellResult& c = report.cells[i];
      csv += fmt::format("{},{},{},{},{},{},{}\n", c.epsilon, c.radius_segments, c.m,
                         c.cop.mean_cop, c.cop.frac_zero, c.cop.ci_low, c.cop.ci_high);
      ojson cj = CellJson(c);
      cj["trace_file"] = fmt::format("traces/cell_{:03}.csv", i);
      cells.push_back(std::move(cj));
      std::ostringstream trace;
      WriteTraceCsv(trace, c.trace);
      const fs::path trace_path = cfg.output_dir / "traces" / fmt::format("cell_{:03}.csv", i);
      WriteText(trace_path, trace.str());
      // Audit what a reader of the artifact sees, not just the in-memory rows.
      std::ifstream reread(trace_path);
      if (const std::size_t bad = AuditTrace(s, ReadTraceCsv(reread)); bad > 0) {
        throw Error(fmt::format("self-audit failed on {}: {} rows", trace_path.string(), bad));
      }
    }
    WriteText(cfg.output_dir / "cop_sweep.csv", csv);
    ojson j;
    j["experiment"] = "cop-sweep";
    j["config"] = ConfigJson(cfg, s);
    j["cells"] = std::move(cells);
    WriteText(cfg.output_dir / "report.json", j.dump(2) + "\n");
    WriteVoronoiAudit(cfg.output_dir, s, radii);
  }
  return report;
}

ExperimentReport RunDummyImpact(const ExperimentConfig& cfg) {
  return RunDummyImpact(cfg, LoadScenario(cfg.scenario));
}

ExperimentReport RunDummyImpact(const ExperimentConfig& cfg, const Scenario& s) {
  CheckConfig(cfg);
  std::vector<std::size_t> ms = cfg.m_list.empty() ? std::vector<std::size_t>{1, s.m} : cfg.m_list;
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  if (ms == std::vector<std::size_t>{1}) {
    ExperimentConfig sweep = cfg;
    sweep.m_list = ms;
    return RunCopSweep(sweep, s);
  }
  if (ms.front() != 1) {
    throw ValidationError("dummy-impact needs m = 1 in the m list to pair against");
  }
  const std::vector<double> eps = OrDefault(cfg.epsilons, s.epsilon);
  const std::vector<double> radii = OrDefault(cfg.radii_segments, s.radius_segments);

  ExperimentReport report;
  std::uint64_t key = 0;
  for (double e : eps) {
    for (double r : radii) {
      for (std::size_t m : ms) {
        if (m < 2) continue;
        DummyImpactRow row;
        // Both arms share a cell key so they replay the same query placement.
        row.with_dummies = RunCell(s, cfg, e, r, m, key);
        row.matched = RunCell(s, cfg, EpsilonRescaleWithoutDummies(e, m), r, 1, key);
        ++key;
        report.dummy_impact.push_back(std::move(row));
      }
    }
  }

  if (!cfg.output_dir.empty()) {
    fs::create_directories(cfg.output_dir);
    std::string csv =
        "epsilon,r,m,mean_cop_m,frac_zero_cop,beta,matched_epsilon,matched_mean_cop_m,"
        "matched_frac_zero_cop,matched_beta\n";
    ojson rows = ojson::array();
    for (const DummyImpactRow& row : report.dummy_impact) {
      const CellResult& d = row.with_dummies;
      const CellResult& n = row.matched;
      csv += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", d.epsilon, d.radius_segments, d.m,
                         d.cop.mean_cop, d.cop.frac_zero, d.beta.exact, n.epsilon, n.cop.mean_cop,
                         n.cop.frac_zero, n.beta.exact);
      rows.push_back({{"with_dummies", CellJson(d)}, {"matched", CellJson(n)}});
    }
    WriteText(cfg.output_dir / "dummy_impact.csv", csv);
    ojson j;
    j["experiment"] = "dummy-impact";
    j["config"] = ConfigJson(cfg, s);
    j["pairs"] = std::move(rows);
    WriteText(cfg.output_dir / "report.json", j.dump(2) + "\n");
  }
  return report;
}

ExperimentReport RunIbuExperiment(const ExperimentConfig& cfg) {
  return RunIbuExperiment(cfg, LoadScenario(cfg.scenario));
}

ExperimentReport RunIbuExperiment(const ExperimentConfig& cfg, const Scenario& s) {
  CheckConfig(cfg);
  if (cfg.ibu_queries == 0) throw ValidationError("ibu needs at least one query");
  const std::vector<double> eps = cfg.epsilons.empty() ? std::vector<double>{0.6, 2.0} : cfg.epsilons;
  const double radius = cfg.radii_segments.empty() ? s.radius_segments : cfg.radii_segments.front();
  const std::size_t m = cfg.m_list.empty() ? s.m : cfg.m_list.front();

  // Truth: declared distribution, or the visit frequencies of the trajectories.
  DiscreteDistribution truth;
  if (s.truth) {
    truth = *s.truth;
  } else {
    std::vector<SegmentId> visits;
    for (const auto& [ev, points] : s.trajectories) {
      for (const TrajectoryPoint& p : points) visits.push_back(p.segment);
    }
    truth = EmpiricalDistribution(visits, s.coverage.segments);
  }

  Rng truth_rng(DeriveSeed(cfg.seed, kTruthStream));
  std::vector<double> cdf(truth.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) cdf[i] = (acc += truth.mass()[i]);
  std::vector<SegmentId> true_locations(cfg.ibu_queries);
  for (SegmentId& x : true_locations) {
    const double u = truth_rng.Uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    x = truth.support()[static_cast<std::size_t>(it - cdf.begin())];
  }
  const DiscreteDistribution reference = EmpiricalDistribution(true_locations, s.coverage.segments);
  const std::vector<SegmentId> truth_top = TopK(reference, 5);

  ExperimentReport report;
  std::vector<std::vector<SegmentId>> observed_streams;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const ObfuscationChannel lap = ChannelFor(s, eps[k], radius);
    const ObfuscationChannel mixed = MixedChannel(lap, m, s.coverage, s.net);
    Rng rng(DeriveSeed(DeriveSeed(cfg.seed, kCellStream), k));
    const DummyConfig dummies{m, s.max_speed, Feasibility::kUnconstrainedFirstQuery};
    std::vector<SegmentId> observed;
    observed.reserve(true_locations.size() * m);
    for (SegmentId x : true_locations) {
      observed.push_back(SamplePrivateLocation(lap, x, rng));
      for (SegmentId d : GenerateDummies(s.net, s.coverage, nullptr, 0.0, dummies, rng)) {
        observed.push_back(d);
      }
    }

    IbuOptions opts;
    opts.iterations = cfg.ibu_iterations;
    opts.reference = reference;
    opts.net = &s.net;
    IbuRun run = RunIbu(observed, mixed, opts);

    IbuCurve curve;
    curve.epsilon = eps[k];
    curve.radius_segments = radius;
    curve.m = m;
    curve.emd = std::move(run.emd_curve);
    curve.loglik = std::move(run.loglik);
    curve.emd_observed = Emd(s.net, EmpiricalDistribution(observed, mixed.codomain()), reference);
    curve.theta = std::move(run.theta);
    for (SegmentId seg : TopK(curve.theta, 5)) {
      if (std::find(truth_top.begin(), truth_top.end(), seg) != truth_top.end()) ++curve.top5_overlap;
    }
    report.ibu.push_back(std::move(curve));
    observed_streams.push_back(std::move(observed));
  }

  if (!cfg.output_dir.empty()) {
    fs::create_directories(cfg.output_dir);
    std::ostringstream buf;
    WriteDistributionCsv(buf, reference);
    WriteText(cfg.output_dir / "reference_true_locations.csv", buf.str());
    ojson curves = ojson::array();
    for (std::size_t k = 0; k < report.ibu.size(); ++k) {
      const IbuCurve& c = report.ibu[k];
      const std::string tag = fmt::format("eps_{}", c.epsilon);
      std::string csv = "iteration,emd_m,loglik\n";
      for (std::size_t t = 0; t < c.loglik.size(); ++t) {
        csv += fmt::format("{},{},{}\n", t, c.emd[t], c.loglik[t]);
      }
      WriteText(cfg.output_dir / fmt::format("ibu_{}.csv", tag), csv);
      buf.str("");
      WriteDistributionCsv(buf, c.theta);
      WriteText(cfg.output_dir / fmt::format("theta_{}.csv", tag), buf.str());
      buf.str("");
      WriteDistributionCsv(buf, EmpiricalDistribution(observed_streams[k], s.coverage.segments));
      WriteText(cfg.output_dir / fmt::format("reference_all_queries_{}.csv", tag), buf.str());
      if (s.grid) {
        std::string heat = "row,col,mass\n";
        for (std::size_t i = 0; i < c.theta.size(); ++i) {
          const SegmentId seg = c.theta.support()[i];
          heat += fmt::format("{},{},{}\n", seg / s.grid->cols, seg % s.grid->cols, c.theta.mass()[i]);
        }
        WriteText(cfg.output_dir / fmt::format("heat_{}.csv", tag), heat);
      }
      curves.push_back({{"epsilon", c.epsilon},
                        {"r", c.radius_segments},
                        {"m", c.m},
                        {"iterations", c.loglik.size() - 1},
                        {"emd_initial_m", c.emd.front()},
                        {"emd_final_m", c.emd.back()},
                        {"emd_observed_m", c.emd_observed},
                        {"top5_overlap", c.top5_overlap}});
    }
    ojson j;
    j["experiment"] = "ibu";
    j["config"] = ConfigJson(cfg, s);
    j["queries"] = cfg.ibu_queries;
    j["curves"] = std::move(curves);
    WriteText(cfg.output_dir / "report.json", j.dump(2) + "\n");
  }
  return report;
}

}  // namespace ageoi
