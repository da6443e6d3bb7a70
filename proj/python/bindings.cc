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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ageoi/cop_analysis.h"
#include "ageoi/experiments.h"
#include "ageoi/ibu.h"
#include "ageoi/mechanism.h"
#include "ageoi/road_network.h"
#include "ageoi/scenario.h"

namespace py = pybind11;
using namespace ageoi;

namespace {

RoadNetwork NetworkFromEdges(const std::vector<std::tuple<SegmentId, SegmentId, Meters>>& edges,
                             Meters segment_length) {
  std::vector<RoadEdge> e;
  e.reserve(edges.size());
  for (const auto& [from, to, w] : edges) e.push_back({from, to, w});
  return RoadNetwork::Build(e, segment_length);
}

StationSet Stations(const RoadNetwork& net,
                    const std::vector<std::tuple<StationId, SegmentId, bool>>& rows) {
  std::vector<Station> s;
  for (const auto& [id, loc, avail] : rows) s.push_back({id, loc, avail});
  return StationSet(net, std::move(s));
}

py::array_t<double> Matrix(const ObfuscationChannel& ch) {
  py::array_t<double> out({ch.rows(), ch.cols()});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t r = 0; r < ch.rows(); ++r)
    for (std::size_t c = 0; c < ch.cols(); ++c) v(r, c) = ch.Prob(r, c);
  return out;
}

py::list CellRows(const ExperimentReport& rep) {
  py::list rows;
  for (const CellResult& c : rep.cells) {
    py::dict d;
    d["epsilon"] = c.epsilon;
    d["r"] = c.radius_segments;
    d["m"] = c.m;
    d["delta"] = c.delta;
    d["mean_cop_m"] = c.cop.mean_cop;
    d["frac_zero_cop"] = c.cop.frac_zero;
    d["ci_low"] = c.cop.ci_low;
    d["ci_high"] = c.cop.ci_high;
    d["queries"] = c.cop.count;
    d["beta"] = c.beta.exact;
    rows.append(d);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Road-network geo-indistinguishability with Edge-assisted dummies";

  // Later registrations are tried first, so the subclass goes last.
  py::register_exception<Error>(m, "AgeoiError", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  py::class_<RoadNetwork>(m, "RoadNetwork")
      .def(py::init(&NetworkFromEdges), py::arg("edges"), py::arg("segment_length"),
           "Builds a network from (from, to, weight_m) triples.")
      .def_property_readonly("num_nodes", &RoadNetwork::num_nodes)
      .def_property_readonly("segment_length", &RoadNetwork::segment_length)
      .def("distance", &RoadNetwork::Distance, py::arg("i"), py::arg("j"),
           "Shortest-path distance in meters, None when unreachable.")
      .def("closed_ball",
           [](const RoadNetwork& net, SegmentId x, Meters r) { return ClosedBall(net, x, r); },
           py::arg("x"), py::arg("r"));

  m.def("grid_edges", [](std::size_t rows, std::size_t cols, Meters w) {
    std::vector<std::tuple<SegmentId, SegmentId, Meters>> out;
    for (const RoadEdge& e : GridEdges(rows, cols, w)) out.emplace_back(e.from, e.to, e.weight);
    return out;
  }, py::arg("rows"), py::arg("cols"), py::arg("weight"));

  py::class_<ObfuscationChannel>(m, "ObfuscationChannel")
      .def_property_readonly("domain", &ObfuscationChannel::domain)
      .def_property_readonly("codomain", &ObfuscationChannel::codomain)
      .def_property_readonly("epsilon", [](const ObfuscationChannel& c) { return c.params().epsilon; })
      .def("matrix", &Matrix)
      .def("sample",
           [](const ObfuscationChannel& ch, SegmentId x, std::uint64_t seed, std::size_t n) {
             Rng rng(seed);
             std::vector<SegmentId> out(n);
             for (auto& y : out) y = SamplePrivateLocation(ch, x, rng);
             return out;
           },
           py::arg("x"), py::arg("seed"), py::arg("n") = 1);

  m.def("build_channel",
        [](const RoadNetwork& net, std::vector<SegmentId> domain, std::vector<SegmentId> codomain,
           double epsilon, Meters radius, Meters unit) {
          return BuildChannel(net, domain, codomain, {epsilon, radius, unit});
        },
        py::arg("net"), py::arg("domain"), py::arg("codomain"), py::arg("epsilon"),
        py::arg("radius"), py::arg("distance_unit"));
  m.def("compute_delta", &ComputeDelta);
  m.def("compute_set_delta", &ComputeSetDelta);
  m.def("verify_ageoi", [](const ObfuscationChannel& ch, double eps, double delta) {
    const AgeoiCheck c = VerifyAgeoi(ch, eps, delta);
    py::dict d;
    d["holds"] = c.holds;
    d["set_level_holds"] = c.set_level_holds;
    d["worst_slack"] = c.worst ? py::cast(c.worst->slack) : py::none();
    return d;
  });

  m.def("cost_of_privacy",
        [](const RoadNetwork& net, const std::vector<std::tuple<StationId, SegmentId, bool>>& st,
           SegmentId true_x, SegmentId private_x) {
          return CostOfPrivacy(net, Stations(net, st), true_x, private_x);
        },
        py::arg("net"), py::arg("stations"), py::arg("true_x"), py::arg("privatized_x"));
  m.def("zero_cop_probability",
        [](const RoadNetwork& net, const std::vector<std::tuple<StationId, SegmentId, bool>>& st,
           const ObfuscationChannel& ch, SegmentId x) {
          const ZeroCopProbability z = ZeroCopProbabilityAt(net, Stations(net, st), ch, x);
          return std::make_pair(z.exact, z.cell_form);
        },
        py::arg("net"), py::arg("stations"), py::arg("channel"), py::arg("x"),
        "Returns (exact, cell_form).");
  m.def("voronoi",
        [](const RoadNetwork& net, const std::vector<std::tuple<StationId, SegmentId, bool>>& st) {
          return Voronoi(net, Stations(net, st)).assignment;
        },
        py::arg("net"), py::arg("stations"), "Owning station per segment, None if unreachable.");

  m.def("emd",
        [](const RoadNetwork& net, std::vector<SegmentId> ps, std::vector<double> pm,
           std::vector<SegmentId> qs, std::vector<double> qm) {
          return Emd(net, DiscreteDistribution(ps, pm), DiscreteDistribution(qs, qm));
        },
        py::arg("net"), py::arg("p_support"), py::arg("p_mass"), py::arg("q_support"),
        py::arg("q_mass"));
  m.def("solve_transport", [](std::vector<double> supply, std::vector<double> demand,
                              std::vector<double> cost) {
    return SolveTransport(supply, demand, cost);
  }, py::arg("supply"), py::arg("demand"), py::arg("cost"), "Cost is row-major.");
  m.def("run_ibu",
        [](std::vector<SegmentId> obs, const ObfuscationChannel& ch, std::size_t iterations) {
          IbuOptions opt;
          opt.iterations = iterations;
          const IbuRun run = RunIbu(obs, ch, opt);
          return py::make_tuple(run.theta.support(), run.theta.mass(), run.loglik);
        },
        py::arg("observations"), py::arg("channel"), py::arg("iterations") = 100,
        "Returns (support, mass, loglik).");

  m.def("generate_scenario",
        [](const std::string& kind, std::size_t size, std::size_t stations, std::uint64_t seed,
           std::size_t evs, std::size_t length, const std::filesystem::path& out) {
          SyntheticOptions o;
          if (kind == "grid") {
            o.kind = SyntheticKind::kGrid;
          } else if (kind == "two-cluster") {
            o.kind = SyntheticKind::kTwoCluster;
          } else {
            throw ValidationError("kind must be grid or two-cluster");
          }
          o.size = size;
          o.num_stations = stations;
          o.seed = seed;
          o.num_evs = evs;
          o.trajectory_length = length;
          return GenerateSyntheticScenario(o, out);
        },
        py::arg("kind"), py::arg("size"), py::arg("stations"), py::arg("seed"), py::arg("evs"),
        py::arg("length"), py::arg("out_dir"));
  m.def("cop_sweep",
        [](const std::filesystem::path& scenario, std::uint64_t seed, std::vector<double> eps,
           std::vector<double> radii, std::vector<std::size_t> ms, std::size_t trials,
           const std::optional<std::filesystem::path>& out) {
          ExperimentConfig cfg;
          cfg.scenario = scenario;
          cfg.seed = seed;
          cfg.epsilons = std::move(eps);
          cfg.radii_segments = std::move(radii);
          cfg.m_list = std::move(ms);
          cfg.trials = trials;
          if (out) cfg.output_dir = *out;
          ExperimentReport rep;
          {
            py::gil_scoped_release release;
            rep = RunCopSweep(cfg);
          }
          return CellRows(rep);
        },
        py::arg("scenario"), py::arg("seed"), py::arg("epsilons") = std::vector<double>{},
        py::arg("radii") = std::vector<double>{}, py::arg("m") = std::vector<std::size_t>{},
        py::arg("trials") = 1, py::arg("out_dir") = py::none(),
        "Runs a sweep; writes artifacts only when out_dir is given.");
}
