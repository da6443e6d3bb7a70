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

#ifndef AGEOI_EXPERIMENTS_H_
#define AGEOI_EXPERIMENTS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "ageoi/cop_analysis.h"
#include "ageoi/edge_sim.h"
#include "ageoi/scenario.h"

namespace ageoi {

struct ExperimentConfig {
  std::filesystem::path scenario;
  // Empty lists fall back to the scenario's own epsilon / radius_r / m.
  std::vector<double> epsilons;        // per segment
  std::vector<double> radii_segments;  // truncation radius in segments
  std::vector<std::size_t> m_list;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;    // empty: compute only, write nothing
  double alpha_segments = 1.0;         // identifiability radius
  std::size_t ibu_queries = 5000;
  std::size_t ibu_iterations = 100;
};

struct CellResult {
  double epsilon = 0.0;
  double radius_segments = 0.0;
  std::size_t m = 1;
  double delta = 0.0;
  CopSummary cop;
  Identifiability beta;
  std::vector<TraceRow> trace;  // all trials concatenated
};

struct DummyImpactRow {
  CellResult with_dummies;
  CellResult matched;  // epsilon / ln m, m = 1
};

struct IbuCurve {
  double epsilon = 0.0;
  double radius_segments = 0.0;
  std::size_t m = 1;
  std::vector<double> emd;
  std::vector<double> loglik;
  double emd_observed = 0.0;  // EMD(q, truth)
  std::size_t top5_overlap = 0;
  DiscreteDistribution theta;
};

struct ExperimentReport {
  std::vector<CellResult> cells;
  std::vector<DummyImpactRow> dummy_impact;
  std::vector<IbuCurve> ibu;
};

// CoP and zero-CoP fraction for every (epsilon, r, m) cell. Each query is
// replayed through the full vehicle / Edge / third-party protocol.
ExperimentReport RunCopSweep(const ExperimentConfig& cfg);
ExperimentReport RunCopSweep(const ExperimentConfig& cfg, const Scenario& scenario);

// Pairs each (epsilon, m >= 2) cell with the identifiability-matched
// (epsilon / ln m, m = 1) cell. An m_list of just {1} degenerates to a sweep.
ExperimentReport RunDummyImpact(const ExperimentConfig& cfg);
ExperimentReport RunDummyImpact(const ExperimentConfig& cfg, const Scenario& scenario);

// Samples ibu_queries true locations, sanitizes each into m reports, and
// recovers the true-location distribution with IBU under the mixed channel.
ExperimentReport RunIbuExperiment(const ExperimentConfig& cfg);
ExperimentReport RunIbuExperiment(const ExperimentConfig& cfg, const Scenario& scenario);

// Recomputes every trace row's CoP with CostOfPrivacy, replaying the
// availability schedule. Returns the number of mismatching rows.
std::size_t AuditTrace(const Scenario& scenario, const std::vector<TraceRow>& trace);

}  // namespace ageoi

#endif  // AGEOI_EXPERIMENTS_H_
