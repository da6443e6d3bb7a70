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

// Command-line front end. Exit codes: 0 ok, 2 invalid input, 3 runtime failure.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ageoi/experiments.h"
#include "ageoi/scenario.h"
#include "ageoi/types.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

void AddSweepFlags(CLI::App* cmd, ageoi::ExperimentConfig& cfg) {
  cmd->add_option("--scenario", cfg.scenario, "scenario JSON file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", cfg.seed, "base seed for every random stream")->required();
  cmd->add_option("--out", cfg.output_dir, "output directory")->required();
  cmd->add_option("--epsilon", cfg.epsilons, "privacy levels per segment, comma separated")
      ->delimiter(',');
  cmd->add_option("--r", cfg.radii_segments, "truncation radii in segments, comma separated")
      ->delimiter(',');
  cmd->add_option("--m", cfg.m_list, "locations per query, comma separated")->delimiter(',');
  cmd->add_option("--trials", cfg.trials, "repetitions per cell")->capture_default_str();
  cmd->add_option("--alpha", cfg.alpha_segments, "identifiability radius in segments")
      ->capture_default_str();
}

int Validate(const std::filesystem::path& path) {
  const ageoi::Scenario s = ageoi::LoadScenario(path);
  std::printf("ok: %zu segments, %zu edges, %zu stations, %zu trajectories\n", s.net.num_nodes(),
              s.net.num_edges(), s.stations.size(), s.trajectories.size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate geo-indistinguishability simulator for EV charging queries"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ageoi 0.1.0");

  ageoi::ExperimentConfig cfg;
  CLI::App* sweep = app.add_subcommand("cop-sweep", "cost-of-privacy sweep over (epsilon, r, m)");
  AddSweepFlags(sweep, cfg);

  CLI::App* dummy = app.add_subcommand("dummy-impact",
                                       "dummy arm vs identifiability-matched no-dummy arm");
  AddSweepFlags(dummy, cfg);

  CLI::App* ibu = app.add_subcommand("ibu", "recover the query distribution with IBU");
  AddSweepFlags(ibu, cfg);
  ibu->add_option("--queries", cfg.ibu_queries, "true queries to sample")->capture_default_str();
  ibu->add_option("--iterations", cfg.ibu_iterations, "IBU iterations")->capture_default_str();

  ageoi::SyntheticOptions gen_opts;
  std::string kind = "grid";
  std::filesystem::path gen_out;
  CLI::App* gen = app.add_subcommand("gen-scenario", "write a synthetic scenario");
  gen->add_option("--kind", kind, "grid or two-cluster")
      ->check(CLI::IsMember({"grid", "two-cluster"}))
      ->capture_default_str();
  gen->add_option("--size", gen_opts.size, "grid side length")->capture_default_str();
  gen->add_option("--stations", gen_opts.num_stations, "station count")->capture_default_str();
  gen->add_option("--seed", gen_opts.seed, "generator seed")->capture_default_str();
  gen->add_option("--evs", gen_opts.num_evs, "trajectory count")->capture_default_str();
  gen->add_option("--length", gen_opts.trajectory_length, "ticks per trajectory")
      ->capture_default_str();
  gen->add_option("--k", gen_opts.segment_length, "segment length in meters")->capture_default_str();
  gen->add_option("--out", gen_out, "output directory")->required();

  std::filesystem::path validate_path;
  CLI::App* validate = app.add_subcommand("validate", "check a scenario and its files");
  validate->add_option("scenario", validate_path, "scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*sweep) {
      ageoi::RunCopSweep(cfg);
    } else if (*dummy) {
      ageoi::RunDummyImpact(cfg);
    } else if (*ibu) {
      ageoi::RunIbuExperiment(cfg);
    } else if (*gen) {
      gen_opts.kind = kind == "grid" ? ageoi::SyntheticKind::kGrid : ageoi::SyntheticKind::kTwoCluster;
      const auto path = ageoi::GenerateSyntheticScenario(gen_opts, gen_out);
      std::printf("%s\n", path.string().c_str());
    } else if (*validate) {
      return Validate(validate_path);
    }
  } catch (const ageoi::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
