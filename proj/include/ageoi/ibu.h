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

#ifndef AGEOI_IBU_H_
#define AGEOI_IBU_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ageoi/mechanism.h"
#include "ageoi/road_network.h"
#include "ageoi/types.h"

namespace ageoi {

// Probability mass function over a finite, duplicate-free set of segments.
class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;
  // Throws ValidationError on duplicates, negative mass, or a total more
  // than 1e-9 away from 1.
  DiscreteDistribution(std::vector<SegmentId> support, std::vector<double> mass);

  static DiscreteDistribution Uniform(std::vector<SegmentId> support);

  const std::vector<SegmentId>& support() const { return support_; }
  const std::vector<double>& mass() const { return mass_; }
  std::size_t size() const { return support_.size(); }
  double MassOf(SegmentId s) const;

 private:
  std::vector<SegmentId> support_;
  std::vector<double> mass_;
};

// count(y) / n over `support`. Throws ValidationError on empty input or an
// observation outside the support.
DiscreteDistribution EmpiricalDistribution(std::span<const SegmentId> observations,
                                           std::span<const SegmentId> support);

double TotalVariation(const DiscreteDistribution& p, const DiscreteDistribution& q);

// theta_{t+1}(x) = sum_y q(y) theta_t(x) C[x,y] / sum_z theta_t(z) C[z,y].
// theta lives on ch.domain(), q on a subset of ch.codomain(). Throws
// DegenerateChannelColumn when a column with q(y) > 0 has a denominator
// below 1e-300.
DiscreteDistribution IbuStep(const DiscreteDistribution& theta, const DiscreteDistribution& q,
                             const ObfuscationChannel& ch);

// sum_y q(y) log(sum_x theta(x) C[x,y]).
double IbuLogLikelihood(const DiscreteDistribution& theta, const DiscreteDistribution& q,
                        const ObfuscationChannel& ch);

struct IbuOptions {
  std::size_t iterations = 100;
  std::optional<DiscreteDistribution> theta0;     // default uniform over ch.domain()
  std::optional<DiscreteDistribution> reference;  // enables the EMD curve
  const RoadNetwork* net = nullptr;               // required with `reference`
  double early_stop_tv = 0.0;                     // 0 disables early stopping
  std::size_t snapshot_every = 0;                 // 0 keeps no snapshots
};

struct IbuRun {
  DiscreteDistribution theta;        // final estimate
  std::size_t iterations_run = 0;
  std::vector<double> loglik;        // index t = theta_t, t = 0..iterations_run
  std::vector<double> emd_curve;     // same indexing, empty without a reference
  std::vector<std::pair<std::size_t, DiscreteDistribution>> snapshots;
};

IbuRun RunIbu(std::span<const SegmentId> observations, const ObfuscationChannel& ch,
              const IbuOptions& options);

// Earth mover's distance in meters with ground cost (d_G(i,j) + d_G(j,i)) / 2,
// solved exactly as a transportation problem. Throws UnreachableMass when
// mass cannot be moved along finite-cost pairs.
Meters Emd(const RoadNetwork& net, const DiscreteDistribution& p, const DiscreteDistribution& q);

// Minimum-cost transport of `supply` onto `demand` (equal totals) with a
// row-major cost matrix; +inf entries are forbidden pairs.
double SolveTransport(std::span<const double> supply, std::span<const double> demand,
                      std::span<const double> cost);

}  // namespace ageoi

#endif  // AGEOI_IBU_H_
