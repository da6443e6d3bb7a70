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

#ifndef AGEOI_MECHANISM_H_
#define AGEOI_MECHANISM_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "ageoi/rng.h"
#include "ageoi/road_network.h"
#include "ageoi/types.h"

namespace ageoi {

// Parameters of the discrete truncated Laplace mechanism.
//
// `epsilon` is per distance unit and `distance_unit` says how many meters
// one unit is. With distance_unit equal to the segment length, epsilon is
// "per segment". Exponents of the form e^{-eps d} and the additive slack
// e^{d} of the approximate guarantee are both evaluated in these units.
struct MechanismParams {
  double epsilon = 1.0;
  Meters radius = 0.0;
  Meters distance_unit = 1.0;

  // Throws ValidationError unless epsilon > 0, radius >= 0, unit > 0.
  void Validate() const;
};

// Row-stochastic matrix P[y | x] over an ordered domain X and codomain Y,
// X a subset of Y. Stores d(x, y) in distance units for every cell so that
// privacy accounting needs no access to the network.
class ObfuscationChannel {
 public:
  ObfuscationChannel(std::vector<SegmentId> domain, std::vector<SegmentId> codomain,
                     std::vector<double> matrix, std::vector<double> distances,
                     std::vector<double> normalizers, MechanismParams params);

  const std::vector<SegmentId>& domain() const { return domain_; }
  const std::vector<SegmentId>& codomain() const { return codomain_; }
  const MechanismParams& params() const { return params_; }
  std::size_t rows() const { return domain_.size(); }
  std::size_t cols() const { return codomain_.size(); }

  double Prob(std::size_t row, std::size_t col) const { return matrix_[row * cols() + col]; }
  std::span<const double> Row(std::size_t row) const {
    return {matrix_.data() + row * cols(), cols()};
  }
  // d(domain[row], codomain[col]) in distance units; +inf when unreachable.
  double UnitDistance(std::size_t row, std::size_t col) const {
    return distances_[row * cols() + col];
  }
  // d(domain[a], domain[b]) in distance units.
  double DomainDistance(std::size_t a, std::size_t b) const {
    return UnitDistance(a, domain_in_codomain_[b]);
  }
  // Per-row truncated normalizer c_x of the underlying Laplace rows.
  double Normalizer(std::size_t row) const { return normalizers_[row]; }

  std::optional<std::size_t> DomainIndex(SegmentId s) const;
  std::optional<std::size_t> CodomainIndex(SegmentId s) const;
  std::size_t CodomainIndexOfDomain(std::size_t row) const { return domain_in_codomain_[row]; }

  // Inverse-CDF draw from row `row`.
  std::size_t SampleColumn(std::size_t row, Rng& rng) const;

  // Writes `x,y,prob` for entries with prob > threshold.
  void WriteCsv(std::ostream& out, double threshold = 0.0) const;
  // JSON sidecar with params, domain, codomain and per-row normalizers.
  void WriteJsonSidecar(std::ostream& out) const;

 private:
  std::vector<SegmentId> domain_;
  std::vector<SegmentId> codomain_;
  std::vector<double> matrix_;
  std::vector<double> distances_;
  std::vector<double> normalizers_;
  std::vector<double> cdf_;
  std::vector<std::size_t> domain_in_codomain_;
  std::unordered_map<SegmentId, std::size_t> domain_index_;
  std::unordered_map<SegmentId, std::size_t> codomain_index_;
  MechanismParams params_;
};

// Discrete truncated Laplace channel: P[y|x] = c_x e^{-eps d(x,y)} when
// d(x,y) <= r and 0 otherwise, with c_x normalizing each row over Y.
// Throws ValidationError for bad params or when domain is not a subset of
// codomain.
ObfuscationChannel BuildChannel(const RoadNetwork& net, std::span<const SegmentId> domain,
                                std::span<const SegmentId> codomain, const MechanismParams& params);

// Draws a privatized location for the true location `x`.
SegmentId SamplePrivateLocation(const ObfuscationChannel& ch, SegmentId x, Rng& rng);

// Smallest delta for which the channel is (eps, delta)-AGeoI over singleton
// outputs:
//   max{ max_{y,x1,x2} e^{-d}(P[y|x1] - e^{eps d} P[y|x2]), 0 },  d = d(x1,x2)
// over ordered pairs with a directed path from x1 to x2.
double ComputeDelta(const ObfuscationChannel& ch);

// Same maximization over all output sets S instead of singletons. For a fixed
// pair the maximizing S collects every y with a positive singleton term, so
// this is the per-pair sum of positive parts.
double ComputeSetDelta(const ObfuscationChannel& ch);

// Largest distance (in units) for which delta * e^{d} <= 1. +inf for delta 0.
double MaxAdmissibleDistance(double delta);

struct AgeoiWitness {
  SegmentId y = 0;
  SegmentId x1 = 0;
  SegmentId x2 = 0;
  // e^{-d}(P[y|x1] - e^{eps d} P[y|x2]) - delta; positive means violated.
  double slack = 0.0;
};

struct AgeoiCheck {
  bool holds = true;
  std::optional<AgeoiWitness> worst;
  // Set-level verdict, present when |Y| <= 12 so subsets could be enumerated.
  std::optional<bool> set_level_holds;
};

// Checks P[y|x1] <= e^{eps d(x1,x2)} P[y|x2] + delta e^{d(x1,x2)} for every
// output y and ordered pair. The returned witness is the tightest triple.
AgeoiCheck VerifyAgeoi(const ObfuscationChannel& ch, double epsilon, double delta);

struct PrivacyEvent {
  double epsilon = 0.0;
  double delta = 0.0;
};

struct PrivacyBudget {
  double epsilon_total = 0.0;
  double delta_total = 0.0;
  std::vector<PrivacyEvent> events;
};

// Additive composition. Throws ValidationError on negative inputs.
PrivacyBudget ComposeBudget(PrivacyBudget budget, PrivacyEvent event);

}  // namespace ageoi

#endif  // AGEOI_MECHANISM_H_
