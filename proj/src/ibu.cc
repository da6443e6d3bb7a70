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

#include "ageoi/ibu.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <fmt/format.h>

namespace ageoi {
namespace {

constexpr double kDenominatorFloor = 1e-300;

// theta and q laid out in channel row / column order.
struct Aligned {
  std::vector<double> theta;
  std::vector<double> q;
};

Aligned Align(const DiscreteDistribution& theta, const DiscreteDistribution& q,
              const ObfuscationChannel& ch) {
  Aligned a{std::vector<double>(ch.rows(), 0.0), std::vector<double>(ch.cols(), 0.0)};
  if (theta.size() != ch.rows()) {
    throw ValidationError(fmt::format("theta has {} points but the channel domain has {}",
                                      theta.size(), ch.rows()));
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    auto r = ch.DomainIndex(theta.support()[i]);
    if (!r) {
      throw ValidationError(
          fmt::format("theta support point {} is not in the channel domain", theta.support()[i]));
    }
    a.theta[*r] = theta.mass()[i];
  }
  for (std::size_t i = 0; i < q.size(); ++i) {
    auto c = ch.CodomainIndex(q.support()[i]);
    if (!c) {
      if (q.mass()[i] == 0.0) continue;
      throw ValidationError(
          fmt::format("observed segment {} is not in the channel codomain", q.support()[i]));
    }
    a.q[*c] = q.mass()[i];
  }
  return a;
}

// sum_x theta(x) C[x, y] for every column.
std::vector<double> PushForward(const std::vector<double>& theta, const ObfuscationChannel& ch) {
  std::vector<double> out(ch.cols(), 0.0);
  for (std::size_t x = 0; x < ch.rows(); ++x) {
    if (theta[x] == 0.0) continue;
    const auto row = ch.Row(x);
    for (std::size_t y = 0; y < ch.cols(); ++y) out[y] += theta[x] * row[y];
  }
  return out;
}

std::vector<double> StepAligned(const std::vector<double>& theta, const std::vector<double>& q,
                                const ObfuscationChannel& ch) {
  const std::vector<double> denom = PushForward(theta, ch);
  std::vector<double> ratio(ch.cols(), 0.0);
  for (std::size_t y = 0; y < ch.cols(); ++y) {
    if (q[y] == 0.0) continue;
    if (denom[y] < kDenominatorFloor) {
      throw DegenerateChannelColumn(fmt::format(
          "observed output {} has zero probability under the current estimate", ch.codomain()[y]));
    }
    ratio[y] = q[y] / denom[y];
  }
  std::vector<double> next(ch.rows(), 0.0);
  double total = 0.0;
  for (std::size_t x = 0; x < ch.rows(); ++x) {
    if (theta[x] == 0.0) continue;
    const auto row = ch.Row(x);
    double acc = 0.0;
    for (std::size_t y = 0; y < ch.cols(); ++y) acc += row[y] * ratio[y];
    next[x] = theta[x] * acc;
    total += next[x];
  }
  for (double& v : next) v /= total;
  return next;
}

double LogLikelihoodAligned(const std::vector<double>& theta, const std::vector<double>& q,
                            const ObfuscationChannel& ch) {
  const std::vector<double> push = PushForward(theta, ch);
  double ll = 0.0;
  for (std::size_t y = 0; y < ch.cols(); ++y) {
    if (q[y] > 0.0) ll += q[y] * std::log(push[y]);
  }
  return ll;
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<SegmentId> support,
                                           std::vector<double> mass)
    : support_(std::move(support)), mass_(std::move(mass)) {
  if (support_.size() != mass_.size()) throw ValidationError("support and mass differ in size");
  if (support_.empty()) throw ValidationError("distribution has empty support");
  std::vector<SegmentId> sorted = support_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("distribution support has duplicates");
  }
  double total = 0.0;
  for (double m : mass_) {
    if (!(m >= 0.0)) throw ValidationError(fmt::format("negative mass {}", m));
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ValidationError(fmt::format("distribution sums to {}", total));
  }
}

DiscreteDistribution DiscreteDistribution::Uniform(std::vector<SegmentId> support) {
  const double w = support.empty() ? 0.0 : 1.0 / static_cast<double>(support.size());
  std::vector<double> mass(support.size(), w);
  return DiscreteDistribution(std::move(support), std::move(mass));
}

double DiscreteDistribution::MassOf(SegmentId s) const {
  auto it = std::find(support_.begin(), support_.end(), s);
  return it == support_.end() ? 0.0 : mass_[static_cast<std::size_t>(it - support_.begin())];
}

DiscreteDistribution EmpiricalDistribution(std::span<const SegmentId> observations,
                                           std::span<const SegmentId> support) {
  if (observations.empty()) throw ValidationError("no observations");
  std::unordered_map<SegmentId, std::size_t> index;
  for (std::size_t i = 0; i < support.size(); ++i) index.emplace(support[i], i);
  std::vector<double> counts(support.size(), 0.0);
  for (SegmentId o : observations) {
    auto it = index.find(o);
    if (it == index.end()) {
      throw ValidationError(fmt::format("observation {} is outside the support", o));
    }
    counts[it->second] += 1.0;
  }
  const double n = static_cast<double>(observations.size());
  for (double& c : counts) c /= n;
  return DiscreteDistribution(std::vector<SegmentId>(support.begin(), support.end()),
                              std::move(counts));
}

double TotalVariation(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  std::unordered_map<SegmentId, double> diff;
  for (std::size_t i = 0; i < p.size(); ++i) diff[p.support()[i]] += p.mass()[i];
  for (std::size_t i = 0; i < q.size(); ++i) diff[q.support()[i]] -= q.mass()[i];
  double tv = 0.0;
  for (const auto& [s, d] : diff) tv += std::abs(d);
  return tv / 2.0;
}

DiscreteDistribution IbuStep(const DiscreteDistribution& theta, const DiscreteDistribution& q,
                             const ObfuscationChannel& ch) {
  const Aligned a = Align(theta, q, ch);
  return DiscreteDistribution(ch.domain(), StepAligned(a.theta, a.q, ch));
}

double IbuLogLikelihood(const DiscreteDistribution& theta, const DiscreteDistribution& q,
                        const ObfuscationChannel& ch) {
  const Aligned a = Align(theta, q, ch);
  return LogLikelihoodAligned(a.theta, a.q, ch);
}

IbuRun RunIbu(std::span<const SegmentId> observations, const ObfuscationChannel& ch,
              const IbuOptions& options) {
  if (options.iterations < 1) throw ValidationError("IBU needs at least one iteration");
  if (options.reference && options.net == nullptr) {
    throw ValidationError("an EMD reference needs the road network");
  }
  const DiscreteDistribution q = EmpiricalDistribution(observations, ch.codomain());
  const DiscreteDistribution theta0 =
      options.theta0 ? *options.theta0 : DiscreteDistribution::Uniform(ch.domain());
  Aligned a = Align(theta0, q, ch);
  for (double t : a.theta) {
    if (!(t > 0.0)) throw ValidationError("the initial estimate must have full support");
  }

  IbuRun run;
  auto record = [&](std::size_t t, const std::vector<double>& theta) {
    run.loglik.push_back(LogLikelihoodAligned(theta, a.q, ch));
    if (options.reference || (options.snapshot_every > 0 && t % options.snapshot_every == 0)) {
      DiscreteDistribution dist(ch.domain(), theta);
      if (options.reference) run.emd_curve.push_back(Emd(*options.net, dist, *options.reference));
      if (options.snapshot_every > 0 && t % options.snapshot_every == 0) {
        run.snapshots.emplace_back(t, std::move(dist));
      }
    }
  };

  std::vector<double> theta = a.theta;
  record(0, theta);
  for (std::size_t t = 1; t <= options.iterations; ++t) {
    std::vector<double> next = StepAligned(theta, a.q, ch);
    double tv = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) tv += std::abs(next[i] - theta[i]);
    theta = std::move(next);
    run.iterations_run = t;
    record(t, theta);
    if (options.early_stop_tv > 0.0 && tv / 2.0 < options.early_stop_tv) break;
  }
  run.theta = DiscreteDistribution(ch.domain(), std::move(theta));
  return run;
}

}  // namespace ageoi
