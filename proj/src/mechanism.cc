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

#include "ageoi/mechanism.h"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

namespace ageoi {
namespace {

// Tolerance on the scaled slack e^{-d}(...) - delta used by VerifyAgeoi.
constexpr double kSlackTolerance = 1e-14;

// e^{-d} P1 - e^{(eps-1) d} P2, i.e. the singleton term divided by e^{d}.
double ScaledTerm(double p1, double p2, double d, double epsilon) {
  const double lhs = std::exp(-d) * p1;
  if (p2 == 0.0) return lhs;
  return lhs - std::exp((epsilon - 1.0) * d) * p2;
}

}  // namespace

void MechanismParams::Validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ValidationError(fmt::format("epsilon must be > 0, got {}", epsilon));
  }
  if (!(radius >= 0.0)) throw ValidationError(fmt::format("radius must be >= 0, got {}", radius));
  if (!(distance_unit > 0.0) || !std::isfinite(distance_unit)) {
    throw ValidationError(fmt::format("distance unit must be > 0, got {}", distance_unit));
  }
}

ObfuscationChannel::ObfuscationChannel(std::vector<SegmentId> domain,
                                       std::vector<SegmentId> codomain,
                                       std::vector<double> matrix, std::vector<double> distances,
                                       std::vector<double> normalizers, MechanismParams params)
    : domain_(std::move(domain)),
      codomain_(std::move(codomain)),
      matrix_(std::move(matrix)),
      distances_(std::move(distances)),
      normalizers_(std::move(normalizers)),
      params_(params) {
  const std::size_t n = domain_.size() * codomain_.size();
  if (domain_.empty() || codomain_.empty()) throw ValidationError("channel has an empty domain");
  if (matrix_.size() != n || distances_.size() != n || normalizers_.size() != domain_.size()) {
    throw ValidationError("channel dimensions are inconsistent");
  }
  for (std::size_t c = 0; c < codomain_.size(); ++c) {
    if (!codomain_index_.emplace(codomain_[c], c).second) {
      throw ValidationError(fmt::format("codomain lists segment {} twice", codomain_[c]));
    }
  }
  for (std::size_t r = 0; r < domain_.size(); ++r) {
    if (!domain_index_.emplace(domain_[r], r).second) {
      throw ValidationError(fmt::format("domain lists segment {} twice", domain_[r]));
    }
  }
  domain_in_codomain_.reserve(domain_.size());
  for (SegmentId x : domain_) {
    auto idx = CodomainIndex(x);
    if (!idx) throw ValidationError(fmt::format("domain segment {} is not in the codomain", x));
    domain_in_codomain_.push_back(*idx);
  }
  cdf_.resize(n);
  for (std::size_t r = 0; r < rows(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cols(); ++c) {
      const double p = Prob(r, c);
      if (!(p >= 0.0)) throw ValidationError("channel has a negative or NaN entry");
      acc += p;
      cdf_[r * cols() + c] = acc;
    }
    if (std::abs(acc - 1.0) > 1e-9) {
      throw ValidationError(fmt::format("channel row {} sums to {}", domain_[r], acc));
    }
  }
}

std::optional<std::size_t> ObfuscationChannel::DomainIndex(SegmentId s) const {
  auto it = domain_index_.find(s);
  if (it == domain_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> ObfuscationChannel::CodomainIndex(SegmentId s) const {
  auto it = codomain_index_.find(s);
  if (it == codomain_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ObfuscationChannel::SampleColumn(std::size_t row, Rng& rng) const {
  const auto first = cdf_.begin() + static_cast<std::ptrdiff_t>(row * cols());
  const auto last = first + static_cast<std::ptrdiff_t>(cols());
  const double u = rng.Uniform() * *(last - 1);
  auto it = std::upper_bound(first, last, u);
  if (it == last) --it;
  return static_cast<std::size_t>(it - first);
}

void ObfuscationChannel::WriteCsv(std::ostream& out, double threshold) const {
  out << "x,y,prob\n";
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < cols(); ++c) {
      const double p = Prob(r, c);
      if (p > threshold) out << fmt::format("{},{},{}\n", domain_[r], codomain_[c], p);
    }
  }
}

void ObfuscationChannel::WriteJsonSidecar(std::ostream& out) const {
  nlohmann::ordered_json j;
  j["epsilon"] = params_.epsilon;
  j["radius_m"] = params_.radius;
  j["distance_unit_m"] = params_.distance_unit;
  j["domain"] = domain_;
  j["codomain"] = codomain_;
  j["normalizers"] = normalizers_;
  out << j.dump(2) << "\n";
}

ObfuscationChannel BuildChannel(const RoadNetwork& net, std::span<const SegmentId> domain,
                                std::span<const SegmentId> codomain,
                                const MechanismParams& params) {
  params.Validate();
  if (domain.empty()) throw ValidationError("channel domain is empty");
  std::vector<SegmentId> cod(codomain.begin(), codomain.end());
  {
    std::vector<SegmentId> sorted = cod;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ValidationError("channel codomain has duplicate segments");
    }
    for (SegmentId y : sorted) net.CheckSegment(y);
    for (SegmentId x : domain) {
      if (!std::binary_search(sorted.begin(), sorted.end(), x)) {
        throw ValidationError(fmt::format("domain segment {} is not in the codomain", x));
      }
    }
  }

  const std::size_t nc = cod.size();
  std::vector<double> matrix(domain.size() * nc, 0.0);
  std::vector<double> distances(domain.size() * nc, kUnreachable);
  std::vector<double> normalizers(domain.size(), 0.0);
  std::vector<double> log_weight(nc);

  for (std::size_t r = 0; r < domain.size(); ++r) {
    const std::vector<Meters> row = net.DistancesFrom(domain[r]);
    double max_lw = -kUnreachable;
    for (std::size_t c = 0; c < nc; ++c) {
      const Meters d = row[cod[c]];
      distances[r * nc + c] = d / params.distance_unit;
      if (d <= params.radius) {
        log_weight[c] = -params.epsilon * (d / params.distance_unit);
        max_lw = std::max(max_lw, log_weight[c]);
      } else {
        log_weight[c] = -kUnreachable;
      }
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < nc; ++c) {
      if (log_weight[c] == -kUnreachable) continue;
      const double w = std::exp(log_weight[c] - max_lw);
      matrix[r * nc + c] = w;
      sum += w;
    }
    for (std::size_t c = 0; c < nc; ++c) matrix[r * nc + c] /= sum;
    normalizers[r] = std::exp(-max_lw) / sum;
  }
  return ObfuscationChannel(std::vector<SegmentId>(domain.begin(), domain.end()), std::move(cod),
                            std::move(matrix), std::move(distances), std::move(normalizers),
                            params);
}

SegmentId SamplePrivateLocation(const ObfuscationChannel& ch, SegmentId x, Rng& rng) {
  auto row = ch.DomainIndex(x);
  if (!row) throw ValidationError(fmt::format("segment {} is not in the channel domain", x));
  return ch.codomain()[ch.SampleColumn(*row, rng)];
}

double ComputeDelta(const ObfuscationChannel& ch) {
  const double eps = ch.params().epsilon;
  double delta = 0.0;
  for (std::size_t a = 0; a < ch.rows(); ++a) {
    for (std::size_t b = 0; b < ch.rows(); ++b) {
      if (a == b) continue;
      const double d = ch.DomainDistance(a, b);
      if (!std::isfinite(d)) continue;
      const auto row_a = ch.Row(a);
      const auto row_b = ch.Row(b);
      for (std::size_t y = 0; y < ch.cols(); ++y) {
        if (row_a[y] == 0.0) continue;
        delta = std::max(delta, ScaledTerm(row_a[y], row_b[y], d, eps));
      }
    }
  }
  return delta;
}

double ComputeSetDelta(const ObfuscationChannel& ch) {
  const double eps = ch.params().epsilon;
  double delta = 0.0;
  for (std::size_t a = 0; a < ch.rows(); ++a) {
    for (std::size_t b = 0; b < ch.rows(); ++b) {
      if (a == b) continue;
      const double d = ch.DomainDistance(a, b);
      if (!std::isfinite(d)) continue;
      const auto row_a = ch.Row(a);
      const auto row_b = ch.Row(b);
      double sum = 0.0;
      for (std::size_t y = 0; y < ch.cols(); ++y) {
        if (row_a[y] == 0.0) continue;
        sum += std::max(0.0, ScaledTerm(row_a[y], row_b[y], d, eps));
      }
      delta = std::max(delta, sum);
    }
  }
  return delta;
}

double MaxAdmissibleDistance(double delta) {
  if (delta <= 0.0) return kUnreachable;
  return -std::log(delta);
}

AgeoiCheck VerifyAgeoi(const ObfuscationChannel& ch, double epsilon, double delta) {
  AgeoiCheck check;
  for (std::size_t a = 0; a < ch.rows(); ++a) {
    for (std::size_t b = 0; b < ch.rows(); ++b) {
      if (a == b) continue;
      const double d = ch.DomainDistance(a, b);
      // No path from x1 to x2 makes the additive slack e^{d} infinite.
      if (!std::isfinite(d)) continue;
      for (std::size_t y = 0; y < ch.cols(); ++y) {
        const double slack = ScaledTerm(ch.Prob(a, y), ch.Prob(b, y), d, epsilon) - delta;
        if (!check.worst || slack > check.worst->slack) {
          check.worst = AgeoiWitness{ch.codomain()[y], ch.domain()[a], ch.domain()[b], slack};
        }
      }
    }
  }
  check.holds = !check.worst || check.worst->slack <= kSlackTolerance;

  constexpr std::size_t kMaxEnumerated = 12;
  if (ch.cols() <= kMaxEnumerated) {
    const std::size_t subsets = std::size_t{1} << ch.cols();
    std::vector<double> mass_a(subsets), mass_b(subsets);
    bool set_ok = true;
    for (std::size_t a = 0; a < ch.rows() && set_ok; ++a) {
      for (std::size_t b = 0; b < ch.rows() && set_ok; ++b) {
        if (a == b) continue;
        const double d = ch.DomainDistance(a, b);
        if (!std::isfinite(d)) continue;
        mass_a[0] = mass_b[0] = 0.0;
        for (std::size_t s = 1; s < subsets; ++s) {
          const auto low = static_cast<std::size_t>(__builtin_ctzll(s));
          mass_a[s] = mass_a[s & (s - 1)] + ch.Prob(a, low);
          mass_b[s] = mass_b[s & (s - 1)] + ch.Prob(b, low);
          if (ScaledTerm(mass_a[s], mass_b[s], d, epsilon) - delta > kSlackTolerance) {
            set_ok = false;
            break;
          }
        }
      }
    }
    check.set_level_holds = set_ok;
  }
  return check;
}

PrivacyBudget ComposeBudget(PrivacyBudget budget, PrivacyEvent event) {
  if (!(event.epsilon >= 0.0) || !(event.delta >= 0.0)) {
    throw ValidationError(
        fmt::format("privacy event must be nonnegative, got ({}, {})", event.epsilon, event.delta));
  }
  budget.epsilon_total += event.epsilon;
  budget.delta_total += event.delta;
  budget.events.push_back(event);
  return budget;
}

}  // namespace ageoi
