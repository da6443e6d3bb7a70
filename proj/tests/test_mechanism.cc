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

#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"

namespace ageoi {
namespace {

RoadNetwork SymmetricLine(std::size_t n, Meters w = 100) {
  std::vector<RoadEdge> e;
  for (SegmentId i = 0; i + 1 < n; ++i) {
    e.push_back({i, i + 1, w});
    e.push_back({i + 1, i, w});
  }
  return RoadNetwork::Build(e, 100);
}

std::vector<SegmentId> All(const RoadNetwork& net) { return FullCoverage(net).segments; }

// Upper 0.1% chi-square quantile by the Wilson-Hilferty approximation.
double ChiSquareCritical999(double df) {
  constexpr double z = 3.090232306167813;
  const double a = 2.0 / (9.0 * df);
  return df * std::pow(1.0 - a + z * std::sqrt(a), 3.0);
}

TEST(MechanismParams, Validation) {
  EXPECT_THROW((MechanismParams{0.0, 100, 100}.Validate()), ValidationError);
  EXPECT_THROW((MechanismParams{-1.0, 100, 100}.Validate()), ValidationError);
  EXPECT_THROW((MechanismParams{1.0, -1, 100}.Validate()), ValidationError);
  EXPECT_THROW((MechanismParams{1.0, 100, 0}.Validate()), ValidationError);
  EXPECT_NO_THROW((MechanismParams{1.0, 0, 100}.Validate()));
}

TEST(BuildChannel, RejectsBadInputs) {
  const RoadNetwork net = SymmetricLine(4);
  const std::vector<SegmentId> dom{0, 3};
  const std::vector<SegmentId> cod{0, 1};
  EXPECT_THROW(BuildChannel(net, dom, cod, {1, 100, 100}), ValidationError);
  EXPECT_THROW(BuildChannel(net, cod, cod, {0, 100, 100}), ValidationError);
  EXPECT_THROW(BuildChannel(net, std::vector<SegmentId>{}, cod, {1, 100, 100}), ValidationError);
  const std::vector<SegmentId> bad{0, 9};
  EXPECT_THROW(BuildChannel(net, bad, bad, {1, 100, 100}), ValidationError);
}

TEST(BuildChannel, TinyEpsilonIsUniformOverBall) {
  const RoadNetwork net = RoadNetwork::Build(GridEdges(5, 5, 100), 100);
  const auto all = All(net);
  const ObfuscationChannel ch = BuildChannel(net, all, all, {1e-9, 200, 100});
  for (std::size_t r = 0; r < ch.rows(); ++r) {
    const auto ball = ClosedBall(net, ch.domain()[r], 200);
    for (std::size_t c = 0; c < ch.cols(); ++c) {
      const bool inside = std::binary_search(ball.begin(), ball.end(), ch.codomain()[c]);
      EXPECT_NEAR(ch.Prob(r, c), inside ? 1.0 / ball.size() : 0.0, 1e-8);
    }
  }
}

TEST(BuildChannel, ZeroRadiusIsIdentity) {
  const RoadNetwork net = SymmetricLine(5);
  const auto all = All(net);
  const ObfuscationChannel ch = BuildChannel(net, all, all, {1.3, 0, 100});
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 5; ++c) EXPECT_EQ(ch.Prob(r, c), r == c ? 1.0 : 0.0);
  }
}

TEST(BuildChannel, HandNormalizedLineTable) {
  // epsilon 0.01 per meter, r = 200 m on a 5-node line with 100 m spacing.
  const RoadNetwork net = SymmetricLine(5);
  const auto all = All(net);
  const ObfuscationChannel ch = BuildChannel(net, all, all, {0.01, 200, 1});
  const double e1 = std::exp(-1.0), e2 = std::exp(-2.0);
  const std::vector<std::vector<double>> weights{
      {1, e1, e2, 0, 0}, {e1, 1, e1, e2, 0}, {e2, e1, 1, e1, e2}, {0, e2, e1, 1, e1},
      {0, 0, e2, e1, 1}};
  for (std::size_t r = 0; r < 5; ++r) {
    double z = 0;
    for (double w : weights[r]) z += w;
    for (std::size_t c = 0; c < 5; ++c) EXPECT_NEAR(ch.Prob(r, c), weights[r][c] / z, 1e-15);
    EXPECT_NEAR(ch.Normalizer(r), 1.0 / z, 1e-15);
  }
}

TEST(BuildChannel, SubdomainAndAsymmetricCodomain) {
  std::mt19937_64 gen(8);
  const auto edges = oracle::RandomSparse(12, 20, 50, 250, gen);
  const RoadNetwork net = RoadNetwork::Build(edges, 100);
  const auto bf = oracle::BellmanFord(12, edges);
  const std::vector<SegmentId> dom{1, 4, 7};
  const std::vector<SegmentId> cod{0, 1, 3, 4, 5, 7, 9, 11};
  const ObfuscationChannel ch = BuildChannel(net, dom, cod, {0.8, 300, 100});
  const auto direct = oracle::DirectChannel(bf, dom, cod, 0.8, 300, 100);
  for (std::size_t r = 0; r < dom.size(); ++r) {
    for (std::size_t c = 0; c < cod.size(); ++c) EXPECT_NEAR(ch.Prob(r, c), direct[r][c], 1e-12);
  }
}

TEST(BuildChannel, ExtremeEpsilonStaysFinite) {
  const RoadNetwork net = SymmetricLine(6);
  const auto all = All(net);
  const ObfuscationChannel ch = BuildChannel(net, all, all, {5000, 500, 100});
  for (std::size_t r = 0; r < ch.rows(); ++r) {
    EXPECT_NEAR(ch.Prob(r, r), 1.0, 1e-12);
    EXPECT_TRUE(std::isfinite(ch.Normalizer(r)) || ch.Normalizer(r) > 0);
  }
}

TEST(SamplePrivateLocation, IdentityReturnsInput) {
  const RoadNetwork net = SymmetricLine(5);
  const auto all = All(net);
  const ObfuscationChannel ch = BuildChannel(net, all, all, {1, 0, 100});
  Rng rng(1);
  for (SegmentId x = 0; x < 5; ++x) {
    for (int i = 0; i < 20; ++i) EXPECT_EQ(SamplePrivateLocation(ch, x, rng), x);
  }
  EXPECT_THROW(SamplePrivateLocation(ch, 7, rng), ValidationError);
}

TEST(SamplePrivateLocation, ReproducibleUnderSeed) {
  const RoadNetwork net = RoadNetwork::Build(GridEdges(6, 6, 100), 100);
  const auto all = All(net);
  const ObfuscationChannel ch = BuildChannel(net, all, all, {0.5, 300, 100});
  Rng a(99), b(99);
  for (int i = 0; i < 200; ++i) EXPECT_EQ(SamplePrivateLocation(ch, 14, a), SamplePrivateLocation(ch, 14, b));
}

TEST(SamplePrivateLocation, ChiSquareAgainstRow) {
  const RoadNetwork net = RoadNetwork::Build(GridEdges(7, 7, 100), 100);
  const auto all = All(net);
  const ObfuscationChannel ch = BuildChannel(net, all, all, {0.7, 300, 100});
  const SegmentId x = 24;
  const std::size_t row = *ch.DomainIndex(x);
  constexpr int kDraws = 100000;
  std::map<SegmentId, int> counts;
  Rng rng(2024);
  for (int i = 0; i < kDraws; ++i) {
    const SegmentId y = SamplePrivateLocation(ch, x, rng);
    ASSERT_LE(*net.Distance(x, y), 300.0);
    ++counts[y];
  }
  double chi2 = 0;
  int cells = 0;
  for (std::size_t c = 0; c < ch.cols(); ++c) {
    const double expected = ch.Prob(row, c) * kDraws;
    if (expected == 0.0) {
      EXPECT_EQ(counts.count(ch.codomain()[c]), 0u);
      continue;
    }
    const double diff = counts[ch.codomain()[c]] - expected;
    chi2 += diff * diff / expected;
    ++cells;
  }
  EXPECT_LT(chi2, ChiSquareCritical999(cells - 1));
}

TEST(ComputeDelta, IdentityTwoPoint) {
  const std::vector<RoadEdge> e{{0, 1, 300}, {1, 0, 300}};
  const RoadNetwork net = RoadNetwork::Build(e, 100);
  const std::vector<SegmentId> all{0, 1};
  for (double eps : {0.2, 1.0, 1.7}) {
    const ObfuscationChannel ch = BuildChannel(net, all, all, {eps, 0, 100});
    // d = 3 units; P[x1|x1] = 1, P[x1|x2] = 0.
    EXPECT_NEAR(ComputeDelta(ch), std::exp(-3.0), 1e-15);
    EXPECT_NEAR(ComputeDelta(ch), std::exp(-eps * 3) / std::exp((1 - eps) * 3), 1e-15);
  }
}

TEST(ComputeDelta, SinglePointIsZero) {
  const RoadNetwork net = SymmetricLine(3);
  const std::vector<SegmentId> one{1};
  const auto all = All(net);
  EXPECT_EQ(ComputeDelta(BuildChannel(net, one, all, {1, 100, 100})), 0.0);
}

TEST(ComputeDelta, LineMatchesBruteForce) {
  const RoadNetwork net = SymmetricLine(5);
  const auto all = All(net);
  const auto bf = oracle::BellmanFord(5, net.edges());
  for (double eps : {0.2, 0.9, 2.0}) {
    for (double r : {0.0, 100.0, 200.0, 400.0}) {
      const ObfuscationChannel ch = BuildChannel(net, all, all, {eps, r, 100});
      const auto p = oracle::DirectChannel(bf, all, all, eps, r, 100);
      oracle::Table du(5, std::vector<double>(5));
      for (int a = 0; a < 5; ++a) for (int b = 0; b < 5; ++b) du[a][b] = bf[a][b] / 100;
      const double brute = oracle::BruteDelta(p, du, eps);
      EXPECT_NEAR(ComputeDelta(ch), brute, 1e-14 + 1e-12 * brute) << eps << " " << r;
    }
  }
}

TEST(ComputeDelta, UnreachablePairsAreSkipped) {
  const std::vector<RoadEdge> e{{0, 1, 100}};
  const RoadNetwork net = RoadNetwork::Build(e, 100);
  const std::vector<SegmentId> all{0, 1};
  const ObfuscationChannel ch = BuildChannel(net, all, all, {1, 0, 100});
  // Only the ordered pair (0,1) has a finite distance.
  EXPECT_NEAR(ComputeDelta(ch), std::exp(-1.0), 1e-15);
}

TEST(VerifyAgeoi, HoldsAtComputedDeltaAndFailsBelow) {
  const RoadNetwork net = RoadNetwork::Build(GridEdges(3, 3, 100), 100);
  const auto all = All(net);
  const ObfuscationChannel ch = BuildChannel(net, all, all, {0.6, 200, 100});
  const double delta = ComputeDelta(ch);
  ASSERT_GT(delta, 1e-6);
  const AgeoiCheck ok = VerifyAgeoi(ch, 0.6, delta);
  EXPECT_TRUE(ok.holds);
  ASSERT_TRUE(ok.worst.has_value());
  EXPECT_NEAR(ok.worst->slack, 0.0, 1e-15);

  const AgeoiCheck bad = VerifyAgeoi(ch, 0.6, delta - 1e-6);
  EXPECT_FALSE(bad.holds);
  ASSERT_TRUE(bad.worst.has_value());
  EXPECT_NEAR(bad.worst->slack, 1e-6, 1e-12);
  // The witness reproduces the maximum.
  const auto r1 = *ch.DomainIndex(bad.worst->x1);
  const auto r2 = *ch.DomainIndex(bad.worst->x2);
  const auto y = *ch.CodomainIndex(bad.worst->y);
  const double d = ch.DomainDistance(r1, r2);
  EXPECT_NEAR(std::exp(-d) * ch.Prob(r1, y) - std::exp((0.6 - 1) * d) * ch.Prob(r2, y), delta,
              1e-15);
}

TEST(VerifyAgeoi, IdentityWithDeltaOne) {
  const RoadNetwork net = SymmetricLine(4);
  const auto all = All(net);
  const ObfuscationChannel ch = BuildChannel(net, all, all, {0.3, 0, 100});
  const AgeoiCheck c = VerifyAgeoi(ch, 0.3, 1.0);
  EXPECT_TRUE(c.holds);
  ASSERT_TRUE(c.set_level_holds.has_value());
  EXPECT_TRUE(*c.set_level_holds);
}

TEST(VerifyAgeoi, SetLevelUsesClosedFormDelta) {
  const RoadNetwork net = RoadNetwork::Build(GridEdges(3, 3, 100), 100);
  const auto all = All(net);
  const ObfuscationChannel ch = BuildChannel(net, all, all, {0.4, 200, 100});
  const double single = ComputeDelta(ch);
  const double set = ComputeSetDelta(ch);
  EXPECT_GE(set, single);
  const AgeoiCheck at_set = VerifyAgeoi(ch, 0.4, set);
  ASSERT_TRUE(at_set.set_level_holds.has_value());
  EXPECT_TRUE(*at_set.set_level_holds);
  if (set > single + 1e-9) {
    EXPECT_FALSE(*VerifyAgeoi(ch, 0.4, single).set_level_holds);
  }
  const AgeoiCheck below = VerifyAgeoi(ch, 0.4, set - 1e-9);
  EXPECT_FALSE(*below.set_level_holds);
}

TEST(VerifyAgeoi, LargeCodomainSkipsSetEnumeration) {
  const RoadNetwork net = RoadNetwork::Build(GridEdges(4, 4, 100), 100);
  const auto all = All(net);
  const ObfuscationChannel ch = BuildChannel(net, all, all, {1, 100, 100});
  EXPECT_FALSE(VerifyAgeoi(ch, 1, ComputeDelta(ch)).set_level_holds.has_value());
}

TEST(MaxAdmissibleDistance, InverseOfExponential) {
  EXPECT_NEAR(MaxAdmissibleDistance(std::exp(-4.0)), 4.0, 1e-12);
  EXPECT_EQ(MaxAdmissibleDistance(1.0), 0.0);
  EXPECT_TRUE(std::isinf(MaxAdmissibleDistance(0.0)));
}

TEST(ComposeBudget, Additive) {
  PrivacyBudget b;
  b = ComposeBudget(b, {0.5, 0.01});
  EXPECT_DOUBLE_EQ(b.epsilon_total, 0.5);
  EXPECT_DOUBLE_EQ(b.delta_total, 0.01);
  b = ComposeBudget(b, {0.5, 0.01});
  EXPECT_DOUBLE_EQ(b.epsilon_total, 1.0);
  EXPECT_DOUBLE_EQ(b.delta_total, 0.02);
  EXPECT_EQ(b.events.size(), 2u);
  EXPECT_THROW(ComposeBudget(b, {-0.1, 0}), ValidationError);
  EXPECT_THROW(ComposeBudget(b, {0.1, -1e-9}), ValidationError);
}

TEST(ChannelExport, CsvAndSidecar) {
  const std::vector<RoadEdge> e{{0, 1, 100}, {1, 0, 100}};
  const RoadNetwork net = RoadNetwork::Build(e, 100);
  const std::vector<SegmentId> all{0, 1};
  const ObfuscationChannel ch = BuildChannel(net, all, all, {1, 0, 100});
  std::ostringstream csv;
  ch.WriteCsv(csv);
  EXPECT_EQ(csv.str(), "x,y,prob\n0,0,1\n1,1,1\n");
  std::ostringstream js;
  ch.WriteJsonSidecar(js);
  EXPECT_NE(js.str().find("\"normalizers\""), std::string::npos);
  EXPECT_NE(js.str().find("\"distance_unit_m\": 100.0"), std::string::npos);
}

TEST(ObfuscationChannel, ConstructorChecks) {
  EXPECT_THROW(ObfuscationChannel({0}, {1}, {1.0}, {0.0}, {1.0}, {}), ValidationError);
  EXPECT_THROW(ObfuscationChannel({0}, {0}, {0.5}, {0.0}, {1.0}, {}), ValidationError);
  EXPECT_THROW(ObfuscationChannel({0}, {0, 0}, {0.5, 0.5}, {0, 0}, {1.0}, {}), ValidationError);
  EXPECT_THROW(ObfuscationChannel({0}, {0, 1}, {1.5, -0.5}, {0, 0}, {1.0}, {}), ValidationError);
}

}  // namespace
}  // namespace ageoi
