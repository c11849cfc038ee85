// Copyright 2026 The mlrem Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "mlrem/quadrature.hpp"

using namespace mlrem;

namespace {

double double_factorial(int k) {
  double r = 1;
  for (int i = k; i > 1; i -= 2) r *= i;
  return r;
}

}  // namespace

TEST(GaussHermite, WeightsSumToOne) {
  for (int order : {2, 10, 100, 200}) {
    const auto q = QuadratureSpec::make(order);
    EXPECT_NEAR(std::accumulate(q.weights.begin(), q.weights.end(), 0.0), 1.0, 1e-12);
    EXPECT_EQ(static_cast<int>(q.nodes.size()), order);
  }
}

TEST(GaussHermite, ExactForLowDegreeMoments) {
  const auto q = QuadratureSpec::make(100);
  for (int k = 0; k <= 8; ++k) {
    double m = 0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) m += q.weights[i] * std::pow(q.nodes[i], k);
    const double exact = k % 2 ? 0.0 : double_factorial(k - 1);
    EXPECT_NEAR(m, exact, 1e-11 * (1 + exact)) << "degree " << k;
  }
}

TEST(GaussHermite, SmallOrderExactUpToTwoNMinusOne) {
  const auto q = QuadratureSpec::make(4);
  for (int k = 0; k <= 7; ++k) {
    double m = 0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) m += q.weights[i] * std::pow(q.nodes[i], k);
    EXPECT_NEAR(m, k % 2 ? 0.0 : double_factorial(k - 1), 1e-12);
  }
}

TEST(GaussLegendre, ExactOnPolynomials) {
  std::vector<double> x, w;
  gauss_legendre(10, x, w);
  for (int k = 0; k < 20; ++k) {
    double m = 0;
    for (std::size_t i = 0; i < x.size(); ++i) m += w[i] * std::pow(x[i], k);
    EXPECT_NEAR(m, k % 2 ? 0.0 : 2.0 / (k + 1), 1e-14);
  }
}

TEST(QuadratureSpec, PanelPointsFollowOrder) {
  EXPECT_EQ(QuadratureSpec::make(100).gl_nodes.size(), 10u);
  EXPECT_EQ(QuadratureSpec::make(200).gl_nodes.size(), 20u);
  EXPECT_EQ(QuadratureSpec::make(20).gl_nodes.size(), 4u);
  EXPECT_THROW(QuadratureSpec::make(1), DomainError);
  EXPECT_EQ(parse_quad_rule("gh"), QuadRule::Hermite);
  EXPECT_EQ(parse_quad_rule("panel"), QuadRule::Panel);
  EXPECT_THROW(parse_quad_rule("simpson"), DomainError);
}

// Low moments of (alpha, Y) with Y | alpha ~ N(c alpha, s2^2).
TEST(PlanarExpectation, MomentsForBothRules) {
  const PlanarState s = PlanarState::make(2.0, -0.8, 0.6, 0.5);
  const double c = 0.8, v2 = s.sigma2_sq;
  for (QuadRule rule : {QuadRule::Panel, QuadRule::Hermite}) {
    const auto q = QuadratureSpec::make(100, rule);
    double m0 = 0, aa = 0, yy = 0, ay = 0, a2y2 = 0;
    planar_expectation(s, q, [&](double a, double y, double w) {
      m0 += w;
      aa += w * a * a;
      yy += w * y * y;
      ay += w * a * y;
      a2y2 += w * a * a * y * y;
    });
    EXPECT_NEAR(m0, 1.0, 1e-12);
    EXPECT_NEAR(aa, 1.0, 1e-12);
    EXPECT_NEAR(yy, c * c + v2, 1e-12);
    EXPECT_NEAR(ay, c, 1e-12);
    EXPECT_NEAR(a2y2, 3 * c * c + v2, 1e-11);
  }
}
