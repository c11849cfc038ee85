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

#include <Eigen/QR>
#include <cmath>
#include <random>

#include "mlrem/geometry.hpp"

using namespace mlrem;

namespace {

Eigen::VectorXd randn(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = N(rng);
  return v;
}

}  // namespace

TEST(Reduce, ParallelCase) {
  const auto s = reduce(Eigen::Vector2d(3, 4), Eigen::Vector2d(3, 4), 1.0);
  EXPECT_DOUBLE_EQ(s.b1, 5);
  EXPECT_NEAR(s.b1_star, 5, 1e-14);
  EXPECT_NEAR(s.b2_star, 0, 1e-14);
  EXPECT_NEAR(s.sigma2_sq, 1, 1e-14);
}

TEST(Reduce, OrthogonalCase) {
  const auto s = reduce(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 2), 1.0);
  EXPECT_EQ(s.b1, 1);
  EXPECT_EQ(s.b1_star, 0);
  EXPECT_EQ(s.b2_star, 2);
  EXPECT_EQ(s.sigma2_sq, 5);
}

TEST(Reduce, DiagonalCase) {
  const auto s = reduce(Eigen::Vector2d(1, 1) / std::sqrt(2.0), Eigen::Vector2d(1, 0), 0.5);
  EXPECT_NEAR(s.b1_star, 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.b2_star, 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.sigma2_sq, 0.75, 1e-15);
}

TEST(Reduce, KeepsSignOfB1Star) {
  const auto s = reduce(Eigen::Vector2d(-1, 0.2), Eigen::Vector2d(1, 0), 1.0);
  EXPECT_LT(s.b1_star, 0);
  EXPECT_GE(s.b2_star, 0);
}

TEST(Reduce, RejectsZeroVectors) {
  EXPECT_THROW(reduce(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), 1.0), DomainError);
  EXPECT_THROW(reduce(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 0), 1.0), DomainError);
  EXPECT_THROW(reduce(Eigen::Vector3d(1, 0, 0), Eigen::Vector2d(1, 0), 1.0), DomainError);
}

TEST(Reduce, PythagorasAndSigma2) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const Eigen::VectorXd b = randn(7, rng), bs = randn(7, rng);
    const auto s = reduce(b, bs, 0.3);
    EXPECT_NEAR(s.b1_star * s.b1_star + s.b2_star * s.b2_star, bs.squaredNorm(), 1e-12 * bs.squaredNorm());
    EXPECT_EQ(s.sigma2_sq, 0.3 * 0.3 + s.b2_star * s.b2_star);
    EXPECT_GE(s.b2_star, 0);
  }
}

TEST(Reduce, RotationInvariant) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 50; ++k) {
    const Eigen::Index d = 6;
    Eigen::MatrixXd A(d, d);
    for (Eigen::Index j = 0; j < d; ++j) A.col(j) = randn(d, rng);
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ();
    const Eigen::VectorXd b = randn(d, rng), bs = randn(d, rng);
    const auto s0 = reduce(b, bs, 1.0);
    const auto s1 = reduce(Eigen::VectorXd(Q * b), Eigen::VectorXd(Q * bs), 1.0);
    EXPECT_NEAR(s0.b1, s1.b1, 1e-10);
    EXPECT_NEAR(s0.b1_star, s1.b1_star, 1e-10);
    EXPECT_NEAR(s0.b2_star, s1.b2_star, 1e-10);
    EXPECT_NEAR(s0.sigma2_sq, s1.sigma2_sq, 1e-10);
  }
}

TEST(Lift, RoundTripsWithReduce) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd b = randn(5, rng), bs = randn(5, rng);
    const auto f = planar_frame(b, bs);
    const auto s = reduce(b, bs, 1.0);
    const Eigen::VectorXd back = lift(s.b1_star, s.b2_star, f.v1, f.v2);
    EXPECT_LE((back - bs).norm(), 1e-12 * (1 + bs.norm()));
    EXPECT_LE((lift(s.b1, 0.0, f.v1, f.v2) - b).norm(), 1e-12 * (1 + b.norm()));
  }
}

TEST(Lift, UnitFrameAndPythagoras) {
  const Eigen::Vector2d e1(1, 0), e2(0, 1);
  EXPECT_TRUE(lift(1.0, 0.0, e1, e2) == Eigen::VectorXd(e1));
  std::mt19937_64 rng(6);
  Eigen::MatrixXd A(5, 2);
  A.col(0) = randn(5, rng);
  A.col(1) = randn(5, rng);
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ() * Eigen::MatrixXd::Identity(5, 2);
  EXPECT_NEAR(lift(0.3, 0.4, Q.col(0), Q.col(1)).norm(), 0.5, 1e-14);
}

TEST(Lift, RejectsNonOrthonormalFrame) {
  EXPECT_THROW(lift(1.0, 1.0, Eigen::Vector2d(1, 0), Eigen::Vector2d(1, 1)), DomainError);
  EXPECT_THROW(lift(1.0, 1.0, Eigen::Vector2d(2, 0), Eigen::Vector2d(0, 1)), DomainError);
}

TEST(PlanarFrame, NearlyParallelStaysOrthonormal) {
  const Eigen::Vector3d bs(1, 0, 0);
  const Eigen::Vector3d b(1, 1e-11, -3e-12);
  const auto f = planar_frame(b, bs);
  ASSERT_EQ(f.v2.size(), 3);
  EXPECT_NEAR(f.v1.dot(f.v2), 0, 1e-14);
  EXPECT_NEAR(f.v2.norm(), 1, 1e-14);
  EXPECT_EQ(planar_frame(Eigen::Vector2d(2, 0), Eigen::Vector2d(1, 0)).v2.size(), 0);
}

TEST(AngleMetrics, Examples) {
  const Eigen::Vector2d bs(0.3, -1.2);
  auto a = angle_metrics(bs, bs);
  EXPECT_NEAR(a.cos_theta, 1, 1e-15);
  EXPECT_NEAR(a.sin_theta, 0, 1e-15);
  EXPECT_NEAR(a.theta, 0, 1e-15);
  a = angle_metrics(Eigen::Vector2d(-bs), bs);
  EXPECT_NEAR(a.cos_theta, 1, 1e-15);
  EXPECT_NEAR(a.theta, 0, 1e-15);
  a = angle_metrics(Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 0));
  EXPECT_NEAR(a.cos_theta, 1 / std::sqrt(2.0), 1e-15);
  EXPECT_THROW(angle_metrics(Eigen::Vector2d(0, 0), bs), DomainError);
}

TEST(AngleMetrics, PythagoreanIdentityAndFolding) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 500; ++k) {
    const Eigen::VectorXd b = randn(4, rng), bs = randn(4, rng);
    const auto a = angle_metrics(b, bs);
    EXPECT_NEAR(a.cos_theta * a.cos_theta + a.sin_theta * a.sin_theta, 1.0, 1e-12);
    EXPECT_GE(a.cos_theta, 0);
    EXPECT_LE(a.theta, std::numbers::pi / 2 + 1e-15);
  }
}

TEST(SignedError, Examples) {
  const Eigen::Vector3d bs(1, -2, 2);
  EXPECT_EQ(signed_error(bs, bs), 0);
  EXPECT_EQ(signed_error(Eigen::Vector3d(-bs), bs), 0);
  EXPECT_DOUBLE_EQ(signed_error(Eigen::Vector3d::Zero(), bs), 3);
  std::mt19937_64 rng(8);
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd b = randn(3, rng);
    EXPECT_LE(signed_error(b, Eigen::VectorXd(bs)), (b - bs).norm());
  }
}
