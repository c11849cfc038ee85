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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mlrem/finite.hpp"
#include "mlrem/population.hpp"

using namespace mlrem;

namespace {

EmConfig config(Variant v, Eigen::Index n, int T, std::uint64_t seed) {
  EmConfig c;
  c.variant = v;
  c.n = n;
  c.T = T;
  c.seed = seed;
  return c;
}

Eigen::VectorXd rotated_truth(const GroundTruth<double>& truth, double angle) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(truth.d());
  const double r = truth.beta_star().norm();
  b(0) = r * std::cos(angle);
  b(1) = r * std::sin(angle);
  return b;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST(EmStep, SingleSampleClosedForm) {
  const Eigen::MatrixXd X = Eigen::MatrixXd::Ones(1, 1);
  const Eigen::VectorXd y = Eigen::VectorXd::Ones(1);
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(1);
  EXPECT_NEAR(em_step(X, y, b, 1.0).beta(0), 0.76159, 1e-5);
  EXPECT_DOUBLE_EQ(em_step(X, y, b, 1.0).beta(0), std::tanh(1.0));
  EXPECT_DOUBLE_EQ(easyem_step(X, y, b, 1.0)(0), std::tanh(1.0));
}

TEST(EmStep, CoincidesWithEasyEmUnderIdentityCovariance) {
  Eigen::MatrixXd X(4, 1);
  X << 0.3, -1.1, 0.8, 2.0;
  X /= std::sqrt(X.squaredNorm() / 4.0);
  const Eigen::VectorXd y = (Eigen::VectorXd(4) << 0.5, -0.2, 1.4, 0.9).finished();
  const Eigen::VectorXd b = Eigen::VectorXd::Constant(1, 0.7);
  EXPECT_NEAR(em_step(X, y, b, 0.8).beta(0), easyem_step(X, y, b, 0.8)(0), 1e-14);
}

TEST(EmStep, AgreesWithPopulationAtLargeN) {
  const auto q = QuadratureSpec::make(100);
  const GroundTruth<double> truth(Eigen::Vector2d(0.8, 0.6), 0.7);
  const Eigen::Index n = 1000000;
  const auto ds = sample_dataset(truth, n, 5);
  const double tol = 5 * std::sqrt(2.0 / n) * std::sqrt(truth.total_variance());
  for (const Eigen::Vector2d b : {Eigen::Vector2d(0.3, -0.4), Eigen::Vector2d(1.0, 0.2), Eigen::Vector2d(-0.1, 0.9)}) {
    const Eigen::VectorXd pop = population_em_update(b, truth, q);
    EXPECT_LE((em_step(ds.xs(), ds.ys(), b, truth.sigma()).beta - pop).norm(), tol);
    EXPECT_LE((easyem_step(ds.xs(), ds.ys(), b, truth.sigma()) - pop).norm(), tol);
  }
}

TEST(EmStep, NearConsistentAtTruth) {
  const GroundTruth<double> truth(Eigen::Vector3d(0.6, 0.0, 0.8), 0.01);
  const auto ds = sample_dataset(truth, 10000, 6);
  EXPECT_LE((em_step(ds.xs(), ds.ys(), truth.beta_star(), truth.sigma()).beta - truth.beta_star()).norm(), 1e-2);
}

TEST(EmStep, EasyAndFullAgreeAtScale) {
  const GroundTruth<double> truth(Eigen::Vector2d(1.0, 0.0), 0.5);
  const Eigen::Index n = 200000;
  const auto ds = sample_dataset(truth, n, 7);
  const double tol = 10 * std::sqrt(2.0 / n) * std::sqrt(truth.total_variance());
  for (const Eigen::Vector2d b : {Eigen::Vector2d(0.2, 0.5), Eigen::Vector2d(0.9, -0.1), Eigen::Vector2d(2.0, 1.0)})
    EXPECT_LE((em_step(ds.xs(), ds.ys(), b, truth.sigma()).beta - easyem_step(ds.xs(), ds.ys(), b, truth.sigma())).norm(),
              tol);
}

TEST(EmStep, Errors) {
  const Eigen::MatrixXd X = Eigen::MatrixXd::Ones(2, 3);
  const Eigen::VectorXd y = Eigen::VectorXd::Ones(2);
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(3);
  EXPECT_THROW(em_step(X, y, b, 1.0), DomainError);
  Eigen::MatrixXd Xs(4, 2);
  Xs << 1, 1, 2, 2, 3, 3, -1, -1;
  EXPECT_THROW(em_step(Xs, Eigen::VectorXd::Ones(4), Eigen::VectorXd::Ones(2), 1.0), NumericalError);
  EXPECT_THROW(easyem_step(Eigen::MatrixXd(0, 2), Eigen::VectorXd(0), Eigen::VectorXd::Ones(2), 1.0), DomainError);
  EXPECT_THROW(easyem_step(X, y, b, 0.0), DomainError);
}

TEST(EmConfig, Validation) {
  EXPECT_THROW(config(Variant::EM, 1001, 10, 1).validate(3), DomainError);
  EXPECT_THROW(config(Variant::EM, 20, 10, 1).validate(3), DomainError);
  EXPECT_THROW(config(Variant::EM, 100, 0, 1).validate(3), DomainError);
  EXPECT_NO_THROW(config(Variant::EasyEM, 20, 10, 1).validate(3));
  EXPECT_NO_THROW(config(Variant::EM, 1000, 10, 1).validate(3));
  EXPECT_EQ(parse_variant("twophase"), Variant::TwoPhase);
  EXPECT_EQ(to_string(Variant::EasyEM), "easyem");
  EXPECT_THROW(parse_variant("sgd"), DomainError);
}

TEST(SampleSplitting, DeterministicAndShaped) {
  const auto truth = GroundTruth<double>::axis_aligned(6, 1.0, 2.0);
  const auto b0 = random_init<double>(6, 1.0, 3);
  for (Variant v : {Variant::EM, Variant::EasyEM, Variant::TwoPhase}) {
    const auto cfg = config(v, 60000, 12, 42);
    const auto a = run_sample_splitting(cfg, truth, b0);
    const auto b = run_sample_splitting(cfg, truth, b0);
    ASSERT_EQ(a.records.size(), 13u);
    EXPECT_TRUE(a.final_beta == b.final_beta);
    for (std::size_t t = 0; t < a.records.size(); ++t) {
      EXPECT_EQ(a.records[t].l2_error, b.records[t].l2_error);
      const auto& r = a.records[t];
      EXPECT_GE(r.cos_theta, 0.0);
      EXPECT_LE(r.sin_theta, 1.0);
      EXPECT_NEAR(r.cos_theta * r.cos_theta + r.sin_theta * r.sin_theta, 1.0, 1e-12);
      if (t > 0) {
        EXPECT_EQ(r.batch_start, static_cast<Eigen::Index>(t - 1) * 5000);
        EXPECT_EQ(r.batch_end, static_cast<Eigen::Index>(t) * 5000);
      }
    }
  }
}

TEST(SampleSplitting, BatchesAreConsecutiveDatasetRows) {
  const auto truth = GroundTruth<double>::axis_aligned(3, 1.0, 1.0);
  const Eigen::VectorXd b0 = random_init<double>(3, 1.0, 8);
  const auto run = run_sample_splitting(config(Variant::EM, 3000, 3, 9), truth, b0);
  const auto ds = sample_dataset(truth, 3000, 9);
  Eigen::VectorXd b = b0;
  for (int t = 0; t < 3; ++t) b = em_step(ds.x_rows(t * 1000, 1000), ds.y_segment(t * 1000, 1000), b, truth.sigma()).beta;
  EXPECT_TRUE(b == run.final_beta);
}

TEST(SampleSplitting, PracticalModeReusesAllSamples) {
  const auto truth = GroundTruth<double>::axis_aligned(3, 1.0, 1.0);
  const Eigen::VectorXd b0 = random_init<double>(3, 1.0, 8);
  auto cfg = config(Variant::EasyEM, 2000, 2, 9);
  cfg.splitting = false;
  const auto run = run_sample_splitting(cfg, truth, b0);
  const auto ds = sample_dataset(truth, 2000, 9);
  Eigen::VectorXd b = easyem_step(ds.xs(), ds.ys(), b0, truth.sigma());
  b = easyem_step(ds.xs(), ds.ys(), b, truth.sigma());
  EXPECT_TRUE(b == run.final_beta);
  EXPECT_EQ(run.records.back().batch_start, 0);
  EXPECT_EQ(run.records.back().batch_end, 2000);
}

TEST(SampleSplitting, EndToEndModerateSnr) {
  // d = 10, eta = 5, n/T = 5000, T = 25, init norm 1.
  const auto truth = GroundTruth<double>::axis_aligned(10, 1.0, 5.0);
  int good = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto run = run_sample_splitting(config(Variant::EM, 125000, 25, 1000 + s), truth,
                                          random_init<double>(10, 1.0, 2000 + s));
    if (run.records.back().l2_error <= 0.05) ++good;
  }
  EXPECT_GE(good, 48);
}

TEST(SampleSplitting, ErrorIndependentOfSignalStrength) {
  std::vector<double> errs[2];
  for (int k = 0; k < 2; ++k) {
    const double norm = k == 0 ? 1.0 : 10.0;
    const GroundTruth<double> truth(Eigen::VectorXd::Unit(5, 0) * norm, 0.1);
    for (std::uint64_t s = 0; s < 5; ++s)
      errs[k].push_back(run_sample_splitting(config(Variant::EM, 50000, 10, 300 + s), truth,
                                             random_init<double>(5, norm, 400 + s))
                            .records.back()
                            .l2_error);
  }
  const double ratio = median(errs[1]) / median(errs[0]);
  EXPECT_LE(ratio, 3.0);
  EXPECT_GE(ratio, 1.0 / 3.0);
}

TEST(SampleSplitting, StartAtTruthStaysClose) {
  const auto truth = GroundTruth<double>::axis_aligned(5, 1.0, 2.0);
  const auto run = run_sample_splitting(config(Variant::EM, 100000, 10, 11), truth, truth.beta_star());
  for (const auto& r : run.records) EXPECT_LE(r.l2_error, run.eps_f * std::sqrt(truth.total_variance()));
}

TEST(SampleSplitting, MonotoneDecayInContractionPhase) {
  const auto truth = GroundTruth<double>::axis_aligned(5, 1.0, 2.0);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto run = run_sample_splitting(config(Variant::EM, 1500000, 15, 50 + s), truth,
                                          0.5 * rotated_truth(truth, std::numbers::pi / 100));
    for (std::size_t t = 1; t < run.records.size(); ++t) {
      if (std::acos(std::min(1.0, run.records[t - 1].cos_theta)) > std::numbers::pi / 70) continue;
      EXPECT_LE(run.records[t].l2_error, run.records[t - 1].l2_error + 2 * run.eps_f) << s << " " << t;
    }
  }
}

TEST(SampleSplitting, ObserverStopsEarly) {
  const auto truth = GroundTruth<double>::axis_aligned(4, 1.0, 2.0);
  const auto run = run_sample_splitting(config(Variant::EM, 40000, 10, 3), truth, random_init<double>(4, 1.0, 3),
                                        [](const FiniteRecord& r) { return r.iter < 4; });
  EXPECT_TRUE(run.stopped_early);
  EXPECT_EQ(run.records.back().iter, 4);
}

TEST(TwoPhase, EasyFirstOnlyWhenFluctuationIsLarge) {
  {
    const auto truth = GroundTruth<double>::axis_aligned(100, 1.0, 5.0);
    const auto run = run_sample_splitting(config(Variant::TwoPhase, 300000, 30, 1), truth,
                                          random_init<double>(100, 1.0, 1));
    ASSERT_GE(run.eps_f, 0.1);
    EXPECT_EQ(run.records[1].variant_used, Variant::EasyEM);
    EXPECT_GE(run.switch_iter, 3);
    EXPECT_LE(run.switch_iter, 1 + 7);  // at most ceil(log2 100) Easy steps
    for (std::size_t t = 1; t < run.records.size(); ++t)
      EXPECT_EQ(run.records[t].variant_used,
                static_cast<int>(t) < run.switch_iter ? Variant::EasyEM : Variant::EM);
  }
  {
    const auto truth = GroundTruth<double>::axis_aligned(2, 1.0, 5.0);
    const auto run = run_sample_splitting(config(Variant::TwoPhase, 200000, 10, 1), truth,
                                          random_init<double>(2, 1.0, 1));
    EXPECT_EQ(run.switch_iter, 1);
    for (std::size_t t = 1; t < run.records.size(); ++t) EXPECT_EQ(run.records[t].variant_used, Variant::EM);
  }
}

// With a permissive threshold only the non-decreasing proxy and the two-step
// minimum hold the switch back.
TEST(TwoPhase, PermissiveThresholdStillNeedsTwoEasySteps) {
  const auto truth = GroundTruth<double>::axis_aligned(64, 1.0, 5.0);
  auto cfg = config(Variant::TwoPhase, 200000, 20, 4);
  cfg.switch_threshold = -0.5;
  const auto run = run_sample_splitting(cfg, truth, random_init<double>(64, 1.0, 4));
  ASSERT_EQ(run.records[1].variant_used, Variant::EasyEM);
  EXPECT_GE(run.switch_iter, 3);
  EXPECT_LE(run.switch_iter, 1 + 6);
  EXPECT_EQ(run.records[2].variant_used, Variant::EasyEM);
}

TEST(NormFloor, Cases) {
  const auto truth = GroundTruth<double>::axis_aligned(10, 1.0, 5.0);
  const auto run = run_sample_splitting(config(Variant::EM, 125000, 25, 5), truth, random_init<double>(10, 1.0, 5));
  EXPECT_EQ(norm_floor_check(run.records, 1.0), CheckStatus::Pass);
  const auto low = run_sample_splitting(config(Variant::EM, 125000, 25, 5), truth, random_init<double>(10, 0.05, 5));
  EXPECT_EQ(norm_floor_check(low.records, 1.0), CheckStatus::Skipped);
  EXPECT_EQ(norm_floor_check(std::vector<double>{0.5, 0.09, 0.7}, 1.0), CheckStatus::Fail);

  const auto q = QuadratureSpec::make(100);
  const auto pop = run_population_trajectory(random_init<double>(10, 0.1, 6), truth, q, 200, 1e-8);
  std::vector<double> norms;
  for (const auto& r : pop.records) norms.push_back(r.b1);
  EXPECT_EQ(norm_floor_check(norms, 1.0), CheckStatus::Pass);
}
