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

#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "mlrem/geometry.hpp"
#include "mlrem/model.hpp"

namespace mlrem {

// Monte-Carlo estimators that share no code with the quadrature engine. Draws
// are taken in fixed-size shards, each with its own derived seed, and merged
// in shard order, so results depend only on (inputs, n_draws, seed).

inline constexpr std::int64_t kMinDraws = 10000;

struct McEstimate {
  double mean = 0;
  double std_error = 0;  // sample std / sqrt(n_draws)
  std::int64_t n_draws = 0;
  std::uint64_t seed = 0;
};

struct McVectorEstimate {
  Eigen::VectorXd mean;
  Eigen::VectorXd std_error;
  std::int64_t n_draws = 0;
  std::uint64_t seed = 0;
};

// Streaming mean/variance (Welford) with Chan's merge.
struct RunningStats {
  std::int64_t n = 0;
  double mean = 0;
  double m2 = 0;
  void push(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  void merge(const RunningStats& o);
  McEstimate estimate(std::uint64_t seed) const;
};

struct McPopulationStep {
  McEstimate b1_prime;
  McEstimate b2_prime;
};

struct McSR {
  McEstimate S;
  McEstimate R;
};

// Samples alpha1, alpha2, noise and the label, forms y and the tanh weight,
// and averages the weighted y alpha1, y alpha2.
McPopulationStep mc_population_step(const PlanarState& s, std::int64_t n_draws, std::uint64_t seed);

// alpha1 ~ N(0,1) and y ~ N(0, sigma_2^2) drawn independently.
McSR mc_S_R(const PlanarState& s, std::int64_t n_draws, std::uint64_t seed);

// Full d-dimensional draws of (x, z, e).
McEstimate mc_loglik(const Eigen::VectorXd& beta, const GroundTruth<double>& truth, std::int64_t n_draws,
                     std::uint64_t seed);
McVectorEstimate mc_loglik_grad(const Eigen::VectorXd& beta, const GroundTruth<double>& truth, std::int64_t n_draws,
                                std::uint64_t seed);
McEstimate mc_hessian_quadform(const Eigen::VectorXd& beta, const GroundTruth<double>& truth, std::int64_t n_draws,
                               std::uint64_t seed);

}  // namespace mlrem
