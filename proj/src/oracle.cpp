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

#include "mlrem/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mlrem/errors.hpp"

namespace mlrem {

void RunningStats::merge(const RunningStats& o) {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  const double total = static_cast<double>(n + o.n);
  const double delta = o.mean - mean;
  mean += delta * static_cast<double>(o.n) / total;
  m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / total;
  n += o.n;
}

McEstimate RunningStats::estimate(std::uint64_t seed) const {
  McEstimate e;
  e.mean = mean;
  e.n_draws = n;
  e.seed = seed;
  e.std_error = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  return e;
}

namespace {

constexpr std::int64_t kShard = 1 << 20;

void check_draws(std::int64_t n_draws) {
  if (n_draws < kMinDraws) throw DomainError("n_draws must be >= 10000");
}

// Calls body(rng, k) for k stats per draw; shard s uses derive_seed(seed, 1000 + s).
template <typename Body>
std::vector<RunningStats> sharded(std::int64_t n_draws, std::uint64_t seed, std::size_t k, Body&& body) {
  std::vector<RunningStats> total(k);
  std::vector<double> vals(k);
  for (std::int64_t start = 0, s = 0; start < n_draws; start += kShard, ++s) {
    std::mt19937_64 rng(derive_seed(seed, 1000 + static_cast<std::uint64_t>(s)));
    std::vector<RunningStats> part(k);
    const std::int64_t len = std::min(kShard, n_draws - start);
    for (std::int64_t i = 0; i < len; ++i) {
      body(rng, vals);
      for (std::size_t j = 0; j < k; ++j) part[j].push(vals[j]);
    }
    for (std::size_t j = 0; j < k; ++j) total[j].merge(part[j]);
  }
  return total;
}

double log_cosh(double u) {
  const double a = std::abs(u);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

}  // namespace

McPopulationStep mc_population_step(const PlanarState& s, std::int64_t n_draws, std::uint64_t seed) {
  check_draws(n_draws);
  const double inv_s2 = 1.0 / (s.sigma * s.sigma);
  auto stats = sharded(n_draws, seed, 2, [&](std::mt19937_64& rng, std::vector<double>& out) {
    std::normal_distribution<double> N(0.0, 1.0);
    const double a1 = N(rng), a2 = N(rng), e = N(rng);
    const double z = (rng() >> 63) ? 1.0 : -1.0;
    const double y = z * (a1 * s.b1_star + a2 * s.b2_star) + s.sigma * e;
    const double w = std::tanh(a1 * s.b1 * y * inv_s2) * y;
    out[0] = w * a1;
    out[1] = w * a2;
  });
  return {stats[0].estimate(seed), stats[1].estimate(seed)};
}

McSR mc_S_R(const PlanarState& s, std::int64_t n_draws, std::uint64_t seed) {
  check_draws(n_draws);
  const double inv_s2 = 1.0 / (s.sigma * s.sigma);
  const double s2 = std::sqrt(s.sigma * s.sigma + s.b2_star * s.b2_star);
  const double scale = s.sigma * s.sigma + s.b1_star * s.b1_star + s.b2_star * s.b2_star;
  auto stats = sharded(n_draws, seed, 2, [&](std::mt19937_64& rng, std::vector<double>& out) {
    std::normal_distribution<double> N(0.0, 1.0);
    const double a1 = N(rng), y = s2 * N(rng);
    const double u = a1 * s.b1 * inv_s2 * (y + a1 * s.b1_star);
    const double t = std::tanh(u);
    out[0] = t + u * (1.0 - t * t);
    out[1] = scale * a1 * a1 * s.b1 * inv_s2 * (1.0 - t * t);
  });
  return {stats[0].estimate(seed), stats[1].estimate(seed)};
}

namespace {

struct Draw {
  Eigen::VectorXd x;
  double y = 0;
};

void draw_xy(std::mt19937_64& rng, const GroundTruth<double>& truth, Draw& d) {
  std::normal_distribution<double> N(0.0, 1.0);
  for (Eigen::Index j = 0; j < d.x.size(); ++j) d.x(j) = N(rng);
  const double z = (rng() >> 63) ? 1.0 : -1.0;
  d.y = z * d.x.dot(truth.beta_star()) + truth.sigma() * N(rng);
}

}  // namespace

McEstimate mc_loglik(const Eigen::VectorXd& beta, const GroundTruth<double>& truth, std::int64_t n_draws,
                     std::uint64_t seed) {
  check_draws(n_draws);
  if (beta.size() != truth.d()) throw DomainError("dimension mismatch");
  const double s2 = truth.sigma() * truth.sigma();
  const double c0 = -0.5 * std::log(2.0 * std::numbers::pi * s2);
  Draw d{Eigen::VectorXd(truth.d())};
  auto stats = sharded(n_draws, seed, 1, [&](std::mt19937_64& rng, std::vector<double>& out) {
    draw_xy(rng, truth, d);
    const double xb = d.x.dot(beta);
    out[0] = c0 - (d.y * d.y + xb * xb) / (2.0 * s2) + log_cosh(d.y * xb / s2);
  });
  return stats[0].estimate(seed);
}

McVectorEstimate mc_loglik_grad(const Eigen::VectorXd& beta, const GroundTruth<double>& truth, std::int64_t n_draws,
                                std::uint64_t seed) {
  check_draws(n_draws);
  if (beta.size() != truth.d()) throw DomainError("dimension mismatch");
  const Eigen::Index dim = truth.d();
  const double s2 = truth.sigma() * truth.sigma();
  Draw d{Eigen::VectorXd(dim)};
  auto stats = sharded(n_draws, seed, static_cast<std::size_t>(dim), [&](std::mt19937_64& rng, std::vector<double>& out) {
    draw_xy(rng, truth, d);
    const double w = d.y * std::tanh(d.y * d.x.dot(beta) / s2);
    for (Eigen::Index j = 0; j < dim; ++j) out[j] = (w * d.x(j) - beta(j)) / s2;
  });
  McVectorEstimate e;
  e.mean.resize(dim);
  e.std_error.resize(dim);
  e.seed = seed;
  e.n_draws = n_draws;
  for (Eigen::Index j = 0; j < dim; ++j) {
    const McEstimate c = stats[j].estimate(seed);
    e.mean(j) = c.mean;
    e.std_error(j) = c.std_error;
  }
  return e;
}

McEstimate mc_hessian_quadform(const Eigen::VectorXd& beta, const GroundTruth<double>& truth, std::int64_t n_draws,
                               std::uint64_t seed) {
  check_draws(n_draws);
  if (beta.size() != truth.d()) throw DomainError("dimension mismatch");
  const double s2 = truth.sigma() * truth.sigma();
  const Eigen::VectorXd u = truth.beta_star() / truth.beta_star().norm();
  Draw d{Eigen::VectorXd(truth.d())};
  auto stats = sharded(n_draws, seed, 1, [&](std::mt19937_64& rng, std::vector<double>& out) {
    draw_xy(rng, truth, d);
    const double t = std::tanh(d.y * d.x.dot(beta) / s2);
    const double xu = d.x.dot(u);
    out[0] = (-1.0 + d.y * d.y / s2 * xu * xu * (1.0 - t * t)) / s2;
  });
  return stats[0].estimate(seed);
}

}  // namespace mlrem
