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
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mlrem/errors.hpp"
#include "mlrem/geometry.hpp"
#include "mlrem/model.hpp"

namespace mlrem {

enum class Variant { EM, EasyEM, TwoPhase };

Variant parse_variant(const std::string& name);
std::string to_string(Variant v);

struct EmConfig {
  Variant variant = Variant::EM;
  Eigen::Index n = 0;  // total samples
  int T = 1;           // iterations
  bool splitting = true;
  // Consecutive-iterate cosine above which TwoPhase hands over to EM;
  // NaN selects cos(eps_f).
  double switch_threshold = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  double max_condition = 1e12;

  Eigen::Index batch_size() const { return splitting ? n / T : n; }
  void validate(Eigen::Index d) const;
};

// sqrt((d / (n/T)) log n), the working fluctuation scale.
double fluctuation_scale(Eigen::Index d, Eigen::Index n, int T);

struct EmStep {
  Eigen::VectorXd beta;
  double condition = 1;
};

namespace detail {

template <typename DX, typename DY, typename DB>
Eigen::VectorXd weighted_moment(const Eigen::MatrixBase<DX>& X, const Eigen::MatrixBase<DY>& y,
                                const Eigen::MatrixBase<DB>& beta, double sigma) {
  const double inv_s2 = 1.0 / (sigma * sigma);
  const Eigen::ArrayXd yy = y.template cast<double>().array();
  const Eigen::ArrayXd w = ((X.template cast<double>() * beta.template cast<double>()).array() * yy * inv_s2).tanh() * yy;
  return X.template cast<double>().transpose() * w.matrix() / static_cast<double>(X.rows());
}

}  // namespace detail

// Solves Sigma_hat beta' = (1/n) sum tanh(<beta,x_i> y_i / sigma^2) y_i x_i.
template <typename DX, typename DY, typename DB>
EmStep em_step(const Eigen::MatrixBase<DX>& X, const Eigen::MatrixBase<DY>& y, const Eigen::MatrixBase<DB>& beta,
               double sigma, double max_condition = 1e12) {
  if (X.rows() != y.size() || X.cols() != beta.size()) throw DomainError("em_step: shape mismatch");
  if (X.rows() < X.cols()) throw DomainError("em_step: batch smaller than dimension");
  if (!(sigma > 0)) throw DomainError("em_step: sigma must be positive");
  const Eigen::Index d = X.cols();
  const Eigen::VectorXd mu = detail::weighted_moment(X, y, beta, sigma);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  cov.selfadjointView<Eigen::Lower>().rankUpdate(X.template cast<double>().transpose(), 1.0 / static_cast<double>(X.rows()));
  cov.template triangularView<Eigen::StrictlyUpper>() = cov.transpose();
  // LDLT quietly pseudo-inverts a zero pivot, so its rcond estimate misses
  // exact rank loss; the spectrum gives the true 2-norm condition number.
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov, Eigen::EigenvaluesOnly).eigenvalues();
  const double cond = ev(0) > 0 ? ev(d - 1) / ev(0) : std::numeric_limits<double>::infinity();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  if (ldlt.info() != Eigen::Success || !(cond <= max_condition))
    throw NumericalError("sample covariance is ill-conditioned (condition " + std::to_string(cond) +
                         "); use a larger batch");
  return {ldlt.solve(mu), cond};
}

// Same weights, identity in place of the sample covariance.
template <typename DX, typename DY, typename DB>
Eigen::VectorXd easyem_step(const Eigen::MatrixBase<DX>& X, const Eigen::MatrixBase<DY>& y,
                            const Eigen::MatrixBase<DB>& beta, double sigma) {
  if (X.rows() != y.size() || X.cols() != beta.size()) throw DomainError("easyem_step: shape mismatch");
  if (X.rows() < 1) throw DomainError("easyem_step: empty batch");
  if (!(sigma > 0)) throw DomainError("easyem_step: sigma must be positive");
  return detail::weighted_moment(X, y, beta, sigma);
}

struct FiniteRecord {
  int iter = 0;
  Variant variant_used = Variant::EM;
  double cos_theta = 0;
  double sin_theta = 0;
  double l2_error = 0;
  double norm = 0;
  double cond_number = std::numeric_limits<double>::quiet_NaN();  // NaN for Easy-EM and the initial row
  Eigen::Index batch_start = 0;
  Eigen::Index batch_end = 0;
};

struct FiniteRun {
  std::vector<FiniteRecord> records;  // records[0] is the initial iterate
  Eigen::VectorXd final_beta;
  double eps_f = 0;
  int switch_iter = -1;  // first EM iteration of a TwoPhase run
  bool stopped_early = false;
};

// Return false to stop the run after this record.
using FiniteObserver = std::function<bool(const FiniteRecord&)>;

// Batch t of a splitting run is rows [t n/T, (t+1) n/T) of sample_dataset(truth, n, seed).
FiniteRun run_sample_splitting(const EmConfig& cfg, const GroundTruth<double>& truth, const Eigen::VectorXd& beta0,
                               const FiniteObserver& observer = {});

enum class CheckStatus { Pass, Fail, Skipped };
std::string to_string(CheckStatus s);

// Every iterate keeps norm >= |beta*|/10; skipped when the start is below that.
CheckStatus norm_floor_check(const std::vector<double>& norms, double beta_star_norm);
CheckStatus norm_floor_check(const std::vector<FiniteRecord>& records, double beta_star_norm);

}  // namespace mlrem
