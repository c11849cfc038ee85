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
#include <algorithm>
#include <cmath>

#include "mlrem/errors.hpp"

namespace mlrem {

// Coordinates of an iterate in span(beta, beta*): v1 = beta/|beta|, v2 the unit
// direction of the part of beta* orthogonal to v1.
struct PlanarState {
  double b1 = 0;       // |beta|
  double b1_star = 0;  // <beta*, v1>, sign kept
  double b2_star = 0;  // <beta*, v2> >= 0
  double sigma = 1;
  double sigma2_sq = 1;  // sigma^2 + b2_star^2

  static PlanarState make(double b1, double b1_star, double b2_star, double sigma) {
    if (!(sigma > 0)) throw DomainError("sigma must be positive");
    if (b1 < 0 || b2_star < 0) throw DomainError("b1 and b2_star must be nonnegative");
    return {b1, b1_star, b2_star, sigma, sigma * sigma + b2_star * b2_star};
  }

  double beta_star_sq() const { return b1_star * b1_star + b2_star * b2_star; }
  double beta_star_norm() const { return std::sqrt(beta_star_sq()); }
  double eta() const { return beta_star_norm() / sigma; }
  double cos_theta() const { return std::abs(b1_star) / beta_star_norm(); }
  double sin_theta() const { return b2_star / beta_star_norm(); }
};

struct PlanarFrame {
  Eigen::VectorXd v1;
  Eigen::VectorXd v2;  // empty when beta is parallel to beta*
};

struct Angle {
  double cos_theta;
  double sin_theta;
  double theta;
};

namespace detail {

template <typename D1, typename D2>
void require_pair(const Eigen::MatrixBase<D1>& beta, const Eigen::MatrixBase<D2>& beta_star) {
  if (beta.size() != beta_star.size()) throw DomainError("dimension mismatch");
  if (!(beta.norm() > 0)) throw DomainError("beta must be nonzero");
  if (!(beta_star.norm() > 0)) throw DomainError("beta_star must be nonzero");
}

// beta* minus its v1 component, projected twice so it stays orthogonal to v1
// even when beta and beta* are nearly parallel.
inline Eigen::VectorXd orthogonal_residual(const Eigen::VectorXd& v1, const Eigen::VectorXd& bs) {
  Eigen::VectorXd r = bs - v1.dot(bs) * v1;
  r -= v1.dot(r) * v1;
  return r;
}

}  // namespace detail

// b2* is the norm of the residual of beta* after removing its v1 component,
// which stays accurate near parallel inputs where sqrt(|b*|^2 - b1*^2) cancels.
template <typename D1, typename D2>
PlanarState reduce(const Eigen::MatrixBase<D1>& beta, const Eigen::MatrixBase<D2>& beta_star, double sigma) {
  detail::require_pair(beta, beta_star);
  const double b1 = beta.norm();
  const Eigen::VectorXd v1 = beta.template cast<double>() / b1;
  const double b1s = v1.dot(beta_star.template cast<double>());
  const double b2s = detail::orthogonal_residual(v1, beta_star.template cast<double>()).norm();
  return PlanarState::make(b1, b1s, b2s, sigma);
}

template <typename D1, typename D2>
PlanarFrame planar_frame(const Eigen::MatrixBase<D1>& beta, const Eigen::MatrixBase<D2>& beta_star) {
  detail::require_pair(beta, beta_star);
  PlanarFrame f;
  f.v1 = beta.template cast<double>() / beta.norm();
  const Eigen::VectorXd r = detail::orthogonal_residual(f.v1, beta_star.template cast<double>());
  const double rn = r.norm();
  if (rn > 0) f.v2 = r / rn;
  return f;
}

// b1' v1 + b2' v2.
template <typename D1, typename D2>
Eigen::VectorXd lift(double b1_prime, double b2_prime, const Eigen::MatrixBase<D1>& v1,
                     const Eigen::MatrixBase<D2>& v2, double tol = 1e-10) {
  if (v1.size() != v2.size()) throw DomainError("frame dimension mismatch");
  if (std::abs(v1.norm() - 1) > tol || std::abs(v2.norm() - 1) > tol || std::abs(v1.dot(v2)) > tol)
    throw DomainError("lift needs an orthonormal frame");
  return b1_prime * v1.template cast<double>() + b2_prime * v2.template cast<double>();
}

// Folded to [0, pi/2] so +beta* and -beta* are treated alike.
template <typename D1, typename D2>
Angle angle_metrics(const Eigen::MatrixBase<D1>& beta, const Eigen::MatrixBase<D2>& beta_star) {
  detail::require_pair(beta, beta_star);
  const Eigen::VectorXd v1 = beta.template cast<double>() / beta.norm();
  const Eigen::VectorXd u = beta_star.template cast<double>() / beta_star.norm();
  const double c = std::abs(v1.dot(u));
  const double s = detail::orthogonal_residual(v1, u).norm();
  const double h = std::hypot(c, s);
  const double cn = std::min(1.0, c / h);
  const double sn = std::min(1.0, s / h);
  return {cn, sn, std::atan2(sn, cn)};
}

// min(|beta - beta*|, |beta + beta*|).
template <typename D1, typename D2>
double signed_error(const Eigen::MatrixBase<D1>& beta, const Eigen::MatrixBase<D2>& beta_star) {
  if (beta.size() != beta_star.size()) throw DomainError("dimension mismatch");
  return std::min((beta - beta_star).norm(), (beta + beta_star).norm());
}

}  // namespace mlrem
