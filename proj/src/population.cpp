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

#include "mlrem/population.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mlrem/errors.hpp"

namespace mlrem {

namespace {

constexpr double kTanhCut = 20.0;

// tanh and tanh' = 1 - tanh^2, saturated beyond |u| > 20.
inline void tanh_pair(double u, double& t, double& tp) {
  if (u > kTanhCut) {
    t = 1.0;
    tp = 0.0;
  } else if (u < -kTanhCut) {
    t = -1.0;
    tp = 0.0;
  } else {
    t = std::tanh(u);
    tp = 1.0 - t * t;
  }
}

// log cosh without overflow.
inline double log_cosh(double u) {
  const double a = std::abs(u);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

void validate(const PlanarState& s) {
  if (!(s.sigma > 0) || !(s.b1 >= 0) || !(s.b2_star >= 0) || !std::isfinite(s.b1) || !std::isfinite(s.b1_star))
    throw DomainError("invalid planar state");
}

}  // namespace

SR compute_S_R(const PlanarState& s, const QuadratureSpec& q) {
  const PopulationStep st = population_em_step(s, q, std::numeric_limits<double>::infinity());
  return {st.S, st.R, st.degenerate};
}

PopulationStep population_em_step(const PlanarState& s, const QuadratureSpec& q, double rel_tol) {
  validate(s);
  PopulationStep out;
  if (s.b1 == 0.0) {
    out.degenerate = true;
    return out;
  }
  const double kappa = s.b1 / (s.sigma * s.sigma);
  double sS = 0, sR = 0, sD = 0;
  planar_expectation(s, q, [&](double a, double y, double w) {
    const double u = kappa * a * y;
    double t, tp;
    tanh_pair(u, t, tp);
    sS += w * (t + u * tp);
    sR += w * a * a * tp;
    sD += w * t * y * a;
  });
  // The engine works with |b1*|; S is odd in b1*, R and b1' are even.
  out.S = sgn(s.b1_star) * sS;
  out.R = (s.sigma * s.sigma + s.beta_star_sq()) * kappa * sR;
  out.b1_prime = s.b1_star * out.S + out.R;
  out.b2_prime = s.b2_star * out.S;
  out.direct_b1_prime = sD;
  out.discrepancy = std::abs(sD - out.b1_prime);
  if (out.discrepancy > rel_tol * (1.0 + std::abs(out.b1_prime))) {
    std::ostringstream msg;
    msg << "population step: quadrature routes disagree by " << out.discrepancy << " at b1=" << s.b1
        << " b1*=" << s.b1_star << " b2*=" << s.b2_star << " sigma=" << s.sigma
        << "; increase --quad-order (now " << q.order << ")";
    throw NumericalError(msg.str());
  }
  return out;
}

Eigen::VectorXd population_em_update(const Eigen::VectorXd& beta, const GroundTruth<double>& truth,
                                     const QuadratureSpec& q) {
  if (beta.size() != truth.d()) throw DomainError("dimension mismatch");
  if (beta.norm() == 0.0) return Eigen::VectorXd::Zero(beta.size());
  const PlanarState s = reduce(beta, truth.beta_star(), truth.sigma());
  const PopulationStep st = population_em_step(s, q);
  const PlanarFrame f = planar_frame(beta, truth.beta_star());
  if (f.v2.size() == 0) return st.b1_prime * f.v1;
  return lift(st.b1_prime, st.b2_prime, f.v1, f.v2);
}

PopulationRun run_population_trajectory(const Eigen::VectorXd& beta0, const GroundTruth<double>& truth,
                                        const QuadratureSpec& q, int max_iters, double tol) {
  if (beta0.size() != truth.d()) throw DomainError("dimension mismatch");
  if (!(beta0.norm() > 0)) throw DomainError("beta0 must be nonzero");
  if (max_iters < 0) throw DomainError("max_iters must be >= 0");
  PopulationRun run;
  Eigen::VectorXd beta = beta0;
  const double bnorm = truth.beta_star().norm();
  for (int t = 0;; ++t) {
    const PlanarState s = reduce(beta, truth.beta_star(), truth.sigma());
    if (t == 0) run.saddle_start = s.b1_star == 0.0;
    const PopulationStep st = population_em_step(s, q);
    PopulationRecord rec;
    rec.iter = t;
    rec.b1 = s.b1;
    rec.b1_star = s.b1_star;
    rec.b2_star = s.b2_star;
    const double c = std::abs(s.b1_star) / bnorm, sn = s.b2_star / bnorm, h = std::hypot(c, sn);
    rec.cos_theta = std::min(1.0, c / h);
    rec.sin_theta = std::min(1.0, sn / h);
    rec.l2_error = signed_error(beta, truth.beta_star());
    rec.S = st.S;
    rec.R = st.R;
    run.records.push_back(rec);
    if (rec.l2_error <= tol) {
      run.converged = true;
      break;
    }
    if (t >= max_iters) break;
    if (st.degenerate) {
      beta.setZero();
      break;
    }
    const PlanarFrame f = planar_frame(beta, truth.beta_star());
    beta = f.v2.size() == 0 ? Eigen::VectorXd(st.b1_prime * f.v1) : lift(st.b1_prime, st.b2_prime, f.v1, f.v2);
    if (!(beta.norm() > 0)) break;
  }
  run.final_beta = beta;
  return run;
}

double find_fixed_point_E(double b1_star, double b2_star, double sigma, const QuadratureSpec& q, double tol) {
  if (!(tol > 0)) throw DomainError("tol must be positive");
  if (!(sigma > 0)) throw DomainError("sigma must be positive");
  if (b2_star < 0) throw DomainError("b2_star must be nonnegative");
  auto g = [&](double t) {
    return population_em_step(PlanarState::make(t, b1_star, b2_star, sigma), q).b1_prime - t;
  };
  double lo = tol;
  double hi = 3.0 * std::sqrt(sigma * sigma + b1_star * b1_star + b2_star * b2_star);
  double glo = g(lo), ghi = g(hi);
  if (!(glo > 0) || !(ghi < 0)) throw NumericalError("fixed-point bracket does not straddle a sign change");
  for (int it = 0; it < 300 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if (gm > 0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double population_loglik(const PlanarState& s, const QuadratureSpec& q) {
  validate(s);
  const double s2 = s.sigma * s.sigma;
  const double kappa = s.b1 / s2;
  double closed = -0.5 * std::log(2.0 * std::numbers::pi * s2) - (s2 + s.beta_star_sq() + s.b1 * s.b1) / (2.0 * s2);
  if (s.b1 == 0.0) return closed;
  double acc = 0;
  planar_expectation(s, q, [&](double a, double y, double w) { acc += w * log_cosh(kappa * a * y); });
  return closed + acc;
}

double population_loglik(const Eigen::VectorXd& beta, const GroundTruth<double>& truth, const QuadratureSpec& q) {
  if (beta.size() != truth.d()) throw DomainError("dimension mismatch");
  if (!beta.allFinite()) throw DomainError("beta must be finite");
  if (beta.norm() == 0.0) {
    const double nb = truth.beta_star().norm();
    return population_loglik(PlanarState::make(0.0, nb, 0.0, truth.sigma()), q);
  }
  return population_loglik(reduce(beta, truth.beta_star(), truth.sigma()), q);
}

Eigen::VectorXd loglik_gradient_fd(const Eigen::VectorXd& beta, const GroundTruth<double>& truth,
                                   const QuadratureSpec& q, double h) {
  Eigen::VectorXd g(beta.size());
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    Eigen::VectorXd p = beta, m = beta;
    p(j) += h;
    m(j) -= h;
    g(j) = (population_loglik(p, truth, q) - population_loglik(m, truth, q)) / (2.0 * h);
  }
  return g;
}

// With y conditioned on alpha1, the component of x along beta* has
// mean m and variance v; E[<x, u>^2 | alpha1, y] = (m^2 + v) / |b*|^2.
double hessian_quadform_along_bstar(const PlanarState& s, const QuadratureSpec& q) {
  validate(s);
  const double s2 = s.sigma * s.sigma;
  const double kappa = s.b1 / s2;
  const double c = std::abs(s.b1_star);
  const double shrink = s.b2_star * s.b2_star / s.sigma2_sq;
  const double v = shrink * s2;
  const double nb2 = s.beta_star_sq();
  double acc = 0;
  planar_expectation(s, q, [&](double a, double y, double w) {
    const double m = a * c + shrink * (y - a * c);
    double t, tp;
    tanh_pair(kappa * a * y, t, tp);
    acc += w * y * y * (m * m + v) * tp;
  });
  return (-1.0 + acc / (nb2 * s2)) / s2;
}

double hessian_quadform_along_bstar(const Eigen::VectorXd& beta, const GroundTruth<double>& truth,
                                    const QuadratureSpec& q) {
  if (beta.size() != truth.d()) throw DomainError("dimension mismatch");
  // At the origin tanh' = 1 everywhere and any v1 gives the same value.
  if (beta.norm() == 0.0)
    return hessian_quadform_along_bstar(PlanarState::make(0.0, truth.beta_star().norm(), 0.0, truth.sigma()), q);
  return hessian_quadform_along_bstar(reduce(beta, truth.beta_star(), truth.sigma()), q);
}

std::vector<FixedPoint> planar_fixed_points(const GroundTruth<double>& truth, const Eigen::VectorXd& v,
                                            const QuadratureSpec& q, double tol) {
  const Eigen::VectorXd& bs = truth.beta_star();
  if (v.size() != bs.size()) throw DomainError("dimension mismatch");
  if (std::abs(v.norm() - 1.0) > 1e-10 || std::abs(v.dot(bs)) > 1e-10 * bs.norm())
    throw DomainError("v must be a unit vector orthogonal to beta_star");
  const double E = find_fixed_point_E(0.0, bs.norm(), truth.sigma(), q, tol);
  return {{"origin", Eigen::VectorXd::Zero(bs.size())},
          {"+beta_star", bs},
          {"-beta_star", -bs},
          {"+E(v)v", E * v},
          {"-E(v)v", -E * v}};
}

}  // namespace mlrem
