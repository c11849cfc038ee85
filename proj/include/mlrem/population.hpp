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
#include <string>
#include <vector>

#include "mlrem/geometry.hpp"
#include "mlrem/model.hpp"
#include "mlrem/quadrature.hpp"

namespace mlrem {

struct SR {
  double S = 0;
  double R = 0;
  bool degenerate = false;  // b1 == 0: the update is the origin
};

struct PopulationStep {
  double S = 0;
  double R = 0;
  double b1_prime = 0;  // b1* S + R
  double b2_prime = 0;  // b2* S
  double direct_b1_prime = 0;  // E[tanh(u) y alpha1], the second route
  double discrepancy = 0;      // |direct - (b1* S + R)|
  bool degenerate = false;
};

// S = E[tanh u + u tanh'(u)], R = (sigma^2 + |b*|^2) E[alpha1^2 (b1/sigma^2) tanh'(u)].
SR compute_S_R(const PlanarState& s, const QuadratureSpec& q);

// Throws NumericalError when the two b1' routes differ by more than
// rel_tol * (1 + |b1'|).
PopulationStep population_em_step(const PlanarState& s, const QuadratureSpec& q, double rel_tol = 1e-6);

// One population update of a full d-dimensional iterate (reduce, step, lift).
Eigen::VectorXd population_em_update(const Eigen::VectorXd& beta, const GroundTruth<double>& truth,
                                     const QuadratureSpec& q);

struct PopulationRecord {
  int iter = 0;
  double b1 = 0;
  double b1_star = 0;
  double b2_star = 0;
  double cos_theta = 0;
  double sin_theta = 0;
  double l2_error = 0;
  double S = 0;
  double R = 0;
};

struct PopulationRun {
  std::vector<PopulationRecord> records;
  Eigen::VectorXd final_beta;
  bool converged = false;
  bool saddle_start = false;  // beta0 orthogonal to beta*: the run heads to E(v) v
};

// Record t describes beta_t together with the S, R of the step taken from it.
PopulationRun run_population_trajectory(const Eigen::VectorXd& beta0, const GroundTruth<double>& truth,
                                        const QuadratureSpec& q, int max_iters, double tol);

// Positive root of f(t) = t where f(t) is b1' at |beta| = t along the unit
// direction with <beta*, v1> = b1_star and orthogonal part b2_star.
double find_fixed_point_E(double b1_star, double b2_star, double sigma, const QuadratureSpec& q, double tol);

// E log(1/2 N(y; <x,beta>, sigma^2) + 1/2 N(y; -<x,beta>, sigma^2)).
double population_loglik(const PlanarState& s, const QuadratureSpec& q);
double population_loglik(const Eigen::VectorXd& beta, const GroundTruth<double>& truth, const QuadratureSpec& q);

// Central differences of population_loglik, step h per coordinate.
Eigen::VectorXd loglik_gradient_fd(const Eigen::VectorXd& beta, const GroundTruth<double>& truth,
                                   const QuadratureSpec& q, double h = 1e-5);

// <u, H u> with u = beta*/|beta*| and H the Hessian of the population log-likelihood.
double hessian_quadform_along_bstar(const PlanarState& s, const QuadratureSpec& q);
double hessian_quadform_along_bstar(const Eigen::VectorXd& beta, const GroundTruth<double>& truth,
                                    const QuadratureSpec& q);

struct FixedPoint {
  std::string label;  // origin, +beta_star, -beta_star, +E(v)v, -E(v)v
  Eigen::VectorXd point;
};

// The five stationary points in span(beta*, v) for a unit v orthogonal to beta*.
std::vector<FixedPoint> planar_fixed_points(const GroundTruth<double>& truth, const Eigen::VectorXd& v,
                                            const QuadratureSpec& q, double tol);

}  // namespace mlrem
