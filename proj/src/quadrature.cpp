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

#include "mlrem/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>

#include "mlrem/errors.hpp"

namespace mlrem {

QuadRule parse_quad_rule(const std::string& name) {
  if (name == "panel") return QuadRule::Panel;
  if (name == "gh" || name == "hermite") return QuadRule::Hermite;
  throw DomainError("unknown quadrature rule: " + name);
}

std::string to_string(QuadRule rule) { return rule == QuadRule::Panel ? "panel" : "gh"; }

void gauss_hermite(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  if (order < 1) throw DomainError("quadrature order must be >= 1");
  const int n = order;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success) throw NumericalError("Gauss-Hermite eigen solve failed");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()(i);
    double w = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
    // Newton on the orthonormal He_n; weight from the Christoffel sum.
    for (int it = 0; it < 3; ++it) {
      double pm = 0.0, p = 1.0, dpm = 0.0, dp = 0.0, sumsq = 1.0;
      for (int k = 0; k < n; ++k) {
        const double pn = (x * p - std::sqrt(static_cast<double>(k)) * pm) / std::sqrt(k + 1.0);
        const double dpn = (p + x * dp - std::sqrt(static_cast<double>(k)) * dpm) / std::sqrt(k + 1.0);
        pm = p;
        p = pn;
        dpm = dp;
        dp = dpn;
        if (k + 1 < n) sumsq += p * p;
      }
      if (!std::isfinite(p) || !std::isfinite(dp) || dp == 0.0 || !std::isfinite(sumsq)) break;
      x -= p / dp;
      w = 1.0 / sumsq;
    }
    nodes[i] = x;
    weights[i] = w;
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= total;
}

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  if (order < 1) throw DomainError("quadrature order must be >= 1");
  const int n = order;
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return nodes[a] < nodes[b]; });
  std::vector<double> xn(n), wn(n);
  for (int i = 0; i < n; ++i) {
    xn[i] = nodes[idx[i]];
    wn[i] = weights[idx[i]];
  }
  nodes = std::move(xn);
  weights = std::move(wn);
}

QuadratureSpec QuadratureSpec::make(int order, QuadRule rule) {
  if (order < 2) throw DomainError("quadrature order must be >= 2");
  QuadratureSpec q;
  q.order = order;
  q.rule = rule;
  gauss_hermite(order, q.nodes, q.weights);
  gauss_legendre(std::max(4, order / 10), q.gl_nodes, q.gl_weights);
  return q;
}

}  // namespace mlrem
