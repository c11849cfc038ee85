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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mlrem/geometry.hpp"

namespace mlrem {

// Panel: graded composite Gauss-Legendre, refined toward the line where the
// tanh argument vanishes. Hermite: tensor Gauss-Hermite grid.
enum class QuadRule { Panel, Hermite };

QuadRule parse_quad_rule(const std::string& name);
std::string to_string(QuadRule rule);

struct QuadratureSpec {
  int order = 100;
  QuadRule rule = QuadRule::Panel;
  // Probabilists' Gauss-Hermite, weights normalized to sum to one.
  std::vector<double> nodes;
  std::vector<double> weights;
  // Gauss-Legendre on [-1, 1] used inside every panel; max(4, order / 10) points.
  std::vector<double> gl_nodes;
  std::vector<double> gl_weights;
  // Truncation of each standard-normal axis and the widest panel.
  double half_width = 9.0;
  double bulk_width = 1.0;

  static QuadratureSpec make(int order = 100, QuadRule rule = QuadRule::Panel);
};

// Golub-Welsch plus Newton polishing against the orthonormal recurrence.
void gauss_hermite(int order, std::vector<double>& nodes, std::vector<double>& weights);
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

namespace detail {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

inline double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

// Visits GL nodes of panels laid out from `start` in direction `dir` for
// `length`, first panel `h0`, doubling until `bulk`.
template <typename F>
void graded_panels(const QuadratureSpec& q, double start, double dir, double length, double h0, F&& visit) {
  if (!(length > 0)) return;
  const std::size_t m = q.gl_nodes.size();
  double a = 0.0;
  double h = std::min(h0, q.bulk_width);
  while (a < length) {
    const double b = std::min(length, a + h);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t k = 0; k < m; ++k) visit(start + dir * (mid + half * q.gl_nodes[k]), half * q.gl_weights[k]);
    a = b;
    if (h < q.bulk_width) h = std::min(q.bulk_width, 2 * h);
  }
}

}  // namespace detail

// E[f(alpha, Y)] over alpha ~ N(0,1), Y | alpha ~ N(|b1*| alpha, sigma_2^2),
// with kappa = b1 / sigma^2 setting the scale of the tanh argument kappa*alpha*Y.
// f(alpha, Y, w) accumulates w * integrand. The panel rule integrates alpha > 0
// only and doubles, so integrands must be even under (alpha, Y) -> (-alpha, -Y).
template <typename F>
void planar_expectation(const PlanarState& s, const QuadratureSpec& q, F&& f) {
  const double s2 = std::sqrt(s.sigma2_sq);
  const double c = std::abs(s.b1_star);
  const double kappa = s.b1 / (s.sigma * s.sigma);
  if (q.rule == QuadRule::Hermite) {
    const std::size_t n = q.nodes.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double a = q.nodes[i];
      for (std::size_t j = 0; j < n; ++j) f(a, c * a + s2 * q.nodes[j], q.weights[i] * q.weights[j]);
    }
    return;
  }
  const double Z = q.half_width;
  // Near alpha = 0 the argument behaves like kappa*alpha*(s2*z + |b1*|*alpha);
  // the sign of Y stops mixing once alpha passes s2/|b1*|.
  double feature = q.bulk_width;
  if (kappa > 0) feature = std::min(feature, 1.0 / (kappa * s2));
  if (kappa > 0 && c > 0) feature = std::min({feature, 1.0 / std::sqrt(kappa * c), s2 / c});
  detail::graded_panels(q, 0.0, 1.0, Z, std::min(q.bulk_width, feature), [&](double r, double wr) {
    const double wout = 2.0 * wr * detail::std_normal_pdf(r);
    const double mu = c * r;
    const double z0 = -mu / s2;
    const double hz = (kappa > 0 && r > 0) ? std::min(q.bulk_width, 1.0 / (kappa * r * s2)) : q.bulk_width;
    auto inner = [&](double z, double wz) { f(r, mu + s2 * z, wout * wz * detail::std_normal_pdf(z)); };
    if (z0 > -Z) {
      detail::graded_panels(q, z0, -1.0, z0 + Z, hz, inner);
      detail::graded_panels(q, z0, 1.0, Z - z0, hz, inner);
    } else {
      detail::graded_panels(q, -Z, 1.0, 2 * Z, q.bulk_width, inner);
    }
  });
}

}  // namespace mlrem
