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

#include <string>
#include <vector>

#include "mlrem/finite.hpp"
#include "mlrem/geometry.hpp"
#include "mlrem/population.hpp"

namespace mlrem {

enum class TheoremId {
  CosT2,
  SinT3,
  DistT4,
  Corollary1,
  FiniteCosT6,
  FiniteSin,
  FiniteDistLowSNR,
  FiniteDistHighSNR,
  EasyEMT8,
  NormFloor,
  Bounded,
};

std::string to_string(TheoremId id);
TheoremId parse_theorem_id(const std::string& name);

// pass is vacuously true when applicable is false; consumers filter on applicable.
// margin > 0 means the inequality holds with room to spare, before slack.
struct BoundReport {
  int iter = 0;
  TheoremId theorem_id = TheoremId::Bounded;
  bool applicable = false;
  double lhs = 0;
  double rhs = 0;
  double margin = 0;
  bool pass = true;
};

// sqrt(1 + eta^2 / (2/3 + eta^2)).
double kappa_cosine(double eta);
// sqrt(1 + sin^2 / (cos^2 + (1 + eta^-2) / 2)), the per-angle cosine factor.
double kappa_cosine_fine(double theta, double eta);
// (1 + 2 eta^2/(1 + eta^2) cos^2)^(-1/2).
double kappa_sine(double theta, double eta);

enum class DistanceCase { Contraction, Fixed06, NotApplicable };
std::string to_string(DistanceCase c);

struct DistanceKappa {
  DistanceCase which = DistanceCase::NotApplicable;
  double kappa = 0;
  double extra_term = 0;
};

// Case split of the one-step distance bound; needs theta < pi/8.
DistanceKappa kappa_distance(const PlanarState& s);

// max(0.6, (1 + |beta_0|^2/sigma^2)^(-1/2), sqrt(1 - 0.8 eta^2/(1 + eta^2))).
double corollary1_kappa(double beta0_norm, double sigma, double eta);

// kappa^T err0 + T kappa^T |b*| eta^2/(1 + eta^2).
double corollary1_envelope(double kappa, int T, double err0, double beta_star_norm, double eta);

// The per-iterate view the checker needs; both trajectory kinds convert to it.
struct TrajectoryPoint {
  int iter = 0;
  double cos_theta = 1;
  double sin_theta = 0;
  double l2_error = 0;
  double norm = 0;
  Variant variant = Variant::EM;
};

std::vector<TrajectoryPoint> to_points(const std::vector<PopulationRecord>& records);
std::vector<TrajectoryPoint> to_points(const std::vector<FiniteRecord>& records);

enum class CheckMode { Population, Finite };

struct CheckOptions {
  CheckMode mode = CheckMode::Population;
  double population_slack = 1e-6;
  // Finite mode: fluctuation scale, dimension and the multiplier on eps_f.
  double eps_f = 0;
  long d = 1;
  double finite_c = 10.0;
  // SNR at and above which the high-SNR distance bound is used.
  double high_snr_eta = 4.0;
};

std::vector<BoundReport> check_trajectory(const std::vector<TrajectoryPoint>& points, double beta_star_norm,
                                          double sigma, const CheckOptions& opt);

struct ReportSummary {
  int applicable = 0;
  int failed = 0;
  double worst_margin = 0;
};
ReportSummary summarize(const std::vector<BoundReport>& reports, TheoremId id);

// Largest C with lhs < kappa (1 - 10 eps_f) cos - C max(eps_f/sqrt(d), eps_f^2) among
// the finite cosine rows (Easy-EM rows use eps_f/sqrt(d) alone); 0 when none bind.
double fitted_cosine_constant(const std::vector<BoundReport>& reports, double eps_f, long d);

}  // namespace mlrem
