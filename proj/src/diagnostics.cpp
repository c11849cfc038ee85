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

#include "mlrem/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mlrem/errors.hpp"

namespace mlrem {

namespace {

constexpr double kPi = std::numbers::pi;

struct Named {
  TheoremId id;
  const char* name;
};

constexpr Named kNames[] = {
    {TheoremId::CosT2, "Cos-T2"},
    {TheoremId::SinT3, "Sin-T3"},
    {TheoremId::DistT4, "Dist-T4"},
    {TheoremId::Corollary1, "Corollary1"},
    {TheoremId::FiniteCosT6, "FiniteCos-T6"},
    {TheoremId::FiniteSin, "FiniteSin"},
    {TheoremId::FiniteDistLowSNR, "FiniteDist-lowSNR"},
    {TheoremId::FiniteDistHighSNR, "FiniteDist-highSNR"},
    {TheoremId::EasyEMT8, "EasyEM-T8"},
    {TheoremId::NormFloor, "NormFloor"},
    {TheoremId::Bounded, "Bounded"},
};

double theta_of(const TrajectoryPoint& p) { return std::atan2(p.sin_theta, p.cos_theta); }

// lhs >= rhs passes when margin = lhs - rhs >= -slack.
BoundReport at_least(int iter, TheoremId id, double lhs, double rhs, double slack) {
  return {iter, id, true, lhs, rhs, lhs - rhs, lhs - rhs >= -slack};
}

BoundReport at_most(int iter, TheoremId id, double lhs, double rhs, double slack) {
  return {iter, id, true, lhs, rhs, rhs - lhs, rhs - lhs >= -slack};
}

BoundReport not_applicable(int iter, TheoremId id) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {iter, id, false, nan, nan, nan, true};
}

}  // namespace

std::string to_string(TheoremId id) {
  for (const auto& n : kNames)
    if (n.id == id) return n.name;
  return "unknown";
}

TheoremId parse_theorem_id(const std::string& name) {
  for (const auto& n : kNames)
    if (name == n.name) return n.id;
  throw DomainError("unknown theorem id: " + name);
}

std::string to_string(DistanceCase c) {
  switch (c) {
    case DistanceCase::Contraction: return "contraction";
    case DistanceCase::Fixed06: return "0.6";
    case DistanceCase::NotApplicable: return "not_applicable";
  }
  return "not_applicable";
}

double kappa_cosine(double eta) {
  if (!(eta > 0)) throw DomainError("eta must be positive");
  const double e2 = eta * eta;
  return std::sqrt(1.0 + e2 / (2.0 / 3.0 + e2));
}

double kappa_cosine_fine(double theta, double eta) {
  if (!(eta > 0)) throw DomainError("eta must be positive");
  const double c = std::cos(theta), s = std::sin(theta);
  return std::sqrt(1.0 + s * s / (c * c + 0.5 * (1.0 + 1.0 / (eta * eta))));
}

double kappa_sine(double theta, double eta) {
  if (!(eta > 0)) throw DomainError("eta must be positive");
  const double e2 = eta * eta, c = std::cos(theta);
  return 1.0 / std::sqrt(1.0 + 2.0 * e2 / (1.0 + e2) * c * c);
}

DistanceKappa kappa_distance(const PlanarState& s) {
  DistanceKappa out;
  const double b1s = std::abs(s.b1_star);
  const double theta = std::atan2(s.b2_star, b1s);
  if (!(theta < kPi / 8)) return out;
  const double s2 = s.sigma * s.sigma;
  const double eta = s.eta();
  const double lifted = s.sigma2_sq / s2 * s.b1;
  if (s.b2_star < s.sigma || lifted < b1s) {
    const double m = std::min(lifted, b1s);
    out.which = DistanceCase::Contraction;
    out.kappa = 1.0 / std::sqrt(1.0 + m * m / s.sigma2_sq);
    const double sn = std::sin(theta);
    out.extra_term = out.kappa * 16.0 * sn * sn * sn * s.beta_star_norm() * eta * eta / (1.0 + eta * eta);
  } else {
    out.which = DistanceCase::Fixed06;
    out.kappa = 0.6;
    out.extra_term = 0.0;
  }
  return out;
}

double corollary1_kappa(double beta0_norm, double sigma, double eta) {
  const double e2 = eta * eta;
  return std::max({0.6, std::sqrt(1.0 / (1.0 + beta0_norm * beta0_norm / (sigma * sigma))),
                   std::sqrt(1.0 - 0.8 * e2 / (1.0 + e2))});
}

double corollary1_envelope(double kappa, int T, double err0, double beta_star_norm, double eta) {
  const double kT = std::pow(kappa, T);
  return kT * err0 + T * kT * beta_star_norm * eta * eta / (1.0 + eta * eta);
}

std::vector<TrajectoryPoint> to_points(const std::vector<PopulationRecord>& records) {
  std::vector<TrajectoryPoint> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back({r.iter, r.cos_theta, r.sin_theta, r.l2_error, r.b1, Variant::EM});
  return out;
}

std::vector<TrajectoryPoint> to_points(const std::vector<FiniteRecord>& records) {
  std::vector<TrajectoryPoint> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back({r.iter, r.cos_theta, r.sin_theta, r.l2_error, r.norm, r.variant_used});
  return out;
}

std::vector<BoundReport> check_trajectory(const std::vector<TrajectoryPoint>& pts, double beta_star_norm,
                                          double sigma, const CheckOptions& opt) {
  if (!(beta_star_norm > 0) || !(sigma > 0)) throw DomainError("check_trajectory: invalid truth");
  std::vector<BoundReport> out;
  const double eta = beta_star_norm / sigma;
  const double scale = std::sqrt(sigma * sigma + beta_star_norm * beta_star_norm);
  const double floor = beta_star_norm / 10.0;
  const bool finite = opt.mode == CheckMode::Finite;
  const double ef = opt.eps_f;
  const double ang_slack = finite ? opt.finite_c * ef : opt.population_slack;
  const double dist_slack = finite ? opt.finite_c * ef * scale : opt.population_slack;

  for (std::size_t k = 1; k < pts.size(); ++k) {
    const TrajectoryPoint& p = pts[k - 1];
    const TrajectoryPoint& q = pts[k];
    const int it = q.iter;
    const double th = theta_of(p);
    const bool floor_ok = p.norm >= floor;

    if (!finite) {
      if (th >= kPi / 3 && th < kPi / 2 && p.cos_theta > 0)
        out.push_back(at_least(it, TheoremId::CosT2, q.cos_theta, kappa_cosine(eta) * p.cos_theta, ang_slack));
      else
        out.push_back(not_applicable(it, TheoremId::CosT2));

      if (th < kPi / 2 && p.cos_theta > 0)
        out.push_back(at_most(it, TheoremId::SinT3, q.sin_theta, kappa_sine(th, eta) * p.sin_theta, ang_slack));
      else
        out.push_back(not_applicable(it, TheoremId::SinT3));

      const PlanarState st =
          PlanarState::make(p.norm, beta_star_norm * p.cos_theta, beta_star_norm * p.sin_theta, sigma);
      const DistanceKappa dk = kappa_distance(st);
      if (dk.which == DistanceCase::NotApplicable || !(p.norm > 0))
        out.push_back(not_applicable(it, TheoremId::DistT4));
      else
        out.push_back(at_most(it, TheoremId::DistT4, q.l2_error, dk.kappa * p.l2_error + dk.extra_term, ang_slack));
    } else {
      // The step that produced q decides which cosine bound applies.
      const TheoremId step_id = q.variant == Variant::EasyEM ? TheoremId::EasyEMT8 : TheoremId::FiniteCosT6;
      if (floor_ok && p.cos_theta > 0 && th > 0 && th < kPi / 2)
        out.push_back(at_least(it, step_id, q.cos_theta,
                               kappa_cosine_fine(th, eta) * (1.0 - 10.0 * ef) * p.cos_theta, ang_slack));
      else
        out.push_back(not_applicable(it, step_id));

      if (floor_ok && p.cos_theta > 0 && th < kPi / 2 && ef < std::min(1.0, eta * eta)) {
        const double ks = kappa_sine(th, eta);
        out.push_back(at_most(it, TheoremId::FiniteSin, q.sin_theta * q.sin_theta,
                              ks * ks * p.sin_theta * p.sin_theta, ang_slack));
      } else {
        out.push_back(not_applicable(it, TheoremId::FiniteSin));
      }
    }

    if (floor_ok)
      out.push_back(at_least(it, TheoremId::NormFloor, q.norm, floor, finite ? dist_slack : 0.0));
    else
      out.push_back(not_applicable(it, TheoremId::NormFloor));
    out.push_back(at_most(it, TheoremId::Bounded, q.norm, 3.0 * scale, finite ? dist_slack : 1e-9));
  }

  // Multi-step envelopes, anchored at the first iterate inside the angle gate.
  if (!finite) {
    std::size_t a = 0;
    while (a < pts.size() && !(theta_of(pts[a]) < kPi / 8)) ++a;
    for (std::size_t k = 1; k < pts.size(); ++k) {
      if (a >= k) {
        out.push_back(not_applicable(pts[k].iter, TheoremId::Corollary1));
        continue;
      }
      const double kap = corollary1_kappa(pts[a].norm, sigma, eta);
      const int T = static_cast<int>(k - a);
      const double rhs = corollary1_envelope(kap, T, pts[a].l2_error, beta_star_norm, eta);
      out.push_back(at_most(pts[k].iter, TheoremId::Corollary1, pts[k].l2_error, rhs, opt.population_slack));
    }
  } else {
    std::size_t a = 0;
    while (a < pts.size() && !(theta_of(pts[a]) < kPi / 70)) ++a;
    const bool high = eta >= opt.high_snr_eta;
    const TheoremId id = high ? TheoremId::FiniteDistHighSNR : TheoremId::FiniteDistLowSNR;
    for (std::size_t k = 1; k < pts.size(); ++k) {
      if (a >= k || (high && !(0.95 + ef < 1.0))) {
        out.push_back(not_applicable(pts[k].iter, id));
        continue;
      }
      const int T = static_cast<int>(k - a);
      double rhs;
      if (high) {
        rhs = std::pow(0.95 + ef, T) * pts[a].l2_error;
      } else {
        const double kap = corollary1_kappa(pts[a].norm, sigma, eta);
        rhs = corollary1_envelope(kap, T, pts[a].l2_error, beta_star_norm, eta);
      }
      out.push_back(at_most(pts[k].iter, id, pts[k].l2_error, rhs, dist_slack));
    }
  }
  return out;
}

ReportSummary summarize(const std::vector<BoundReport>& reports, TheoremId id) {
  ReportSummary s;
  bool first = true;
  for (const auto& r : reports) {
    if (r.theorem_id != id || !r.applicable) continue;
    ++s.applicable;
    if (!r.pass) ++s.failed;
    if (first || r.margin < s.worst_margin) s.worst_margin = r.margin;
    first = false;
  }
  return s;
}

double fitted_cosine_constant(const std::vector<BoundReport>& reports, double eps_f, long d) {
  double c = 0.0;
  const double rd = std::sqrt(static_cast<double>(d));
  for (const auto& r : reports) {
    if (!r.applicable) continue;
    double unit;
    if (r.theorem_id == TheoremId::FiniteCosT6)
      unit = std::max(eps_f / rd, eps_f * eps_f);
    else if (r.theorem_id == TheoremId::EasyEMT8)
      unit = eps_f / rd;
    else
      continue;
    if (unit > 0 && r.margin < 0) c = std::max(c, -r.margin / unit);
  }
  return c;
}

}  // namespace mlrem
