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

#include "mlrem/finite.hpp"

#include <algorithm>
#include <cmath>

namespace mlrem {

Variant parse_variant(const std::string& name) {
  if (name == "em") return Variant::EM;
  if (name == "easyem") return Variant::EasyEM;
  if (name == "twophase") return Variant::TwoPhase;
  throw DomainError("unknown variant: " + name);
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::EM: return "em";
    case Variant::EasyEM: return "easyem";
    case Variant::TwoPhase: return "twophase";
  }
  return "em";
}

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
  }
  return "skipped";
}

void EmConfig::validate(Eigen::Index d) const {
  if (T < 1) throw DomainError("T must be >= 1");
  if (n < 1) throw DomainError("n must be >= 1");
  if (splitting && n % T != 0) throw DomainError("n must be divisible by T when splitting");
  if (variant != Variant::EasyEM && batch_size() < d)
    throw DomainError("batch size n/T must be >= d for the covariance solve");
  if (!std::isnan(switch_threshold) && !(switch_threshold > -1.0 && switch_threshold <= 1.0))
    throw DomainError("switch_threshold must lie in (-1, 1]");
}

double fluctuation_scale(Eigen::Index d, Eigen::Index n, int T) {
  const double batch = static_cast<double>(n) / T;
  return std::sqrt(static_cast<double>(d) / batch * std::log(static_cast<double>(n)));
}

namespace {

FiniteRecord make_record(int iter, Variant used, const Eigen::VectorXd& beta, const Eigen::VectorXd& beta_star) {
  FiniteRecord r;
  r.iter = iter;
  r.variant_used = used;
  r.norm = beta.norm();
  r.l2_error = signed_error(beta, beta_star);
  if (r.norm > 0) {
    const Angle a = angle_metrics(beta, beta_star);
    r.cos_theta = a.cos_theta;
    r.sin_theta = a.sin_theta;
  } else {
    r.cos_theta = 0.0;
    r.sin_theta = 1.0;
  }
  return r;
}

}  // namespace

FiniteRun run_sample_splitting(const EmConfig& cfg, const GroundTruth<double>& truth, const Eigen::VectorXd& beta0,
                               const FiniteObserver& observer) {
  const Eigen::Index d = truth.d();
  cfg.validate(d);
  if (beta0.size() != d) throw DomainError("beta0 dimension mismatch");
  if (!(beta0.norm() > 0)) throw DomainError("beta0 must be nonzero");

  FiniteRun run;
  run.eps_f = fluctuation_scale(d, cfg.n, cfg.T);
  const Eigen::Index batch = cfg.batch_size();
  const double sigma = truth.sigma();

  // TwoPhase opens with Easy-EM only when the fluctuation is too large for EM.
  const bool easy_first = cfg.variant == Variant::TwoPhase && run.eps_f >= 1.0 / std::sqrt(static_cast<double>(d));
  const int max_easy = std::max(1, static_cast<int>(std::ceil(std::log2(static_cast<double>(d)))));
  const double threshold = std::isnan(cfg.switch_threshold) ? std::cos(std::min(run.eps_f, 1.0)) : cfg.switch_threshold;
  bool in_easy = cfg.variant == Variant::EasyEM || easy_first;
  if (cfg.variant == Variant::TwoPhase && !easy_first) run.switch_iter = 1;
  int easy_steps = 0;
  double prev_proxy = -2.0;

  DatasetSampler<double> sampler(truth, cfg.seed);
  Dataset<double> data = cfg.splitting ? sampler.next(batch) : sampler.next(cfg.n);

  Eigen::VectorXd beta = beta0;
  run.records.push_back(make_record(0, in_easy ? Variant::EasyEM : Variant::EM, beta, truth.beta_star()));
  if (observer && !observer(run.records.back())) {
    run.stopped_early = true;
    run.final_beta = beta;
    return run;
  }

  for (int t = 1; t <= cfg.T; ++t) {
    Eigen::Index start = 0;
    if (cfg.splitting) {
      start = static_cast<Eigen::Index>(t - 1) * batch;
      if (t > 1) data = sampler.next(batch);
    }
    const auto& X = data.xs();
    const auto& y = data.ys();
    Eigen::VectorXd next;
    double cond = std::numeric_limits<double>::quiet_NaN();
    const Variant used = in_easy ? Variant::EasyEM : Variant::EM;
    if (in_easy) {
      next = easyem_step(X, y, beta, sigma);
      ++easy_steps;
    } else {
      EmStep s = em_step(X, y, beta, sigma, cfg.max_condition);
      next = std::move(s.beta);
      cond = s.condition;
    }

    if (cfg.variant == Variant::TwoPhase && in_easy) {
      // beta* is unknown, so the switch watches the direction of consecutive iterates.
      const double nn = next.norm() * beta.norm();
      const double proxy = nn > 0 ? std::abs(next.dot(beta)) / nn : 0.0;
      const bool settled = easy_steps >= 2 && proxy >= threshold && proxy >= prev_proxy;
      prev_proxy = proxy;
      if (settled || easy_steps >= max_easy) {
        in_easy = false;
        run.switch_iter = t + 1;
      }
    }

    beta = std::move(next);
    FiniteRecord rec = make_record(t, used, beta, truth.beta_star());
    rec.cond_number = cond;
    rec.batch_start = start;
    rec.batch_end = start + (cfg.splitting ? batch : cfg.n);
    run.records.push_back(rec);
    if (observer && !observer(rec)) {
      run.stopped_early = true;
      break;
    }
  }
  run.final_beta = beta;
  return run;
}

CheckStatus norm_floor_check(const std::vector<double>& norms, double beta_star_norm) {
  if (norms.empty()) throw DomainError("norm_floor_check: empty trajectory");
  const double floor = beta_star_norm / 10.0;
  if (norms.front() < floor) return CheckStatus::Skipped;
  for (double v : norms)
    if (v < floor) return CheckStatus::Fail;
  return CheckStatus::Pass;
}

CheckStatus norm_floor_check(const std::vector<FiniteRecord>& records, double beta_star_norm) {
  std::vector<double> norms;
  norms.reserve(records.size());
  for (const auto& r : records) norms.push_back(r.norm);
  return norm_floor_check(norms, beta_star_norm);
}

}  // namespace mlrem
