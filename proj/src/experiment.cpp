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

#include "mlrem/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <thread>

#include "mlrem/errors.hpp"
#include "mlrem/trajectory_io.hpp"

namespace mlrem {

double RunConfig::effective_sigma() const { return std::isnan(sigma) ? beta_norm / eta : sigma; }
double RunConfig::effective_eta() const { return beta_norm / effective_sigma(); }

GroundTruth<double> RunConfig::truth() const {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  b(0) = beta_norm;
  return GroundTruth<double>(std::move(b), effective_sigma());
}

void RunConfig::validate() const {
  if (d < 1) throw DomainError("--d must be >= 1");
  if (!(beta_norm > 0)) throw DomainError("--beta-norm must be positive");
  if (std::isnan(sigma) && !(eta > 0)) throw DomainError("--eta must be positive");
  if (!std::isnan(sigma) && !(sigma > 0)) throw DomainError("--sigma must be positive");
  if (!(tol > 0)) throw DomainError("--tol must be positive");
  if (max_iters < 0) throw DomainError("--max-iters must be >= 0");
  if (quad_order < 2) throw DomainError("--quad-order must be >= 2");
  parse_quad_rule(quad_rule);
  if (!std::isnan(init_scale) && !(init_scale > 0)) throw DomainError("--init-scale must be positive");
  if (!population) {
    EmConfig ec;
    ec.variant = parse_variant(variant);
    ec.n = n;
    ec.T = T;
    ec.splitting = splitting;
    ec.switch_threshold = switch_threshold;
    ec.validate(d);
  }
}

namespace {

nlohmann::json num_or_null(double x) { return std::isnan(x) ? nlohmann::json(nullptr) : nlohmann::json(x); }

double get_num(const nlohmann::json& v) { return v.is_null() ? kUnset : v.get<double>(); }

template <typename T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void read_num(const nlohmann::json& j, const char* key, double& out) {
  if (j.contains(key)) out = get_num(j.at(key));
}

}  // namespace

nlohmann::json to_json(const RunConfig& c) {
  return {{"d", c.d},
          {"eta", c.effective_eta()},
          {"beta_norm", c.beta_norm},
          // Only an explicit sigma is echoed, so a reloaded config keeps eta in charge.
          {"sigma", num_or_null(c.sigma)},
          {"effective_sigma", c.effective_sigma()},
          {"n", c.n},
          {"T", c.T},
          {"variant", c.variant},
          {"population", c.population},
          {"quad_order", c.quad_order},
          {"quad_rule", c.quad_rule},
          {"seed", c.seed},
          {"tol", c.tol},
          {"max_iters", c.max_iters},
          {"splitting", c.splitting},
          {"init_scale", num_or_null(c.init_scale)},
          {"switch_threshold", num_or_null(c.switch_threshold)},
          {"dump_data", c.dump_data},
          {"emit_labels", c.emit_labels}};
}

void apply_json(RunConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw DomainError("config must be a JSON object");
  auto scalar = [&](const char* key) { return j.contains(key) && !j.at(key).is_array(); };
  try {
    if (scalar("d")) c.d = j.at("d").get<long>();
    if (scalar("eta")) c.eta = j.at("eta").get<double>();
    read_key(j, "beta_norm", c.beta_norm);
    read_num(j, "sigma", c.sigma);
    if (scalar("n")) c.n = j.at("n").get<long long>();
    if (scalar("T")) c.T = j.at("T").get<int>();
    if (scalar("variant")) c.variant = j.at("variant").get<std::string>();
    read_key(j, "population", c.population);
    read_key(j, "quad_order", c.quad_order);
    read_key(j, "quad_rule", c.quad_rule);
    read_key(j, "seed", c.seed);
    read_key(j, "tol", c.tol);
    read_key(j, "max_iters", c.max_iters);
    read_key(j, "splitting", c.splitting);
    read_num(j, "init_scale", c.init_scale);
    read_num(j, "switch_threshold", c.switch_threshold);
    read_key(j, "dump_data", c.dump_data);
    read_key(j, "emit_labels", c.emit_labels);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("bad config value: ") + e.what());
  }
}

RunResult run_single(const RunConfig& cfg) {
  cfg.validate();
  const GroundTruth<double> truth = cfg.truth();
  const double sigma = truth.sigma();
  const double scale = std::isnan(cfg.init_scale) ? cfg.beta_norm : cfg.init_scale;
  const Eigen::VectorXd beta0 = random_init<double>(cfg.d, scale, cfg.seed);
  RunResult res;
  res.population = cfg.population;
  if (cfg.population) {
    const QuadratureSpec q = QuadratureSpec::make(cfg.quad_order, parse_quad_rule(cfg.quad_rule));
    res.pop = run_population_trajectory(beta0, truth, q, cfg.max_iters, cfg.tol);
    CheckOptions opt;
    opt.mode = CheckMode::Population;
    res.bounds = check_trajectory(to_points(res.pop.records), cfg.beta_norm, sigma, opt);
    res.trajectory = population_table(res.pop.records);
    res.final_error = res.pop.records.back().l2_error;
  } else {
    EmConfig ec;
    ec.variant = parse_variant(cfg.variant);
    ec.n = cfg.n;
    ec.T = cfg.T;
    ec.splitting = cfg.splitting;
    ec.switch_threshold = cfg.switch_threshold;
    ec.seed = cfg.seed;
    res.fin = run_sample_splitting(ec, truth, beta0);
    res.eps_f = res.fin.eps_f;
    CheckOptions opt;
    opt.mode = CheckMode::Finite;
    opt.eps_f = res.eps_f;
    opt.d = cfg.d;
    // Theorem checks are meaningful only for fresh batches.
    if (cfg.splitting) res.bounds = check_trajectory(to_points(res.fin.records), cfg.beta_norm, sigma, opt);
    res.trajectory = finite_table(res.fin.records);
    res.final_error = res.fin.records.back().l2_error;
  }
  return res;
}

void write_run_outputs(const RunConfig& cfg, const RunResult& res, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path base(dir);
  write_file_atomic((base / "trajectory.csv").string(), to_csv(res.trajectory));
  write_file_atomic((base / "bounds.csv").string(), to_csv(bounds_table(res.bounds, "run")));
  write_file_atomic((base / "config.json").string(), to_json(cfg).dump(2) + "\n");
  if (cfg.dump_data && !cfg.population) {
    const Dataset<double> ds = sample_dataset(cfg.truth(), cfg.n, cfg.seed);
    write_file_atomic((base / "dataset.csv").string(), to_csv(dataset_table(ds, cfg.emit_labels)));
  }
}

LandscapeResult run_landscape(const RunConfig& cfg, int grid_points) {
  if (cfg.d < 2) throw DomainError("landscape needs --d >= 2");
  if (grid_points < 2) throw DomainError("--grid must be >= 2");
  const GroundTruth<double> truth = cfg.truth();
  const QuadratureSpec q = QuadratureSpec::make(cfg.quad_order, parse_quad_rule(cfg.quad_rule));
  Eigen::VectorXd v = Eigen::VectorXd::Zero(cfg.d);
  v(1) = 1.0;
  const double etol = std::min(cfg.tol, 1e-10);
  const auto points = planar_fixed_points(truth, v, q, etol);
  LandscapeResult out;
  out.E = points[3].point.norm();
  out.fixed_points.header = {"label", "coord_bstar", "coord_v", "residual", "hessian_quadform", "loglik"};
  for (const auto& fp : points) {
    const double res = (population_em_update(fp.point, truth, q) - fp.point).norm();
    out.fixed_points.rows.push_back({fp.label, format_double(fp.point(0)),
                                     format_double(fp.point(1)), format_double(res),
                                     format_double(hessian_quadform_along_bstar(fp.point, truth, q)),
                                     format_double(population_loglik(fp.point, truth, q))});
  }
  out.loglik_grid.header = {"coord_bstar", "coord_v", "loglik"};
  const double span = 2.0 * std::max(cfg.beta_norm, out.E);
  for (int i = 0; i < grid_points; ++i) {
    for (int j = 0; j < grid_points; ++j) {
      Eigen::VectorXd p = Eigen::VectorXd::Zero(cfg.d);
      p(0) = -span + 2.0 * span * i / (grid_points - 1);
      p(1) = -span + 2.0 * span * j / (grid_points - 1);
      out.loglik_grid.rows.push_back(
          {format_double(p(0)), format_double(p(1)), format_double(population_loglik(p, truth, q))});
    }
  }
  return out;
}

void SweepConfig::validate() const {
  if (seeds_per_cell < 1) throw DomainError("seeds_per_cell must be >= 1");
  if (jobs < 1) throw DomainError("--jobs must be >= 1");
  if (!std::isnan(error_threshold) && !(error_threshold > 0)) throw DomainError("error_threshold must be positive");
  for (std::size_t c = 0; c < cells(); ++c) cell_config(c).validate();
}

std::size_t SweepConfig::cells() const {
  auto m = [](std::size_t k) { return std::max<std::size_t>(1, k); };
  return m(d.size()) * m(eta.size()) * m(n.size()) * m(T.size()) * m(variant.size());
}

RunConfig SweepConfig::cell_config(std::size_t cell) const {
  RunConfig c = base;
  std::size_t k = cell;
  auto pick = [&](auto& vec, auto& field) {
    const std::size_t m = std::max<std::size_t>(1, vec.size());
    if (!vec.empty()) field = vec[k % m];
    k /= m;
  };
  // variant varies fastest, d slowest.
  pick(variant, c.variant);
  pick(T, c.T);
  pick(n, c.n);
  pick(eta, c.eta);
  pick(d, c.d);
  return c;
}

std::uint64_t SweepConfig::run_seed(std::size_t cell, int s) const {
  return derive_seed(derive_seed(base.seed, cell), static_cast<std::uint64_t>(s));
}

nlohmann::json to_json(const SweepConfig& c) {
  nlohmann::json j = to_json(c.base);
  j.erase("effective_sigma");  // varies per cell
  j["d"] = c.d.empty() ? nlohmann::json::array({c.base.d}) : nlohmann::json(c.d);
  j["eta"] = c.eta.empty() ? nlohmann::json::array({c.base.effective_eta()}) : nlohmann::json(c.eta);
  j["n"] = c.n.empty() ? nlohmann::json::array({c.base.n}) : nlohmann::json(c.n);
  j["T"] = c.T.empty() ? nlohmann::json::array({c.base.T}) : nlohmann::json(c.T);
  j["variant"] = c.variant.empty() ? nlohmann::json::array({c.base.variant}) : nlohmann::json(c.variant);
  j["seeds_per_cell"] = c.seeds_per_cell;
  j["error_threshold"] = num_or_null(c.error_threshold);
  j["jobs"] = c.jobs;
  return j;
}

void apply_json(SweepConfig& c, const nlohmann::json& j) {
  apply_json(c.base, j);
  auto grid = [&](const char* key, auto& vec) {
    if (!j.contains(key)) return;
    using V = typename std::decay_t<decltype(vec)>::value_type;
    const auto& v = j.at(key);
    if (v.is_array()) vec = v.get<std::vector<V>>();
    else vec = {v.get<V>()};
  };
  try {
    grid("d", c.d);
    grid("eta", c.eta);
    grid("n", c.n);
    grid("T", c.T);
    grid("variant", c.variant);
    read_key(j, "seeds_per_cell", c.seeds_per_cell);
    read_num(j, "error_threshold", c.error_threshold);
    read_key(j, "jobs", c.jobs);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("bad config value: ") + e.what());
  }
}

namespace {

struct RunMetrics {
  bool ok = false;
  std::string error;
  std::uint64_t seed = 0;
  double final_error = kUnset;
  int iters_pi3 = -1;
  int iters_pi8 = -1;
  int iters_eps = -1;
  int applicable = 0;
  int passed = 0;
};

double median(std::vector<double> v) {
  if (v.empty()) return kUnset;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

RunMetrics measure(const RunConfig& c, double eps) {
  RunMetrics m;
  m.seed = c.seed;
  try {
    const RunResult r = run_single(c);
    const auto pts = r.population ? to_points(r.pop.records) : to_points(r.fin.records);
    for (const auto& p : pts) {
      const double th = std::atan2(p.sin_theta, p.cos_theta);
      if (m.iters_pi3 < 0 && th < std::numbers::pi / 3) m.iters_pi3 = p.iter;
      if (m.iters_pi8 < 0 && th < std::numbers::pi / 8) m.iters_pi8 = p.iter;
      if (m.iters_eps < 0 && p.l2_error < eps) m.iters_eps = p.iter;
    }
    for (const auto& b : r.bounds) {
      if (!b.applicable) continue;
      ++m.applicable;
      if (b.pass) ++m.passed;
    }
    m.final_error = r.final_error;
    m.ok = true;
  } catch (const std::exception& e) {
    m.error = e.what();
  }
  return m;
}

std::string fmt_iter(int k) { return k < 0 ? "nan" : std::to_string(k); }

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const std::size_t ncell = cfg.cells();
  const std::size_t per = static_cast<std::size_t>(cfg.seeds_per_cell);
  const double eps = std::isnan(cfg.error_threshold) ? 0.05 * cfg.base.beta_norm : cfg.error_threshold;
  std::vector<RunMetrics> results(ncell * per);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < results.size(); k = next++) {
      const std::size_t cell = k / per;
      RunConfig c = cfg.cell_config(cell);
      c.seed = cfg.run_seed(cell, static_cast<int>(k % per));
      results[k] = measure(c, eps);
    }
  };
  const int nthreads = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(results.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  SweepResult out;
  out.summary.header = {"cell",         "d",         "eta",         "n",           "T",
                        "variant",      "population", "seeds",      "ok_runs",     "failed_runs",
                        "median_final_error", "median_iters_pi3", "median_iters_pi8", "median_iters_eps",
                        "reached_eps",  "bound_pass_rate", "first_error"};
  for (std::size_t cell = 0; cell < ncell; ++cell) {
    const RunConfig c = cfg.cell_config(cell);
    CsvTable t;
    t.header = {"seed_index", "seed", "status", "final_error", "iters_pi3", "iters_pi8", "iters_eps",
                "bounds_applicable", "bounds_passed"};
    std::vector<double> errs, i3, i8, ie;
    int ok = 0, failed = 0, applicable = 0, passed = 0;
    std::string first_error;
    for (std::size_t s = 0; s < per; ++s) {
      const RunMetrics& m = results[cell * per + s];
      t.rows.push_back({std::to_string(s), std::to_string(m.seed), m.ok ? "ok" : m.error,
                        format_double(m.final_error), fmt_iter(m.iters_pi3), fmt_iter(m.iters_pi8),
                        fmt_iter(m.iters_eps), std::to_string(m.applicable), std::to_string(m.passed)});
      if (!m.ok) {
        ++failed;
        if (first_error.empty()) first_error = m.error;
        continue;
      }
      ++ok;
      errs.push_back(m.final_error);
      if (m.iters_pi3 >= 0) i3.push_back(m.iters_pi3);
      if (m.iters_pi8 >= 0) i8.push_back(m.iters_pi8);
      if (m.iters_eps >= 0) ie.push_back(m.iters_eps);
      applicable += m.applicable;
      passed += m.passed;
    }
    if (ok == 0) ++out.failed_cells;
    out.summary.rows.push_back({std::to_string(cell), std::to_string(c.d), format_double(c.effective_eta()),
                                std::to_string(c.n), std::to_string(c.T), c.population ? "population" : c.variant,
                                c.population ? "1" : "0", std::to_string(per), std::to_string(ok),
                                std::to_string(failed), format_double(median(errs)), format_double(median(i3)),
                                format_double(median(i8)), format_double(median(ie)), std::to_string(ie.size()),
                                format_double(applicable ? static_cast<double>(passed) / applicable : kUnset),
                                first_error});
    out.cell_tables.push_back(std::move(t));
  }
  return out;
}

}  // namespace mlrem
