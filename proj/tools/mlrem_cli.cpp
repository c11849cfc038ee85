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

// mlrem command-line harness: run, landscape, sweep, check.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "mlrem/errors.hpp"
#include "mlrem/experiment.hpp"
#include "mlrem/trajectory_io.hpp"

namespace fs = std::filesystem;
using namespace mlrem;

namespace {

// Flags override config-file values, which override defaults. Each flag
// writes into a staging value and is applied only if it was given.
template <typename Cfg>
class Binder {
 public:
  explicit Binder(CLI::App* sub) : sub_(sub) {}

  template <typename T>
  CLI::Option* option(const std::string& name, const std::string& desc, std::function<void(Cfg&, const T&)> set) {
    auto val = std::make_shared<T>();
    CLI::Option* o = sub_->add_option(name, *val, desc);
    appliers_.push_back([o, val, set](Cfg& c) {
      if (o->count()) set(c, *val);
    });
    return o;
  }

  CLI::Option* flag(const std::string& name, const std::string& desc, std::function<void(Cfg&)> set) {
    CLI::Option* o = sub_->add_flag(name, desc);
    appliers_.push_back([o, set](Cfg& c) {
      if (o->count()) set(c);
    });
    return o;
  }

  void apply(Cfg& c) const {
    for (const auto& a : appliers_) a(c);
  }

 private:
  CLI::App* sub_;
  std::vector<std::function<void(Cfg&)>> appliers_;
};

// Flags shared by every subcommand that builds a RunConfig; `get` picks it out of Cfg.
template <typename Cfg>
void bind_run_flags(Binder<Cfg>& b, std::function<RunConfig&(Cfg&)> get, bool scalar_grid) {
  if (scalar_grid) {
    b.template option<long>("--d", "dimension", [get](Cfg& c, const long& v) { get(c).d = v; });
    b.template option<double>("--eta", "SNR |beta*|/sigma", [get](Cfg& c, const double& v) { get(c).eta = v; });
    b.template option<long long>("--n", "total samples", [get](Cfg& c, const long long& v) { get(c).n = v; });
    b.template option<int>("--T", "iterations", [get](Cfg& c, const int& v) { get(c).T = v; });
    b.template option<std::string>("--variant", "em | easyem | twophase",
                                   [get](Cfg& c, const std::string& v) { get(c).variant = v; })
        ->check(CLI::IsMember({"em", "easyem", "twophase"}));
  }
  b.template option<double>("--beta-norm", "|beta*|", [get](Cfg& c, const double& v) { get(c).beta_norm = v; });
  b.template option<double>("--sigma", "noise std; overrides --eta", [get](Cfg& c, const double& v) { get(c).sigma = v; });
  b.flag("--population", "use the exact population operator", [get](Cfg& c) { get(c).population = true; });
  b.template option<int>("--quad-order", "quadrature order", [get](Cfg& c, const int& v) { get(c).quad_order = v; });
  b.template option<std::string>("--quad-rule", "panel | gh", [get](Cfg& c, const std::string& v) { get(c).quad_rule = v; })
      ->check(CLI::IsMember({"panel", "gh"}));
  b.template option<std::uint64_t>("--seed", "root seed", [get](Cfg& c, const std::uint64_t& v) { get(c).seed = v; });
  b.template option<double>("--tol", "population stopping tolerance on the l2 error",
                            [get](Cfg& c, const double& v) { get(c).tol = v; });
  b.template option<int>("--max-iters", "population iteration cap", [get](Cfg& c, const int& v) { get(c).max_iters = v; });
  b.template option<double>("--init-scale", "norm of the random initial vector (default |beta*|)",
                            [get](Cfg& c, const double& v) { get(c).init_scale = v; });
  b.template option<double>("--switch-threshold", "twophase switch cosine (default cos(eps_f))",
                            [get](Cfg& c, const double& v) { get(c).switch_threshold = v; });
  b.flag("--no-splitting", "reuse all n samples every iteration (practical mode, no theorem checks)",
         [get](Cfg& c) { get(c).splitting = false; });
  b.flag("--dump-data", "write dataset.csv", [get](Cfg& c) { get(c).dump_data = true; });
  b.flag("--emit-labels", "add the latent label column to dataset.csv", [get](Cfg& c) { get(c).emit_labels = true; });
}

nlohmann::json load_json(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("cannot parse " + path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EM and Easy-EM for two-component mixed linear regression"};
  app.require_subcommand(1);

  std::string out_dir = "out";
  std::string config_path;
  int jobs = 1;
  int grid = 21;
  std::string trajectory_path, run_id = "run";

  // run
  CLI::App* run = app.add_subcommand("run", "one population or finite-sample trajectory");
  Binder<RunConfig> run_b(run);
  bind_run_flags<RunConfig>(run_b, [](RunConfig& c) -> RunConfig& { return c; }, true);
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--config", config_path, "JSON config");
  run->add_option("--jobs", jobs, "accepted for symmetry with sweep");

  // landscape
  CLI::App* land = app.add_subcommand("landscape", "fixed points of the population operator in one plane");
  Binder<RunConfig> land_b(land);
  bind_run_flags<RunConfig>(land_b, [](RunConfig& c) -> RunConfig& { return c; }, true);
  land->add_option("--out", out_dir, "output directory");
  land->add_option("--config", config_path, "JSON config");
  land->add_option("--grid", grid, "log-likelihood grid points per axis");

  // sweep
  CLI::App* sweep = app.add_subcommand("sweep", "grid over (d, eta, n, T, variant) with several seeds per cell");
  Binder<SweepConfig> sw_b(sweep);
  bind_run_flags<SweepConfig>(sw_b, [](SweepConfig& c) -> RunConfig& { return c.base; }, false);
  sw_b.option<std::vector<long>>("--d", "dimensions", [](SweepConfig& c, const std::vector<long>& v) { c.d = v; });
  sw_b.option<std::vector<double>>("--eta", "SNR values", [](SweepConfig& c, const std::vector<double>& v) { c.eta = v; });
  sw_b.option<std::vector<long long>>("--n", "sample sizes", [](SweepConfig& c, const std::vector<long long>& v) { c.n = v; });
  sw_b.option<std::vector<int>>("--T", "iteration counts", [](SweepConfig& c, const std::vector<int>& v) { c.T = v; });
  sw_b.option<std::vector<std::string>>("--variant", "variants",
                                        [](SweepConfig& c, const std::vector<std::string>& v) { c.variant = v; });
  sw_b.option<int>("--seeds-per-cell", "runs per cell", [](SweepConfig& c, const int& v) { c.seeds_per_cell = v; });
  sw_b.option<double>("--error-threshold", "error level for the iteration count (default 0.05 |beta*|)",
                      [](SweepConfig& c, const double& v) { c.error_threshold = v; });
  sw_b.option<int>("--jobs", "worker threads", [](SweepConfig& c, const int& v) { c.jobs = v; });
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--config", config_path, "JSON config");

  // check
  CLI::App* check = app.add_subcommand("check", "recompute bound reports for an existing trajectory CSV");
  Binder<RunConfig> chk_b(check);
  bind_run_flags<RunConfig>(chk_b, [](RunConfig& c) -> RunConfig& { return c; }, true);
  check->add_option("--trajectory", trajectory_path, "trajectory.csv to check")->required();
  check->add_option("--config", config_path, "config.json of the run (flags override it)");
  check->add_option("--out", out_dir, "output directory (default: next to the trajectory)");
  check->add_option("--run-id", run_id, "run_id column value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (*run || *land || *check) {
      RunConfig cfg;
      if (config_path.empty() && *check) {
        // A run directory carries its own config.json; use it unless told otherwise.
        const fs::path sibling = fs::path(trajectory_path).parent_path() / "config.json";
        if (fs::exists(sibling)) config_path = sibling.string();
      }
      if (!config_path.empty()) apply_json(cfg, load_json(config_path));
      if (*run) run_b.apply(cfg);
      if (*land) land_b.apply(cfg);
      if (*check) chk_b.apply(cfg);

      if (*run) {
        const RunResult res = run_single(cfg);
        write_run_outputs(cfg, res, out_dir);
        int applicable = 0, failed = 0;
        for (const auto& b : res.bounds)
          if (b.applicable) {
            ++applicable;
            if (!b.pass) ++failed;
          }
        std::printf("final_error=%s iterations=%zu bounds_applicable=%d bounds_failed=%d\n",
                    format_double(res.final_error).c_str(), res.trajectory.rows.size() - 1, applicable, failed);
        return 0;
      }
      if (*land) {
        cfg.validate();
        const LandscapeResult lr = run_landscape(cfg, grid);
        const fs::path base(out_dir);
        write_file_atomic((base / "fixed_points.csv").string(), to_csv(lr.fixed_points));
        write_file_atomic((base / "loglik_grid.csv").string(), to_csv(lr.loglik_grid));
        write_file_atomic((base / "config.json").string(), to_json(cfg).dump(2) + "\n");
        std::printf("E=%s\n", format_double(lr.E).c_str());
        return 0;
      }
      // check
      const CsvTable t = read_csv(trajectory_path);
      std::vector<BoundReport> reports;
      const double sigma = cfg.effective_sigma();
      if (is_population_table(t)) {
        CheckOptions opt;
        reports = check_trajectory(to_points(population_records(t)), cfg.beta_norm, sigma, opt);
      } else if (is_finite_table(t)) {
        CheckOptions opt;
        opt.mode = CheckMode::Finite;
        opt.eps_f = fluctuation_scale(cfg.d, cfg.n, cfg.T);
        opt.d = cfg.d;
        reports = check_trajectory(to_points(finite_records(t)), cfg.beta_norm, sigma, opt);
      } else {
        throw DomainError("unrecognized trajectory header in " + trajectory_path);
      }
      fs::path dir = check->get_option("--out")->count() ? fs::path(out_dir) : fs::path(trajectory_path).parent_path();
      write_file_atomic((dir / "bounds.csv").string(), to_csv(bounds_table(reports, run_id)));
      int applicable = 0, failed = 0;
      for (const auto& b : reports)
        if (b.applicable) {
          ++applicable;
          if (!b.pass) ++failed;
        }
      std::printf("bounds_applicable=%d bounds_failed=%d\n", applicable, failed);
      return 0;
    }

    SweepConfig sc;
    if (!config_path.empty()) apply_json(sc, load_json(config_path));
    sw_b.apply(sc);
    const SweepResult sr = run_sweep(sc);
    const fs::path base(out_dir);
    for (std::size_t k = 0; k < sr.cell_tables.size(); ++k)
      write_file_atomic((base / "cells" / ("cell_" + std::to_string(k) + ".csv")).string(), to_csv(sr.cell_tables[k]));
    write_file_atomic((base / "summary.csv").string(), to_csv(sr.summary));
    write_file_atomic((base / "config.json").string(), to_json(sc).dump(2) + "\n");
    std::printf("cells=%zu failed_cells=%zu\n", sr.cell_tables.size(), sr.failed_cells);
    return sr.failed_cells == sr.cell_tables.size() ? 2 : 0;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
}
