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

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlrem/csv.hpp"
#include "mlrem/diagnostics.hpp"
#include "mlrem/finite.hpp"
#include "mlrem/population.hpp"

namespace mlrem {

inline constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

// One run. JSON keys match the long flag names with '-' replaced by '_'.
struct RunConfig {
  long d = 10;
  double eta = 2.0;
  double beta_norm = 1.0;
  double sigma = kUnset;  // when set, wins over eta
  long long n = 100000;
  int T = 20;
  std::string variant = "em";
  bool population = false;
  int quad_order = 100;
  std::string quad_rule = "panel";
  std::uint64_t seed = 1;
  double tol = 1e-8;
  int max_iters = 1000;
  bool splitting = true;
  double init_scale = kUnset;  // defaults to beta_norm
  double switch_threshold = kUnset;
  bool dump_data = false;
  bool emit_labels = false;

  double effective_sigma() const;
  double effective_eta() const;
  GroundTruth<double> truth() const;
  void validate() const;
};

nlohmann::json to_json(const RunConfig& c);
// Overwrites only the keys present in j.
void apply_json(RunConfig& c, const nlohmann::json& j);

struct RunResult {
  bool population = false;
  PopulationRun pop;
  FiniteRun fin;
  std::vector<BoundReport> bounds;
  CsvTable trajectory;
  double final_error = 0;
  double eps_f = 0;
};

RunResult run_single(const RunConfig& cfg);

// trajectory.csv, bounds.csv, config.json (and dataset.csv on request).
void write_run_outputs(const RunConfig& cfg, const RunResult& res, const std::string& dir);

struct LandscapeResult {
  CsvTable fixed_points;  // label, coord_bstar, coord_v, residual, hessian_quadform, loglik
  CsvTable loglik_grid;   // coord_bstar, coord_v, loglik
  double E = 0;
};

// Plane spanned by beta* = beta_norm e_1 and v = e_2.
LandscapeResult run_landscape(const RunConfig& cfg, int grid_points);

struct SweepConfig {
  RunConfig base;
  std::vector<long> d;
  std::vector<double> eta;
  std::vector<long long> n;
  std::vector<int> T;
  std::vector<std::string> variant;
  int seeds_per_cell = 5;
  double error_threshold = kUnset;  // defaults to 0.05 beta_norm
  int jobs = 1;

  void validate() const;
  std::size_t cells() const;
  RunConfig cell_config(std::size_t cell) const;
  std::uint64_t run_seed(std::size_t cell, int s) const;
};

nlohmann::json to_json(const SweepConfig& c);
void apply_json(SweepConfig& c, const nlohmann::json& j);

struct SweepResult {
  CsvTable summary;
  std::vector<CsvTable> cell_tables;
  std::size_t failed_cells = 0;
};

SweepResult run_sweep(const SweepConfig& cfg);

}  // namespace mlrem
