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

#include "mlrem/trajectory_io.hpp"

#include "mlrem/errors.hpp"

namespace mlrem {

namespace {

const std::vector<std::string> kPopulationHeader = {"iter",      "b1",       "b1_star", "b2_star", "cos_theta",
                                                    "sin_theta", "l2_error", "S",       "R"};
const std::vector<std::string> kFiniteHeader = {"iter",     "variant", "cos_theta",   "sin_theta", "l2_error",
                                                "norm",     "cond_number", "batch_start", "batch_end"};
const std::vector<std::string> kBoundsHeader = {"run_id", "iter",   "theorem_id", "applicable",
                                                "lhs",    "rhs",    "margin",     "pass"};

std::string fd(double x) { return format_double(x); }

}  // namespace

CsvTable population_table(const std::vector<PopulationRecord>& records) {
  CsvTable t;
  t.header = kPopulationHeader;
  for (const auto& r : records)
    t.rows.push_back({std::to_string(r.iter), fd(r.b1), fd(r.b1_star), fd(r.b2_star), fd(r.cos_theta),
                      fd(r.sin_theta), fd(r.l2_error), fd(r.S), fd(r.R)});
  return t;
}

std::vector<PopulationRecord> population_records(const CsvTable& t) {
  std::vector<PopulationRecord> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    PopulationRecord r;
    r.iter = static_cast<int>(t.integer(i, "iter"));
    r.b1 = t.number(i, "b1");
    r.b1_star = t.number(i, "b1_star");
    r.b2_star = t.number(i, "b2_star");
    r.cos_theta = t.number(i, "cos_theta");
    r.sin_theta = t.number(i, "sin_theta");
    r.l2_error = t.number(i, "l2_error");
    r.S = t.number(i, "S");
    r.R = t.number(i, "R");
    out.push_back(r);
  }
  return out;
}

CsvTable finite_table(const std::vector<FiniteRecord>& records) {
  CsvTable t;
  t.header = kFiniteHeader;
  for (const auto& r : records)
    t.rows.push_back({std::to_string(r.iter), to_string(r.variant_used), fd(r.cos_theta), fd(r.sin_theta),
                      fd(r.l2_error), fd(r.norm), fd(r.cond_number), std::to_string(r.batch_start),
                      std::to_string(r.batch_end)});
  return t;
}

std::vector<FiniteRecord> finite_records(const CsvTable& t) {
  std::vector<FiniteRecord> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    FiniteRecord r;
    r.iter = static_cast<int>(t.integer(i, "iter"));
    r.variant_used = parse_variant(t.at(i, "variant"));
    r.cos_theta = t.number(i, "cos_theta");
    r.sin_theta = t.number(i, "sin_theta");
    r.l2_error = t.number(i, "l2_error");
    r.norm = t.number(i, "norm");
    r.cond_number = t.number(i, "cond_number");
    r.batch_start = t.integer(i, "batch_start");
    r.batch_end = t.integer(i, "batch_end");
    out.push_back(r);
  }
  return out;
}

bool is_population_table(const CsvTable& t) { return t.header == kPopulationHeader; }
bool is_finite_table(const CsvTable& t) { return t.header == kFiniteHeader; }

CsvTable bounds_table(const std::vector<BoundReport>& reports, const std::string& run_id) {
  CsvTable t;
  t.header = kBoundsHeader;
  for (const auto& r : reports)
    t.rows.push_back({run_id, std::to_string(r.iter), to_string(r.theorem_id), r.applicable ? "1" : "0", fd(r.lhs),
                      fd(r.rhs), fd(r.margin), r.pass ? "1" : "0"});
  return t;
}

std::vector<BoundReport> bound_reports(const CsvTable& t) {
  std::vector<BoundReport> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    BoundReport r;
    r.iter = static_cast<int>(t.integer(i, "iter"));
    r.theorem_id = parse_theorem_id(t.at(i, "theorem_id"));
    r.applicable = t.integer(i, "applicable") != 0;
    r.lhs = t.number(i, "lhs");
    r.rhs = t.number(i, "rhs");
    r.margin = t.number(i, "margin");
    r.pass = t.integer(i, "pass") != 0;
    out.push_back(r);
  }
  return out;
}

CsvTable dataset_table(const Dataset<double>& ds, bool emit_labels) {
  CsvTable t;
  t.header = {"i", "y"};
  for (Eigen::Index j = 0; j < ds.d(); ++j) t.header.push_back("x_" + std::to_string(j));
  if (emit_labels) t.header.push_back("z");
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    std::vector<std::string> row = {std::to_string(i), fd(ds.ys()(i))};
    for (Eigen::Index j = 0; j < ds.d(); ++j) row.push_back(fd(ds.xs()(i, j)));
    if (emit_labels) row.push_back(fd(LatentAccess::labels(ds)(i)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace mlrem
