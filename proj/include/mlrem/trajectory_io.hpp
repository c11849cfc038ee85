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

#include "mlrem/csv.hpp"
#include "mlrem/diagnostics.hpp"
#include "mlrem/finite.hpp"
#include "mlrem/model.hpp"
#include "mlrem/population.hpp"

namespace mlrem {

// iter, b1, b1_star, b2_star, cos_theta, sin_theta, l2_error, S, R
CsvTable population_table(const std::vector<PopulationRecord>& records);
std::vector<PopulationRecord> population_records(const CsvTable& t);

// iter, variant, cos_theta, sin_theta, l2_error, norm, cond_number, batch_start, batch_end
CsvTable finite_table(const std::vector<FiniteRecord>& records);
std::vector<FiniteRecord> finite_records(const CsvTable& t);

bool is_population_table(const CsvTable& t);
bool is_finite_table(const CsvTable& t);

// run_id, iter, theorem_id, applicable, lhs, rhs, margin, pass
CsvTable bounds_table(const std::vector<BoundReport>& reports, const std::string& run_id);
std::vector<BoundReport> bound_reports(const CsvTable& t);

// i, y, x_0..x_{d-1}, and z when emit_labels is set.
CsvTable dataset_table(const Dataset<double>& ds, bool emit_labels);

}  // namespace mlrem
