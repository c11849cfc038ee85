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

#include <Eigen/Dense>
#include <map>
#include <string>

#include "mlrem/csv.hpp"
#include "mlrem/geometry.hpp"
#include "mlrem/model.hpp"

namespace mlrem::test_support {

struct OracleValue {
  double mean = 0;
  double std_error = 0;
};

struct OracleFixtures {
  std::map<int, PlanarState> states;
  std::map<std::pair<int, std::string>, OracleValue> values;

  const OracleValue& value(int id, const std::string& q) const { return values.at({id, q}); }
  bool has(int id, const std::string& q) const { return values.count({id, q}) > 0; }

  // The d = 2 embedding the generator used: beta = b1 e1, beta* = (b1*, b2*).
  Eigen::VectorXd beta(int id) const { return Eigen::Vector2d(states.at(id).b1, 0.0); }
  GroundTruth<double> truth(int id) const {
    const auto& s = states.at(id);
    return GroundTruth<double>(Eigen::Vector2d(s.b1_star, s.b2_star), s.sigma);
  }
};

inline const OracleFixtures& oracle_fixtures() {
  static const OracleFixtures f = [] {
    OracleFixtures out;
    const std::string dir = MLREM_FIXTURE_DIR;
    const auto st = read_csv(dir + "/oracle_states.csv");
    for (std::size_t r = 0; r < st.rows.size(); ++r)
      out.states[static_cast<int>(st.integer(r, "case_id"))] =
          PlanarState::make(st.number(r, "b1"), st.number(r, "b1_star"), st.number(r, "b2_star"), st.number(r, "sigma"));
    const auto cs = read_csv(dir + "/oracle_cases.csv");
    for (std::size_t r = 0; r < cs.rows.size(); ++r)
      out.values[{static_cast<int>(cs.integer(r, "case_id")), cs.at(r, "quantity")}] = {cs.number(r, "mean"),
                                                                                         cs.number(r, "std_error")};
    return out;
  }();
  return f;
}

}  // namespace mlrem::test_support
