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

// Freezes Monte-Carlo oracle values into tests/fixtures. Rerun only when the
// oracle protocol changes; tests read the CSVs, never this program.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include "mlrem/csv.hpp"
#include "mlrem/oracle.hpp"
#include "mlrem/population.hpp"

using namespace mlrem;

namespace {

struct Writer {
  CsvTable cases;
  CsvTable states;
  Writer() {
    cases.header = {"case_id", "quantity", "mean", "std_error", "n_draws", "seed"};
    states.header = {"case_id", "b1", "b1_star", "b2_star", "sigma"};
  }
  void state(int id, const PlanarState& s) {
    states.rows.push_back({std::to_string(id), format_double(s.b1), format_double(s.b1_star),
                           format_double(s.b2_star), format_double(s.sigma)});
  }
  void value(int id, const std::string& q, const McEstimate& e) {
    cases.rows.push_back({std::to_string(id), q, format_double(e.mean), format_double(e.std_error),
                          std::to_string(e.n_draws), std::to_string(e.seed)});
  }
};

// d = 2 embedding: beta = b1 e1, beta* = b1* e1 + b2* e2.
Eigen::VectorXd beta_of(const PlanarState& s) { return Eigen::Vector2d(s.b1, 0.0); }
GroundTruth<double> truth_of(const PlanarState& s) {
  return GroundTruth<double>(Eigen::Vector2d(s.b1_star, s.b2_star), s.sigma);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generate frozen Monte-Carlo oracle fixtures"};
  std::string out = "tests/fixtures";
  long long draws = 10000000;
  int ncases = 50;
  std::uint64_t root = 20261019;
  app.add_option("--out", out, "fixture directory");
  app.add_option("--draws", draws, "draws per estimate");
  app.add_option("--cases", ncases, "random cross-validation cases");
  app.add_option("--seed", root, "root seed");
  CLI11_PARSE(app, argc, argv);

  Writer w;
  std::mt19937_64 rng(root);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto seed_for = [&](int id, int k) { return derive_seed(root, static_cast<std::uint64_t>(id) * 16 + k); };

  for (int id = 0; id < ncases; ++id) {
    PlanarState s;
    if (id == 0) {
      s = PlanarState::make(1.0, 0.6, 0.8, 1.0);
    } else {
      const double th = U(rng) * std::numbers::pi / 2;
      const double sigma = std::exp(std::log(0.2) + U(rng) * std::log(25.0));
      const double b1 = std::exp(std::log(0.1) + U(rng) * std::log(30.0));
      const double sign = U(rng) < 0.2 ? -1.0 : 1.0;
      s = PlanarState::make(b1, sign * std::cos(th), std::sin(th), sigma);
    }
    w.state(id, s);
    const McPopulationStep p = mc_population_step(s, draws, seed_for(id, 0));
    w.value(id, "b1_prime", p.b1_prime);
    w.value(id, "b2_prime", p.b2_prime);
    const McSR sr = mc_S_R(s, draws, seed_for(id, 1));
    w.value(id, "S", sr.S);
    w.value(id, "R", sr.R);
    std::fprintf(stderr, "case %d done\n", id);
  }

  const QuadratureSpec q = QuadratureSpec::make(100);
  {
    const PlanarState s = PlanarState::make(1.0, 1.0, 0.0, 0.5);  // beta = beta*
    w.state(100, s);
    w.value(100, "b1_prime", mc_population_step(s, draws, seed_for(100, 0)).b1_prime);
  }
  {
    const PlanarState s = PlanarState::make(1.0, 0.0, 1.0, 1.0);  // beta orthogonal to beta*
    w.state(101, s);
    w.value(101, "b2_prime", mc_population_step(s, draws, seed_for(101, 0)).b2_prime);
  }
  {
    // The orthogonal fixed point E(v); the oracle must return b1' = b1 there.
    const double E = find_fixed_point_E(0.0, 1.0, 1.0, q, 1e-12);
    const PlanarState s = PlanarState::make(E, 0.0, 1.0, 1.0);
    w.state(102, s);
    w.value(102, "b1_prime", mc_population_step(s, draws, seed_for(102, 0)).b1_prime);
  }
  {
    // Hessian form along beta*: the orthogonal saddle for eta in {0.5, 1, 2}, then generic points.
    int id = 110;
    for (double eta : {0.5, 1.0, 2.0}) {
      const double sigma = 1.0 / eta;
      const double E = find_fixed_point_E(0.0, 1.0, sigma, q, 1e-12);
      const PlanarState s = PlanarState::make(E, 0.0, 1.0, sigma);
      w.state(id, s);
      w.value(id, "hessian_quadform", mc_hessian_quadform(beta_of(s), truth_of(s), draws, seed_for(id, 0)));
      ++id;
    }
    for (const PlanarState& s : {PlanarState::make(0.7, 0.8, 0.6, 0.8), PlanarState::make(1.3, 0.3, 0.95, 0.4)}) {
      w.state(id, s);
      w.value(id, "hessian_quadform", mc_hessian_quadform(beta_of(s), truth_of(s), draws, seed_for(id, 0)));
      ++id;
    }
  }
  {
    // Log-likelihood and its gradient at beta* and at a generic point.
    int id = 120;
    for (const PlanarState& s : {PlanarState::make(1.0, 1.0, 0.0, 0.7), PlanarState::make(0.6, 0.5, 0.866, 0.7)}) {
      w.state(id, s);
      const McVectorEstimate g = mc_loglik_grad(beta_of(s), truth_of(s), draws, seed_for(id, 0));
      for (int j = 0; j < 2; ++j)
        w.value(id, "grad_" + std::to_string(j), McEstimate{g.mean(j), g.std_error(j), g.n_draws, g.seed});
      w.value(id, "loglik", mc_loglik(beta_of(s), truth_of(s), draws, seed_for(id, 1)));
      ++id;
    }
  }

  write_file_atomic(out + "/oracle_cases.csv", to_csv(w.cases));
  write_file_atomic(out + "/oracle_states.csv", to_csv(w.states));
  std::fprintf(stderr, "wrote %zu oracle values\n", w.cases.rows.size());
  return 0;
}
