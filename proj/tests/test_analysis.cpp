// Copyright 2026 The guided-es Authors
//
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "core/analysis.hpp"
#include "core/estimator.hpp"
#include "core/rng.hpp"
#include "oracles.hpp"

using ges::error_objective;
using ges::ErrorProfile;
using ges::hyperparameter_system;
using ges::Matrix;
using ges::monte_carlo_error_profile;
using ges::normalized_bias;
using ges::normalized_variance;
using ges::optimal_hyperparameters;
using ges::OptimalHyperparameters;
using ges::QuadraticForm;
using ges::regime_boundaries;
using ges::SearchConfig;
using ges::Vector;

namespace {

SearchConfig analysis_config(double alpha, double beta, int k, int n) {
  SearchConfig cfg;
  cfg.alpha = alpha;
  cfg.beta = beta;
  cfg.sigma = 0.1;
  cfg.pairs = 1;
  cfg.subspace_dim = k;
  cfg.param_dim = n;
  return cfg;
}

// Quadratic instance with the prescribed gradient at x = 0 and a nonzero
// diagonal Hessian, so the even-term cancellation path is exercised.
QuadraticForm quadratic_with_gradient(const Vector& grad,
                                      ges::RandomStream& stream) {
  QuadraticForm f;
  f.linear = grad;
  Vector diag(grad.size());
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    diag[i] = 0.5 + stream.uniform01();
  }
  f.hessian = diag.asDiagonal();
  return f;
}

}  // namespace

TEST_CASE("bias vanishes on the exact anchors") {
  CHECK(normalized_bias(1.0, 100.0, 3, 100, 0.0) == 0.0);
  CHECK(normalized_bias(1.0, 100.0, 3, 100, 0.77) == 0.0);
  CHECK(normalized_bias(0.0, 3.0, 3, 100, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("variance reduces to n+1 and k+1 on the anchors") {
  CHECK(normalized_variance(1.0, 100.0, 3, 100, 0.23) ==
        doctest::Approx(101.0).epsilon(1e-14));
  CHECK(normalized_variance(0.0, 3.0, 3, 100, 1.0) ==
        doctest::Approx(4.0).epsilon(1e-14));
  CHECK(normalized_variance(0.0, 7.0, 7, 90, 1.0) ==
        doctest::Approx(8.0).epsilon(1e-14));
}

TEST_CASE("total is exactly bias plus variance") {
  ges::RandomStream gen(1, ges::StreamId{ges::StreamPurpose::generic, 0, 0});
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(gen.uniform_index(200));
    const int k = 1 + static_cast<int>(gen.uniform_index(n));
    const double alpha = gen.uniform01();
    const double beta = 4.0 * gen.uniform01();
    const double rho_sq = gen.uniform01();
    const ErrorProfile p = error_objective(alpha, beta, k, n, rho_sq);
    CHECK(std::abs(p.total - normalized_bias(alpha, beta, k, n, rho_sq) -
                   normalized_variance(alpha, beta, k, n, rho_sq)) <= 1e-14);
    CHECK(p.bias >= 0.0);
    CHECK(p.variance >= 0.0);
  }
}

TEST_CASE("nonnegativity holds across ten thousand random tuples") {
  ges::RandomStream gen(2, ges::StreamId{ges::StreamPurpose::generic, 0, 0});
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(gen.uniform_index(500));
    const int k = 1 + static_cast<int>(gen.uniform_index(n));
    const double bias =
        normalized_bias(gen.uniform01(), 10.0 * gen.uniform01(), k, n,
                        gen.uniform01());
    const double variance =
        normalized_variance(gen.uniform01(), 10.0 * gen.uniform01(), k, n,
                            gen.uniform01());
    CHECK(bias >= 0.0);
    CHECK(variance >= 0.0);
  }
}

TEST_CASE("objective equals its quadratic reparameterization") {
  // Under theta = (alpha beta, (1-alpha) beta) the objective is
  // theta^T A theta - 2 b^T theta + 1 with the assembled 2x2 system.
  ges::RandomStream gen(3, ges::StreamId{ges::StreamPurpose::generic, 0, 0});
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(gen.uniform_index(100));
    const int k = 1 + static_cast<int>(gen.uniform_index(n));
    const double alpha = gen.uniform01();
    const double beta = 4.0 * gen.uniform01();
    const double rho = gen.uniform01();
    const auto sys = hyperparameter_system(k, n, rho);
    Vector theta(2);
    theta << alpha * beta, (1.0 - alpha) * beta;
    const double via_system =
        theta.dot(sys.a * theta) - 2.0 * sys.b.dot(theta) + 1.0;
    const double direct = error_objective(alpha, beta, k, n, rho * rho).total;
    CHECK(via_system == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("round trip through theta preserves the objective") {
  ges::RandomStream gen(4, ges::StreamId{ges::StreamPurpose::generic, 0, 0});
  for (int trial = 0; trial < 200; ++trial) {
    const double alpha = gen.uniform01();
    const double beta = 0.05 + 4.0 * gen.uniform01();
    const double theta1 = alpha * beta;
    const double theta2 = (1.0 - alpha) * beta;
    const double beta_back = theta1 + theta2;
    const double alpha_back = theta1 / beta_back;
    const double a = error_objective(alpha, beta, 3, 100, 0.3).total;
    const double b = error_objective(alpha_back, beta_back, 3, 100, 0.3).total;
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("system matrix: copositive everywhere, PSD inside the band") {
  ges::RandomStream gen(5, ges::StreamId{ges::StreamPurpose::generic, 0, 0});
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(gen.uniform_index(200));
    const int k = 1 + static_cast<int>(gen.uniform_index(n));
    const double rho = gen.uniform01();
    const auto sys = hyperparameter_system(k, n, rho);
    // The objective's quadratic form is nonnegative over the feasible
    // orthant (theta >= 0), which is what the optimization relies on.
    Vector theta(2);
    theta << gen.uniform01(), gen.uniform01();
    CHECK(theta.dot(sys.a * theta) >= -1e-12);
  }
  // Inside the intermediate regime the matrix itself is PSD, making the
  // interior stationary point a genuine minimum.
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(gen.uniform_index(200));
    const int k = 1 + static_cast<int>(gen.uniform_index(n));
    const auto bounds = regime_boundaries(k, n);
    const double rho = bounds.rho_lower + (bounds.rho_upper - bounds.rho_lower) *
                                              gen.uniform01();
    const auto sys = hyperparameter_system(k, n, rho);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sys.a);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
  }
}

TEST_CASE("solver reproduces the boundary-regime closed forms") {
  {
    const OptimalHyperparameters opt = optimal_hyperparameters(3, 100, 0.05);
    CHECK(opt.alpha == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(opt.beta == doctest::Approx(100.0 / 102.0).epsilon(1e-12));
  }
  {
    const OptimalHyperparameters opt = optimal_hyperparameters(3, 100, 0.9);
    CHECK(opt.alpha == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(opt.beta == doctest::Approx(0.6).epsilon(1e-12));
  }
  {
    // rho = 0 by continuity with the low-correlation regime.
    const OptimalHyperparameters opt = optimal_hyperparameters(5, 50, 0.0);
    CHECK(opt.alpha == 1.0);
    CHECK(opt.beta == doctest::Approx(50.0 / 52.0).epsilon(1e-12));
  }
}

TEST_CASE("interior solution beats the exhaustive grid at rho = 0.23") {
  const OptimalHyperparameters opt = optimal_hyperparameters(3, 100, 0.23);
  CHECK(opt.alpha > 1e-6);
  CHECK(opt.alpha < 1.0 - 1e-6);
  const auto grid = ges::oracle::error_grid_minimum(3, 100, 0.23, 400);
  const double at_solver =
      error_objective(opt.alpha, opt.beta, 3, 100, 0.23 * 0.23).total;
  CHECK(at_solver <= grid.value + 1e-4);
}

TEST_CASE("solver output is never worse than the grid oracle") {
  ges::RandomStream gen(6, ges::StreamId{ges::StreamPurpose::generic, 0, 0});
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(gen.uniform_index(300));
    const int k = 1 + static_cast<int>(gen.uniform_index(n));
    const double rho = gen.uniform01();
    const OptimalHyperparameters opt = optimal_hyperparameters(k, n, rho);
    CHECK(opt.alpha >= 0.0);
    CHECK(opt.alpha <= 1.0);
    CHECK(opt.beta >= 0.0);
    const double at_solver =
        error_objective(opt.alpha, opt.beta, k, n, rho * rho).total;
    const auto grid = ges::oracle::error_grid_minimum(k, n, rho, 200);
    CHECK(at_solver <= grid.value + 1e-4);
  }
}

TEST_CASE("golden-section in beta at alpha = 1 agrees with n/(n+2)") {
  const int n = 100;
  const auto objective = [&](double beta) {
    return error_objective(1.0, beta, 3, n, 0.23 * 0.23).total;
  };
  const double beta_star = ges::oracle::golden_section_min(objective, 0.0, 4.0);
  CHECK(beta_star == doctest::Approx(n / (n + 2.0)).epsilon(1e-6));
}

TEST_CASE("regime boundary values") {
  const auto bounds = regime_boundaries(3, 100);
  CHECK(bounds.rho_lower == doctest::Approx(0.17320508075688773).epsilon(1e-14));
  CHECK(bounds.rho_upper == doctest::Approx(0.2594372608313854).epsilon(1e-14));
  const auto square = regime_boundaries(64, 64);
  CHECK(square.rho_lower == doctest::Approx(1.0));
  CHECK(square.rho_upper == doctest::Approx(1.0));
  for (int k : {1, 2, 7, 50}) {
    const auto b = regime_boundaries(k, 50 + k);
    CHECK(b.rho_lower <= b.rho_upper);
  }
}

TEST_CASE("solver sweep transitions at the closed-form boundaries") {
  const int k = 3, n = 100;
  const auto bounds = regime_boundaries(k, n);
  double first_alpha_below_one = 1.5;
  double first_alpha_above_zero = 1.5;
  for (int i = 0; i <= 1000; ++i) {
    const double rho = static_cast<double>(i) / 1000.0;
    const OptimalHyperparameters opt = optimal_hyperparameters(k, n, rho);
    if (first_alpha_below_one > 1.0 && opt.alpha < 1.0 - 1e-6) {
      first_alpha_below_one = rho;
    }
    if (opt.alpha > 1e-6) {
      // Last rho with alpha* still positive marks the upper transition.
      first_alpha_above_zero = rho;
    }
  }
  CHECK(std::abs(first_alpha_below_one - bounds.rho_lower) <= 2e-3);
  CHECK(std::abs(first_alpha_above_zero - bounds.rho_upper) <= 2e-3);
}

TEST_CASE("fourth-moment identity for the search distribution") {
  // For eps ~ N(0, C): E[eps eps^T eps eps^T] = tr(C) C + 2 C^2. Checked
  // empirically against the sampler, with C = sigma^2 Sigma.
  const int n = 6, k = 2;
  const SearchConfig cfg = analysis_config(0.5, 2.0, k, n);
  const auto instance = ges::oracle::make_correlated_instance(n, k, 0.4, 42);
  const auto u = instance.basis.effective();
  const Matrix sigma_matrix =
      cfg.sigma * cfg.sigma *
      ((cfg.alpha / n) * Matrix::Identity(n, n) +
       ((1.0 - cfg.alpha) / instance.basis.effective_rank) * u * u.transpose());

  const int draws = 400000;
  Matrix acc = Matrix::Zero(n, n);
  for (int i = 0; i < draws; ++i) {
    ges::RandomStream stream(
        7, ges::StreamId{ges::StreamPurpose::perturbation, 0,
                         static_cast<std::uint64_t>(i)});
    const Vector eps = ges::sample_perturbation(cfg, instance.basis, stream);
    acc += eps.squaredNorm() * (eps * eps.transpose());
  }
  acc /= static_cast<double>(draws);
  const Matrix expected = sigma_matrix.trace() * sigma_matrix +
                          2.0 * sigma_matrix * sigma_matrix;
  CHECK((acc - expected).cwiseAbs().maxCoeff() <=
        0.05 * expected.cwiseAbs().maxCoeff());
}

TEST_CASE("monte carlo profile matches the closed forms") {
  const int n = 100, k = 3;
  ges::RandomStream gen(8, ges::StreamId{ges::StreamPurpose::generic, 1, 0});
  int config = 0;
  for (const double rho : {0.0, 0.23, 0.7}) {
    const auto instance =
        ges::oracle::make_correlated_instance(n, k, rho, 900 + config);
    QuadraticForm f = quadratic_with_gradient(instance.gradient, gen);
    const double alpha = 0.25 + 0.5 * gen.uniform01();
    const double beta = 0.5 + 2.0 * gen.uniform01();
    const SearchConfig cfg = analysis_config(alpha, beta, k, n);

    const ErrorProfile mc = monte_carlo_error_profile(
        f, Vector::Zero(n), cfg, instance.basis, 60000, 1000 + config);
    const double expected_bias = normalized_bias(alpha, beta, k, n, rho * rho);
    const double expected_var =
        normalized_variance(alpha, beta, k, n, rho * rho);
    CHECK(std::abs(mc.bias - expected_bias) <= 2e-2);
    CHECK(mc.variance == doctest::Approx(expected_var).epsilon(0.05));
    CHECK(mc.rho_sq == doctest::Approx(rho * rho).epsilon(1e-9));
    ++config;
  }
}

TEST_CASE("monte carlo profile rejects tiny sample counts") {
  const auto instance = ges::oracle::make_correlated_instance(10, 2, 0.5, 3);
  ges::RandomStream gen(9, ges::StreamId{ges::StreamPurpose::generic, 1, 0});
  QuadraticForm f = quadratic_with_gradient(instance.gradient, gen);
  const SearchConfig cfg = analysis_config(0.5, 2.0, 2, 10);
  CHECK_THROWS_AS(monte_carlo_error_profile(f, Vector::Zero(10), cfg,
                                            instance.basis, 999, 1),
                  ges::Error);
}

TEST_CASE("orthogonal gradient with alpha = 0 gives a zero mean estimate") {
  const int n = 40, k = 3;
  const auto instance = ges::oracle::make_correlated_instance(n, k, 0.0, 5);
  ges::RandomStream gen(10, ges::StreamId{ges::StreamPurpose::generic, 1, 0});
  QuadraticForm f = quadratic_with_gradient(instance.gradient, gen);
  const SearchConfig cfg = analysis_config(0.0, 2.0, k, n);
  const ErrorProfile mc = monte_carlo_error_profile(
      f, Vector::Zero(n), cfg, instance.basis, 50000, 11);
  // mean(g) ~ 0, so the normalized squared bias sits at 1 (the gradient is
  // entirely missed) and comfortably below it plus noise.
  CHECK(mc.bias == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("sgd equivalence: both sides agree per sample") {
  const int n = 30, k = 3;
  const auto instance = ges::oracle::make_correlated_instance(n, k, 0.5, 6);
  const SearchConfig cfg = analysis_config(0.5, 2.0, k, n);
  ges::RandomStream gen(11, ges::StreamId{ges::StreamPurpose::generic, 1, 0});
  Vector x = gen.normal_vector(n);
  const auto result =
      ges::sgd_equivalence_check(cfg, instance.basis, x, 10000, 13);
  CHECK(result.max_gap <= 1e-12);
  CHECK(result.lhs == doctest::Approx(result.rhs).epsilon(1e-14));
}

TEST_CASE("sgd-equivalence grid argmin coincides with the solver") {
  // The expected post-step loss E f(x - g) equals |x|^2/2 (1 + total error),
  // so its coarse-grid argmin must match the closed-form solution at the
  // instance correlation.
  const int n = 30, k = 2;
  const double rho = 0.45;
  const auto instance = ges::oracle::make_correlated_instance(n, k, rho, 7);
  const Vector x = instance.gradient * 2.0;  // gradient of |x|^2/2 at x is x

  const int grid = 9;
  double best_alpha = -1.0, best_beta = -1.0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    for (int j = 1; j < grid; ++j) {  // beta = 0 is a constant; skip it
      SearchConfig cfg = analysis_config(static_cast<double>(i) / (grid - 1),
                                         2.0 * j / (grid - 1), k, n);
      const auto result =
          ges::sgd_equivalence_check(cfg, instance.basis, x, 30000, 17);
      if (result.lhs < best_value) {
        best_value = result.lhs;
        best_alpha = cfg.alpha;
        best_beta = cfg.beta;
      }
    }
  }
  const OptimalHyperparameters opt = optimal_hyperparameters(k, n, rho);
  CHECK(std::abs(best_alpha - opt.alpha) <= 1.0 / (grid - 1) + 1e-12);
  CHECK(std::abs(best_beta - opt.beta) <= 2.0 / (grid - 1) + 1e-12);
}

TEST_CASE("surface csv has the documented schema and its minimum is right") {
  const std::string path = "surface_test.csv";
  ges::write_surface_csv(3, 100, 0.23, 60, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "alpha,beta,bias,variance,total");

  int rows = 0;
  double best_total = std::numeric_limits<double>::infinity();
  double best_alpha = -1.0, best_beta = -1.0;
  std::string line;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream fields(line);
    std::string token;
    double values[5];
    for (double& value : values) {
      REQUIRE(std::getline(fields, token, ','));
      value = std::stod(token);
    }
    CHECK(values[2] + values[3] == doctest::Approx(values[4]).epsilon(1e-12));
    if (values[4] < best_total) {
      best_total = values[4];
      best_alpha = values[0];
      best_beta = values[1];
    }
  }
  CHECK(rows == 60 * 60);
  const OptimalHyperparameters opt = optimal_hyperparameters(3, 100, 0.23);
  CHECK(std::abs(best_alpha - opt.alpha) <= 1.0 / 59 + 1e-12);
  CHECK(std::abs(best_beta - opt.beta) <= 4.0 / 59 + 1e-12);
  std::remove(path.c_str());
}

TEST_CASE("regimes csv covers the plane") {
  const std::string path = "regimes_test.csv";
  ges::write_regimes_csv(8, 11, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "k,n,k_over_n,rho,alpha_star,beta_star,rho_lower,rho_upper");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 8 * 11);
  std::remove(path.c_str());
}
