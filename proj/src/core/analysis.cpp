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

#include "core/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <vector>

#include "core/estimator.hpp"
#include "core/parallel.hpp"

namespace ges {

namespace {

void check_analysis_ranges(double alpha, double beta, int k, int n,
                           double rho_sq) {
  if (!std::isfinite(alpha) || alpha < 0.0 || alpha > 1.0) {
    throw Error(ErrorCode::invalid_argument, "alpha out of range [0, 1]");
  }
  if (!std::isfinite(beta) || beta < 0.0) {
    throw Error(ErrorCode::invalid_argument, "beta must be nonnegative");
  }
  if (k < 1 || n < 1 || k > n) {
    throw Error(ErrorCode::invalid_argument,
                "require 1 <= k <= n, got k=" + std::to_string(k) +
                    ", n=" + std::to_string(n));
  }
  if (!std::isfinite(rho_sq) || rho_sq < 0.0 || rho_sq > 1.0) {
    throw Error(ErrorCode::invalid_argument, "rho_sq out of range [0, 1]");
  }
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace

double normalized_bias(double alpha, double beta, int k, int n,
                       double rho_sq) {
  check_analysis_ranges(alpha, beta, k, n, rho_sq);
  const double kk = static_cast<double>(k);
  const double nn = static_cast<double>(n);
  const double full = beta * alpha / nn - 1.0;
  const double sub = beta * (1.0 - alpha) / kk;
  return full * full + (sub * sub + 2.0 * sub * full) * rho_sq;
}

double normalized_variance(double alpha, double beta, int k, int n,
                           double rho_sq) {
  check_analysis_ranges(alpha, beta, k, n, rho_sq);
  const double kk = static_cast<double>(k);
  const double nn = static_cast<double>(n);
  const double a_n = alpha / nn;
  const double s_k = (1.0 - alpha) / kk;
  return beta * beta *
         (a_n * a_n + a_n + (s_k * s_k + 2.0 * a_n * s_k + s_k) * rho_sq);
}

ErrorProfile error_objective(double alpha, double beta, int k, int n,
                             double rho_sq) {
  ErrorProfile profile;
  profile.bias = normalized_bias(alpha, beta, k, n, rho_sq);
  profile.variance = normalized_variance(alpha, beta, k, n, rho_sq);
  profile.total = profile.bias + profile.variance;
  profile.rho_sq = rho_sq;
  return profile;
}

HyperparameterSystem hyperparameter_system(int k, int n, double rho) {
  check_analysis_ranges(0.0, 0.0, k, n, rho * rho);
  const double kk = static_cast<double>(k);
  const double nn = static_cast<double>(n);
  const double rho_sq = rho * rho;
  HyperparameterSystem sys;
  sys.a = Matrix(2, 2);
  sys.a(0, 0) = 2.0 / (nn * nn) + 1.0 / nn;
  sys.a(0, 1) = 0.5 * (4.0 * rho_sq / (kk * nn) + rho_sq / kk + 1.0 / nn);
  sys.a(1, 0) = sys.a(0, 1);
  sys.a(1, 1) = (2.0 / (kk * kk) + 1.0 / kk) * rho_sq;
  sys.b = Vector(2);
  sys.b[0] = 1.0 / nn;
  sys.b[1] = rho_sq / kk;
  return sys;
}

OptimalHyperparameters optimal_hyperparameters(int k, int n, double rho) {
  const HyperparameterSystem sys = hyperparameter_system(k, n, rho);
  const Matrix& a = sys.a;
  const Vector& b = sys.b;
  const double rho_sq = rho * rho;

  auto objective_at = [&](const Vector& theta) {
    const double beta = theta[0] + theta[1];
    if (beta <= 0.0) {
      // Zero update: the estimate is identically zero, so the normalized
      // error is exactly 1 (pure bias).
      return 1.0;
    }
    const double alpha = std::min(1.0, std::max(0.0, theta[0] / beta));
    return error_objective(alpha, beta, k, n, rho_sq).total;
  };

  Vector best_theta = Vector::Zero(2);
  double best_value = std::numeric_limits<double>::infinity();
  auto consider = [&](const Vector& theta) {
    if (theta[0] < 0.0 || theta[1] < 0.0) return;
    const double value = objective_at(theta);
    if (value < best_value) {
      best_value = value;
      best_theta = theta;
    }
  };

  // Unconstrained stationary point A theta = b, admissible when the system
  // is well-posed and the solution is nonnegative.
  const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(0, 1);
  const double det_scale = std::max(a(0, 0) * a(1, 1), a(0, 1) * a(0, 1));
  if (std::abs(det) > 1e-14 * det_scale) {
    Vector interior(2);
    interior[0] = (b[0] * a(1, 1) - b[1] * a(0, 1)) / det;
    interior[1] = (b[1] * a(0, 0) - b[0] * a(0, 1)) / det;
    consider(interior);
  }

  // Edge theta_2 = 0 (all weight in the full space, alpha = 1): the
  // one-dimensional fit gives theta_1 = b_1 / A_11 = n/(n+2).
  consider(Vector{{b[0] / a(0, 0), 0.0}});

  // Edge theta_1 = 0 (all weight in the subspace, alpha = 0): theta_2 =
  // b_2 / A_22 = k/(k+2) whenever rho > 0.
  if (a(1, 1) > 0.0) consider(Vector{{0.0, b[1] / a(1, 1)}});

  // Origin, for completeness.
  consider(Vector::Zero(2));

  OptimalHyperparameters opt;
  opt.beta = best_theta[0] + best_theta[1];
  if (opt.beta <= 0.0) {
    opt.alpha = 1.0;
    opt.beta = 0.0;
    return opt;
  }
  opt.alpha = std::min(1.0, std::max(0.0, best_theta[0] / opt.beta));
  return opt;
}

RegimeBoundaries regime_boundaries(int k, int n) {
  if (k < 1 || n < 1 || k > n) {
    throw Error(ErrorCode::invalid_argument,
                "require 1 <= k <= n, got k=" + std::to_string(k) +
                    ", n=" + std::to_string(n));
  }
  RegimeBoundaries bounds;
  bounds.rho_lower = std::sqrt(static_cast<double>(k) / n);
  bounds.rho_upper = std::sqrt((k + 4.0) / (n + 4.0));
  return bounds;
}

ErrorProfile monte_carlo_error_profile(const QuadraticForm& objective,
                                       const Vector& x,
                                       const SearchConfig& cfg,
                                       const SubspaceBasis& basis,
                                       long long samples, std::uint64_t seed) {
  validate_config(cfg);
  if (samples < 1000) {
    throw Error(ErrorCode::invalid_argument,
                "monte_carlo_error_profile needs at least 1000 samples");
  }
  const Vector grad = objective.gradient(x);
  const double grad_sq = grad.squaredNorm();
  if (grad_sq == 0.0) {
    throw Error(ErrorCode::invalid_argument,
                "true gradient vanishes at x; normalized errors undefined");
  }

  const Objective wrapped{[&](const Vector& p) { return objective(p); }, true};

  // Chunked accumulation with a fixed reduction order. Sample index s keys
  // the stream, so the partition into chunks is irrelevant to the result.
  const long long chunk_size = 16384;
  const std::size_t chunks =
      static_cast<std::size_t>((samples + chunk_size - 1) / chunk_size);
  std::vector<Vector> chunk_sum(chunks);
  std::vector<double> chunk_sq(chunks, 0.0);

  parallel_for(chunks, [&](std::size_t c) {
    const long long begin = static_cast<long long>(c) * chunk_size;
    const long long end = std::min(samples, begin + chunk_size);
    Vector sum = Vector::Zero(x.size());
    double sum_sq = 0.0;
    for (long long s = begin; s < end; ++s) {
      const GradientEstimate est = estimate_gradient(
          wrapped, x, cfg, basis, seed, static_cast<std::uint64_t>(s));
      sum += est.direction;
      sum_sq += est.direction.squaredNorm();
    }
    chunk_sum[c] = std::move(sum);
    chunk_sq[c] = sum_sq;
  });

  Vector total = Vector::Zero(x.size());
  double total_sq = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    total += chunk_sum[c];
    total_sq += chunk_sq[c];
  }

  const double count = static_cast<double>(samples);
  const Vector mean = total / count;
  ErrorProfile profile;
  profile.bias = (mean - grad).squaredNorm() / grad_sq;
  profile.variance = (total_sq / count - mean.squaredNorm()) / grad_sq;
  profile.total = profile.bias + profile.variance;
  const CorrelationVector rho = correlation(basis, grad);
  profile.rho_sq = rho.norm * rho.norm;
  return profile;
}

SgdEquivalenceResult sgd_equivalence_check(const SearchConfig& cfg,
                                           const SubspaceBasis& basis,
                                           const Vector& x, long long samples,
                                           std::uint64_t seed) {
  validate_config(cfg);
  const Objective half_norm{[](const Vector& p) { return 0.5 * p.squaredNorm(); },
                            true};
  SgdEquivalenceResult result;
  const Vector grad = x;  // analytic gradient of |x|^2/2
  double lhs_sum = 0.0;
  double rhs_sum = 0.0;
  for (long long s = 0; s < samples; ++s) {
    const GradientEstimate est = estimate_gradient(
        half_norm, x, cfg, basis, seed, static_cast<std::uint64_t>(s));
    // Loss after a unit-learning-rate step vs half the squared estimation
    // error. Equal per sample because the gradient of f at x is x itself.
    const double lhs = half_norm.fn(x - est.direction);
    const double rhs = 0.5 * (grad - est.direction).squaredNorm();
    lhs_sum += lhs;
    rhs_sum += rhs;
    result.max_gap = std::max(result.max_gap, std::abs(lhs - rhs));
  }
  result.lhs = lhs_sum / static_cast<double>(samples);
  result.rhs = rhs_sum / static_cast<double>(samples);
  return result;
}

void write_surface_csv(int k, int n, double rho, int grid,
                       const std::string& path) {
  if (grid < 2) {
    throw Error(ErrorCode::invalid_argument, "grid must be at least 2");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::io_failure, "cannot open " + path);
  }
  const double rho_sq = rho * rho;
  out << "alpha,beta,bias,variance,total\n";
  for (int i = 0; i < grid; ++i) {
    const double alpha = static_cast<double>(i) / (grid - 1);
    for (int j = 0; j < grid; ++j) {
      const double beta = 4.0 * static_cast<double>(j) / (grid - 1);
      const ErrorProfile p = error_objective(alpha, beta, k, n, rho_sq);
      out << format_double(alpha) << ',' << format_double(beta) << ','
          << format_double(p.bias) << ',' << format_double(p.variance) << ','
          << format_double(p.total) << '\n';
    }
  }
  if (!out) {
    throw Error(ErrorCode::io_failure, "failed writing " + path);
  }
}

void write_regimes_csv(int n, int rho_grid, const std::string& path) {
  if (n < 1) {
    throw Error(ErrorCode::invalid_argument, "n must be positive");
  }
  if (rho_grid < 2) {
    throw Error(ErrorCode::invalid_argument, "rho grid must be at least 2");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::io_failure, "cannot open " + path);
  }
  out << "k,n,k_over_n,rho,alpha_star,beta_star,rho_lower,rho_upper\n";
  for (int k = 1; k <= n; ++k) {
    const RegimeBoundaries bounds = regime_boundaries(k, n);
    for (int j = 0; j < rho_grid; ++j) {
      const double rho = static_cast<double>(j) / (rho_grid - 1);
      const OptimalHyperparameters opt = optimal_hyperparameters(k, n, rho);
      out << k << ',' << n << ','
          << format_double(static_cast<double>(k) / n) << ','
          << format_double(rho) << ',' << format_double(opt.alpha) << ','
          << format_double(opt.beta) << ','
          << format_double(bounds.rho_lower) << ','
          << format_double(bounds.rho_upper) << '\n';
    }
  }
  if (!out) {
    throw Error(ErrorCode::io_failure, "failed writing " + path);
  }
}

}  // namespace ges
