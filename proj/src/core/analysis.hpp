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

#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "core/rng.hpp"
#include "core/subspace.hpp"
#include "core/types.hpp"

namespace ges {

// Closed-form error analysis of the antithetic estimator on a locally
// quadratic objective, as a function of the search-distribution
// hyperparameters (alpha, beta), the subspace and parameter dimensions
// (k, n), and the squared correlation rho_sq = |rho|_2^2 between the true
// gradient and the guiding subspace. Both quantities are normalized by the
// squared gradient norm, so they depend on the problem only through rho_sq.

/// Squared norm of the estimator bias divided by |grad|^2:
///   (beta*alpha/n - 1)^2
///   + (beta^2 (1-alpha)^2/k^2 + 2 beta (1-alpha)/k (beta*alpha/n - 1)) rho_sq.
double normalized_bias(double alpha, double beta, int k, int n, double rho_sq);

/// Trace of the estimator covariance divided by |grad|^2:
///   beta^2 (alpha^2/n^2 + alpha/n)
///   + beta^2 ((1-alpha)^2/k^2 + 2 alpha(1-alpha)/(k n) + (1-alpha)/k) rho_sq.
double normalized_variance(double alpha, double beta, int k, int n,
                           double rho_sq);

/// Bias + variance, i.e. the expected squared estimate error relative to the
/// gradient: E|g - grad|^2 / |grad|^2. Minimizing this in (alpha, beta) is
/// the hyperparameter selection criterion.
ErrorProfile error_objective(double alpha, double beta, int k, int n,
                             double rho_sq);

struct OptimalHyperparameters {
  double alpha = 1.0;
  double beta = 0.0;
};

/// Minimizes error_objective over beta >= 0, 0 <= alpha <= 1 in closed form.
///
/// Under the substitution theta = (alpha*beta, (1-alpha)*beta) the objective
/// is a convex quadratic, theta^T A theta - 2 b^T theta + 1, with A positive
/// semi-definite, subject to theta >= 0. The solver enumerates the active-set
/// cases exactly — unconstrained stationary point A theta = b if nonnegative,
/// plus each single-coordinate edge and the origin — and returns the feasible
/// candidate with the least objective, mapped back through
/// beta = theta_1 + theta_2, alpha = theta_1 / beta.
///
/// Notable regimes: rho below sqrt(k/n) gives (alpha=1, beta=n/(n+2));
/// rho above sqrt((k+4)/(n+4)) gives (alpha=0, beta=k/(k+2)); in between the
/// optimum is interior. rho = 0 returns (1, n/(n+2)) by continuity.
OptimalHyperparameters optimal_hyperparameters(int k, int n, double rho);

/// Entries of the 2x2 system (A, b) behind optimal_hyperparameters, exposed
/// for verification.
struct HyperparameterSystem {
  Matrix a;  // 2x2, positive semi-definite
  Vector b;  // 2
};
HyperparameterSystem hyperparameter_system(int k, int n, double rho);

struct RegimeBoundaries {
  double rho_lower = 0.0;  // sqrt(k/n): below this, alpha* = 1
  double rho_upper = 0.0;  // sqrt((k+4)/(n+4)): above this, alpha* = 0
};

/// Correlation thresholds where the optimal hyperparameters leave the
/// alpha = 1 and alpha = 0 boundaries. Derived from complementary slackness
/// of the constrained quadratic above; lower <= upper always since k <= n.
RegimeBoundaries regime_boundaries(int k, int n);

/// Quadratic objective c^T x + x^T H x / 2 with an exact gradient, used to
/// validate the closed forms empirically (the antithetic estimator is exact
/// through second order, so on these instances the formulas hold without
/// Taylor error).
struct QuadraticForm {
  Vector linear;
  Matrix hessian;

  double operator()(const Vector& x) const {
    return linear.dot(x) + 0.5 * x.dot(hessian * x);
  }
  Vector gradient(const Vector& x) const { return linear + hessian * x; }
};

/// Empirical counterpart of error_objective: runs `samples` independent
/// single-pair estimates of grad f(x) and reports
///   bias     = |mean(g) - grad|^2 / |grad|^2,
///   variance = tr(Var(g)) / |grad|^2.
/// Sample s uses the stream keyed by iteration = s, so chunked parallel
/// accumulation (fixed chunk reduction order) gives the same result as a
/// serial loop. Requires samples >= 1000; fewer is too noisy to serve as an
/// oracle.
ErrorProfile monte_carlo_error_profile(const QuadraticForm& objective,
                                       const Vector& x,
                                       const SearchConfig& cfg,
                                       const SubspaceBasis& basis,
                                       long long samples, std::uint64_t seed);

/// Checks the identity E[f(x - g)] = 1/2 E[|grad f(x) - g|^2] for
/// f = |x|^2/2, where both sides are computed from the same sample set. The
/// identity is exact per sample (grad f(x) = x), so max_gap is at the level
/// of floating-point noise. Minimizing either side over (alpha, beta) is
/// what optimal_hyperparameters does.
struct SgdEquivalenceResult {
  double lhs = 0.0;      // mean f(x - g)
  double rhs = 0.0;      // mean |x - g|^2 / 2
  double max_gap = 0.0;  // max per-sample |difference|
};
SgdEquivalenceResult sgd_equivalence_check(const SearchConfig& cfg,
                                           const SubspaceBasis& basis,
                                           const Vector& x, long long samples,
                                           std::uint64_t seed);

/// Writes the (alpha, beta) |-> (bias, variance, total) surface over
/// [0, 1] x [0, 4] as CSV with header alpha,beta,bias,variance,total and
/// grid^2 rows. Values at 17 significant digits; bitwise stable.
void write_surface_csv(int k, int n, double rho, int grid,
                       const std::string& path);

/// Writes optimal hyperparameters over the (k/n, rho) plane for fixed n:
/// one row per (k, rho) grid point with the regime boundaries alongside.
/// Header: k,n,k_over_n,rho,alpha_star,beta_star,rho_lower,rho_upper.
void write_regimes_csv(int n, int rho_grid, const std::string& path);

}  // namespace ges
