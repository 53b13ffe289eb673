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

#include "guided_es.h"

#include <cstring>
#include <string>

#include "core/analysis.hpp"
#include "core/estimator.hpp"
#include "core/harness.hpp"
#include "core/sampler.hpp"
#include "core/subspace.hpp"
#include "core/types.hpp"

namespace {

thread_local std::string g_last_error;

int status_from(ges::ErrorCode code) {
  switch (code) {
    case ges::ErrorCode::invalid_argument: return GES_ERROR_INVALID_ARGUMENT;
    case ges::ErrorCode::dimension_mismatch: return GES_ERROR_DIMENSION_MISMATCH;
    case ges::ErrorCode::degenerate_subspace: return GES_ERROR_DEGENERATE_SUBSPACE;
    case ges::ErrorCode::nonfinite_objective: return GES_ERROR_NONFINITE_OBJECTIVE;
    case ges::ErrorCode::io_failure: return GES_ERROR_IO;
  }
  return GES_ERROR_UNKNOWN;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return GES_OK;
  } catch (const ges::Error& e) {
    g_last_error = e.what();
    return status_from(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GES_ERROR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown failure";
    return GES_ERROR_UNKNOWN;
  }
}

void require(bool condition, const char* message) {
  if (!condition) {
    throw ges::Error(ges::ErrorCode::invalid_argument, message);
  }
}

ges::SearchConfig to_core(const ges_search_config& cfg) {
  ges::SearchConfig core;
  core.alpha = cfg.alpha;
  core.beta = cfg.beta;
  core.sigma = cfg.sigma;
  core.pairs = cfg.pairs;
  core.subspace_dim = cfg.subspace_dim;
  core.param_dim = cfg.param_dim;
  return core;
}

}  // namespace

struct ges_session {
  ges::SearchConfig cfg;
  ges::Vector x;
  ges::SubspaceBuffer buffer;
  std::uint64_t seed = 0;
  std::uint64_t iteration = 0;
  long long function_evals = 0;
  long long surrogate_grad_evals = 0;

  ges_session(const ges::SearchConfig& config, ges::Vector x0,
              std::uint64_t run_seed)
      : cfg(config),
        x(std::move(x0)),
        buffer(config.subspace_dim, config.param_dim),
        seed(run_seed) {}

  /// Basis of the current FIFO; empty (-> plain ES) when nothing usable has
  /// been fed yet.
  ges::SubspaceBasis current_basis() const {
    if (buffer.empty()) return ges::SubspaceBasis::empty(cfg.param_dim);
    try {
      return ges::basis_of(buffer);
    } catch (const ges::Error& e) {
      if (e.code() == ges::ErrorCode::degenerate_subspace) {
        return ges::SubspaceBasis::empty(cfg.param_dim);
      }
      throw;
    }
  }
};

extern "C" {

const char* ges_status_name(int status) {
  switch (status) {
    case GES_OK: return "ok";
    case GES_ERROR_INVALID_ARGUMENT: return "invalid argument";
    case GES_ERROR_DIMENSION_MISMATCH: return "dimension mismatch";
    case GES_ERROR_DEGENERATE_SUBSPACE: return "degenerate subspace";
    case GES_ERROR_NONFINITE_OBJECTIVE: return "non-finite objective value";
    case GES_ERROR_IO: return "io failure";
    default: return "unknown error";
  }
}

const char* ges_last_error_message(void) { return g_last_error.c_str(); }

void ges_version(int* major, int* minor, int* patch) {
  if (major) *major = 1;
  if (minor) *minor = 0;
  if (patch) *patch = 0;
}

int ges_search_config_init(ges_search_config* cfg, int32_t param_dim,
                           int32_t subspace_dim) {
  return guarded([&] {
    require(cfg != nullptr, "cfg is null");
    cfg->alpha = 0.5;
    cfg->beta = 2.0;
    cfg->sigma = 0.1;
    cfg->pairs = 1;
    cfg->subspace_dim = subspace_dim;
    cfg->param_dim = param_dim;
    ges::validate_config(to_core(*cfg));
  });
}

int ges_search_config_validate(const ges_search_config* cfg) {
  return guarded([&] {
    require(cfg != nullptr, "cfg is null");
    ges::validate_config(to_core(*cfg));
  });
}

int ges_normalized_bias(double alpha, double beta, int32_t k, int32_t n,
                        double rho_sq, double* out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = ges::normalized_bias(alpha, beta, k, n, rho_sq);
  });
}

int ges_normalized_variance(double alpha, double beta, int32_t k, int32_t n,
                            double rho_sq, double* out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = ges::normalized_variance(alpha, beta, k, n, rho_sq);
  });
}

int ges_error_objective(double alpha, double beta, int32_t k, int32_t n,
                        double rho_sq, double* bias, double* variance,
                        double* total) {
  return guarded([&] {
    const ges::ErrorProfile profile =
        ges::error_objective(alpha, beta, k, n, rho_sq);
    if (bias) *bias = profile.bias;
    if (variance) *variance = profile.variance;
    if (total) *total = profile.total;
  });
}

int ges_optimal_hyperparameters(int32_t k, int32_t n, double rho,
                                double* alpha_star, double* beta_star) {
  return guarded([&] {
    const ges::OptimalHyperparameters opt =
        ges::optimal_hyperparameters(k, n, rho);
    if (alpha_star) *alpha_star = opt.alpha;
    if (beta_star) *beta_star = opt.beta;
  });
}

int ges_regime_boundaries(int32_t k, int32_t n, double* rho_lower,
                          double* rho_upper) {
  return guarded([&] {
    const ges::RegimeBoundaries bounds = ges::regime_boundaries(k, n);
    if (rho_lower) *rho_lower = bounds.rho_lower;
    if (rho_upper) *rho_upper = bounds.rho_upper;
  });
}

ges_session* ges_session_create(const ges_search_config* cfg, const double* x0,
                                uint64_t seed) {
  ges_session* session = nullptr;
  const int status = guarded([&] {
    require(cfg != nullptr, "cfg is null");
    require(x0 != nullptr, "x0 is null");
    const ges::SearchConfig core = ges::validate_config(to_core(*cfg));
    ges::Vector x = Eigen::Map<const ges::Vector>(x0, core.param_dim);
    session = new ges_session(core, std::move(x), seed);
  });
  return status == GES_OK ? session : nullptr;
}

void ges_session_destroy(ges_session* session) { delete session; }

int ges_session_feed_surrogate(ges_session* session, const double* grad,
                               int32_t n) {
  return guarded([&] {
    require(session != nullptr, "session is null");
    require(grad != nullptr, "grad is null");
    if (n != session->cfg.param_dim) {
      throw ges::Error(ges::ErrorCode::dimension_mismatch,
                       "surrogate gradient length does not match param_dim");
    }
    session->buffer.push(Eigen::Map<const ges::Vector>(grad, n));
    ++session->surrogate_grad_evals;
  });
}

int ges_session_estimate(ges_session* session, ges_objective_fn objective,
                         void* user_data, double* estimate_out) {
  return guarded([&] {
    require(session != nullptr, "session is null");
    require(objective != nullptr, "objective is null");
    require(estimate_out != nullptr, "estimate_out is null");

    const ges::SubspaceBasis basis = session->current_basis();
    ges::SearchConfig cfg = session->cfg;
    if (basis.effective_rank == 0) cfg.alpha = 1.0;  // plain-ES fallback

    const int32_t n = cfg.param_dim;
    const ges::Objective wrapped{
        [&](const ges::Vector& p) { return objective(user_data, p.data(), n); },
        false};
    const ges::GradientEstimate estimate = ges::estimate_gradient(
        wrapped, session->x, cfg, basis, session->seed, ++session->iteration);
    session->function_evals += estimate.function_evals;
    Eigen::Map<ges::Vector>(estimate_out, n) = estimate.direction;
  });
}

int ges_session_apply_update(ges_session* session, const double* estimate,
                             double learning_rate) {
  return guarded([&] {
    require(session != nullptr, "session is null");
    require(estimate != nullptr, "estimate is null");
    const auto g =
        Eigen::Map<const ges::Vector>(estimate, session->cfg.param_dim);
    if (!g.allFinite()) {
      throw ges::Error(ges::ErrorCode::nonfinite_objective,
                       "update direction is not finite");
    }
    session->x -= learning_rate * g;
  });
}

int ges_session_step(ges_session* session, ges_objective_fn objective,
                     void* user_data, double learning_rate) {
  return guarded([&] {
    require(session != nullptr, "session is null");
    require(objective != nullptr, "objective is null");

    const ges::SubspaceBasis basis = session->current_basis();
    ges::SearchConfig cfg = session->cfg;
    if (basis.effective_rank == 0) cfg.alpha = 1.0;  // plain-ES fallback

    const int32_t n = cfg.param_dim;
    const ges::Objective wrapped{
        [&](const ges::Vector& p) { return objective(user_data, p.data(), n); },
        false};
    const ges::GradientEstimate estimate = ges::estimate_gradient(
        wrapped, session->x, cfg, basis, session->seed, ++session->iteration);
    session->function_evals += estimate.function_evals;
    session->x -= learning_rate * estimate.direction;
  });
}

int ges_session_position(const ges_session* session, double* x_out) {
  return guarded([&] {
    require(session != nullptr, "session is null");
    require(x_out != nullptr, "x_out is null");
    Eigen::Map<ges::Vector>(x_out, session->x.size()) = session->x;
  });
}

int ges_session_counters(const ges_session* session, int64_t* function_evals,
                         int64_t* surrogate_grad_evals) {
  return guarded([&] {
    require(session != nullptr, "session is null");
    if (function_evals) *function_evals = session->function_evals;
    if (surrogate_grad_evals) {
      *surrogate_grad_evals = session->surrogate_grad_evals;
    }
  });
}

int ges_session_subspace_correlation(const ges_session* session,
                                     const double* reference_grad,
                                     double* rho_out) {
  return guarded([&] {
    require(session != nullptr, "session is null");
    require(reference_grad != nullptr, "reference_grad is null");
    require(rho_out != nullptr, "rho_out is null");
    const ges::SubspaceBasis basis = session->current_basis();
    const auto grad = Eigen::Map<const ges::Vector>(reference_grad,
                                                    session->cfg.param_dim);
    *rho_out = ges::correlation(basis, grad).norm;
  });
}

int ges_experiment_options_init(ges_experiment_options* options) {
  return guarded([&] {
    require(options != nullptr, "options is null");
    std::memset(options, 0, sizeof(*options));
    options->seeds = nullptr;
    options->n_seeds = 0;
    options->iterations = 0;
    options->learning_rate = 0.0;
    options->alpha = -1.0;
    options->beta = -1.0;
    options->sigma = 0.0;
    options->pairs = 0;
    options->subspace_dim = 0;
  });
}

int ges_run_experiment_csv(const char* experiment, const char* algorithm,
                           const ges_experiment_options* options,
                           const char* csv_path) {
  return guarded([&] {
    require(experiment != nullptr, "experiment is null");
    require(algorithm != nullptr, "algorithm is null");
    require(csv_path != nullptr, "csv_path is null");

    ges::ExperimentSpec spec =
        ges::default_spec(ges::experiment_from_name(experiment),
                          ges::algorithm_from_name(algorithm));
    spec.out_path = csv_path;
    if (options) {
      if (options->seeds && options->n_seeds > 0) {
        spec.seeds.assign(options->seeds, options->seeds + options->n_seeds);
      }
      if (options->iterations > 0) spec.iterations = options->iterations;
      if (options->learning_rate > 0.0) {
        spec.learning_rate = options->learning_rate;
      }
      if (options->alpha >= 0.0) spec.cfg.alpha = options->alpha;
      if (options->beta >= 0.0) spec.cfg.beta = options->beta;
      if (options->sigma > 0.0) spec.cfg.sigma = options->sigma;
      if (options->pairs > 0) spec.cfg.pairs = options->pairs;
      if (options->subspace_dim > 0) {
        spec.cfg.subspace_dim = options->subspace_dim;
      }
    }

    const std::vector<ges::RunResult> results = ges::run_experiment(spec);
    const ges::AggregateResult agg = ges::aggregate(results);
    ges::emit_csv(agg, spec.out_path);
    ges::write_run_metadata(spec, agg, spec.out_path);
  });
}

int ges_write_surface_csv(int32_t k, int32_t n, double rho, int32_t grid,
                          const char* csv_path) {
  return guarded([&] {
    require(csv_path != nullptr, "csv_path is null");
    ges::write_surface_csv(k, n, rho, grid, csv_path);
  });
}

int ges_write_regimes_csv(int32_t n, int32_t rho_grid, const char* csv_path) {
  return guarded([&] {
    require(csv_path != nullptr, "csv_path is null");
    ges::write_regimes_csv(n, rho_grid, csv_path);
  });
}

}  // extern "C"
