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

#include "core/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>

#include <json.hpp>

#include "core/estimator.hpp"
#include "core/optimizer.hpp"
#include "core/parallel.hpp"
#include "core/problems.hpp"
#include "core/sampler.hpp"
#include "core/subspace.hpp"

namespace ges {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct Measurement {
  double loss = 0.0;
  double suboptimality = 0.0;
  std::optional<Vector> true_gradient;
  double aux = 0.0;
};

/// Per-experiment adapter between a problem and the shared loop. The split
/// keeps the true gradient on the measurement side: surrogate construction
/// may use it internally where that is the surrogate's definition, but the
/// estimator and optimizer only ever see the objective and the surrogate.
class ExperimentProblem {
 public:
  virtual ~ExperimentProblem() = default;
  virtual int dim() const = 0;
  virtual Vector initial_point() const = 0;
  virtual Measurement measure(const Vector& x) = 0;
  virtual Vector surrogate(const Vector& x, const Measurement& m,
                           long long iteration) = 0;
  virtual double evaluate(const Vector& x) = 0;
  virtual bool evaluate_concurrent_safe() const { return true; }
  virtual void end_iteration(const Vector& /*pre_update_x*/,
                             long long /*iteration*/) {}
  virtual bool provides_true_gradient() const = 0;
  virtual bool provides_aux() const { return false; }
  virtual std::string aux_name() const { return {}; }
};

class QuadraticExperiment final : public ExperimentProblem {
 public:
  QuadraticExperiment(const ExperimentSpec& spec, std::uint64_t seed)
      : problem_(spec.quadratic_rows, spec.quadratic_cols, seed), seed_(seed) {}

  int dim() const override { return problem_.dim(); }
  Vector initial_point() const override { return Vector::Zero(problem_.dim()); }

  Measurement measure(const Vector& x) override {
    auto [loss, grad] = problem_.loss_and_gradient(x);
    Measurement m;
    m.loss = loss;
    m.suboptimality = loss - problem_.optimum();
    m.true_gradient = std::move(grad);
    return m;
  }

  Vector surrogate(const Vector& x, const Measurement& m,
                   long long iteration) override {
    RandomStream noise(seed_,
                       StreamId{StreamPurpose::surrogate_noise, 0,
                                static_cast<std::uint64_t>(iteration)});
    if (m.true_gradient) return problem_.surrogate_from(*m.true_gradient, noise);
    return problem_.surrogate_gradient(x, noise);
  }

  double evaluate(const Vector& x) override { return problem_.loss(x); }
  bool provides_true_gradient() const override { return true; }

 private:
  QuadraticProblem problem_;
  std::uint64_t seed_;
};

class UnrolledExperiment final : public ExperimentProblem {
 public:
  explicit UnrolledExperiment(std::uint64_t seed)
      : problem_(seed),
        optimal_value_(problem_.meta_loss_at_lr(
            problem_.optimal_lr(), UnrolledProblem::kFullHorizon)) {}

  int dim() const override { return problem_.param_dim(); }
  Vector initial_point() const override { return problem_.initial_params(); }

  Measurement measure(const Vector& x) override {
    Measurement m;
    m.loss = problem_.meta_loss(x, UnrolledProblem::kFullHorizon);
    m.suboptimality = m.loss - optimal_value_;
    m.aux = std::abs(problem_.predicted_lr(x) - problem_.optimal_lr());
    return m;
  }

  Vector surrogate(const Vector& x, const Measurement&, long long) override {
    return problem_.surrogate_gradient(x);
  }

  double evaluate(const Vector& x) override {
    return problem_.meta_loss(x, UnrolledProblem::kFullHorizon);
  }

  bool provides_true_gradient() const override { return false; }
  bool provides_aux() const override { return true; }
  std::string aux_name() const override { return "lr_abs_error"; }

 private:
  UnrolledProblem problem_;
  double optimal_value_;
};

class SyntheticExperiment final : public ExperimentProblem {
 public:
  SyntheticExperiment(const ExperimentSpec& spec, std::uint64_t seed)
      : problem_(spec.synthetic_dim, seed),
        seed_(seed),
        feed_parity_(spec.algorithm == Algorithm::adam_surrogate ||
                     spec.algorithm == Algorithm::sgd_surrogate),
        parity_draws_(2 * spec.cfg.pairs),
        sigma_(spec.cfg.sigma) {}

  int dim() const override { return problem_.dim(); }
  Vector initial_point() const override { return Vector::Zero(problem_.dim()); }

  Measurement measure(const Vector& x) override {
    Measurement m;
    m.loss = problem_.loss(x);
    m.suboptimality = m.loss;  // the optimum value is zero
    m.true_gradient = problem_.true_gradient(x);
    return m;
  }

  Vector surrogate(const Vector& x, const Measurement&, long long) override {
    return problem_.surrogate_gradient(x);
  }

  double evaluate(const Vector& x) override {
    const double value = problem_.loss(x);
    problem_.observe(x, value);  // search samples double as training data
    return value;
  }

  bool evaluate_concurrent_safe() const override { return false; }

  void end_iteration(const Vector& pre_update_x, long long iteration) override {
    if (feed_parity_) {
      // First-order baselines do not evaluate f while updating, so feed the
      // model the same number of evaluations, drawn from the distribution
      // plain ES would have searched with (covariance sigma^2 I / n).
      RandomStream stream(seed_,
                          StreamId{StreamPurpose::model_train, 1,
                                   static_cast<std::uint64_t>(iteration)});
      const double scale =
          sigma_ / std::sqrt(static_cast<double>(problem_.dim()));
      for (int d = 0; d < parity_draws_; ++d) {
        const Vector point =
            pre_update_x + scale * stream.normal_vector(problem_.dim());
        problem_.observe(point, problem_.loss(point));
      }
    }
    RandomStream batch(seed_, StreamId{StreamPurpose::model_train, 0,
                                       static_cast<std::uint64_t>(iteration)});
    problem_.model_update(batch);
  }

  bool provides_true_gradient() const override { return true; }

 private:
  SyntheticGradProblem problem_;
  std::uint64_t seed_;
  bool feed_parity_;
  int parity_draws_;
  double sigma_;
};

std::unique_ptr<ExperimentProblem> make_problem(const ExperimentSpec& spec,
                                                std::uint64_t seed) {
  switch (spec.experiment) {
    case ExperimentKind::quadratic:
      return std::make_unique<QuadraticExperiment>(spec, seed);
    case ExperimentKind::unrolled:
      return std::make_unique<UnrolledExperiment>(seed);
    case ExperimentKind::synthetic:
      return std::make_unique<SyntheticExperiment>(spec, seed);
  }
  throw Error(ErrorCode::invalid_argument, "unknown experiment");
}

RunResult run_single(const ExperimentSpec& spec, std::uint64_t seed) {
  auto problem = make_problem(spec, seed);
  const int n = problem->dim();

  SearchConfig cfg = spec.cfg;
  cfg.param_dim = n;
  if (spec.algorithm == Algorithm::vanilla_es) cfg.alpha = 1.0;
  validate_config(cfg);

  const bool is_es = spec.algorithm == Algorithm::guided_es ||
                     spec.algorithm == Algorithm::vanilla_es;
  const bool guided = spec.algorithm == Algorithm::guided_es;
  const bool uses_surrogate = spec.algorithm != Algorithm::vanilla_es;

  RunResult result;
  result.seed = seed;
  result.has_correlation = guided && problem->provides_true_gradient();
  result.has_aux = problem->provides_aux();
  result.aux_name = problem->aux_name();
  result.final_loss = kNan;
  result.final_suboptimality = kNan;
  result.final_aux = kNan;
  result.records.reserve(static_cast<std::size_t>(spec.iterations));

  Vector x = problem->initial_point();
  SubspaceBuffer buffer(cfg.subspace_dim, n);
  OptimizerState optimizer = spec.algorithm == Algorithm::adam_surrogate
                                 ? OptimizerState::adam(spec.learning_rate)
                                 : OptimizerState::sgd(spec.learning_rate);
  const Objective objective{[&](const Vector& p) { return problem->evaluate(p); },
                            problem->evaluate_concurrent_safe()};

  long long fn_evals = 0;
  long long sg_evals = 0;

  for (long long t = 1; t <= spec.iterations; ++t) {
    const Measurement m = problem->measure(x);
    if (!std::isfinite(m.loss)) {
      result.failed = true;
      result.fail_iteration = t;
      return result;
    }

    double corr = 0.0;
    try {
      Vector surrogate_grad;
      if (uses_surrogate) {
        surrogate_grad = problem->surrogate(x, m, t);
        ++sg_evals;
      }

      Vector g;
      if (is_es) {
        SearchConfig step_cfg = cfg;
        SubspaceBasis basis = SubspaceBasis::empty(n);
        if (guided) {
          buffer.push(surrogate_grad);
          try {
            basis = basis_of(buffer);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::degenerate_subspace) throw;
            step_cfg.alpha = 1.0;  // plain ES for this step
          }
        }
        if (result.has_correlation && m.true_gradient) {
          corr = correlation(basis, *m.true_gradient).norm;
        }
        GradientEstimate estimate = estimate_gradient(
            objective, x, step_cfg, basis, seed, static_cast<std::uint64_t>(t));
        fn_evals += estimate.function_evals;
        g = std::move(estimate.direction);
      } else {
        g = std::move(surrogate_grad);
      }

      const Vector updated = step(optimizer, x, g);
      problem->end_iteration(x, t);
      x = updated;
    } catch (const Error&) {
      result.failed = true;
      result.fail_iteration = t;
      return result;
    }

    RunRecord record;
    record.iteration = t;
    record.loss = m.loss;
    record.suboptimality = m.suboptimality;
    record.correlation = corr;
    record.aux = m.aux;
    record.function_evals = fn_evals;
    record.surrogate_grad_evals = sg_evals;
    record.seed = seed;
    result.records.push_back(record);
  }

  const Measurement final_state = problem->measure(x);
  result.final_loss = final_state.loss;
  result.final_suboptimality = final_state.suboptimality;
  result.final_aux = final_state.aux;
  if (!std::isfinite(final_state.loss)) {
    result.failed = true;
    result.fail_iteration = spec.iterations;
  }
  return result;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace

ExperimentKind experiment_from_name(const std::string& name) {
  if (name == "quadratic") return ExperimentKind::quadratic;
  if (name == "unrolled") return ExperimentKind::unrolled;
  if (name == "synthetic") return ExperimentKind::synthetic;
  throw Error(ErrorCode::invalid_argument, "unknown experiment: " + name);
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "guided_es") return Algorithm::guided_es;
  if (name == "vanilla_es") return Algorithm::vanilla_es;
  if (name == "sgd_surrogate") return Algorithm::sgd_surrogate;
  if (name == "adam_surrogate") return Algorithm::adam_surrogate;
  throw Error(ErrorCode::invalid_argument, "unknown algorithm: " + name);
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::quadratic: return "quadratic";
    case ExperimentKind::unrolled: return "unrolled";
    case ExperimentKind::synthetic: return "synthetic";
  }
  return "?";
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::guided_es: return "guided_es";
    case Algorithm::vanilla_es: return "vanilla_es";
    case Algorithm::sgd_surrogate: return "sgd_surrogate";
    case Algorithm::adam_surrogate: return "adam_surrogate";
  }
  return "?";
}

ExperimentSpec default_spec(ExperimentKind experiment, Algorithm algorithm) {
  ExperimentSpec spec;
  spec.experiment = experiment;
  spec.algorithm = algorithm;
  spec.seeds.resize(10);
  for (std::size_t i = 0; i < spec.seeds.size(); ++i) {
    spec.seeds[i] = static_cast<std::uint64_t>(i);
  }
  spec.cfg.alpha = 0.5;
  spec.cfg.beta = 2.0;
  spec.cfg.pairs = 1;

  const bool first_order = algorithm == Algorithm::sgd_surrogate ||
                           algorithm == Algorithm::adam_surrogate;
  switch (experiment) {
    case ExperimentKind::quadratic:
      spec.iterations = 10000;
      spec.cfg.sigma = 0.1;
      spec.cfg.subspace_dim = 10;
      spec.learning_rate = first_order ? 5e-3 : 0.2;
      break;
    case ExperimentKind::unrolled:
      spec.iterations = 2000;
      spec.cfg.sigma = 0.01;
      spec.cfg.subspace_dim = 10;
      if (algorithm == Algorithm::vanilla_es) {
        spec.learning_rate = 10.0;
      } else if (algorithm == Algorithm::guided_es) {
        spec.learning_rate = 0.5;
      } else {
        spec.learning_rate = 0.3;
      }
      break;
    case ExperimentKind::synthetic:
      spec.iterations = 2000;
      spec.cfg.sigma = 0.1;
      spec.cfg.subspace_dim = 1;
      spec.learning_rate = first_order ? 0.03 : 0.5;
      break;
  }
  return spec;
}

std::vector<RunResult> run_experiment(const ExperimentSpec& spec) {
  if (spec.seeds.empty()) {
    throw Error(ErrorCode::invalid_argument, "at least one seed is required");
  }
  if (spec.iterations < 1) {
    throw Error(ErrorCode::invalid_argument, "iterations must be >= 1");
  }
  if (!std::isfinite(spec.learning_rate) || spec.learning_rate <= 0.0) {
    throw Error(ErrorCode::invalid_argument, "learning rate must be positive");
  }

  std::vector<RunResult> results(spec.seeds.size());
  parallel_for(spec.seeds.size(), [&](std::size_t i) {
    results[i] = run_single(spec, spec.seeds[i]);
  });
  return results;
}

AggregateResult aggregate(const std::vector<RunResult>& results) {
  std::vector<const RunResult*> completed;
  int failed = 0;
  for (const RunResult& r : results) {
    if (r.failed) {
      ++failed;
    } else {
      completed.push_back(&r);
    }
  }
  if (completed.empty()) {
    throw Error(ErrorCode::invalid_argument,
                "no completed seeds to aggregate (" + std::to_string(failed) +
                    " failed)");
  }
  const std::size_t length = completed.front()->records.size();
  for (const RunResult* r : completed) {
    if (r->records.size() != length) {
      throw Error(ErrorCode::invalid_argument,
                  "completed runs have mismatched lengths");
    }
  }

  AggregateResult agg;
  agg.completed_seeds = static_cast<int>(completed.size());
  agg.failed_seeds = failed;
  agg.single_seed = completed.size() == 1;

  agg.iterations.resize(length);
  agg.function_evals.resize(length);
  agg.surrogate_grad_evals.resize(length);
  for (std::size_t t = 0; t < length; ++t) {
    const RunRecord& record = completed.front()->records[t];
    agg.iterations[t] = record.iteration;
    agg.function_evals[t] = record.function_evals;
    agg.surrogate_grad_evals[t] = record.surrogate_grad_evals;
  }

  struct Extractor {
    std::string name;
    double (*get)(const RunRecord&);
  };
  std::vector<Extractor> extractors = {
      {"loss", [](const RunRecord& r) { return r.loss; }},
      {"suboptimality", [](const RunRecord& r) { return r.suboptimality; }},
  };
  if (completed.front()->has_correlation) {
    extractors.push_back(
        {"correlation", [](const RunRecord& r) { return r.correlation; }});
  }
  if (completed.front()->has_aux) {
    extractors.push_back(
        {completed.front()->aux_name, [](const RunRecord& r) { return r.aux; }});
  }

  const double count = static_cast<double>(completed.size());
  for (const Extractor& extractor : extractors) {
    MetricSeries series;
    series.name = extractor.name;
    series.mean.resize(length);
    series.stderr_.resize(length);
    series.stddev.resize(length);
    for (std::size_t t = 0; t < length; ++t) {
      double sum = 0.0;
      for (const RunResult* r : completed) sum += extractor.get(r->records[t]);
      const double mean = sum / count;
      double sq = 0.0;
      for (const RunResult* r : completed) {
        const double d = extractor.get(r->records[t]) - mean;
        sq += d * d;
      }
      const double stddev =
          completed.size() > 1 ? std::sqrt(sq / (count - 1.0)) : 0.0;
      series.mean[t] = mean;
      series.stddev[t] = stddev;
      series.stderr_[t] = stddev / std::sqrt(count);
    }
    agg.metrics.push_back(std::move(series));
  }
  return agg;
}

void emit_csv(const AggregateResult& result, const std::string& path) {
  if (result.metrics.empty() || result.iterations.empty()) {
    throw Error(ErrorCode::invalid_argument,
                "refusing to write an empty aggregate");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::io_failure, "cannot open " + path);
  }
  out << "iteration,metric,mean,stderr,stddev,n_seeds,fn_evals,sg_evals\n";
  for (std::size_t t = 0; t < result.iterations.size(); ++t) {
    for (const MetricSeries& series : result.metrics) {
      out << result.iterations[t] << ',' << series.name << ','
          << format_double(series.mean[t]) << ','
          << format_double(series.stderr_[t]) << ','
          << format_double(series.stddev[t]) << ',' << result.completed_seeds
          << ',' << result.function_evals[t] << ','
          << result.surrogate_grad_evals[t] << '\n';
    }
  }
  if (!out) {
    throw Error(ErrorCode::io_failure, "failed writing " + path);
  }
}

void write_run_metadata(const ExperimentSpec& spec,
                        const AggregateResult& result,
                        const std::string& csv_path) {
  nlohmann::json meta;
  meta["experiment"] = to_string(spec.experiment);
  meta["algorithm"] = to_string(spec.algorithm);
  meta["seeds"] = spec.seeds;
  meta["iterations"] = spec.iterations;
  meta["learning_rate"] = spec.learning_rate;
  meta["alpha"] = spec.cfg.alpha;
  meta["beta"] = spec.cfg.beta;
  meta["sigma"] = spec.cfg.sigma;
  meta["pairs"] = spec.cfg.pairs;
  meta["subspace_dim"] = spec.cfg.subspace_dim;
  meta["completed_seeds"] = result.completed_seeds;
  meta["failed_seeds"] = result.failed_seeds;
  meta["stderr_zero_single_seed"] = result.single_seed;
  if (spec.experiment == ExperimentKind::quadratic) {
    meta["quadratic_rows"] = spec.quadratic_rows;
    meta["quadratic_cols"] = spec.quadratic_cols;
  }
  if (spec.experiment == ExperimentKind::synthetic) {
    meta["synthetic_dim"] = spec.synthetic_dim;
  }
  if (spec.experiment != ExperimentKind::quadratic) {
    // Networks are initialized with unit-variance scaled-uniform weights,
    // i.e. uniform on +/- sqrt(3/fan_in), biases zero.
    meta["mlp_init"] = "scaled_uniform(sqrt(3/fan_in))";
  }
  std::ofstream out(csv_path + ".meta.json", std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::io_failure, "cannot open " + csv_path + ".meta.json");
  }
  out << meta.dump(2) << '\n';
  if (!out) {
    throw Error(ErrorCode::io_failure, "failed writing metadata");
  }
}

}  // namespace ges
