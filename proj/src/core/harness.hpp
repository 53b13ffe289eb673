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

#include <string>
#include <vector>

#include "core/types.hpp"

namespace ges {

enum class ExperimentKind { quadratic, unrolled, synthetic };
enum class Algorithm { guided_es, vanilla_es, sgd_surrogate, adam_surrogate };

ExperimentKind experiment_from_name(const std::string& name);
Algorithm algorithm_from_name(const std::string& name);
std::string to_string(ExperimentKind kind);
std::string to_string(Algorithm algorithm);

/// A fully specified multi-seed experiment. `cfg.param_dim` is derived from
/// the problem at run time; every other field is taken as given. The
/// problem-size knobs below the config are not part of the CLI surface; they
/// exist so tests can run scaled-down instances.
struct ExperimentSpec {
  ExperimentKind experiment = ExperimentKind::quadratic;
  Algorithm algorithm = Algorithm::guided_es;
  std::vector<std::uint64_t> seeds;
  long long iterations = 0;
  double learning_rate = 0.0;
  SearchConfig cfg;
  std::string out_path;

  int quadratic_rows = 2000;  // M
  int quadratic_cols = 1000;  // N
  int synthetic_dim = 20;
};

/// Spec pre-filled with the per-experiment protocol defaults (dimensions,
/// learning rates, sigma, subspace size, iteration budget). See the README
/// for the table and for which values are calibrated rather than inherited.
ExperimentSpec default_spec(ExperimentKind experiment, Algorithm algorithm);

/// One seed's trace. Record t (1-based) carries the state measured at the
/// start of iteration t — loss and suboptimality at the pre-update iterate,
/// and for guided runs the alignment between the basis used for the step and
/// the true gradient at that same point — while the cost counters are
/// cumulative through iteration t's work, so consecutive rows expose the
/// exact per-iteration cost. The post-run state lands in final_*. A run that
/// hits a non-finite loss stops early with `failed` set, keeping the records
/// accumulated so far; its final_* values are NaN.
struct RunResult {
  std::uint64_t seed = 0;
  bool failed = false;
  long long fail_iteration = -1;
  std::vector<RunRecord> records;
  double final_loss = 0.0;
  double final_suboptimality = 0.0;
  double final_aux = 0.0;
  bool has_correlation = false;
  bool has_aux = false;
  std::string aux_name;
};

/// Runs the full loop per seed: obtain the surrogate gradient, refresh the
/// guiding subspace, draw antithetic pairs, form the estimate, step the
/// optimizer. Seeds execute concurrently up to the GUIDED_ES_THREADS budget;
/// every stream is keyed by (seed, purpose, iteration), so results are
/// identical at any thread count. Problems expose their true gradient to
/// measurement hooks only — no update path can reach it.
std::vector<RunResult> run_experiment(const ExperimentSpec& spec);

/// Pointwise statistics across completed seeds.
struct MetricSeries {
  std::string name;
  std::vector<double> mean;
  std::vector<double> stderr_;  // stddev / sqrt(n_seeds)
  std::vector<double> stddev;   // sample standard deviation (0 for one seed)
};

struct AggregateResult {
  std::vector<long long> iterations;
  std::vector<MetricSeries> metrics;
  std::vector<long long> function_evals;        // cumulative, common to seeds
  std::vector<long long> surrogate_grad_evals;  // cumulative, common to seeds
  int completed_seeds = 0;
  int failed_seeds = 0;
  bool single_seed = false;  // stderr/stddev are 0 by convention
};

/// Fails on zero completed seeds; failed seeds are excluded and counted.
AggregateResult aggregate(const std::vector<RunResult>& results);

/// Writes the aggregate as CSV with header
///   iteration,metric,mean,stderr,stddev,n_seeds,fn_evals,sg_evals
/// one row per (iteration, metric), floating-point values at 17 significant
/// digits. Emission is bitwise stable for identical inputs and writes
/// nothing on an empty aggregate.
void emit_csv(const AggregateResult& result, const std::string& path);

/// Sidecar with the exact spec that produced a result (seed list, config,
/// applied defaults, completion counts), as <csv_path>.meta.json.
void write_run_metadata(const ExperimentSpec& spec,
                        const AggregateResult& result,
                        const std::string& csv_path);

}  // namespace ges
