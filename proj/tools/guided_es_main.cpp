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

// Benchmark CLI for the guided evolutionary strategies library. Talks to the
// shared library exclusively through its C interface.

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "guided_es.h"

namespace {

// Accepts "a..b" (inclusive range) or a comma-separated list.
std::vector<uint64_t> parse_seeds(const std::string& text) {
  std::vector<uint64_t> seeds;
  const auto range_pos = text.find("..");
  if (range_pos != std::string::npos) {
    const uint64_t lo = std::stoull(text.substr(0, range_pos));
    const uint64_t hi = std::stoull(text.substr(range_pos + 2));
    if (hi < lo) throw std::runtime_error("seed range is reversed: " + text);
    for (uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string token = text.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!token.empty()) seeds.push_back(std::stoull(token));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (seeds.empty()) throw std::runtime_error("no seeds in: " + text);
  return seeds;
}

int fail(int status, const char* verb) {
  std::fprintf(stderr, "error: %s failed: %s (%s)\n", verb,
               ges_last_error_message(), ges_status_name(status));
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"guided-es: random search guided by surrogate gradients"};
  app.require_subcommand(1);

  // --- run -----------------------------------------------------------------
  auto* run = app.add_subcommand(
      "run", "Run a benchmark experiment and write the aggregated CSV trace");
  std::string experiment = "quadratic";
  std::string algorithm = "guided_es";
  std::string seeds_text = "0..9";
  std::int64_t iterations = 0;
  double lr = 0.0, alpha = -1.0, beta = -1.0, sigma = 0.0;
  int pairs = 0, subspace_dim = 0;
  std::string run_out;
  run->add_option("--experiment", experiment,
                  "quadratic | unrolled | synthetic")
      ->capture_default_str();
  run->add_option("--algorithm", algorithm,
                  "guided_es | vanilla_es | sgd_surrogate | adam_surrogate")
      ->capture_default_str();
  run->add_option("--seeds", seeds_text, "e.g. 0..9 or 1,4,7")
      ->capture_default_str();
  run->add_option("--iterations", iterations,
                  "iteration budget (0 = experiment default)");
  run->add_option("--lr", lr, "learning rate (0 = experiment default)");
  run->add_option("--alpha", alpha, "subspace tradeoff in [0,1] (default 0.5)");
  run->add_option("--beta", beta, "estimate scale (default 2)");
  run->add_option("--sigma", sigma,
                  "perturbation scale (0 = experiment default)");
  run->add_option("--pairs", pairs, "antithetic pairs per step (default 1)");
  run->add_option("--subspace-dim", subspace_dim,
                  "guiding subspace size k (0 = experiment default)");
  run->add_option("--out", run_out, "output CSV path")->required();

  // --- surface ---------------------------------------------------------------
  auto* surface = app.add_subcommand(
      "surface",
      "Write the bias/variance/total surface over (alpha, beta) as CSV");
  int surf_k = 3, surf_n = 100, surf_grid = 400;
  double surf_rho = 0.23;
  std::string surf_out;
  surface->add_option("--k", surf_k, "subspace dimension")->capture_default_str();
  surface->add_option("--n", surf_n, "parameter dimension")->capture_default_str();
  surface->add_option("--rho", surf_rho, "subspace correlation in [0,1]")
      ->capture_default_str();
  surface->add_option("--grid", surf_grid, "points per axis")
      ->capture_default_str();
  surface->add_option("--out", surf_out, "output CSV path")->required();

  // --- regimes ---------------------------------------------------------------
  auto* regimes = app.add_subcommand(
      "regimes",
      "Write optimal hyperparameters over the (k/n, rho) plane as CSV");
  int reg_n = 100, reg_rho_grid = 201;
  std::string reg_out;
  regimes->add_option("--n", reg_n, "parameter dimension")->capture_default_str();
  regimes->add_option("--rho-grid", reg_rho_grid, "rho grid points")
      ->capture_default_str();
  regimes->add_option("--out", reg_out, "output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    std::vector<uint64_t> seeds;
    try {
      seeds = parse_seeds(seeds_text);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 1;
    }
    ges_experiment_options options;
    ges_experiment_options_init(&options);
    options.seeds = seeds.data();
    options.n_seeds = static_cast<int32_t>(seeds.size());
    options.iterations = iterations;
    options.learning_rate = lr;
    options.alpha = alpha;
    options.beta = beta;
    options.sigma = sigma;
    options.pairs = pairs;
    options.subspace_dim = subspace_dim;
    const int status = ges_run_experiment_csv(experiment.c_str(),
                                              algorithm.c_str(), &options,
                                              run_out.c_str());
    if (status != GES_OK) return fail(status, "run");
    std::printf("wrote %s (+ .meta.json)\n", run_out.c_str());
    return 0;
  }

  if (surface->parsed()) {
    const int status = ges_write_surface_csv(surf_k, surf_n, surf_rho,
                                             surf_grid, surf_out.c_str());
    if (status != GES_OK) return fail(status, "surface");
    std::printf("wrote %s\n", surf_out.c_str());
    return 0;
  }

  if (regimes->parsed()) {
    const int status =
        ges_write_regimes_csv(reg_n, reg_rho_grid, reg_out.c_str());
    if (status != GES_OK) return fail(status, "regimes");
    std::printf("wrote %s\n", reg_out.c_str());
    return 0;
  }
  return 1;
}
