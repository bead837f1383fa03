// Copyright 2026 The advopt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ADVOPT_HARNESS_HPP
#define ADVOPT_HARNESS_HPP

/** \file harness.hpp
 * Deterministic experiment runner behind the `advopt` CLI.
 *
 * Every experiment writes a CSV results table to `out` and a JSON metadata
 * record next to it (same path, extension replaced by `.json`). With
 * `trace` set, per-iteration records go to `<stem>.trace.csv`.
 *
 * Randomness: sample i of an experiment uses derive_seed(seed, i), i.e.
 * splitmix64(seed + i). Models use derive_seed(seed, 1u << 32) (surrogate)
 * and derive_seed(seed, (1u << 32) + 1) (transfer target); the dataset uses
 * dataset_seed. Rows are assembled in (method, sample) order, so the output
 * does not depend on how many threads ran the samples.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "advopt/core.hpp"
#include "advopt/oracles.hpp"

namespace advopt {

enum class ExperimentKind {
  kAttack,
  kTransfer,
  kConvergence,
  kBetaSweep,
  kGradCheck,
  kVerify,
};

std::string experiment_name(ExperimentKind kind);
ExperimentKind parse_experiment(const std::string& name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kAttack;
  std::vector<std::string> methods;

  double epsilon = 8.0 / 255.0;
  std::size_t steps = 10;
  std::optional<double> alpha;  ///< default epsilon / steps (convergence: epsilon / 2)
  double beta = 0.9;
  double mu = 1.0;
  double lambda = 0.999;
  double delta = 1e-20;
  std::string step_schedule;  ///< "constant" | "invsqrt"; empty picks per kind
  std::string momentum_schedule = "geometric";  ///< or "constant"
  double value_lo = 0.0;
  double value_hi = 1.0;

  // Classifier experiments.
  std::string model = "linear";
  std::string target_model = "mlp";
  std::size_t hidden = 32;
  std::size_t classes = 5;
  std::size_t features = 20;
  std::size_t train_samples = 500;
  double blob_noise = 0.05;
  std::optional<std::uint64_t> dataset_seed;  ///< default: seed
  std::string dataset_path;  ///< import instead of generating blobs
  std::string dataset_out;   ///< export the generated blobs here
  std::size_t samples = 100;

  // Convergence.
  std::size_t dim = 10;
  std::vector<std::size_t> checkpoints = {100, 400, 1600, 6400};
  double spread = 2.0;  ///< quadratic centers at anchor + U(-spread, spread) eps

  // Beta sweep.
  std::vector<double> betas = {0.0, 0.2, 0.4, 0.6, 0.8, 0.9, 0.99};

  std::string out;
  std::uint64_t seed = 0;
  bool trace = false;
  bool timing = false;

  /// Schedules and scalars assembled from the fields above.
  HyperParams hyperparams() const;
  std::string resolved_step_schedule() const;

  /// Throws UsageError on unknown method names or inconsistent values.
  void validate() const;
};

/// Per (method, beta) metrics of the classifier experiments.
struct MethodSummary {
  std::string method;
  double beta = 0.0;
  std::size_t samples = 0;
  double white_box_success = 0.0;
  double transfer_success = 0.0;  ///< NaN without a target model
  double ald_inf = 0.0;
  double final_loss = 0.0;        ///< mean surrogate loss at x_T
  double wall_ms = 0.0;           ///< 0 unless timing
};

/// In-memory results of an experiment.
struct ExperimentOutput {
  std::string csv;
  std::string json;
  std::string trace_csv;  ///< empty unless config.trace
  bool passed = true;     ///< verify/gradcheck: every check passed
  std::vector<MethodSummary> summaries;
};

/// Data and models behind the classifier experiments.
///
/// Generated data: one blob set of train_samples + 3 * samples points from
/// dataset_seed; the first train_samples train the models, the rest form the
/// attack pool. An imported dataset is split the same way when it has more
/// than train_samples rows, otherwise it serves as both.
/// `attack_indices` lists the first `samples` pool entries that the surrogate
/// (and the target, when present) classify correctly.
struct ClassifierSuite {
  SyntheticDataset train;
  SyntheticDataset pool;
  TrainResult surrogate;
  std::optional<TrainResult> target;
  std::vector<std::size_t> attack_indices;
};

ClassifierSuite prepare_classifiers(const ExperimentConfig& config,
                                    bool with_target);

ExperimentOutput execute_experiment(const ExperimentConfig& config);

/// Runs the experiment and writes its files. Output paths are opened before
/// any work starts; failure to open one is a UsageError.
ExperimentOutput run_experiment(const ExperimentConfig& config);

/// `out` with its extension replaced (results.csv -> results.json).
std::string sibling_path(const std::string& out, const std::string& suffix);

/// Reads ADVOPT_THREADS (0 or unset = OpenMP default) and applies it.
/// Returns the thread count in effect.
int configure_threads_from_env();

}  // namespace advopt

#endif  // ADVOPT_HARNESS_HPP
