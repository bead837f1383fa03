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

// advopt: command line front end of the experiment harness.
//
//   advopt attack      --method adami,mifgsm --out results.csv [flags]
//   advopt transfer    --method adami --out results.csv
//   advopt convergence --out conv.csv
//   advopt sweep-beta  --out sweep.csv
//   advopt gradcheck   --out grad.csv
//   advopt verify      [--out verify.csv]
//
// Every flag can also come from --config FILE (key = value lines, keys are
// the long flag names); flags given on the command line win.
//
// Exit status: 0 success, 1 failed check or runtime error, 2 usage error.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "advopt/core.hpp"
#include "advopt/harness.hpp"
#include "advopt/optimizers.hpp"

namespace {

int usage_error(const CLI::App& app, const std::string& message) {
  std::cerr << "error: " << message << "\n\n" << app.help();
  return 2;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using advopt::ExperimentKind;

  CLI::App app{"Adversarial-perturbation optimizer benchmark", "advopt"};
  app.set_version_flag("--version", advopt::kVersion);
  app.set_config("--config", "", "Read flags from a key = value file");
  app.require_subcommand(1, 1);
  app.fallthrough();

  advopt::ExperimentConfig cfg;
  double alpha = 0.0;
  std::uint64_t dataset_seed = 0;

  app.add_option("--method", cfg.methods,
                 "Method name(s), comma separated: " +
                     join(advopt::method_names()))
      ->delimiter(',');
  app.add_option("--out", cfg.out,
                 "Results CSV; metadata goes to the same path with .json");
  app.add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
  app.add_option("--epsilon", cfg.epsilon, "L-infinity radius")
      ->capture_default_str();
  app.add_option("--steps", cfg.steps, "Iterations T")->capture_default_str();
  auto* alpha_opt = app.add_option(
      "--alpha", alpha,
      "Base step size (default epsilon/steps; convergence: epsilon/2)");
  app.add_option("--beta", cfg.beta, "EMA weight of the adaptive term")
      ->capture_default_str();
  app.add_option("--mu", cfg.mu, "Momentum weight")->capture_default_str();
  app.add_option("--lambda", cfg.lambda, "Geometric momentum decay")
      ->capture_default_str();
  app.add_option("--delta", cfg.delta, "Stabilizer added to v")
      ->capture_default_str();
  app.add_option("--step-schedule", cfg.step_schedule,
                 "constant or invsqrt (default: invsqrt for convergence, "
                 "constant otherwise)")
      ->check(CLI::IsMember({"constant", "invsqrt"}));
  app.add_option("--momentum-schedule", cfg.momentum_schedule,
                 "geometric or constant")
      ->check(CLI::IsMember({"geometric", "constant"}))
      ->capture_default_str();
  app.add_option("--value-lo", cfg.value_lo, "Lowest valid coordinate value")
      ->capture_default_str();
  app.add_option("--value-hi", cfg.value_hi, "Highest valid coordinate value")
      ->capture_default_str();

  app.add_option("--model", cfg.model, "Surrogate model: linear or mlp")
      ->capture_default_str();
  app.add_option("--target-model", cfg.target_model,
                 "Transfer target model: linear or mlp")
      ->capture_default_str();
  app.add_option("--hidden", cfg.hidden, "MLP hidden units")
      ->capture_default_str();
  app.add_option("--classes", cfg.classes, "Blob classes")
      ->capture_default_str();
  app.add_option("--features", cfg.features, "Blob dimension")
      ->capture_default_str();
  app.add_option("--train-samples", cfg.train_samples, "Training set size")
      ->capture_default_str();
  app.add_option("--blob-noise", cfg.blob_noise, "Blob standard deviation")
      ->capture_default_str();
  auto* dseed_opt =
      app.add_option("--dataset-seed", dataset_seed, "Blob seed (default: seed)");
  app.add_option("--dataset", cfg.dataset_path, "Import a dataset CSV");
  app.add_option("--save-dataset", cfg.dataset_out,
                 "Export the generated blobs as CSV");
  app.add_option("--samples", cfg.samples,
                 "Attacked samples (gradcheck: points per oracle)")
      ->capture_default_str();

  app.add_option("--dim", cfg.dim, "Quadratic dimension")->capture_default_str();
  app.add_option("--spread", cfg.spread,
                 "Quadratic center offset, in units of epsilon")
      ->capture_default_str();
  app.add_option("--checkpoints", cfg.checkpoints, "T values for the fit")
      ->delimiter(',');
  app.add_option("--betas", cfg.betas, "Beta grid for sweep-beta")
      ->delimiter(',');

  app.add_flag("--trace", cfg.trace, "Write per-iteration records");
  app.add_flag("--timing", cfg.timing,
               "Measure wall time (outputs are then not reproducible)");

  auto* attack = app.add_subcommand("attack", "White-box attack on the surrogate");
  auto* transfer = app.add_subcommand(
      "transfer", "Attack the surrogate, score on the target model");
  auto* convergence = app.add_subcommand(
      "convergence", "Optimality gap of the averaged iterate on a quadratic");
  auto* sweep = app.add_subcommand("sweep-beta",
                                   "Transfer success over a grid of beta");
  auto* gradcheck = app.add_subcommand(
      "gradcheck", "Analytic gradients against central differences");
  auto* verify = app.add_subcommand("verify", "Run every theory check");
  (void)attack;
  (void)transfer;
  (void)convergence;
  (void)sweep;
  (void)gradcheck;
  (void)verify;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return usage_error(app, e.what());
  }

  try {
    cfg.kind = advopt::parse_experiment(app.get_subcommands().front()->get_name());
    if (alpha_opt->count() > 0) cfg.alpha = alpha;
    if (dseed_opt->count() > 0) cfg.dataset_seed = dataset_seed;
    if (cfg.out.empty() && cfg.kind != ExperimentKind::kVerify) {
      return usage_error(app, "--out is required");
    }
    const int threads = advopt::configure_threads_from_env();
    (void)threads;

    advopt::ExperimentOutput out = cfg.out.empty()
                                       ? advopt::execute_experiment(cfg)
                                       : advopt::run_experiment(cfg);

    if (cfg.kind == ExperimentKind::kVerify) {
      // value/threshold pairs are in the CSV; here one line per check.
      std::istringstream rows(out.csv);
      std::string line;
      std::getline(rows, line);
      while (std::getline(rows, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const std::string name = line.substr(0, c1);
        const bool ok = line.substr(c1 + 1, c2 - c1 - 1) == "true";
        std::cout << (ok ? "PASS " : "FAIL ") << name << '\n';
      }
    } else if (cfg.kind == ExperimentKind::kGradCheck) {
      std::cout << (out.passed ? "PASS" : "FAIL") << " gradcheck\n";
    }
    if (!cfg.out.empty()) {
      std::cout << "wrote " << cfg.out << " and "
                << advopt::sibling_path(cfg.out, ".json") << '\n';
    }
    return out.passed ? 0 : 1;
  } catch (const advopt::UsageError& e) {
    return usage_error(app, e.what());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
