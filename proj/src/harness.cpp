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

#include "advopt/harness.hpp"

#include <omp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "advopt/kernels.hpp"
#include "advopt/metrics.hpp"
#include "advopt/optimizers.hpp"
#include "advopt/rng.hpp"
#include "advopt/verify.hpp"

namespace advopt {

namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kSurrogateStream = std::uint64_t{1} << 32;
constexpr std::uint64_t kTargetStream = kSurrogateStream + 1;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Shortest representation that reads back to the same double.
std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

Json json_num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

// Runs fn(i) for i < n on the OpenMP team. The first exception by index is
// rethrown after the loop.
template <class Fn>
void for_each_index(std::size_t n, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

SyntheticDataset subset(const SyntheticDataset& data, std::size_t begin,
                        std::size_t end) {
  SyntheticDataset out;
  out.classes = data.classes;
  out.dim = data.dim;
  out.seed = data.seed;
  out.features.assign(data.features.begin() + static_cast<std::ptrdiff_t>(begin),
                      data.features.begin() + static_cast<std::ptrdiff_t>(end));
  out.labels.assign(data.labels.begin() + static_cast<std::ptrdiff_t>(begin),
                    data.labels.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

std::vector<std::string> effective_methods(const ExperimentConfig& c) {
  if (!c.methods.empty()) return c.methods;
  switch (c.kind) {
    case ExperimentKind::kConvergence:
    case ExperimentKind::kBetaSweep:
      return {"adami"};
    default:
      return {};
  }
}

bool needs_methods(ExperimentKind kind) {
  return kind == ExperimentKind::kAttack || kind == ExperimentKind::kTransfer ||
         kind == ExperimentKind::kConvergence ||
         kind == ExperimentKind::kBetaSweep;
}

Json config_json(const ExperimentConfig& c) {
  Json j;
  j["experiment"] = experiment_name(c.kind);
  j["methods"] = effective_methods(c);
  j["seed"] = c.seed;
  j["epsilon"] = c.epsilon;
  j["steps"] = c.steps;
  const HyperParams hp = c.hyperparams();
  j["alpha"] = base_value(hp.step);
  j["step_schedule"] = describe(hp.step);
  j["momentum_schedule"] = describe(hp.momentum);
  j["beta"] = c.beta;
  j["mu"] = c.mu;
  j["lambda"] = c.lambda;
  j["delta"] = c.delta;
  j["value_lo"] = c.value_lo;
  j["value_hi"] = c.value_hi;
  switch (c.kind) {
    case ExperimentKind::kAttack:
    case ExperimentKind::kTransfer:
    case ExperimentKind::kBetaSweep:
      j["model"] = c.model;
      if (c.kind != ExperimentKind::kAttack) j["target_model"] = c.target_model;
      j["hidden"] = c.hidden;
      j["classes"] = c.classes;
      j["features"] = c.features;
      j["train_samples"] = c.train_samples;
      j["blob_noise"] = c.blob_noise;
      j["dataset_seed"] = c.dataset_seed.value_or(c.seed);
      if (!c.dataset_path.empty()) j["dataset"] = c.dataset_path;
      if (!c.dataset_out.empty()) j["dataset_out"] = c.dataset_out;
      j["samples"] = c.samples;
      if (c.kind == ExperimentKind::kBetaSweep) j["betas"] = c.betas;
      break;
    case ExperimentKind::kConvergence:
      j["dim"] = c.dim;
      j["spread"] = c.spread;
      j["checkpoints"] = c.checkpoints;
      break;
    case ExperimentKind::kGradCheck:
      j["points"] = c.samples;
      break;
    case ExperimentKind::kVerify:
      break;
  }
  j["trace"] = c.trace;
  j["timing"] = c.timing;
  return j;
}

Json base_json(const ExperimentConfig& c) {
  Json j;
  j["version"] = kVersion;
  j["config"] = config_json(c);
  return j;
}

// --- classifier experiments -------------------------------------------------

struct SampleRun {
  PointVec adversarial;
  double final_loss = 0.0;
  std::vector<TraceRecord> records;
};

struct MethodRun {
  std::vector<SampleRun> samples;
  double wall_ms = 0.0;
};

MethodRun attack_samples(const AttackMethod& method, const ClassifierSuite& s,
                         const ExperimentConfig& c) {
  const std::size_t n = s.attack_indices.size();
  MethodRun run;
  run.samples.resize(n);
  const auto start = Clock::now();
  for_each_index(n, [&](std::size_t i) {
    const std::size_t idx = s.attack_indices[i];
    const FeasibleBox box(s.pool.features[idx], c.epsilon, c.value_lo,
                          c.value_hi);
    const ClassifierOracle oracle(s.surrogate.model, s.pool.labels[idx]);
    RunTrace trace = run_attack(method, oracle, box, c.steps,
                                derive_seed(c.seed, i));
    // Post-hoc validation before anything is written.
    if (!box.contains(trace.x_final) ||
        kernels::linf_distance(trace.x_final, box.anchor()) >
            c.epsilon + 1e-12) {
      throw std::logic_error("infeasible adversarial example from " +
                             method.name);
    }
    SampleRun& out = run.samples[i];
    out.final_loss = trace.records.back().loss;
    out.adversarial = std::move(trace.x_final);
    if (c.trace) out.records = std::move(trace.records);
  });
  if (c.timing) {
    run.wall_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  }
  return run;
}

MethodSummary summarize(const AttackMethod& method, const MethodRun& run,
                        const ClassifierSuite& s) {
  std::vector<PointVec> adv;
  std::vector<PointVec> anchors;
  std::vector<std::size_t> labels;
  double loss = 0.0;
  for (std::size_t i = 0; i < run.samples.size(); ++i) {
    const std::size_t idx = s.attack_indices[i];
    adv.push_back(run.samples[i].adversarial);
    anchors.push_back(s.pool.features[idx]);
    labels.push_back(s.pool.labels[idx]);
    loss += run.samples[i].final_loss;
  }
  MethodSummary m;
  m.method = method.name;
  m.beta = method.params.beta;
  m.samples = adv.size();
  m.white_box_success = success_rate(*s.surrogate.model, adv, labels);
  m.transfer_success =
      s.target ? success_rate(*s.target->model, adv, labels) : kNaN;
  m.ald_inf = ald_inf(adv, anchors);
  m.final_loss = loss / static_cast<double>(adv.size());
  m.wall_ms = run.wall_ms;
  return m;
}

void append_trace(std::ostringstream& os, const std::string& method,
                  double beta, const MethodRun& run) {
  for (std::size_t i = 0; i < run.samples.size(); ++i) {
    for (const auto& r : run.samples[i].records) {
      os << method << ',' << num(beta) << ',' << i << ',' << r.t << ','
         << num(r.loss) << ',' << num(r.grad_norm) << ',' << num(r.ald_inf)
         << ',' << num(r.step_size) << ',' << num(r.momentum_norm) << '\n';
    }
  }
}

const char* kTraceHeader =
    "method,beta,sample,t,loss,grad_norm,ald_inf,step_size,momentum_norm\n";
const char* kAttackHeader =
    "method,beta,seed,success_rate,ald_inf,final_loss,gap_avg_iterate,wall_ms\n";

Json model_json(const TrainResult& r) {
  Json j;
  j["kind"] = r.model->kind();
  j["train_accuracy"] = r.train_accuracy;
  j["final_loss"] = r.final_loss;
  j["epochs"] = r.epochs;
  j["reached_target"] = r.reached_target;
  return j;
}

ExperimentOutput classifier_experiment(const ExperimentConfig& c) {
  const bool transfer = c.kind != ExperimentKind::kAttack;
  const ClassifierSuite suite = prepare_classifiers(c, transfer);

  std::vector<double> betas = {c.beta};
  if (c.kind == ExperimentKind::kBetaSweep) betas = c.betas;

  ExperimentOutput out;
  std::ostringstream csv;
  std::ostringstream trace;
  csv << kAttackHeader;
  if (c.trace) trace << kTraceHeader;

  for (const auto& name : effective_methods(c)) {
    for (double beta : betas) {
      HyperParams hp = c.hyperparams();
      hp.beta = beta;
      const AttackMethod method = make_method(name, hp);
      const MethodRun run = attack_samples(method, suite, c);
      MethodSummary m = summarize(method, run, suite);
      const double rate = transfer ? m.transfer_success : m.white_box_success;
      csv << m.method << ',' << num(m.beta) << ',' << c.seed << ','
          << num(rate) << ',' << num(m.ald_inf) << ',' << num(m.final_loss)
          << ",nan," << num(m.wall_ms) << '\n';
      if (c.trace) append_trace(trace, m.method, m.beta, run);
      out.summaries.push_back(std::move(m));
    }
  }

  Json j = base_json(c);
  Json models;
  models["surrogate"] = model_json(suite.surrogate);
  if (suite.target) models["target"] = model_json(*suite.target);
  j["models"] = models;
  j["samples_used"] = suite.attack_indices.size();
  Json results = Json::array();
  for (const auto& m : out.summaries) {
    Json r;
    r["method"] = m.method;
    r["beta"] = m.beta;
    r["samples"] = m.samples;
    r["white_box_success"] = m.white_box_success;
    if (transfer) r["transfer_success"] = json_num(m.transfer_success);
    r["ald_inf"] = m.ald_inf;
    r["final_loss"] = m.final_loss;
    if (c.timing) r["wall_ms"] = m.wall_ms;
    results.push_back(r);
  }
  j["results"] = results;
  out.csv = csv.str();
  out.json = j.dump(2) + "\n";
  out.trace_csv = trace.str();
  return out;
}

// --- convergence ------------------------------------------------------------

ExperimentOutput convergence_experiment(const ExperimentConfig& c) {
  const QuadraticInstance inst =
      make_quadratic_instance(c.dim, c.epsilon, c.spread, derive_seed(c.seed, 0));
  const auto optimum = inst.oracle.optimum(inst.box);

  std::ostringstream csv;
  std::ostringstream trace;
  csv << "method,T,gap_avg_iterate,gap_last_iterate,slope,intercept,r2\n";
  if (c.trace) trace << kTraceHeader;

  Json j = base_json(c);
  j["optimum_value"] = optimum->value;
  Json results = Json::array();
  for (const auto& name : effective_methods(c)) {
    const AttackMethod method = make_method(name, c.hyperparams());
    const auto start = Clock::now();
    const ConvergenceCurve curve = measure_convergence(
        method, inst.oracle, inst.box, c.checkpoints, derive_seed(c.seed, 1));
    const double wall =
        std::chrono::duration<double, std::milli>(Clock::now() - start).count();

    std::vector<std::pair<double, double>> pts;
    for (const auto& p : curve.points) {
      pts.emplace_back(static_cast<double>(p.t), p.gap_average);
    }
    RateFit fit{kNaN, kNaN, kNaN, 0};
    std::string fit_error;
    try {
      fit = rate_exponent(pts);
    } catch (const UsageError& e) {
      fit_error = e.what();
    }
    Json r;
    r["method"] = method.name;
    Json rows = Json::array();
    for (const auto& p : curve.points) {
      csv << method.name << ',' << p.t << ',' << num(p.gap_average) << ','
          << num(p.gap_last) << ',' << num(fit.slope) << ','
          << num(fit.intercept) << ',' << num(fit.r2) << '\n';
      rows.push_back({{"T", p.t},
                      {"gap_avg_iterate", p.gap_average},
                      {"gap_last_iterate", p.gap_last}});
    }
    r["points"] = rows;
    r["slope"] = json_num(fit.slope);
    r["intercept"] = json_num(fit.intercept);
    r["r2"] = json_num(fit.r2);
    if (!fit_error.empty()) r["fit_error"] = fit_error;
    if (c.timing) r["wall_ms"] = wall;
    results.push_back(r);

    if (c.trace) {
      MethodRun run;
      run.samples.resize(1);
      run.samples[0].records = curve.trace.records;
      append_trace(trace, method.name, method.params.beta, run);
    }
  }
  j["results"] = results;

  ExperimentOutput out;
  out.csv = csv.str();
  out.json = j.dump(2) + "\n";
  out.trace_csv = trace.str();
  return out;
}

// --- gradcheck / verify -------------------------------------------------------

ExperimentOutput gradcheck_experiment(const ExperimentConfig& c) {
  const auto stats = gradient_check_suite(c.seed, c.samples);
  ExperimentOutput out;
  std::ostringstream csv;
  csv << "oracle,points,max_rel_error,mean_rel_error,passed\n";
  Json j = base_json(c);
  Json results = Json::array();
  for (const auto& s : stats) {
    const bool ok = s.max_rel_error < 1e-5;
    out.passed = out.passed && ok;
    csv << s.oracle << ',' << s.points << ',' << num(s.max_rel_error) << ','
        << num(s.mean_rel_error) << ',' << (ok ? "true" : "false") << '\n';
    results.push_back({{"oracle", s.oracle},
                       {"points", s.points},
                       {"max_rel_error", s.max_rel_error},
                       {"mean_rel_error", s.mean_rel_error},
                       {"max_grad_l1", s.max_grad_l1},
                       {"passed", ok}});
  }
  j["results"] = results;
  j["passed"] = out.passed;
  out.csv = csv.str();
  out.json = j.dump(2) + "\n";
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

ExperimentOutput verify_experiment(const ExperimentConfig& c) {
  const auto checks = run_verify_suite(c.seed);
  ExperimentOutput out;
  std::ostringstream csv;
  csv << "check,passed,value,threshold,detail\n";
  Json j = base_json(c);
  Json results = Json::array();
  for (const auto& r : checks) {
    out.passed = out.passed && r.passed;
    csv << r.name << ',' << (r.passed ? "true" : "false") << ','
        << num(r.value) << ',' << num(r.threshold) << ',' << csv_field(r.detail)
        << '\n';
    results.push_back({{"check", r.name},
                       {"passed", r.passed},
                       {"value", json_num(r.value)},
                       {"threshold", json_num(r.threshold)},
                       {"detail", r.detail}});
  }
  j["results"] = results;
  j["passed"] = out.passed;
  out.csv = csv.str();
  out.json = j.dump(2) + "\n";
  return out;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw UsageError("cannot open output file: " + path);
  return f;
}

void write_all(std::ofstream& f, const std::string& text,
               const std::string& path) {
  f << text;
  f.flush();
  if (!f) throw UsageError("failed writing " + path);
}

}  // namespace

std::string experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kAttack: return "attack";
    case ExperimentKind::kTransfer: return "transfer";
    case ExperimentKind::kConvergence: return "convergence";
    case ExperimentKind::kBetaSweep: return "sweep-beta";
    case ExperimentKind::kGradCheck: return "gradcheck";
    case ExperimentKind::kVerify: return "verify";
  }
  return "unknown";
}

ExperimentKind parse_experiment(const std::string& name) {
  for (auto k : {ExperimentKind::kAttack, ExperimentKind::kTransfer,
                 ExperimentKind::kConvergence, ExperimentKind::kBetaSweep,
                 ExperimentKind::kGradCheck, ExperimentKind::kVerify}) {
    if (experiment_name(k) == name) return k;
  }
  throw UsageError("unknown experiment '" + name +
                   "' (attack, transfer, convergence, sweep-beta, gradcheck, "
                   "verify)");
}

std::string ExperimentConfig::resolved_step_schedule() const {
  if (!step_schedule.empty()) return step_schedule;
  return kind == ExperimentKind::kConvergence ? "invsqrt" : "constant";
}

HyperParams ExperimentConfig::hyperparams() const {
  HyperParams hp;
  const double a = alpha.value_or(kind == ExperimentKind::kConvergence
                                      ? epsilon / 2.0
                                      : epsilon / static_cast<double>(steps));
  const std::string ss = resolved_step_schedule();
  if (ss == "constant") {
    hp.step = ConstantStep{a};
  } else if (ss == "invsqrt") {
    hp.step = InvSqrtStep{a};
  } else {
    throw UsageError("unknown step schedule '" + ss + "' (constant, invsqrt)");
  }
  if (momentum_schedule == "geometric") {
    hp.momentum = GeometricMomentum{mu, lambda};
  } else if (momentum_schedule == "constant") {
    hp.momentum = ConstantMomentum{mu};
  } else {
    throw UsageError("unknown momentum schedule '" + momentum_schedule +
                     "' (geometric, constant)");
  }
  hp.beta = beta;
  hp.delta = delta;
  hp.steps = steps;
  return hp;
}

void ExperimentConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw UsageError("epsilon must be a positive number");
  }
  if (steps < 1) throw UsageError("steps must be >= 1");
  if (!(value_lo < value_hi)) throw UsageError("value_lo must be < value_hi");
  hyperparams().validate();

  const auto names = effective_methods(*this);
  if (needs_methods(kind) && names.empty()) {
    throw UsageError("--method is required for " + experiment_name(kind));
  }
  std::vector<double> used_betas = {beta};
  if (kind == ExperimentKind::kBetaSweep) {
    if (betas.empty()) throw UsageError("sweep-beta needs at least one beta");
    used_betas = betas;
  }
  for (const auto& n : names) {
    for (double b : used_betas) {
      if (!(b >= 0.0 && b <= 1.0)) throw UsageError("beta must be in [0, 1]");
      HyperParams hp = hyperparams();
      hp.beta = b;
      const AttackMethod m = make_method(n, hp);
      if (m.kind == MethodKind::kL1Ema && !(b > 0.0 && b < 1.0)) {
        throw UsageError("l1ema needs 0 < beta < 1");
      }
    }
  }

  switch (kind) {
    case ExperimentKind::kAttack:
    case ExperimentKind::kTransfer:
    case ExperimentKind::kBetaSweep:
      parse_model_kind(model);
      if (kind != ExperimentKind::kAttack) parse_model_kind(target_model);
      if (samples < 1) throw UsageError("samples must be >= 1");
      if (dataset_path.empty()) {
        if (classes < 2) throw UsageError("classes must be >= 2");
        if (features < 1) throw UsageError("features must be >= 1");
        if (train_samples < classes) {
          throw UsageError("train_samples must be >= classes");
        }
        if (!(blob_noise >= 0.0)) throw UsageError("blob_noise must be >= 0");
      }
      if (hidden < 1) throw UsageError("hidden must be >= 1");
      break;
    case ExperimentKind::kConvergence: {
      if (dim < 1) throw UsageError("dim must be >= 1");
      if (!(spread >= 0.0)) throw UsageError("spread must be >= 0");
      if (checkpoints.empty()) throw UsageError("checkpoints must be given");
      for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] == 0 || (i > 0 && checkpoints[i] <= checkpoints[i - 1])) {
          throw UsageError("checkpoints must increase from 1");
        }
      }
      break;
    }
    case ExperimentKind::kGradCheck:
      if (samples < 1) throw UsageError("samples must be >= 1");
      break;
    case ExperimentKind::kVerify:
      break;
  }
}

ClassifierSuite prepare_classifiers(const ExperimentConfig& c,
                                    bool with_target) {
  SyntheticDataset all;
  if (!c.dataset_path.empty()) {
    all = load_dataset_csv(c.dataset_path);
  } else {
    BlobSpec spec;
    spec.samples = c.train_samples + 3 * c.samples;
    spec.classes = c.classes;
    spec.dim = c.features;
    spec.noise = c.blob_noise;
    spec.value_lo = c.value_lo;
    spec.value_hi = c.value_hi;
    spec.seed = c.dataset_seed.value_or(c.seed);
    all = make_blobs(spec);
    if (!c.dataset_out.empty()) save_dataset_csv(all, c.dataset_out);
  }
  if (all.size() == 0) throw UsageError("dataset is empty");

  ClassifierSuite s;
  if (all.size() > c.train_samples) {
    s.train = subset(all, 0, c.train_samples);
    s.pool = subset(all, c.train_samples, all.size());
  } else {
    s.train = all;
    s.pool = all;
  }

  TrainOptions opts;
  opts.hidden = c.hidden;
  s.surrogate = train_model(s.train, parse_model_kind(c.model),
                            derive_seed(c.seed, kSurrogateStream), opts);
  if (with_target) {
    s.target = train_model(s.train, parse_model_kind(c.target_model),
                           derive_seed(c.seed, kTargetStream), opts);
  }
  for (std::size_t i = 0; i < s.pool.size() && s.attack_indices.size() < c.samples;
       ++i) {
    const auto& x = s.pool.features[i];
    const std::size_t y = s.pool.labels[i];
    if (predict(*s.surrogate.model, x) != y) continue;
    if (s.target && predict(*s.target->model, x) != y) continue;
    // Anchors outside the value range cannot seed a box.
    bool in_range = true;
    for (double v : x) in_range = in_range && v >= c.value_lo && v <= c.value_hi;
    if (in_range) s.attack_indices.push_back(i);
  }
  if (s.attack_indices.empty()) {
    throw std::runtime_error("no correctly classified samples to attack");
  }
  return s;
}

ExperimentOutput execute_experiment(const ExperimentConfig& config) {
  config.validate();
  switch (config.kind) {
    case ExperimentKind::kAttack:
    case ExperimentKind::kTransfer:
    case ExperimentKind::kBetaSweep:
      return classifier_experiment(config);
    case ExperimentKind::kConvergence:
      return convergence_experiment(config);
    case ExperimentKind::kGradCheck:
      return gradcheck_experiment(config);
    case ExperimentKind::kVerify:
      return verify_experiment(config);
  }
  throw UsageError("unknown experiment kind");
}

std::string sibling_path(const std::string& out, const std::string& suffix) {
  std::filesystem::path p(out);
  p.replace_extension();
  return p.string() + suffix;
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.out.empty()) throw UsageError("--out is required");
  const std::string json_path = sibling_path(config.out, ".json");
  const std::string trace_path = sibling_path(config.out, ".trace.csv");
  if (json_path == config.out) {
    throw UsageError("--out must not be the .json metadata path");
  }
  std::ofstream csv = open_output(config.out);
  std::ofstream json = open_output(json_path);
  std::ofstream trace;
  if (config.trace) trace = open_output(trace_path);

  ExperimentOutput out = execute_experiment(config);
  write_all(csv, out.csv, config.out);
  write_all(json, out.json, json_path);
  if (config.trace) write_all(trace, out.trace_csv, trace_path);
  return out;
}

int configure_threads_from_env() {
  if (const char* env = std::getenv("ADVOPT_THREADS")) {
    int n = 0;
    const std::string_view s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), n);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || n < 0) {
      throw UsageError("ADVOPT_THREADS must be a non-negative integer");
    }
    if (n > 0) omp_set_num_threads(n);
  }
  return omp_get_max_threads();
}

}  // namespace advopt
