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

#include "advopt/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "advopt/kernels.hpp"
#include "advopt/rng.hpp"

namespace advopt {

// --- ConcaveQuadratic -------------------------------------------------------

ConcaveQuadratic::ConcaveQuadratic(PointVec center, PointVec curvature)
    : center_(std::move(center)), curvature_(std::move(curvature)) {
  require_same_dim(center_.dim(), curvature_.dim(), "ConcaveQuadratic");
  if (center_.empty()) throw UsageError("ConcaveQuadratic: empty center");
  for (double h : curvature_) {
    if (!(h > 0.0) || !std::isfinite(h)) {
      throw UsageError("ConcaveQuadratic: curvature must be positive");
    }
  }
}

double ConcaveQuadratic::loss(std::span<const double> x) const {
  require_same_dim(x.size(), dim(), "ConcaveQuadratic");
  double j = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - center_[i];
    j -= 0.5 * curvature_[i] * d * d;
  }
  return j;
}

Evaluation ConcaveQuadratic::evaluate(std::span<const double> x) const {
  Evaluation e;
  e.loss = loss(x);
  e.gradient = PointVec(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    e.gradient[i] = -curvature_[i] * (x[i] - center_[i]);
  }
  return e;
}

std::optional<Optimum> ConcaveQuadratic::optimum(const FeasibleBox& box) const {
  require_same_dim(box.dim(), dim(), "ConcaveQuadratic::optimum");
  Optimum opt;
  opt.point = PointVec(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    opt.point[i] = std::clamp(center_[i], box.lower()[i], box.upper()[i]);
  }
  opt.value = loss(opt.point);
  return opt;
}

QuadraticInstance make_quadratic_instance(std::size_t dim, double epsilon,
                                          double spread, std::uint64_t seed) {
  if (dim == 0) throw UsageError("make_quadratic_instance: dim must be >= 1");
  Rng rng(seed);
  PointVec anchor(dim);
  PointVec curvature(dim);
  PointVec center(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    anchor[i] = rng.uniform(0.2, 0.8);
    curvature[i] = rng.uniform(0.5, 2.0);
    center[i] = anchor[i] + rng.uniform(-spread, spread) * epsilon;
  }
  return QuadraticInstance{FeasibleBox(std::move(anchor), epsilon, 0.0, 1.0),
                           ConcaveQuadratic(std::move(center), std::move(curvature))};
}

// --- softmax / classifier helpers -------------------------------------------

double softmax_cross_entropy(std::span<const double> logits, std::size_t label,
                             std::span<double> probs) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - m);
  const double log_z = m + std::log(z);
  if (!probs.empty()) {
    for (std::size_t k = 0; k < logits.size(); ++k) {
      probs[k] = std::exp(logits[k] - log_z);
    }
  }
  return log_z - logits[label];
}

void Classifier::check_input(std::span<const double> x,
                             std::size_t label) const {
  require_same_dim(x.size(), num_features(), "classifier input");
  if (label >= num_classes()) {
    std::ostringstream os;
    os << "invalid label " << label << " for a " << num_classes()
       << "-class model";
    throw UsageError(os.str());
  }
}

std::size_t predict(const Classifier& model, std::span<const double> x) {
  const std::vector<double> z = model.logits(x);
  // max_element returns the first maximum, i.e. the lowest index on ties.
  return static_cast<std::size_t>(
      std::distance(z.begin(), std::max_element(z.begin(), z.end())));
}

// --- LinearModel -------------------------------------------------------------

LinearModel::LinearModel(std::size_t features, std::size_t classes)
    : features_(features),
      classes_(classes),
      params_(classes * features + classes, 0.0) {
  if (features == 0 || classes < 2) {
    throw UsageError("LinearModel needs >= 1 feature and >= 2 classes");
  }
}

std::vector<double> LinearModel::logits(std::span<const double> x) const {
  require_same_dim(x.size(), features_, "LinearModel input");
  std::vector<double> z(classes_);
  for (std::size_t c = 0; c < classes_; ++c) {
    double s = bias(c);
    const double* w = &params_[c * features_];
    for (std::size_t f = 0; f < features_; ++f) s += w[f] * x[f];
    z[c] = s;
  }
  return z;
}

Evaluation LinearModel::loss_and_input_gradient(std::span<const double> x,
                                                std::size_t label) const {
  check_input(x, label);
  const std::vector<double> z = logits(x);
  std::vector<double> p(classes_);
  Evaluation e;
  e.loss = softmax_cross_entropy(z, label, p);
  p[label] -= 1.0;
  e.gradient = PointVec(features_, 0.0);
  for (std::size_t c = 0; c < classes_; ++c) {
    const double* w = &params_[c * features_];
    for (std::size_t f = 0; f < features_; ++f) e.gradient[f] += p[c] * w[f];
  }
  return e;
}

double LinearModel::accumulate_parameter_gradient(std::span<const double> x,
                                                  std::size_t label,
                                                  std::span<double> grad) const {
  check_input(x, label);
  const std::vector<double> z = logits(x);
  std::vector<double> p(classes_);
  const double loss = softmax_cross_entropy(z, label, p);
  p[label] -= 1.0;
  for (std::size_t c = 0; c < classes_; ++c) {
    double* gw = &grad[c * features_];
    for (std::size_t f = 0; f < features_; ++f) gw[f] += p[c] * x[f];
    grad[classes_ * features_ + c] += p[c];
  }
  return loss;
}

std::unique_ptr<Classifier> LinearModel::clone() const {
  return std::make_unique<LinearModel>(*this);
}

// --- MlpModel ---------------------------------------------------------------

MlpModel::MlpModel(std::size_t features, std::size_t hidden,
                   std::size_t classes)
    : features_(features), hidden_(hidden), classes_(classes) {
  if (features == 0 || hidden == 0 || classes < 2) {
    throw UsageError("MlpModel needs >= 1 feature, >= 1 hidden unit, >= 2 classes");
  }
  params_.assign(b2() + classes_, 0.0);
}

MlpModel::Forward MlpModel::forward(std::span<const double> x) const {
  require_same_dim(x.size(), features_, "MlpModel input");
  Forward fw;
  fw.pre.resize(hidden_);
  fw.hidden.resize(hidden_);
  for (std::size_t j = 0; j < hidden_; ++j) {
    double s = params_[b1() + j];
    const double* w = &params_[w1() + j * features_];
    for (std::size_t f = 0; f < features_; ++f) s += w[f] * x[f];
    fw.pre[j] = s;
    fw.hidden[j] = s > 0.0 ? s : 0.0;
  }
  fw.logits.resize(classes_);
  for (std::size_t c = 0; c < classes_; ++c) {
    double s = params_[b2() + c];
    const double* w = &params_[w2() + c * hidden_];
    for (std::size_t j = 0; j < hidden_; ++j) s += w[j] * fw.hidden[j];
    fw.logits[c] = s;
  }
  return fw;
}

std::vector<double> MlpModel::logits(std::span<const double> x) const {
  return forward(x).logits;
}

std::vector<double> MlpModel::preactivations(std::span<const double> x) const {
  return forward(x).pre;
}

Evaluation MlpModel::loss_and_input_gradient(std::span<const double> x,
                                             std::size_t label) const {
  check_input(x, label);
  const Forward fw = forward(x);
  std::vector<double> p(classes_);
  Evaluation e;
  e.loss = softmax_cross_entropy(fw.logits, label, p);
  p[label] -= 1.0;

  std::vector<double> dpre(hidden_, 0.0);
  for (std::size_t j = 0; j < hidden_; ++j) {
    if (!(fw.pre[j] > 0.0)) continue;
    double s = 0.0;
    for (std::size_t c = 0; c < classes_; ++c) {
      s += p[c] * params_[w2() + c * hidden_ + j];
    }
    dpre[j] = s;
  }
  e.gradient = PointVec(features_, 0.0);
  for (std::size_t j = 0; j < hidden_; ++j) {
    if (dpre[j] == 0.0) continue;
    const double* w = &params_[w1() + j * features_];
    for (std::size_t f = 0; f < features_; ++f) e.gradient[f] += dpre[j] * w[f];
  }
  return e;
}

double MlpModel::accumulate_parameter_gradient(std::span<const double> x,
                                               std::size_t label,
                                               std::span<double> grad) const {
  check_input(x, label);
  const Forward fw = forward(x);
  std::vector<double> p(classes_);
  const double loss = softmax_cross_entropy(fw.logits, label, p);
  p[label] -= 1.0;

  for (std::size_t c = 0; c < classes_; ++c) {
    double* gw = &grad[w2() + c * hidden_];
    for (std::size_t j = 0; j < hidden_; ++j) gw[j] += p[c] * fw.hidden[j];
    grad[b2() + c] += p[c];
  }
  for (std::size_t j = 0; j < hidden_; ++j) {
    if (!(fw.pre[j] > 0.0)) continue;
    double d = 0.0;
    for (std::size_t c = 0; c < classes_; ++c) {
      d += p[c] * params_[w2() + c * hidden_ + j];
    }
    double* gw = &grad[w1() + j * features_];
    for (std::size_t f = 0; f < features_; ++f) gw[f] += d * x[f];
    grad[b1() + j] += d;
  }
  return loss;
}

std::unique_ptr<Classifier> MlpModel::clone() const {
  return std::make_unique<MlpModel>(*this);
}

// --- ClassifierOracle -------------------------------------------------------

ClassifierOracle::ClassifierOracle(std::shared_ptr<const Classifier> model,
                                   std::size_t label)
    : model_(std::move(model)), label_(label) {
  if (!model_) throw UsageError("ClassifierOracle: null model");
  if (label_ >= model_->num_classes()) {
    throw UsageError("ClassifierOracle: label out of range");
  }
}

Evaluation ClassifierOracle::evaluate(std::span<const double> x) const {
  return model_->loss_and_input_gradient(x, label_);
}

// --- datasets ---------------------------------------------------------------

SyntheticDataset make_blobs(const BlobSpec& spec) {
  if (spec.samples == 0 || spec.classes < 2 || spec.dim == 0) {
    throw UsageError("make_blobs: need samples >= 1, classes >= 2, dim >= 1");
  }
  if (!(spec.value_lo < spec.value_hi)) {
    throw UsageError("make_blobs: value_lo must be < value_hi");
  }
  Rng rng(spec.seed);
  std::vector<PointVec> centers(spec.classes, PointVec(spec.dim));
  for (auto& c : centers) {
    for (double& ci : c) ci = rng.uniform(spec.center_lo, spec.center_hi);
  }
  SyntheticDataset data;
  data.classes = spec.classes;
  data.dim = spec.dim;
  data.seed = spec.seed;
  data.features.reserve(spec.samples);
  data.labels.reserve(spec.samples);
  for (std::size_t i = 0; i < spec.samples; ++i) {
    const std::size_t y = i % spec.classes;
    PointVec x(spec.dim);
    for (std::size_t f = 0; f < spec.dim; ++f) {
      x[f] = std::clamp(rng.normal(centers[y][f], spec.noise), spec.value_lo,
                        spec.value_hi);
    }
    data.features.push_back(std::move(x));
    data.labels.push_back(y);
  }
  return data;
}

void write_dataset_csv(const SyntheticDataset& data, std::ostream& out) {
  std::ostringstream line;
  line.precision(17);
  for (std::size_t i = 0; i < data.size(); ++i) {
    line.str("");
    for (double v : data.features[i]) line << v << ',';
    line << data.labels[i] << '\n';
    out << line.str();
  }
}

SyntheticDataset read_dataset_csv(std::istream& in) {
  SyntheticDataset data;
  std::string line;
  std::size_t row = 0;
  std::size_t max_label = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        cells.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw UsageError("dataset CSV row " + std::to_string(row) +
                         ": not a number: '" + cell + "'");
      }
    }
    if (cells.size() < 2) {
      throw UsageError("dataset CSV row " + std::to_string(row) +
                       ": need at least one feature and a label");
    }
    const double label = cells.back();
    if (label < 0 || label != std::floor(label)) {
      throw UsageError("dataset CSV row " + std::to_string(row) +
                       ": label must be a non-negative integer");
    }
    cells.pop_back();
    if (data.dim == 0) data.dim = cells.size();
    if (cells.size() != data.dim) {
      throw UsageError("dataset CSV row " + std::to_string(row) +
                       ": inconsistent feature count");
    }
    data.features.emplace_back(std::move(cells));
    data.labels.push_back(static_cast<std::size_t>(label));
    max_label = std::max(max_label, data.labels.back());
  }
  if (data.labels.empty()) throw UsageError("dataset CSV is empty");
  data.classes = std::max<std::size_t>(2, max_label + 1);
  return data;
}

void save_dataset_csv(const SyntheticDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write dataset to " + path);
  write_dataset_csv(data, out);
}

SyntheticDataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read dataset from " + path);
  return read_dataset_csv(in);
}

// --- training ---------------------------------------------------------------

ModelKind parse_model_kind(const std::string& name) {
  if (name == "linear") return ModelKind::kLinear;
  if (name == "mlp") return ModelKind::kMlp;
  throw UsageError("unknown model kind '" + name + "' (valid: linear mlp)");
}

std::string model_kind_name(ModelKind kind) {
  return kind == ModelKind::kLinear ? "linear" : "mlp";
}

double accuracy(const Classifier& model, const SyntheticDataset& data) {
  if (data.size() == 0) throw UsageError("accuracy: empty dataset");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (predict(model, data.features[i]) == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

namespace {

void init_weights(std::span<double> w, std::size_t fan_in, double scale,
                  Rng& rng) {
  const double sd = scale / std::sqrt(static_cast<double>(fan_in));
  for (double& wi : w) wi = rng.normal(0.0, sd);
}

}  // namespace

TrainResult train_model(const SyntheticDataset& data, ModelKind kind,
                        std::uint64_t seed, const TrainOptions& options) {
  if (data.size() == 0) throw UsageError("train_model: empty dataset");
  if (options.hidden == 0 || options.hidden > 64) {
    throw UsageError("train_model: hidden units must lie in [1, 64]");
  }
  Rng rng(seed);
  std::shared_ptr<Classifier> model;
  if (kind == ModelKind::kLinear) {
    auto m = std::make_shared<LinearModel>(data.dim, data.classes);
    auto p = m->parameters();
    init_weights(p.first(data.classes * data.dim), data.dim,
                 options.init_scale, rng);
    model = m;
  } else {
    auto m = std::make_shared<MlpModel>(data.dim, options.hidden, data.classes);
    auto p = m->parameters();
    const std::size_t n1 = options.hidden * data.dim;
    init_weights(p.subspan(0, n1), data.dim, options.init_scale, rng);
    const std::size_t off2 = n1 + options.hidden;
    init_weights(p.subspan(off2, data.classes * options.hidden),
                 options.hidden, options.init_scale, rng);
    model = m;
  }

  auto params = model->parameters();
  std::vector<double> grad(params.size());
  const double inv_n = 1.0 / static_cast<double>(data.size());
  TrainResult result;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      loss += model->accumulate_parameter_gradient(data.features[i],
                                                   data.labels[i], grad);
    }
    result.final_loss = loss * inv_n;
    kernels::axpy(-options.learning_rate * inv_n, grad, params);
    result.epochs = epoch + 1;
  }
  result.train_accuracy = accuracy(*model, data);
  result.reached_target = result.train_accuracy >= options.target_accuracy;
  result.model = std::move(model);
  return result;
}

// --- gradient checking --------------------------------------------------------

PointVec fd_gradient(const Oracle& oracle, std::span<const double> x,
                     double h) {
  if (!(h > 0.0)) throw UsageError("fd_gradient: step must be > 0");
  require_same_dim(x.size(), oracle.dim(), "fd_gradient");
  PointVec probe(x);
  PointVec grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = probe[i];
    probe[i] = xi + h;
    const double up = oracle.loss(probe);
    probe[i] = xi - h;
    const double down = oracle.loss(probe);
    probe[i] = xi;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double gradient_relative_error(std::span<const double> a,
                               std::span<const double> b) {
  require_same_dim(a.size(), b.size(), "gradient_relative_error");
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
  }
  const double scale = std::max({kernels::serial::l2_norm(a),
                                 kernels::serial::l2_norm(b), 1e-12});
  return std::sqrt(diff) / scale;
}

}  // namespace advopt
