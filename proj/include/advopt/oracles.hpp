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

#ifndef ADVOPT_ORACLES_HPP
#define ADVOPT_ORACLES_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "advopt/core.hpp"

namespace advopt {

/// J(x) = -sum_i h_i (x_i - c_i)^2 / 2. Separable, so its maximizer over any
/// box is the clamp of c into the box.
class ConcaveQuadratic final : public Oracle {
 public:
  ConcaveQuadratic(PointVec center, PointVec curvature);

  std::size_t dim() const override { return center_.dim(); }
  Evaluation evaluate(std::span<const double> x) const override;
  double loss(std::span<const double> x) const override;
  std::optional<Optimum> optimum(const FeasibleBox& box) const override;

  const PointVec& center() const noexcept { return center_; }
  const PointVec& curvature() const noexcept { return curvature_; }

 private:
  PointVec center_;
  PointVec curvature_;
};

/// A seeded concave test problem with its box: anchor ~ U[0.2, 0.8]^d,
/// curvature ~ U[0.5, 2]^d, center = anchor + U(-spread, spread)^d * epsilon.
/// With spread > 1 some maximizers sit on box faces.
struct QuadraticInstance {
  FeasibleBox box;
  ConcaveQuadratic oracle;
};

QuadraticInstance make_quadratic_instance(std::size_t dim, double epsilon,
                                          double spread, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Classifiers
// ---------------------------------------------------------------------------

/// Numerically stable -log softmax(logits)_label. `probs` receives the
/// softmax when non-empty.
double softmax_cross_entropy(std::span<const double> logits, std::size_t label,
                             std::span<double> probs = {});

/// Differentiable classifier with cross-entropy loss. Parameters live in one
/// flat vector so a single trainer serves every model.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual std::string kind() const = 0;
  virtual std::size_t num_features() const = 0;
  virtual std::size_t num_classes() const = 0;

  virtual std::vector<double> logits(std::span<const double> x) const = 0;

  /// Cross-entropy at (x, label) and its gradient with respect to x.
  virtual Evaluation loss_and_input_gradient(std::span<const double> x,
                                             std::size_t label) const = 0;

  /// Adds d loss / d params at (x, label) into `grad`; returns the loss.
  virtual double accumulate_parameter_gradient(std::span<const double> x,
                                               std::size_t label,
                                               std::span<double> grad) const = 0;

  virtual std::span<double> parameters() = 0;
  virtual std::span<const double> parameters() const = 0;

  virtual std::unique_ptr<Classifier> clone() const = 0;

 protected:
  void check_input(std::span<const double> x, std::size_t label) const;
};

/// argmax of the logits, ties broken toward the lowest class index.
std::size_t predict(const Classifier& model, std::span<const double> x);

/// logits = W x + b, W is classes x features (row-major).
class LinearModel final : public Classifier {
 public:
  LinearModel(std::size_t features, std::size_t classes);

  std::string kind() const override { return "linear"; }
  std::size_t num_features() const override { return features_; }
  std::size_t num_classes() const override { return classes_; }
  std::vector<double> logits(std::span<const double> x) const override;
  Evaluation loss_and_input_gradient(std::span<const double> x,
                                     std::size_t label) const override;
  double accumulate_parameter_gradient(std::span<const double> x,
                                       std::size_t label,
                                       std::span<double> grad) const override;
  std::span<double> parameters() override { return params_; }
  std::span<const double> parameters() const override { return params_; }
  std::unique_ptr<Classifier> clone() const override;

  double weight(std::size_t c, std::size_t f) const {
    return params_[c * features_ + f];
  }
  double bias(std::size_t c) const { return params_[classes_ * features_ + c]; }

 private:
  std::size_t features_;
  std::size_t classes_;
  std::vector<double> params_;
};

/// One hidden rectifier layer: logits = W2 relu(W1 x + b1) + b2.
/// The rectifier's derivative at exactly 0 is taken as 0.
class MlpModel final : public Classifier {
 public:
  MlpModel(std::size_t features, std::size_t hidden, std::size_t classes);

  std::string kind() const override { return "mlp"; }
  std::size_t num_features() const override { return features_; }
  std::size_t num_classes() const override { return classes_; }
  std::size_t num_hidden() const noexcept { return hidden_; }
  std::vector<double> logits(std::span<const double> x) const override;
  Evaluation loss_and_input_gradient(std::span<const double> x,
                                     std::size_t label) const override;
  double accumulate_parameter_gradient(std::span<const double> x,
                                       std::size_t label,
                                       std::span<double> grad) const override;
  std::span<double> parameters() override { return params_; }
  std::span<const double> parameters() const override { return params_; }
  std::unique_ptr<Classifier> clone() const override;

  /// W1 x + b1, before the rectifier.
  std::vector<double> preactivations(std::span<const double> x) const;

 private:
  struct Forward {
    std::vector<double> pre;
    std::vector<double> hidden;
    std::vector<double> logits;
  };
  Forward forward(std::span<const double> x) const;

  // Offsets into params_.
  std::size_t w1() const { return 0; }
  std::size_t b1() const { return hidden_ * features_; }
  std::size_t w2() const { return b1() + hidden_; }
  std::size_t b2() const { return w2() + classes_ * hidden_; }

  std::size_t features_;
  std::size_t hidden_;
  std::size_t classes_;
  std::vector<double> params_;
};

/// Cross-entropy of a fixed classifier at a fixed true label, as an oracle.
class ClassifierOracle final : public Oracle {
 public:
  ClassifierOracle(std::shared_ptr<const Classifier> model, std::size_t label);

  std::size_t dim() const override { return model_->num_features(); }
  Evaluation evaluate(std::span<const double> x) const override;

  std::size_t label() const noexcept { return label_; }
  const Classifier& model() const noexcept { return *model_; }

 private:
  std::shared_ptr<const Classifier> model_;
  std::size_t label_;
};

// ---------------------------------------------------------------------------
// Data and training
// ---------------------------------------------------------------------------

struct SyntheticDataset {
  std::vector<PointVec> features;
  std::vector<std::size_t> labels;
  std::size_t classes = 0;
  std::size_t dim = 0;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return labels.size(); }
};

/// Gaussian blobs: one center per class drawn uniformly from
/// [center_lo, center_hi]^dim, samples = center + N(0, noise^2) clamped into
/// [value_lo, value_hi]. Sample i has label i % classes.
struct BlobSpec {
  std::size_t samples = 500;
  std::size_t classes = 5;
  std::size_t dim = 20;
  double center_lo = 0.2;
  double center_hi = 0.8;
  double noise = 0.05;
  double value_lo = 0.0;
  double value_hi = 1.0;
  std::uint64_t seed = 0;
};

SyntheticDataset make_blobs(const BlobSpec& spec);

/// CSV, one row per sample: feature values then the integer label. No header.
void write_dataset_csv(const SyntheticDataset& data, std::ostream& out);
SyntheticDataset read_dataset_csv(std::istream& in);
void save_dataset_csv(const SyntheticDataset& data, const std::string& path);
SyntheticDataset load_dataset_csv(const std::string& path);

enum class ModelKind { kLinear, kMlp };

ModelKind parse_model_kind(const std::string& name);
std::string model_kind_name(ModelKind kind);

struct TrainOptions {
  std::size_t hidden = 32;
  std::size_t epochs = 300;
  double learning_rate = 0.5;
  double init_scale = 1.0;
  double target_accuracy = 0.9;
};

struct TrainResult {
  std::shared_ptr<Classifier> model;
  double train_accuracy = 0.0;
  double final_loss = 0.0;
  std::size_t epochs = 0;
  bool reached_target = false;
};

/// Full-batch gradient descent on the mean cross-entropy, starting from
/// N(0, init_scale^2 / fan_in) weights drawn from `seed`.
TrainResult train_model(const SyntheticDataset& data, ModelKind kind,
                        std::uint64_t seed, const TrainOptions& options = {});

double accuracy(const Classifier& model, const SyntheticDataset& data);

// ---------------------------------------------------------------------------
// Gradient checking
// ---------------------------------------------------------------------------

/// Central differences (J(x + h e_i) - J(x - h e_i)) / 2h.
PointVec fd_gradient(const Oracle& oracle, std::span<const double> x,
                     double h);

/// ||a - b||_2 / max(||a||_2, ||b||_2, 1e-12).
double gradient_relative_error(std::span<const double> a,
                               std::span<const double> b);

}  // namespace advopt

#endif  // ADVOPT_ORACLES_HPP
