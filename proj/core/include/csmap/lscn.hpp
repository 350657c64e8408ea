#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "csmap/estimation.hpp"

namespace csmap {

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out
};

/// Two-stage classifier: stage 1 embeds the strongest path's (tau, theta,
/// phi) triplet through ReLU layers; its output is concatenated after the
/// remaining K-1 triplets and pushed through stage 2, whose final layer is
/// linear with 3 units (one logit per link state).
struct LscnModel {
  std::vector<DenseLayer> stage1;
  std::vector<DenseLayer> stage2;
  int k = 0;
  FeatureScaler scaler;

  Eigen::Index stage1_output_width() const { return stage1.back().bias.size(); }
  Eigen::Index input_width() const { return 3 * static_cast<Eigen::Index>(k); }
};

/// Hidden-layer widths; the trailing 3-unit linear output layer of stage 2
/// is always appended.
struct Architecture {
  std::vector<int> stage1_sizes{10};
  std::vector<int> stage2_hidden{50, 100};
};

struct TrainConfig {
  double learning_rate = 0.001;
  int batch_size = 1000;
  int epochs = 100;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t rng_seed = 0;
};

struct Dataset {
  Eigen::MatrixXd features;  // n x 3K, raw (unnormalized)
  std::vector<int> labels;   // values 0..2
  int k = 0;
};

struct EpochStats {
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

using TrainHistory = std::vector<EpochStats>;

struct LayerGradients {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
};

struct Gradients {
  std::vector<LayerGradients> stage1;
  std::vector<LayerGradients> stage2;
};

/// Fresh model with He-style uniform fan-in init (biases zero), seeded.
LscnModel init_model(const Architecture& arch, int k, std::uint64_t seed);

/// Class probabilities for one normalized feature row. Softmax is max-shift
/// stabilized; output sums to 1. Throws ShapeMismatch on wrong width.
Eigen::Vector3d forward(const LscnModel& model, const Eigen::VectorXd& features);

/// Cross entropy -log(probs[label]); probabilities clamped at 1e-12.
double cross_entropy(const Eigen::Vector3d& probs, int label);

/// Analytic gradients of the cross entropy w.r.t. every parameter.
Gradients backward(const LscnModel& model, const Eigen::VectorXd& features, int label);

/// Mini-batch Adam training with a seeded stratified 2/3-1/3 split. The
/// feature scaler is fitted on the training split and stored in the model.
std::pair<LscnModel, TrainHistory> train(const Dataset& dataset, const TrainConfig& cfg,
                                         const Architecture& arch);

/// Same, with an explicit validation set.
std::pair<LscnModel, TrainHistory> train(const Dataset& train_set, const Dataset& val_set,
                                         const TrainConfig& cfg, const Architecture& arch);

/// Argmax link state for one estimated snapshot; ties resolve toward the
/// lower class index. Estimates must arrive SNR-sorted.
LinkState predict_state(const LscnModel& model, const Snapshot& snapshot);

struct KSweepRow {
  int k = 0;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
};

/// Re-truncate one dataset (built at the largest K) per requested K and train
/// a model for each with identical seeds.
std::vector<KSweepRow> k_sweep(const Dataset& dataset, const std::vector<int>& ks,
                               const TrainConfig& cfg, const Architecture& arch);

/// Mean loss and accuracy of a model over a labeled set (normalized rows).
std::pair<double, double> evaluate(const LscnModel& model,
                                   const Eigen::MatrixXd& normalized_features,
                                   const std::vector<int>& labels);

}  // namespace csmap
