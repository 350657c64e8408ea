#include "csmap/lscn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "csmap/rng.hpp"

namespace csmap {
namespace {

Eigen::MatrixXd relu(const Eigen::MatrixXd& z) { return z.cwiseMax(0.0); }

Eigen::MatrixXd relu_mask(const Eigen::MatrixXd& z) {
  return (z.array() > 0.0).cast<double>();
}

// Columns are samples throughout the batched pass.
struct ForwardTrace {
  std::vector<Eigen::MatrixXd> stage1_pre;   // pre-activation per layer
  std::vector<Eigen::MatrixXd> stage1_act;   // post-activation per layer
  Eigen::MatrixXd stage2_input;
  std::vector<Eigen::MatrixXd> stage2_pre;
  std::vector<Eigen::MatrixXd> stage2_act;   // last entry: logits
  Eigen::MatrixXd probs;                     // 3 x n
};

Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd probs(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const Eigen::VectorXd shifted =
        logits.col(c).array() - logits.col(c).maxCoeff();
    const Eigen::VectorXd e = shifted.array().exp();
    probs.col(c) = e / e.sum();
  }
  return probs;
}

ForwardTrace forward_batch(const LscnModel& model, const Eigen::MatrixXd& inputs) {
  const Eigen::Index n = inputs.cols();
  if (inputs.rows() != model.input_width()) {
    throw Error(ErrorCode::ShapeMismatch,
                "expected " + std::to_string(model.input_width()) + " features, got " +
                    std::to_string(inputs.rows()));
  }
  ForwardTrace trace;
  const Eigen::Index rest_width = 3 * (model.k - 1);

  Eigen::MatrixXd h = inputs.topRows(3);
  for (const DenseLayer& layer : model.stage1) {
    Eigen::MatrixXd z = (layer.weights * h).colwise() + layer.bias;
    trace.stage1_pre.push_back(z);
    h = relu(z);
    trace.stage1_act.push_back(h);
  }

  trace.stage2_input.resize(rest_width + h.rows(), n);
  trace.stage2_input.topRows(rest_width) = inputs.bottomRows(rest_width);
  trace.stage2_input.bottomRows(h.rows()) = h;

  Eigen::MatrixXd g = trace.stage2_input;
  for (std::size_t i = 0; i < model.stage2.size(); ++i) {
    const DenseLayer& layer = model.stage2[i];
    Eigen::MatrixXd z = (layer.weights * g).colwise() + layer.bias;
    trace.stage2_pre.push_back(z);
    g = (i + 1 == model.stage2.size()) ? z : Eigen::MatrixXd(relu(z));
    trace.stage2_act.push_back(g);
  }
  trace.probs = softmax_columns(g);
  return trace;
}

// Mean cross-entropy gradients over the batch.
Gradients backward_batch(const LscnModel& model, const Eigen::MatrixXd& inputs,
                         const std::vector<int>& labels, const ForwardTrace& trace) {
  const Eigen::Index n = inputs.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  const Eigen::Index rest_width = 3 * (model.k - 1);

  Gradients grads;
  grads.stage1.resize(model.stage1.size());
  grads.stage2.resize(model.stage2.size());

  // Softmax + cross entropy collapses to probs - onehot at the logits.
  Eigen::MatrixXd delta = trace.probs;
  for (Eigen::Index c = 0; c < n; ++c) delta(labels[c], c) -= 1.0;

  for (int i = static_cast<int>(model.stage2.size()) - 1; i >= 0; --i) {
    const Eigen::MatrixXd& act_in =
        (i == 0) ? trace.stage2_input : trace.stage2_act[i - 1];
    grads.stage2[i].weights = delta * act_in.transpose() * inv_n;
    grads.stage2[i].bias = delta.rowwise().sum() * inv_n;
    if (i > 0) {
      delta = (model.stage2[i].weights.transpose() * delta)
                  .cwiseProduct(relu_mask(trace.stage2_pre[i - 1]));
    } else {
      delta = model.stage2[i].weights.transpose() * delta;
    }
  }

  // Only the stage-1 block of the stage-2 input carries gradient back.
  Eigen::MatrixXd delta1 =
      Eigen::MatrixXd(delta.bottomRows(delta.rows() - rest_width))
          .cwiseProduct(relu_mask(trace.stage1_pre.back()));
  for (int i = static_cast<int>(model.stage1.size()) - 1; i >= 0; --i) {
    const Eigen::MatrixXd act_in =
        (i == 0) ? Eigen::MatrixXd(inputs.topRows(3)) : trace.stage1_act[i - 1];
    grads.stage1[i].weights = delta1 * act_in.transpose() * inv_n;
    grads.stage1[i].bias = delta1.rowwise().sum() * inv_n;
    if (i > 0) {
      delta1 = (model.stage1[i].weights.transpose() * delta1)
                   .cwiseProduct(relu_mask(trace.stage1_pre[i - 1]));
    }
  }
  return grads;
}

DenseLayer init_layer(Eigen::Index out, Eigen::Index in, Rng& rng) {
  DenseLayer layer;
  layer.weights.resize(out, in);
  const double limit = std::sqrt(6.0 / static_cast<double>(in));
  for (Eigen::Index r = 0; r < out; ++r) {
    for (Eigen::Index c = 0; c < in; ++c) {
      layer.weights(r, c) = rng.uniform(-limit, limit);
    }
  }
  layer.bias = Eigen::VectorXd::Zero(out);
  return layer;
}

struct AdamState {
  std::vector<LayerGradients> m1, v1, m2, v2;
  long step = 0;

  explicit AdamState(const LscnModel& model) {
    auto zeros_like = [](const std::vector<DenseLayer>& layers) {
      std::vector<LayerGradients> z;
      for (const DenseLayer& l : layers) {
        z.push_back({Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()),
                     Eigen::VectorXd::Zero(l.bias.size())});
      }
      return z;
    };
    m1 = zeros_like(model.stage1);
    v1 = zeros_like(model.stage1);
    m2 = zeros_like(model.stage2);
    v2 = zeros_like(model.stage2);
  }
};

void adam_update_block(std::vector<DenseLayer>& layers,
                       const std::vector<LayerGradients>& grads,
                       std::vector<LayerGradients>& m, std::vector<LayerGradients>& v,
                       const TrainConfig& cfg, double bc1, double bc2) {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    auto step = [&](auto& w, const auto& g, auto& mw, auto& vw) {
      mw = cfg.adam_beta1 * mw + (1.0 - cfg.adam_beta1) * g;
      vw = cfg.adam_beta2 * vw + (1.0 - cfg.adam_beta2) * g.cwiseProduct(g);
      w.array() -= cfg.learning_rate * (mw.array() / bc1) /
                   ((vw.array() / bc2).sqrt() + cfg.adam_epsilon);
    };
    step(layers[i].weights, grads[i].weights, m[i].weights, v[i].weights);
    step(layers[i].bias, grads[i].bias, m[i].bias, v[i].bias);
  }
}

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& rows_by_sample,
                               const std::vector<int>& idx) {
  Eigen::MatrixXd out(rows_by_sample.cols(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) = rows_by_sample.row(idx[i]).transpose();
  }
  return out;
}

void check_dataset(const Dataset& d) {
  if (d.features.rows() == 0) {
    throw Error(ErrorCode::EmptyDataset, "dataset has no rows");
  }
  if (d.features.rows() != static_cast<Eigen::Index>(d.labels.size())) {
    throw Error(ErrorCode::ShapeMismatch, "feature/label count mismatch");
  }
  if (d.features.cols() != 3 * static_cast<Eigen::Index>(d.k)) {
    throw Error(ErrorCode::ShapeMismatch, "feature width must be 3K");
  }
  for (int label : d.labels) {
    if (label < 0 || label > 2) {
      throw Error(ErrorCode::FormatError, "labels must be in {0, 1, 2}");
    }
  }
}

}  // namespace

LscnModel init_model(const Architecture& arch, int k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (arch.stage1_sizes.empty()) {
    throw std::invalid_argument("stage 1 needs at least one layer");
  }
  Rng rng(seed);
  LscnModel model;
  model.k = k;
  Eigen::Index in = 3;
  for (int width : arch.stage1_sizes) {
    model.stage1.push_back(init_layer(width, in, rng));
    in = width;
  }
  Eigen::Index s2_in = 3 * (static_cast<Eigen::Index>(k) - 1) + in;
  for (int width : arch.stage2_hidden) {
    model.stage2.push_back(init_layer(width, s2_in, rng));
    s2_in = width;
  }
  model.stage2.push_back(init_layer(3, s2_in, rng));
  return model;
}

Eigen::Vector3d forward(const LscnModel& model, const Eigen::VectorXd& features) {
  return forward_batch(model, features).probs.col(0);
}

double cross_entropy(const Eigen::Vector3d& probs, int label) {
  if (label < 0 || label > 2) throw std::invalid_argument("label out of range");
  return -std::log(std::max(probs[label], 1e-12));
}

Gradients backward(const LscnModel& model, const Eigen::VectorXd& features, int label) {
  const ForwardTrace trace = forward_batch(model, features);
  return backward_batch(model, features, {label}, trace);
}

std::pair<double, double> evaluate(const LscnModel& model,
                                   const Eigen::MatrixXd& normalized_features,
                                   const std::vector<int>& labels) {
  if (normalized_features.rows() == 0) return {0.0, 0.0};
  const ForwardTrace trace =
      forward_batch(model, normalized_features.transpose());
  double loss_sum = 0.0;
  long correct = 0;
  for (Eigen::Index c = 0; c < trace.probs.cols(); ++c) {
    loss_sum += cross_entropy(trace.probs.col(c), labels[c]);
    Eigen::Index argmax = 0;
    trace.probs.col(c).maxCoeff(&argmax);
    // maxCoeff already returns the first maximal index, matching the
    // lower-class tie rule.
    correct += (argmax == labels[c]) ? 1 : 0;
  }
  const double n = static_cast<double>(trace.probs.cols());
  return {loss_sum / n, static_cast<double>(correct) / n};
}

std::pair<LscnModel, TrainHistory> train(const Dataset& train_set, const Dataset& val_set,
                                         const TrainConfig& cfg, const Architecture& arch) {
  check_dataset(train_set);
  if (val_set.features.rows() > 0) check_dataset(val_set);
  if (cfg.learning_rate < 0.0 || cfg.batch_size < 1 || cfg.epochs < 0) {
    throw std::invalid_argument("bad train config");
  }

  LscnModel model = init_model(arch, train_set.k,
                               derive_seed(cfg.rng_seed, SeedStream::TrainInit, 0));
  model.scaler = FeatureScaler::fit(train_set.features);

  const Eigen::MatrixXd train_norm = model.scaler.apply(train_set.features);
  const Eigen::MatrixXd val_norm = val_set.features.rows() > 0
                                       ? model.scaler.apply(val_set.features)
                                       : Eigen::MatrixXd();

  AdamState adam(model);
  const Eigen::Index n = train_norm.rows();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  TrainHistory history;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(cfg.rng_seed, SeedStream::TrainShuffle,
                                static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.bounded(i)]);
    }
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      std::vector<int> batch(order.begin() + static_cast<long>(start),
                             order.begin() + static_cast<long>(end));
      const Eigen::MatrixXd inputs = gather_columns(train_norm, batch);
      std::vector<int> labels(batch.size());
      for (std::size_t i = 0; i < batch.size(); ++i) {
        labels[i] = train_set.labels[static_cast<std::size_t>(batch[i])];
      }
      const ForwardTrace trace = forward_batch(model, inputs);
      const Gradients grads = backward_batch(model, inputs, labels, trace);
      ++adam.step;
      const double bc1 = 1.0 - std::pow(cfg.adam_beta1, adam.step);
      const double bc2 = 1.0 - std::pow(cfg.adam_beta2, adam.step);
      adam_update_block(model.stage1, grads.stage1, adam.m1, adam.v1, cfg, bc1, bc2);
      adam_update_block(model.stage2, grads.stage2, adam.m2, adam.v2, cfg, bc1, bc2);
    }

    EpochStats stats;
    std::tie(stats.train_loss, stats.train_accuracy) =
        evaluate(model, train_norm, train_set.labels);
    if (val_norm.rows() > 0) {
      std::tie(stats.val_loss, stats.val_accuracy) =
          evaluate(model, val_norm, val_set.labels);
    }
    history.push_back(stats);
  }
  return {std::move(model), std::move(history)};
}

std::pair<LscnModel, TrainHistory> train(const Dataset& dataset, const TrainConfig& cfg,
                                         const Architecture& arch) {
  check_dataset(dataset);
  // Stratified 2/3-1/3 split, seeded.
  std::vector<std::vector<int>> by_class(3);
  for (std::size_t i = 0; i < dataset.labels.size(); ++i) {
    by_class[static_cast<std::size_t>(dataset.labels[i])].push_back(static_cast<int>(i));
  }
  Rng split_rng(derive_seed(cfg.rng_seed, SeedStream::TrainSplit, 0));
  std::vector<int> train_idx, val_idx;
  for (auto& group : by_class) {
    for (std::size_t i = group.size(); i > 1; --i) {
      std::swap(group[i - 1], group[split_rng.bounded(i)]);
    }
    const std::size_t cut = group.size() * 2 / 3;
    train_idx.insert(train_idx.end(), group.begin(), group.begin() + static_cast<long>(cut));
    val_idx.insert(val_idx.end(), group.begin() + static_cast<long>(cut), group.end());
  }
  if (train_idx.empty()) {
    throw Error(ErrorCode::EmptyDataset, "training split is empty");
  }

  auto subset = [&](const std::vector<int>& idx) {
    Dataset d;
    d.k = dataset.k;
    d.features.resize(static_cast<Eigen::Index>(idx.size()), dataset.features.cols());
    d.labels.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      d.features.row(static_cast<Eigen::Index>(i)) = dataset.features.row(idx[i]);
      d.labels[i] = dataset.labels[static_cast<std::size_t>(idx[i])];
    }
    return d;
  };
  return train(subset(train_idx), subset(val_idx), cfg, arch);
}

LinkState predict_state(const LscnModel& model, const Snapshot& snapshot) {
  if (static_cast<int>(snapshot.estimates.size()) != model.k) {
    throw Error(ErrorCode::ShapeMismatch, "snapshot width does not match model K");
  }
  for (std::size_t i = 0; i + 1 < snapshot.estimates.size(); ++i) {
    if (snapshot.estimates[i].snr_db < snapshot.estimates[i + 1].snr_db) {
      throw Error(ErrorCode::ShapeMismatch, "estimates must be SNR-sorted");
    }
  }
  const Eigen::Vector3d probs =
      forward(model, model.scaler.apply(snapshot_features(snapshot)));
  Eigen::Index argmax = 0;
  probs.maxCoeff(&argmax);
  return static_cast<LinkState>(static_cast<int>(argmax));
}

std::vector<KSweepRow> k_sweep(const Dataset& dataset, const std::vector<int>& ks,
                               const TrainConfig& cfg, const Architecture& arch) {
  check_dataset(dataset);
  std::vector<KSweepRow> table;
  for (int k : ks) {
    if (k < 1 || k > dataset.k) {
      throw Error(ErrorCode::ShapeMismatch,
                  "sweep K must lie in [1, dataset K]");
    }
    Dataset truncated;
    truncated.k = k;
    truncated.features = dataset.features.leftCols(3 * k);
    truncated.labels = dataset.labels;
    auto [model, history] = train(truncated, cfg, arch);
    (void)model;
    KSweepRow row;
    row.k = k;
    if (!history.empty()) {
      row.train_accuracy = history.back().train_accuracy;
      row.val_accuracy = history.back().val_accuracy;
    }
    table.push_back(row);
  }
  return table;
}

}  // namespace csmap
