#include "csmap/estimation.hpp"

#include <algorithm>
#include <cmath>

#include "csmap/rng.hpp"

namespace csmap {

LinkState link_state_of_order(int order) {
  if (order <= 0) return LinkState::Los;
  return order == 1 ? LinkState::FirstOrderNlos : LinkState::HigherOrderNlos;
}

const char* link_state_name(LinkState s) {
  switch (s) {
    case LinkState::Los: return "los";
    case LinkState::FirstOrderNlos: return "first_order_nlos";
    case LinkState::HigherOrderNlos: return "higher_order_nlos";
  }
  return "unknown";
}

Snapshot estimate(const ChannelSnapshot& channel, int k, const NoiseConfig& noise,
                  std::uint64_t rng_seed) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (channel.paths.empty()) {
    throw Error(ErrorCode::NoPaths, "channel snapshot has no paths");
  }
  Rng rng(rng_seed);
  Snapshot snap;
  const std::size_t kept = std::min<std::size_t>(k, channel.paths.size());
  double max_delay = 0.0;
  for (std::size_t i = 0; i < kept; ++i) {
    const PropagationPath& path = channel.paths[i];
    PathEstimate est;
    est.tau_hat = path.delay + noise.sigma_tau_s * rng.gaussian();
    est.tau_hat = std::max(est.tau_hat, 1e-15);
    est.theta_hat = path.aoa.theta + noise.sigma_theta_rad * rng.gaussian();
    est.theta_hat = std::clamp(est.theta_hat, 1e-12, kPi - 1e-12);
    est.phi_hat = wrap_pi(path.aoa.phi + noise.sigma_phi_rad * rng.gaussian());
    est.snr_db = path.snr_db;
    snap.estimates.push_back(est);
    max_delay = std::max(max_delay, path.delay);
  }
  while (snap.estimates.size() < static_cast<std::size_t>(k)) {
    PathEstimate pad;
    pad.tau_hat = 2.0 * max_delay;
    pad.theta_hat = kPi / 2.0;
    pad.phi_hat = 0.0;
    pad.snr_db = noise.pad_snr_db;
    pad.padded = true;
    snap.estimates.push_back(pad);
  }
  const PropagationPath& strongest = channel.paths.front();
  snap.true_link_state = link_state_of_order(strongest.order);
  if (strongest.order == 1) {
    snap.true_first_reflection = strongest.reflection_points.front();
  }
  return snap;
}

Eigen::VectorXd snapshot_features(const Snapshot& snap) {
  Eigen::VectorXd row(3 * static_cast<Eigen::Index>(snap.estimates.size()));
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(snap.estimates.size()); ++i) {
    const PathEstimate& e = snap.estimates[i];
    row[3 * i] = e.tau_hat;
    row[3 * i + 1] = e.theta_hat;
    row[3 * i + 2] = e.phi_hat;
  }
  return row;
}

FeatureScaler::FeatureScaler(Eigen::VectorXd mins, Eigen::VectorXd maxs)
    : mins_(std::move(mins)), maxs_(std::move(maxs)) {
  if (mins_.size() != maxs_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "scaler min/max sizes differ");
  }
}

FeatureScaler FeatureScaler::fit(const Eigen::MatrixXd& rows) {
  if (rows.rows() == 0) {
    throw Error(ErrorCode::EmptyDataset, "cannot fit scaler on empty data");
  }
  return FeatureScaler(rows.colwise().minCoeff(), rows.colwise().maxCoeff());
}

Eigen::VectorXd FeatureScaler::apply(const Eigen::VectorXd& row) const {
  if (row.size() != mins_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "feature width does not match scaler");
  }
  Eigen::VectorXd out(row.size());
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    const double span = maxs_[j] - mins_[j];
    out[j] = (span <= 0.0) ? 0.0 : 2.0 * (row[j] - mins_[j]) / span - 1.0;
  }
  return out;
}

Eigen::MatrixXd FeatureScaler::apply(const Eigen::MatrixXd& rows) const {
  Eigen::MatrixXd out(rows.rows(), rows.cols());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    out.row(i) = apply(Eigen::VectorXd(rows.row(i))).transpose();
  }
  return out;
}

Eigen::VectorXd FeatureScaler::invert(const Eigen::VectorXd& normalized) const {
  if (normalized.size() != mins_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "feature width does not match scaler");
  }
  Eigen::VectorXd out(normalized.size());
  for (Eigen::Index j = 0; j < normalized.size(); ++j) {
    const double span = maxs_[j] - mins_[j];
    out[j] = (span <= 0.0) ? mins_[j] : mins_[j] + (normalized[j] + 1.0) * span / 2.0;
  }
  return out;
}

std::pair<Eigen::MatrixXd, FeatureScaler> normalize_features(
    const std::vector<Snapshot>& snapshots) {
  if (snapshots.empty()) {
    throw Error(ErrorCode::EmptyDataset, "no snapshots to normalize");
  }
  const Eigen::Index width = 3 * static_cast<Eigen::Index>(snapshots.front().estimates.size());
  Eigen::MatrixXd raw(static_cast<Eigen::Index>(snapshots.size()), width);
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    const Eigen::VectorXd row = snapshot_features(snapshots[i]);
    if (row.size() != width) {
      throw Error(ErrorCode::ShapeMismatch, "snapshots have mixed K");
    }
    raw.row(i) = row.transpose();
  }
  FeatureScaler scaler = FeatureScaler::fit(raw);
  return {scaler.apply(raw), scaler};
}

}  // namespace csmap
