#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "csmap/raytracer.hpp"

namespace csmap {

/// Class of the strongest path at a time step.
enum class LinkState : int { Los = 0, FirstOrderNlos = 1, HigherOrderNlos = 2 };

LinkState link_state_of_order(int order);
const char* link_state_name(LinkState s);

/// Measurement error injected on true path parameters, standing in for an
/// estimator front end whose output error it reproduces controllably.
struct NoiseConfig {
  double sigma_tau_s = 0.1e-9;
  double sigma_theta_rad = 0.2 * kPi / 180.0;
  double sigma_phi_rad = 0.2 * kPi / 180.0;
  double pad_snr_db = -90.0;  // SNR assigned to padding rows
};

/// Noisy estimate of one path's delay and arrival angles.
struct PathEstimate {
  double tau_hat = 0.0;    // seconds, > 0
  double theta_hat = 0.0;  // (0, pi)
  double phi_hat = 0.0;    // (-pi, pi]
  double snr_db = 0.0;     // carried for ordering only, not a classifier input
  bool padded = false;
};

/// Fixed-width view of one time step: exactly K estimates, SNR-descending,
/// padded when the channel has fewer paths, plus ground truth for training.
struct Snapshot {
  std::vector<PathEstimate> estimates;
  LinkState true_link_state = LinkState::Los;
  std::optional<Vec3> true_first_reflection;
};

/// Perturb the top-K paths of a channel snapshot with independent Gaussian
/// noise on (tau, theta, phi). Angles are wrapped/clamped to their ranges and
/// delays truncated positive. Padding rows use tau = 2x the largest observed
/// delay, theta = pi/2, phi = 0. Deterministic per seed; throws NoPaths when
/// the channel snapshot is empty.
Snapshot estimate(const ChannelSnapshot& channel, int k, const NoiseConfig& noise,
                  std::uint64_t rng_seed);

/// Row of 3K raw inputs (tau, theta, phi per rank) for the classifier.
Eigen::VectorXd snapshot_features(const Snapshot& snap);

/// Per-feature affine map onto [-1, 1] fitted by min/max. Constant features
/// map to 0.
class FeatureScaler {
 public:
  FeatureScaler() = default;
  FeatureScaler(Eigen::VectorXd mins, Eigen::VectorXd maxs);

  static FeatureScaler fit(const Eigen::MatrixXd& rows);

  Eigen::VectorXd apply(const Eigen::VectorXd& row) const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& rows) const;
  Eigen::VectorXd invert(const Eigen::VectorXd& normalized) const;

  const Eigen::VectorXd& mins() const { return mins_; }
  const Eigen::VectorXd& maxs() const { return maxs_; }
  Eigen::Index size() const { return mins_.size(); }

 private:
  Eigen::VectorXd mins_;
  Eigen::VectorXd maxs_;
};

/// Stack snapshot features into a matrix and fit the scaler on it; returns
/// the normalized matrix. Throws EmptyDataset on an empty list.
std::pair<Eigen::MatrixXd, FeatureScaler> normalize_features(
    const std::vector<Snapshot>& snapshots);

}  // namespace csmap
