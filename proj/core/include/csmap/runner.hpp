#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csmap/estimation.hpp"
#include "csmap/localization.hpp"
#include "csmap/lscn.hpp"
#include "csmap/raytracer.hpp"

namespace csmap {

/// Receiver grid for dataset generation: uniform in x and y at each listed
/// height.
struct GridSpec {
  double x0 = 0.0, x1 = 0.0;
  int nx = 0;
  double y0 = 0.0, y1 = 0.0;
  int ny = 0;
  std::vector<double> z_levels;
};

/// Everything one simulated flight needs. The transmitter advances every
/// T_c steps, so gmt_waypoints[t / T_c] transmits at step t; all its entries
/// share one height. uav_waypoints has exactly T+1 entries.
struct Scenario {
  SceneMesh mesh;
  std::vector<Vec3> uav_waypoints;
  std::vector<Vec3> gmt_waypoints;
  int total_steps = 0;  // T
  int fix_interval = 1; // T_c
  ChannelConfig channel;
  NoiseConfig noise;
  ImuModel imu;
  BsmModel bsm;
  int k = 9;
  std::uint64_t master_seed = 0;

  // Optional dataset-generation block (used by gen-dataset, not by run).
  std::optional<GridSpec> dataset_grid;
  std::vector<Vec3> dataset_tx_positions;
};

/// Throws InvalidScenario when waypoint counts, the transmitter height, or
/// basic parameters are inconsistent.
void validate_scenario(const Scenario& scenario);

struct MappedPoint {
  Vec3 mapped;
  std::optional<Vec3> truth;  // true bounce point when the true strongest path is single-bounce
  int time_step = 0;
  Vec3 used_pose;             // receiver pose estimate the solver consumed
};

struct PointCloudMap {
  std::vector<MappedPoint> points;
};

struct SurfaceDistanceStats {
  std::size_t count = 0;
  double mean = 0.0;
  double max = 0.0;
  double median = 0.0;
};

struct RunReport {
  PointCloudMap map;
  std::vector<double> pose_errors;  // |estimate - true| per step
  double point_mse = 0.0;           // mean Euclidean pairing distance, meters
  double point_mse_sq = 0.0;        // mean squared pairing distance
  SurfaceDistanceStats surface_stats;
  std::array<std::array<int, 3>, 3> confusion{};  // [true][predicted]
  int steps = 0;
  int mapped_points = 0;
  int solver_failures = 0;
  int empty_snapshots = 0;
};

/// Execute the full loop: trace, estimate, classify, solve single-bounce
/// points against the *estimated* receiver pose, accumulate the cloud, and
/// dead-reckon between fixes. Passing nullptr for the model classifies with
/// the true link state (oracle mode). Deterministic per master_seed.
RunReport run(const Scenario& scenario, const LscnModel* model);

/// Pairing error of mapped points with their ground truth plus the
/// distance-to-nearest-facet distribution. Throws EmptyMap on an empty map.
std::pair<double, SurfaceDistanceStats> evaluate_map(const PointCloudMap& map,
                                                     const SceneMesh& mesh);

struct DatasetConfig {
  ChannelConfig channel;
  NoiseConfig noise;
  int k = 9;
  std::uint64_t master_seed = 0;
};

/// One labeled snapshot per (tx, rx) pair that has at least one path; the
/// label is the bounce-order class of the strongest true path.
Dataset generate_lscn_dataset(const SceneMesh& mesh, const GridSpec& grid,
                              const std::vector<Vec3>& tx_positions,
                              const DatasetConfig& cfg);

}  // namespace csmap
