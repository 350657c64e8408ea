#include "csmap/runner.hpp"

#include <algorithm>
#include <cmath>

#include "csmap/reflector.hpp"
#include "csmap/rng.hpp"

namespace csmap {
namespace {

SurfaceDistanceStats surface_stats_of(const PointCloudMap& map, const SceneMesh& mesh) {
  SurfaceDistanceStats stats;
  std::vector<double> dists;
  dists.reserve(map.points.size());
  for (const MappedPoint& mp : map.points) {
    double best = std::numeric_limits<double>::infinity();
    for (const Facet& f : mesh.facets) {
      best = std::min(best, point_facet_distance(mp.mapped, f));
    }
    dists.push_back(best);
  }
  stats.count = dists.size();
  if (dists.empty()) return stats;
  double sum = 0.0;
  for (double d : dists) {
    sum += d;
    stats.max = std::max(stats.max, d);
  }
  stats.mean = sum / static_cast<double>(dists.size());
  std::sort(dists.begin(), dists.end());
  stats.median = dists[dists.size() / 2];
  return stats;
}

}  // namespace

void validate_scenario(const Scenario& s) {
  if (s.total_steps < 0 || s.fix_interval < 1) {
    throw Error(ErrorCode::InvalidScenario, "need T >= 0 and T_c >= 1");
  }
  if (s.k < 1) throw Error(ErrorCode::InvalidScenario, "need K >= 1");
  if (static_cast<int>(s.uav_waypoints.size()) != s.total_steps + 1) {
    throw Error(ErrorCode::InvalidScenario,
                "uav waypoint count must be T + 1 = " + std::to_string(s.total_steps + 1));
  }
  const int needed_gmt = s.total_steps / s.fix_interval + 1;
  if (static_cast<int>(s.gmt_waypoints.size()) < needed_gmt) {
    throw Error(ErrorCode::InvalidScenario,
                "need at least " + std::to_string(needed_gmt) + " gmt waypoints");
  }
  if (s.gmt_waypoints.empty()) {
    throw Error(ErrorCode::InvalidScenario, "gmt waypoints missing");
  }
  const double h = s.gmt_waypoints.front().z;
  for (const Vec3& g : s.gmt_waypoints) {
    if (std::abs(g.z - h) > 1e-9) {
      throw Error(ErrorCode::InvalidScenario, "gmt height must be constant");
    }
  }
  if (s.mesh.facets.empty()) {
    throw Error(ErrorCode::InvalidScenario, "scene mesh is empty");
  }
}

RunReport run(const Scenario& scenario, const LscnModel* model) {
  validate_scenario(scenario);
  if (model != nullptr) {
    if (model->k != scenario.k) {
      throw Error(ErrorCode::InvalidScenario, "model K does not match scenario K");
    }
    if (model->scaler.size() != model->input_width()) {
      throw Error(ErrorCode::InvalidScenario, "model has no fitted feature scaler");
    }
  }

  RunReport report;
  report.steps = scenario.total_steps + 1;
  HpcState state = hpc_init(bsm_fix(scenario.bsm, scenario.uav_waypoints.front(), 0));

  for (int t = 0; t <= scenario.total_steps; ++t) {
    const Vec3& uav_true = scenario.uav_waypoints[static_cast<std::size_t>(t)];
    const Vec3& gmt_pos =
        scenario.gmt_waypoints[static_cast<std::size_t>(t / scenario.fix_interval)];
    report.pose_errors.push_back(distance(state.estimate, uav_true));

    const ChannelSnapshot channel =
        snapshot(gmt_pos, uav_true, scenario.mesh, scenario.channel, t);
    if (channel.paths.empty()) {
      ++report.empty_snapshots;
    } else {
      const Snapshot est =
          estimate(channel, scenario.k, scenario.noise,
                   derive_seed(scenario.master_seed, SeedStream::Estimate,
                               static_cast<std::uint64_t>(t)));
      const LinkState truth = est.true_link_state;
      const LinkState predicted =
          (model != nullptr) ? predict_state(*model, est) : truth;
      report.confusion[static_cast<int>(truth)][static_cast<int>(predicted)] += 1;

      if (predicted == LinkState::FirstOrderNlos) {
        // Algorithm contract: the solver sees the *estimated* receiver pose
        // and the transmitted (true) transmitter position.
        FirstOrderObservation obs;
        obs.uav = state.estimate;
        obs.gmt = gmt_pos;
        obs.tau = est.estimates.front().tau_hat;
        obs.aoa = {est.estimates.front().theta_hat, est.estimates.front().phi_hat};
        try {
          const Vec3 mapped = solve_parametric(obs);
          report.map.points.push_back(
              {mapped, est.true_first_reflection, t, state.estimate});
        } catch (const Error&) {
          ++report.solver_failures;
        }
      }
    }

    if (t < scenario.total_steps) {
      const Vec3& next_true = scenario.uav_waypoints[static_cast<std::size_t>(t + 1)];
      HpcEvent event;
      if ((t + 1) % scenario.fix_interval == 0) {
        event.kind = HpcEvent::Kind::BsmFix;
        event.value = bsm_fix(scenario.bsm, next_true, state.n + 1);
      } else {
        event.kind = HpcEvent::Kind::ImuDisplacement;
        event.value = imu_step(scenario.imu, uav_true, next_true, t);
      }
      state = hpc_update(state, scenario.fix_interval, event);
    }
  }

  report.mapped_points = static_cast<int>(report.map.points.size());
  if (!report.map.points.empty()) {
    std::tie(report.point_mse, report.surface_stats) =
        evaluate_map(report.map, scenario.mesh);
    double sq = 0.0;
    std::size_t paired = 0;
    for (const MappedPoint& mp : report.map.points) {
      if (mp.truth) {
        sq += (mp.mapped - *mp.truth).squared_norm();
        ++paired;
      }
    }
    report.point_mse_sq = paired > 0 ? sq / static_cast<double>(paired) : 0.0;
  }
  return report;
}

std::pair<double, SurfaceDistanceStats> evaluate_map(const PointCloudMap& map,
                                                     const SceneMesh& mesh) {
  if (map.points.empty()) {
    throw Error(ErrorCode::EmptyMap, "no mapped points to evaluate");
  }
  double sum = 0.0;
  std::size_t paired = 0;
  for (const MappedPoint& mp : map.points) {
    if (mp.truth) {
      sum += distance(mp.mapped, *mp.truth);
      ++paired;
    }
  }
  const double mse = paired > 0 ? sum / static_cast<double>(paired) : 0.0;
  return {mse, surface_stats_of(map, mesh)};
}

Dataset generate_lscn_dataset(const SceneMesh& mesh, const GridSpec& grid,
                              const std::vector<Vec3>& tx_positions,
                              const DatasetConfig& cfg) {
  if (grid.nx < 1 || grid.ny < 1 || grid.z_levels.empty()) {
    throw Error(ErrorCode::InvalidScenario, "degenerate receiver grid");
  }
  if (tx_positions.empty()) {
    throw Error(ErrorCode::InvalidScenario, "no transmitter positions");
  }
  std::vector<Snapshot> snapshots;
  std::uint64_t sample_index = 0;
  for (const Vec3& tx : tx_positions) {
    for (double z : grid.z_levels) {
      for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
          const double fx = grid.nx == 1 ? 0.0 : static_cast<double>(ix) / (grid.nx - 1);
          const double fy = grid.ny == 1 ? 0.0 : static_cast<double>(iy) / (grid.ny - 1);
          const Vec3 rx{grid.x0 + fx * (grid.x1 - grid.x0),
                        grid.y0 + fy * (grid.y1 - grid.y0), z};
          const std::uint64_t seed =
              derive_seed(cfg.master_seed, SeedStream::Dataset, sample_index++);
          if (distance(tx, rx) < 1e-9) continue;
          const ChannelSnapshot channel = snapshot(tx, rx, mesh, cfg.channel);
          if (channel.paths.empty()) continue;
          snapshots.push_back(estimate(channel, cfg.k, cfg.noise, seed));
        }
      }
    }
  }
  if (snapshots.empty()) {
    throw Error(ErrorCode::EmptyDataset, "grid produced no reachable samples");
  }
  Dataset dataset;
  dataset.k = cfg.k;
  dataset.features.resize(static_cast<Eigen::Index>(snapshots.size()), 3 * cfg.k);
  dataset.labels.resize(snapshots.size());
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    dataset.features.row(static_cast<Eigen::Index>(i)) =
        snapshot_features(snapshots[i]).transpose();
    dataset.labels[i] = static_cast<int>(snapshots[i].true_link_state);
  }
  return dataset;
}

}  // namespace csmap
