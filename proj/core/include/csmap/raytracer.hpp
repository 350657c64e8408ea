#pragma once

#include <optional>
#include <vector>

#include "csmap/geometry.hpp"
#include "csmap/reflector.hpp"

namespace csmap {

/// Free-space link budget knobs. Only the resulting SNR ordering matters
/// downstream, so a flat per-bounce loss stands in for material effects.
struct ChannelConfig {
  double tx_power_dbm = 30.0;
  double carrier_hz = 30e9;
  double reflection_loss_db = 10.0;
  double noise_floor_dbm = -90.0;
  int max_order = 2;
};

/// One propagation path between transmitter (GMT) and receiver (UAV).
/// order 0 is the direct path; order N >= 1 bounces off N facets.
struct PropagationPath {
  int order = 0;
  std::vector<Vec3> reflection_points;  // length == order, in travel order
  std::vector<int> facet_ids;           // length == order
  double delay = 0.0;                   // seconds, path_length / c
  AoA aoa;                              // arrival direction at the UAV
  AoA aod;                              // departure direction at the GMT
  double snr_db = 0.0;
  double path_length = 0.0;             // meters
};

/// All paths at one time step, strongest first (SNR descending, ties broken
/// by shorter delay then smaller facet-id tuple, so the order is total).
struct ChannelSnapshot {
  std::vector<PropagationPath> paths;
  Vec3 gmt_pos;
  Vec3 uav_pos;
  int time_step = 0;
};

/// Direct path, or nullopt when any facet blocks the segment.
std::optional<PropagationPath> trace_los(const Vec3& gmt, const Vec3& uav,
                                         const SceneMesh& mesh);

/// All single-bounce specular paths via the image method: mirror the
/// transmitter across each facet, intersect the image-to-receiver ray with
/// the facet polygon, and keep hits whose two legs are unobstructed.
std::vector<PropagationPath> trace_first_order(const Vec3& gmt, const Vec3& uav,
                                               const SceneMesh& mesh);

/// All double-bounce specular paths via the double-image method over ordered
/// facet pairs.
std::vector<PropagationPath> trace_second_order(const Vec3& gmt, const Vec3& uav,
                                                const SceneMesh& mesh);

/// Friis-style SNR: tx - 20 log10(4 pi L / lambda) - order * bounce loss
/// - noise floor. Throws InvalidPath for non-positive lengths.
double snr_model(double path_length, int order, const ChannelConfig& cfg);

/// Trace every path up to cfg.max_order, assign SNRs, and sort.
ChannelSnapshot snapshot(const Vec3& gmt, const Vec3& uav, const SceneMesh& mesh,
                         const ChannelConfig& cfg, int time_step = 0);

/// Repackage a traced path for the constraint evaluator, orienting each
/// facet normal toward the incoming side.
MultiBounceCandidate to_candidate(const PropagationPath& path, const Vec3& gmt,
                                  const Vec3& uav, const SceneMesh& mesh);

}  // namespace csmap
