#include "csmap/raytracer.hpp"

#include <algorithm>
#include <cmath>

namespace csmap {
namespace {

constexpr double kMinSegment = 1e-9;

const Facet* find_facet(const SceneMesh& mesh, int facet_id) {
  for (const Facet& f : mesh.facets) {
    if (f.facet_id == facet_id) return &f;
  }
  return nullptr;
}

PropagationPath finalize(PropagationPath path, const Vec3& gmt, const Vec3& uav,
                         const ChannelConfig& cfg) {
  double length = 0.0;
  Vec3 prev = gmt;
  for (const Vec3& p : path.reflection_points) {
    length += distance(prev, p);
    prev = p;
  }
  length += distance(prev, uav);
  path.path_length = length;
  path.delay = length / kSpeedOfLight;
  const Vec3& first_toward = path.reflection_points.empty()
                                 ? uav : path.reflection_points.front();
  const Vec3& last_toward = path.reflection_points.empty()
                                ? gmt : path.reflection_points.back();
  path.aoa = aoa_from_points(uav, last_toward);
  path.aod = aoa_from_points(gmt, first_toward);
  path.snr_db = snr_model(length, path.order, cfg);
  return path;
}

bool snr_order(const PropagationPath& a, const PropagationPath& b) {
  if (a.snr_db != b.snr_db) return a.snr_db > b.snr_db;
  if (a.delay != b.delay) return a.delay < b.delay;
  return a.facet_ids < b.facet_ids;
}

}  // namespace

std::optional<PropagationPath> trace_los(const Vec3& gmt, const Vec3& uav,
                                         const SceneMesh& mesh) {
  if (distance(gmt, uav) < kMinSegment) {
    throw Error(ErrorCode::DegenerateDirection, "coincident endpoints");
  }
  if (segment_occluded(gmt, uav, mesh)) return std::nullopt;
  PropagationPath path;
  path.order = 0;
  return finalize(std::move(path), gmt, uav, ChannelConfig{});
}

std::vector<PropagationPath> trace_first_order(const Vec3& gmt, const Vec3& uav,
                                               const SceneMesh& mesh) {
  std::vector<PropagationPath> out;
  for (const Facet& f : mesh.facets) {
    const Vec3 image = mirror_point(gmt, f);
    const Vec3 to_uav = uav - image;
    const double span = to_uav.norm();
    if (span < kMinSegment) continue;
    const auto hit = ray_facet_intersect(image, to_uav / span, f);
    if (!hit || hit->distance >= span - kMinSegment) continue;
    const Vec3& p = hit->point;
    if (distance(gmt, p) < kMinSegment || distance(p, uav) < kMinSegment) continue;
    if (segment_occluded(gmt, p, mesh, {f.facet_id})) continue;
    if (segment_occluded(p, uav, mesh, {f.facet_id})) continue;
    PropagationPath path;
    path.order = 1;
    path.reflection_points = {p};
    path.facet_ids = {f.facet_id};
    out.push_back(finalize(std::move(path), gmt, uav, ChannelConfig{}));
  }
  return out;
}

std::vector<PropagationPath> trace_second_order(const Vec3& gmt, const Vec3& uav,
                                                const SceneMesh& mesh) {
  std::vector<PropagationPath> out;
  for (const Facet& f1 : mesh.facets) {
    const Vec3 image1 = mirror_point(gmt, f1);
    for (const Facet& f2 : mesh.facets) {
      if (f1.facet_id == f2.facet_id) continue;
      const Vec3 image2 = mirror_point(image1, f2);

      // Backtrace: receiver toward the double image fixes P2, then P2
      // toward the single image fixes P1.
      const Vec3 to_image2 = image2 - uav;
      const double span2 = to_image2.norm();
      if (span2 < kMinSegment) continue;
      const auto hit2 = ray_facet_intersect(uav, to_image2 / span2, f2);
      if (!hit2 || hit2->distance >= span2 - kMinSegment) continue;
      const Vec3& p2 = hit2->point;

      const Vec3 to_image1 = image1 - p2;
      const double span1 = to_image1.norm();
      if (span1 < kMinSegment) continue;
      const auto hit1 = ray_facet_intersect(p2, to_image1 / span1, f1);
      if (!hit1 || hit1->distance >= span1 - kMinSegment) continue;
      const Vec3& p1 = hit1->point;

      if (distance(gmt, p1) < kMinSegment || distance(p1, p2) < kMinSegment ||
          distance(p2, uav) < kMinSegment) {
        continue;
      }
      if (segment_occluded(gmt, p1, mesh, {f1.facet_id})) continue;
      if (segment_occluded(p1, p2, mesh, {f1.facet_id, f2.facet_id})) continue;
      if (segment_occluded(p2, uav, mesh, {f2.facet_id})) continue;

      PropagationPath path;
      path.order = 2;
      path.reflection_points = {p1, p2};
      path.facet_ids = {f1.facet_id, f2.facet_id};
      out.push_back(finalize(std::move(path), gmt, uav, ChannelConfig{}));
    }
  }
  return out;
}

double snr_model(double path_length, int order, const ChannelConfig& cfg) {
  if (!(path_length > 0.0)) {
    throw Error(ErrorCode::InvalidPath, "path length must be positive");
  }
  const double lambda = kSpeedOfLight / cfg.carrier_hz;
  const double spreading_db = 20.0 * std::log10(4.0 * kPi * path_length / lambda);
  return cfg.tx_power_dbm - spreading_db - order * cfg.reflection_loss_db -
         cfg.noise_floor_dbm;
}

ChannelSnapshot snapshot(const Vec3& gmt, const Vec3& uav, const SceneMesh& mesh,
                         const ChannelConfig& cfg, int time_step) {
  ChannelSnapshot snap;
  snap.gmt_pos = gmt;
  snap.uav_pos = uav;
  snap.time_step = time_step;

  if (auto los = trace_los(gmt, uav, mesh)) snap.paths.push_back(std::move(*los));
  if (cfg.max_order >= 1) {
    for (auto& p : trace_first_order(gmt, uav, mesh)) snap.paths.push_back(std::move(p));
  }
  if (cfg.max_order >= 2) {
    for (auto& p : trace_second_order(gmt, uav, mesh)) snap.paths.push_back(std::move(p));
  }
  for (auto& p : snap.paths) p.snr_db = snr_model(p.path_length, p.order, cfg);
  std::sort(snap.paths.begin(), snap.paths.end(), snr_order);
  return snap;
}

MultiBounceCandidate to_candidate(const PropagationPath& path, const Vec3& gmt,
                                  const Vec3& uav, const SceneMesh& mesh) {
  if (path.order < 1) {
    throw Error(ErrorCode::InvalidPath, "direct paths have no bounce points");
  }
  MultiBounceCandidate cand;
  cand.gmt = gmt;
  cand.uav = uav;
  cand.points = path.reflection_points;
  cand.tau = path.delay;
  cand.aoa = path.aoa;
  Vec3 prev = gmt;
  for (std::size_t i = 0; i < path.reflection_points.size(); ++i) {
    const Facet* facet = find_facet(mesh, path.facet_ids[i]);
    if (facet == nullptr) {
      throw Error(ErrorCode::InvalidPath, "path references unknown facet");
    }
    Vec3 n = facet->unit_normal;
    // Point the normal at the incoming side.
    if ((prev - path.reflection_points[i]).dot(n) < 0.0) n = -n;
    cand.normals.push_back(n);
    prev = path.reflection_points[i];
  }
  return cand;
}

}  // namespace csmap
