#include "csmap/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace csmap {
namespace {

constexpr double kCoplanarTol = 1e-6;   // meters
constexpr double kRayMinDistance = 1e-9;
constexpr double kSegmentEps = 1e-6;    // open-segment hit-parameter margin

// Dominant axis of a normal: 0=x, 1=y, 2=z.
int dominant_axis(const Vec3& n) {
  const double ax = std::abs(n.x), ay = std::abs(n.y), az = std::abs(n.z);
  if (ax >= ay && ax >= az) return 0;
  return (ay >= az) ? 1 : 2;
}

void project_2d(const Vec3& p, int drop_axis, double& u, double& v) {
  switch (drop_axis) {
    case 0: u = p.y; v = p.z; break;
    case 1: u = p.x; v = p.z; break;
    default: u = p.x; v = p.y; break;
  }
}

// Even-odd rule point-in-polygon on the dominant-axis projection.
bool point_in_polygon(const Vec3& p, const Facet& facet) {
  const int drop = dominant_axis(facet.unit_normal);
  double px, py;
  project_2d(p, drop, px, py);
  bool inside = false;
  const std::size_t n = facet.vertices.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    double xi, yi, xj, yj;
    project_2d(facet.vertices[i], drop, xi, yi);
    project_2d(facet.vertices[j], drop, xj, yj);
    if ((yi > py) != (yj > py) &&
        px < (xj - xi) * (py - yi) / (yj - yi) + xi) {
      inside = !inside;
    }
  }
  return inside;
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squared_norm();
  if (len2 <= 0.0) return distance(p, a);
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

}  // namespace

Vec3 Vec3::normalized() const {
  const double n = norm();
  if (n <= 0.0) {
    throw Error(ErrorCode::DegenerateDirection, "cannot normalize zero vector");
  }
  return *this / n;
}

double wrap_pi(double angle) {
  double a = std::fmod(angle + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

AoA aoa_from_points(const Vec3& from, const Vec3& to) {
  const Vec3 d = to - from;
  const double n = d.norm();
  if (n <= 0.0) {
    throw Error(ErrorCode::DegenerateDirection, "coincident points have no direction");
  }
  const Vec3 u = d / n;
  const double horiz = std::hypot(u.x, u.y);
  if (horiz < 1e-12) {
    // Polar convention: straight up/down maps to phi = 0.
    return {u.z > 0.0 ? 0.0 : kPi, 0.0};
  }
  const double theta = std::acos(std::clamp(u.z, -1.0, 1.0));
  return {theta, wrap_pi(std::atan2(u.y, u.x))};
}

Vec3 unit_direction(const AoA& aoa) {
  const double st = std::sin(aoa.theta);
  return {st * std::cos(aoa.phi), st * std::sin(aoa.phi), std::cos(aoa.theta)};
}

Facet make_facet(int facet_id, std::vector<Vec3> vertices) {
  if (vertices.size() < 3) {
    throw std::invalid_argument("facet needs at least 3 vertices");
  }
  // Newell's method: robust for non-convex loops.
  Vec3 n{};
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const Vec3& a = vertices[i];
    const Vec3& b = vertices[(i + 1) % vertices.size()];
    n.x += (a.y - b.y) * (a.z + b.z);
    n.y += (a.z - b.z) * (a.x + b.x);
    n.z += (a.x - b.x) * (a.y + b.y);
  }
  const double len = n.norm();
  if (len < 1e-12) {
    throw std::invalid_argument("facet vertices are collinear or zero-area");
  }
  Facet facet{facet_id, std::move(vertices), n / len};
  for (const Vec3& v : facet.vertices) {
    if (std::abs(plane_signed_distance(v, facet)) > kCoplanarTol) {
      throw std::invalid_argument("facet vertices are not coplanar within 1e-6 m");
    }
  }
  return facet;
}

SceneMesh make_mesh(std::vector<Facet> facets) {
  SceneMesh mesh;
  mesh.facets = std::move(facets);
  std::set<int> ids;
  for (const Facet& f : mesh.facets) {
    if (!ids.insert(f.facet_id).second) {
      throw std::invalid_argument("duplicate facet_id " + std::to_string(f.facet_id));
    }
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  mesh.bbox_min = {inf, inf, inf};
  mesh.bbox_max = {-inf, -inf, -inf};
  for (const Facet& f : mesh.facets) {
    for (const Vec3& v : f.vertices) {
      mesh.bbox_min = {std::min(mesh.bbox_min.x, v.x), std::min(mesh.bbox_min.y, v.y),
                       std::min(mesh.bbox_min.z, v.z)};
      mesh.bbox_max = {std::max(mesh.bbox_max.x, v.x), std::max(mesh.bbox_max.y, v.y),
                       std::max(mesh.bbox_max.z, v.z)};
    }
  }
  if (mesh.facets.empty()) {
    mesh.bbox_min = mesh.bbox_max = {0.0, 0.0, 0.0};
  }
  return mesh;
}

double plane_signed_distance(const Vec3& p, const Facet& facet) {
  return (p - facet.vertices.front()).dot(facet.unit_normal);
}

Vec3 mirror_point(const Vec3& p, const Facet& facet) {
  return p - facet.unit_normal * (2.0 * plane_signed_distance(p, facet));
}

std::optional<RayHit> ray_facet_intersect(const Vec3& origin, const Vec3& dir,
                                          const Facet& facet) {
  const double denom = dir.dot(facet.unit_normal);
  if (std::abs(denom) < 1e-12) return std::nullopt;  // parallel to the plane
  const double t = (facet.vertices.front() - origin).dot(facet.unit_normal) / denom;
  if (t <= kRayMinDistance) return std::nullopt;
  const Vec3 hit = origin + dir * t;
  if (!point_in_polygon(hit, facet)) return std::nullopt;
  return RayHit{hit, t};
}

bool segment_occluded(const Vec3& a, const Vec3& b, const SceneMesh& mesh,
                      const std::set<int>& ignore) {
  const Vec3 d = b - a;
  for (const Facet& f : mesh.facets) {
    if (ignore.contains(f.facet_id)) continue;
    const double denom = d.dot(f.unit_normal);
    if (std::abs(denom) < 1e-15) continue;
    const double s = (f.vertices.front() - a).dot(f.unit_normal) / denom;
    if (s <= kSegmentEps || s >= 1.0 - kSegmentEps) continue;
    if (point_in_polygon(a + d * s, f)) return true;
  }
  return false;
}

double point_facet_distance(const Vec3& p, const Facet& facet) {
  const double plane_dist = plane_signed_distance(p, facet);
  const Vec3 foot = p - facet.unit_normal * plane_dist;
  if (point_in_polygon(foot, facet)) return std::abs(plane_dist);
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = facet.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    best = std::min(best, point_segment_distance(p, facet.vertices[i],
                                                 facet.vertices[(i + 1) % n]));
  }
  return best;
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateDirection: return "DegenerateDirection";
    case ErrorCode::InvalidPath: return "InvalidPath";
    case ErrorCode::NoPaths: return "NoPaths";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::InfeasibleDelay: return "InfeasibleDelay";
    case ErrorCode::SingularGeometry: return "SingularGeometry";
    case ErrorCode::DegenerateSegment: return "DegenerateSegment";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::EmptyMap: return "EmptyMap";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatError: return "FormatError";
  }
  return "UnknownError";
}

}  // namespace csmap
