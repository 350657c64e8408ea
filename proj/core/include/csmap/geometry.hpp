#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <vector>

#include "csmap/errors.hpp"

namespace csmap {

/// Speed of light in vacuum [m/s], exact.
inline constexpr double kSpeedOfLight = 299792458.0;

inline constexpr double kPi = 3.14159265358979323846;

/// 3D point or direction in the world frame. Lengths in meters.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }

  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  constexpr double squared_norm() const { return dot(*this); }
  Vec3 normalized() const;

  constexpr bool operator==(const Vec3& o) const = default;
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double distance(const Vec3& a, const Vec3& b) { return (b - a).norm(); }

/// Arrival direction at a receiver. theta is the polar angle measured from
/// +Z in (0, pi); phi the azimuth from +X in (-pi, pi] via atan2. The unit
/// direction is u = (sin t cos p, sin t sin p, cos t).
struct AoA {
  double theta = 0.0;
  double phi = 0.0;
};

/// Wrap an angle to (-pi, pi].
double wrap_pi(double angle);

/// Direction angles of `to` as seen from `from`. Throws DegenerateDirection
/// when the points coincide. Exactly polar directions return theta in
/// {0, pi} with phi = 0 by convention.
AoA aoa_from_points(const Vec3& from, const Vec3& to);

/// Unit vector u(theta, phi); norm 1 within 1e-12.
Vec3 unit_direction(const AoA& aoa);

/// Planar polygonal reflector. Vertices are coplanar (within 1e-6 m) and
/// ordered along the boundary; unit_normal is Newell-orientation normalized.
struct Facet {
  int facet_id = 0;
  std::vector<Vec3> vertices;
  Vec3 unit_normal;
  // Convex and concave simple polygons are both fine; containment tests use
  // an even-odd rule on the dominant-axis projection.
};

/// Build a facet from ordered vertices, computing and validating the normal.
/// Throws std::invalid_argument on fewer than 3 vertices, a degenerate
/// (zero-area) loop, or non-coplanar input.
Facet make_facet(int facet_id, std::vector<Vec3> vertices);

struct SceneMesh {
  std::vector<Facet> facets;
  Vec3 bbox_min;
  Vec3 bbox_max;
};

/// Assemble a mesh and its bounding box. Facet ids must be unique.
SceneMesh make_mesh(std::vector<Facet> facets);

/// Mirror image of p across the facet's supporting plane (involution).
Vec3 mirror_point(const Vec3& p, const Facet& facet);

struct RayHit {
  Vec3 point;
  double distance = 0.0;
};

/// First intersection of the ray origin + t*dir (t > 1e-9) with the facet
/// polygon, or nullopt if the ray is parallel, behind, or misses the polygon.
/// dir must be unit-norm.
std::optional<RayHit> ray_facet_intersect(const Vec3& origin, const Vec3& dir,
                                          const Facet& facet);

/// True iff any facet not in `ignore` crosses the open segment (a, b) with
/// hit parameter in (1e-6, 1 - 1e-6).
bool segment_occluded(const Vec3& a, const Vec3& b, const SceneMesh& mesh,
                      const std::set<int>& ignore = {});

/// Signed distance of p to the facet's supporting plane.
double plane_signed_distance(const Vec3& p, const Facet& facet);

/// Euclidean distance from p to the facet polygon (interior or boundary).
double point_facet_distance(const Vec3& p, const Facet& facet);

}  // namespace csmap
