#pragma once

#include <vector>

#include "csmap/geometry.hpp"

namespace csmap {

/// Known quantities for recovering a single-bounce reflection point: receiver
/// (UAV) position, transmitter (GMT) position, total time of flight, and the
/// arrival direction at the receiver.
struct FirstOrderObservation {
  Vec3 uav;
  Vec3 gmt;
  double tau = 0.0;  // seconds
  AoA aoa;
};

/// A candidate multi-bounce path: endpoints, N bounce points in travel order,
/// and the unit surface normal at each bounce.
struct MultiBounceCandidate {
  Vec3 gmt;
  Vec3 uav;
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  double tau = 0.0;
  AoA aoa;  // arrival direction at the UAV (toward the last bounce)
};

/// Reflection point of a single-bounce path in closed form.
///
/// With A = sqrt((1 + tan^2 phi)(1 + cot^2 theta)), the x coordinate is the
/// ratio of
///   c^2 tau^2 + xR^2 - xG^2 - (yR-yG)^2 - (zR-zG)^2
///     + 2[(yR-yG) tan phi +- (zR-zG) cot theta sqrt(1+tan^2 phi) +- c tau A] xR
/// over
///   2[+- c tau A + xR - xG +- (zR-zG) cot theta sqrt(1+tan^2 phi)
///     + (yR-yG) tan phi],
/// then y = yR + tan(phi)(x - xR) and
/// z = zR +- cot(theta)(x - xR) sqrt(1 + tan^2 phi). All signs switch
/// together: plus when phi lies in [-pi/2, pi/2] (equivalently x >= xR),
/// minus otherwise.
///
/// Throws InfeasibleDelay when c*tau <= |uav - gmt| and SingularGeometry when
/// |cos phi| or sin(theta) is below 1e-9 (tan/cot blow up; use
/// solve_parametric there).
Vec3 solve_closed_form(const FirstOrderObservation& obs);

/// Same point by the singularity-free route: with u the arrival unit
/// direction, the receiver-side range is
///   d1 = (c^2 tau^2 - |G - R|^2) / (2 (c tau - u . (G - R)))
/// and P = R + d1 u. Defined at all angles; throws InfeasibleDelay when
/// c*tau <= |uav - gmt|.
Vec3 solve_parametric(const FirstOrderObservation& obs);

struct FirstOrderResiduals {
  double azimuth = 0.0;    // (yP - yR) - tan(phi) (xP - xR)
  double elevation = 0.0;  // (zP - zR)/horiz - tan(pi/2 - theta); NaN if horiz ~ 0
  double delay = 0.0;      // |P - R| + |P - G| - c tau, meters
};

/// Residuals of the three single-bounce constraints at a candidate point.
FirstOrderResiduals residuals_first(const FirstOrderObservation& obs, const Vec3& p);

/// Residuals of the full multi-bounce constraint system, in frozen order:
///   [0]            total delay: sum of segment lengths - c tau
///   [1 .. N]       specular equal-angle at each bounce
///   [N+1 .. 2N]    bisector/normal alignment at each bounce
///   [2N+1 .. 3N]   |m_i| - 1
///   [3N+1]         (y_N - y_uav) - tan(phi) (x_N - x_uav)
///   [3N+2]         (z_N - z_uav) - tan(pi/2 - theta) * horizontal range
/// A physically valid specular path evaluates below 1e-9 everywhere. Throws
/// DegenerateSegment on zero-length segments.
std::vector<double> residuals_multi(const MultiBounceCandidate& cand);

/// Non-uniqueness witness for two-bounce paths off parallel surfaces: shifts
/// both bounce points by d meters along the unit vector from P1 toward the
/// transmitter. The shifted pair still satisfies every constraint (same total
/// length, same arrival direction) while the points move by exactly d.
/// Requires parallel normals (else NotApplicable) and d < |P1 - gmt|.
MultiBounceCandidate parallel_plane_family(const MultiBounceCandidate& base, double d);

}  // namespace csmap
