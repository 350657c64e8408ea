#include "csmap/reflector.hpp"

#include <cmath>
#include <limits>

namespace csmap {
namespace {

constexpr double kSingularTol = 1e-9;

void check_feasible(const FirstOrderObservation& obs) {
  if (!(kSpeedOfLight * obs.tau > distance(obs.uav, obs.gmt))) {
    throw Error(ErrorCode::InfeasibleDelay,
                "c*tau must exceed the transmitter-receiver distance");
  }
}

}  // namespace

Vec3 solve_closed_form(const FirstOrderObservation& obs) {
  check_feasible(obs);
  const double theta = obs.aoa.theta;
  const double phi = obs.aoa.phi;
  if (std::abs(std::sin(theta)) <= kSingularTol ||
      std::abs(std::cos(phi)) <= kSingularTol) {
    throw Error(ErrorCode::SingularGeometry,
                "tan(phi)/cot(theta) undefined; use solve_parametric");
  }
  const double sign = (phi >= -kPi / 2.0 && phi <= kPi / 2.0) ? 1.0 : -1.0;
  const double tan_phi = std::tan(phi);
  const double cot_theta = std::cos(theta) / std::sin(theta);
  const double sec_phi = std::sqrt(1.0 + tan_phi * tan_phi);
  const double big_a = std::sqrt((1.0 + tan_phi * tan_phi) * (1.0 + cot_theta * cot_theta));

  const Vec3& r = obs.uav;
  const Vec3& g = obs.gmt;
  const double ct = kSpeedOfLight * obs.tau;
  const double dy = r.y - g.y;
  const double dz = r.z - g.z;

  const double numerator =
      ct * ct + r.x * r.x - g.x * g.x - dy * dy - dz * dz +
      2.0 * (dy * tan_phi + sign * dz * cot_theta * sec_phi + sign * ct * big_a) * r.x;
  const double denominator =
      2.0 * (sign * ct * big_a + r.x - g.x + sign * dz * cot_theta * sec_phi +
             dy * tan_phi);
  if (std::abs(denominator) < 1e-30) {
    throw Error(ErrorCode::SingularGeometry, "vanishing denominator");
  }
  const double xp = numerator / denominator;
  const double yp = r.y + tan_phi * (xp - r.x);
  const double zp = r.z + sign * cot_theta * (xp - r.x) * sec_phi;
  return {xp, yp, zp};
}

Vec3 solve_parametric(const FirstOrderObservation& obs) {
  check_feasible(obs);
  const Vec3 u = unit_direction(obs.aoa);
  const Vec3 gr = obs.gmt - obs.uav;
  const double ct = kSpeedOfLight * obs.tau;
  const double denom = 2.0 * (ct - u.dot(gr));
  // ct > |gr| >= u.gr, so denom > 0 for every feasible observation; the
  // explicit range check below catches rounding at the feasibility edge.
  const double d1 = (ct * ct - gr.squared_norm()) / denom;
  if (!(d1 > 0.0) || !std::isfinite(d1)) {
    throw Error(ErrorCode::InfeasibleDelay, "observation admits no forward range");
  }
  return obs.uav + u * d1;
}

FirstOrderResiduals residuals_first(const FirstOrderObservation& obs, const Vec3& p) {
  FirstOrderResiduals res;
  const Vec3& r = obs.uav;
  const double dx = p.x - r.x;
  const double dy = p.y - r.y;
  const double horiz = std::hypot(dx, dy);
  res.azimuth = dy - std::tan(obs.aoa.phi) * dx;
  if (horiz < 1e-12) {
    res.elevation = std::numeric_limits<double>::quiet_NaN();
  } else {
    const double cot_theta = std::cos(obs.aoa.theta) / std::sin(obs.aoa.theta);
    res.elevation = (p.z - r.z) / horiz - cot_theta;
  }
  res.delay = distance(p, r) + distance(p, obs.gmt) - kSpeedOfLight * obs.tau;
  return res;
}

std::vector<double> residuals_multi(const MultiBounceCandidate& cand) {
  const std::size_t n = cand.points.size();
  if (n == 0 || cand.normals.size() != n) {
    throw Error(ErrorCode::DegenerateSegment,
                "candidate needs matching non-empty points and normals");
  }
  // Vertex chain P0 = gmt, P1..PN bounces, P(N+1) = uav.
  std::vector<Vec3> chain;
  chain.reserve(n + 2);
  chain.push_back(cand.gmt);
  chain.insert(chain.end(), cand.points.begin(), cand.points.end());
  chain.push_back(cand.uav);

  std::vector<double> res(3 * n + 3, 0.0);

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    const double seg = distance(chain[i], chain[i + 1]);
    if (seg < 1e-12) {
      throw Error(ErrorCode::DegenerateSegment, "zero-length path segment");
    }
    total += seg;
  }
  res[0] = total - kSpeedOfLight * cand.tau;

  for (std::size_t i = 1; i <= n; ++i) {
    const Vec3& m = cand.normals[i - 1];
    const Vec3 to_prev = (chain[i - 1] - chain[i]).normalized();
    const Vec3 to_next = (chain[i + 1] - chain[i]).normalized();
    // Equal angles on either side of the surface.
    res[i] = (to_next - to_prev).dot(m);
    // Bisector of the two outgoing unit vectors aligns with the normal.
    const Vec3 half = (to_prev + to_next) * 0.5;
    const double half_norm = half.norm();
    res[n + i] = (half_norm < 1e-12)
                     ? std::numeric_limits<double>::quiet_NaN()
                     : half.dot(m) / half_norm - 1.0;
    res[2 * n + i] = m.norm() - 1.0;
  }

  // Arrival-direction constraints on the last hop, written from the UAV.
  const Vec3& last = cand.points.back();
  const double dx = last.x - cand.uav.x;
  const double dy = last.y - cand.uav.y;
  const double dz = last.z - cand.uav.z;
  res[3 * n + 1] = dy - std::tan(cand.aoa.phi) * dx;
  const double cot_theta = std::cos(cand.aoa.theta) / std::sin(cand.aoa.theta);
  res[3 * n + 2] = dz - cot_theta * std::hypot(dx, dy);
  return res;
}

MultiBounceCandidate parallel_plane_family(const MultiBounceCandidate& base, double d) {
  if (base.points.size() != 2 || base.normals.size() != 2) {
    throw Error(ErrorCode::NotApplicable, "construction needs exactly two bounces");
  }
  const double align = std::abs(base.normals[0].dot(base.normals[1]));
  if (std::abs(align - 1.0) > 1e-9) {
    throw Error(ErrorCode::NotApplicable, "bounce surfaces are not parallel");
  }
  if (d < 0.0) {
    throw Error(ErrorCode::NotApplicable, "translation distance must be >= 0");
  }
  const Vec3 toward_gmt = base.gmt - base.points[0];
  const double first_leg = toward_gmt.norm();
  if (d >= first_leg) {
    throw Error(ErrorCode::NotApplicable,
                "translation distance must stay below the first segment length");
  }
  // Shifting both points (equivalently both planes) by the same vector keeps
  // every segment direction, hence every angle constraint; the first leg
  // shortens by d and the last lengthens by d, so the total delay holds.
  const Vec3 shift = toward_gmt * (d / first_leg);
  MultiBounceCandidate out = base;
  out.points[0] = base.points[0] + shift;
  out.points[1] = base.points[1] + shift;
  return out;
}

}  // namespace csmap
