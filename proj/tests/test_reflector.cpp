#include <doctest.h>

#include <cmath>

#include "csmap/raytracer.hpp"
#include "csmap/reflector.hpp"
#include "csmap/rng.hpp"
#include "csmap/scenes.hpp"

using namespace csmap;

namespace {

FirstOrderObservation observation_of(const PropagationPath& path, const Vec3& gmt,
                                     const Vec3& uav) {
  return {uav, gmt, path.delay, path.aoa};
}

// The worked single-bounce configuration used throughout.
FirstOrderObservation street_corner_obs() {
  const Vec3 uav{53.97, 23.24, 2.0};
  const Vec3 gmt{28.20, 23.04, 2.0};
  const Vec3 p{41.59, 39.09, 2.0};
  const double tau = (distance(gmt, p) + distance(p, uav)) / kSpeedOfLight;
  return {uav, gmt, tau, aoa_from_points(uav, p)};
}

}  // namespace

TEST_CASE("closed form solves the ground-mirror case") {
  // gmt (0,0,1), uav (2,0,1), bounce on z=0 at (1,0,0).
  const FirstOrderObservation obs{
      {2, 0, 1}, {0, 0, 1}, 2.0 * std::sqrt(2.0) / kSpeedOfLight, {3 * kPi / 4, kPi}};
  const Vec3 p = solve_closed_form(obs);
  CHECK(distance(p, {1, 0, 0}) < 1e-9);
  CHECK(distance(solve_parametric(obs), {1, 0, 0}) < 1e-9);
}

TEST_CASE("closed form reproduces the street-corner point on the minus branch") {
  const FirstOrderObservation obs = street_corner_obs();
  CHECK(obs.aoa.phi > kPi / 2);  // exercises the minus-sign branch
  const Vec3 closed = solve_closed_form(obs);
  CHECK(distance(closed, {41.59, 39.09, 2.0}) < 1e-6);
  CHECK(closed.x < obs.uav.x);
  const Vec3 parametric = solve_parametric(obs);
  CHECK(distance(parametric, {41.59, 39.09, 2.0}) < 1e-9);
}

TEST_CASE("infeasible delay is rejected") {
  FirstOrderObservation obs{{0, 0, 0}, {10, 0, 0}, 1e-9, {kPi / 2, 0}};
  CHECK_THROWS_AS(solve_closed_form(obs), Error);
  CHECK_THROWS_AS(solve_parametric(obs), Error);
  try {
    solve_parametric(obs);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InfeasibleDelay);
  }
}

TEST_CASE("parametric succeeds where the closed form is singular") {
  // Retro bounce straight along +Y: phi = pi/2 exactly, xP == xR.
  const FirstOrderObservation obs{
      {0, 0, 1}, {0, 1, 1}, 5.0 / kSpeedOfLight, {kPi / 2, kPi / 2}};
  CHECK_THROWS_AS(solve_closed_form(obs), Error);
  try {
    solve_closed_form(obs);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularGeometry);
  }
  const Vec3 p = solve_parametric(obs);
  CHECK(distance(p, {0, 3, 1}) < 1e-9);
}

TEST_CASE("solvers agree with the ray tracer across scene paths") {
  const SceneMesh mesh = builtin_scene("two-buildings");
  Rng rng(77);
  int solved = 0;
  while (solved < 1500) {
    const Vec3 gmt{rng.uniform(5, 75), rng.uniform(5, 55), 2.0};
    const Vec3 uav{rng.uniform(5, 75), rng.uniform(5, 55), rng.uniform(1, 12)};
    for (const PropagationPath& path : trace_first_order(gmt, uav, mesh)) {
      const FirstOrderObservation obs = observation_of(path, gmt, uav);
      if (std::abs(std::cos(obs.aoa.phi)) < 1e-6 ||
          std::abs(std::sin(obs.aoa.theta)) < 1e-6) {
        continue;
      }
      const Vec3& truth = path.reflection_points.front();
      const Vec3 closed = solve_closed_form(obs);
      const Vec3 parametric = solve_parametric(obs);
      CHECK(distance(closed, truth) < 1e-6);
      CHECK(distance(parametric, truth) < 1e-7);
      CHECK(distance(closed, parametric) < 1e-6);
      // Every solution sits on the constant-delay spheroid with foci at the
      // endpoints.
      CHECK(std::abs(residuals_first(obs, parametric).delay) < 1e-9);

      // Sign rule: the branch choice equals the sign of xP - xR.
      const bool plus_branch = obs.aoa.phi >= -kPi / 2 && obs.aoa.phi <= kPi / 2;
      CHECK(plus_branch == (truth.x >= obs.uav.x));
      ++solved;
    }
  }
}

TEST_CASE("first-order residuals vanish at the truth and flag perturbations") {
  const FirstOrderObservation obs = street_corner_obs();
  const Vec3 truth{41.59, 39.09, 2.0};
  const FirstOrderResiduals at_truth = residuals_first(obs, truth);
  CHECK(std::abs(at_truth.azimuth) < 1e-9);
  CHECK(std::abs(at_truth.elevation) < 1e-9);
  CHECK(std::abs(at_truth.delay) < 1e-9);

  // Slide 0.1 m along the arrival ray: the delay residual grows by
  // 0.1 plus the transmitter-side length change.
  const Vec3 u = unit_direction(obs.aoa);
  const Vec3 shifted = truth + u * 0.1;
  const double expected_r3 =
      0.1 + (distance(shifted, obs.gmt) - distance(truth, obs.gmt));
  const FirstOrderResiduals r = residuals_first(obs, shifted);
  CHECK(r.delay == doctest::Approx(expected_r3).epsilon(1e-9));
  CHECK(std::abs(r.delay) > 1e-3);

  // Tangent to the constant-delay ellipsoid: delay stays ~0, angles break.
  const Vec3 grad = (truth - obs.uav).normalized() + (truth - obs.gmt).normalized();
  const Vec3 tangent = grad.cross(Vec3{0, 0, 1}).normalized();
  const FirstOrderResiduals t = residuals_first(obs, truth + tangent * 1e-3);
  CHECK(std::abs(t.delay) < 1e-6);
  CHECK(std::abs(t.azimuth) + std::abs(t.elevation) > 1e-5);
}

TEST_CASE("elevation residual degenerates to NaN above the receiver") {
  const FirstOrderObservation obs{{0, 0, 0}, {4, 0, 0}, 1e-7, {kPi / 4, 0}};
  const FirstOrderResiduals r = residuals_first(obs, {0, 0, 5});
  CHECK(std::isnan(r.elevation));
}

TEST_CASE("multi-bounce residuals accept traced paths and flag flipped normals") {
  const SceneMesh mesh = builtin_scene("parallel-walls");
  const Vec3 gmt{1, 0, 1}, uav{3, 6, 1};
  const auto paths = trace_second_order(gmt, uav, mesh);
  REQUIRE(!paths.empty());
  for (const PropagationPath& path : paths) {
    MultiBounceCandidate cand = to_candidate(path, gmt, uav, mesh);
    for (double r : residuals_multi(cand)) {
      CHECK(std::abs(r) < 1e-9);
    }
    // Flipping one normal breaks only the bisector alignment, by exactly 2.
    MultiBounceCandidate flipped = cand;
    flipped.normals[1] = -flipped.normals[1];
    const auto res = residuals_multi(flipped);
    const std::size_t n = flipped.points.size();
    CHECK(std::abs(res[n + 2]) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(std::abs(res[2]) < 1e-9);  // equal-angle term is sign-blind
  }
}

TEST_CASE("single-bounce candidate agrees with residuals_first") {
  const SceneMesh mesh = builtin_scene("two-buildings");
  const KnownBounce kb = two_buildings_known_bounce();
  const auto paths = trace_first_order(kb.gmt, kb.uav, mesh);
  REQUIRE(!paths.empty());
  const PropagationPath& path = paths.front();
  const MultiBounceCandidate cand = to_candidate(path, kb.gmt, kb.uav, mesh);
  const auto multi = residuals_multi(cand);
  REQUIRE(multi.size() == 6);
  const FirstOrderResiduals first =
      residuals_first(observation_of(path, kb.gmt, kb.uav),
                      path.reflection_points.front());
  CHECK(multi[0] == doctest::Approx(first.delay).epsilon(1e-12));
  CHECK(multi[4] == doctest::Approx(first.azimuth).epsilon(1e-9));
  for (double r : multi) CHECK(std::abs(r) < 1e-9);
}

TEST_CASE("parallel-plane translation family keeps every constraint") {
  const SceneMesh mesh = builtin_scene("parallel-walls");
  const Vec3 gmt{1, 0, 1}, uav{3, 6, 1};
  const auto paths = trace_second_order(gmt, uav, mesh);
  REQUIRE(!paths.empty());
  const MultiBounceCandidate base = to_candidate(paths.front(), gmt, uav, mesh);

  SUBCASE("zero distance is the identity") {
    const MultiBounceCandidate same = parallel_plane_family(base, 0.0);
    CHECK(distance(same.points[0], base.points[0]) == 0.0);
    CHECK(distance(same.points[1], base.points[1]) == 0.0);
  }

  SUBCASE("positive distances give distinct valid candidates") {
    double base_len = distance(base.gmt, base.points[0]) +
                      distance(base.points[0], base.points[1]) +
                      distance(base.points[1], base.uav);
    for (double d : {0.1, 0.5, 0.9}) {
      const MultiBounceCandidate moved = parallel_plane_family(base, d);
      CHECK(distance(moved.points[0], base.points[0]) == doctest::Approx(d).epsilon(1e-12));
      for (double r : residuals_multi(moved)) CHECK(std::abs(r) < 1e-8);
      const double moved_len = distance(moved.gmt, moved.points[0]) +
                               distance(moved.points[0], moved.points[1]) +
                               distance(moved.points[1], moved.uav);
      CHECK(moved_len == doctest::Approx(base_len).epsilon(1e-12));
    }
  }

  SUBCASE("points pushed past the physical walls still satisfy the system") {
    // The constraint system never mentions facet extents.
    const double first_leg = distance(base.gmt, base.points[0]);
    const MultiBounceCandidate moved = parallel_plane_family(base, 0.95 * first_leg);
    for (double r : residuals_multi(moved)) CHECK(std::abs(r) < 1e-8);
  }

  SUBCASE("non-parallel normals are rejected") {
    MultiBounceCandidate skew = base;
    skew.normals[1] = Vec3{0, 1, 0};
    CHECK_THROWS_AS(parallel_plane_family(skew, 0.5), Error);
  }
}

TEST_CASE("solver output error is locally linear in input noise") {
  const FirstOrderObservation clean = street_corner_obs();
  const Vec3 truth = solve_parametric(clean);
  auto error_at = [&](double delta) {
    FirstOrderObservation noisy = clean;
    noisy.tau += delta * 1e-9;
    noisy.aoa.theta += delta;
    noisy.aoa.phi += delta;
    return distance(solve_parametric(noisy), truth);
  };
  const double e_small = error_at(1e-4);
  const double e_large = error_at(1e-3);
  const double ratio = e_large / e_small;
  CHECK(ratio > 10.0 / 1.5);
  CHECK(ratio < 10.0 * 1.5);
}
