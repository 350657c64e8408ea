#include <doctest.h>

#include <cmath>

#include "csmap/geometry.hpp"
#include "csmap/reflector.hpp"
#include "csmap/rng.hpp"

using namespace csmap;

namespace {

Facet unit_square_z0() {
  return make_facet(0, {{-0.5, -0.5, 0}, {0.5, -0.5, 0}, {0.5, 0.5, 0}, {-0.5, 0.5, 0}});
}

}  // namespace

TEST_CASE("aoa_from_points on the +X axis") {
  const AoA aoa = aoa_from_points({0, 0, 0}, {1, 0, 0});
  CHECK(aoa.theta == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(aoa.phi == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("aoa_from_points pole convention and degenerate input") {
  const AoA up = aoa_from_points({0, 0, 0}, {0, 0, 1});
  CHECK(up.theta == 0.0);
  CHECK(up.phi == 0.0);
  const AoA down = aoa_from_points({0, 0, 0}, {0, 0, -1});
  CHECK(down.theta == doctest::Approx(kPi));
  CHECK(down.phi == 0.0);
  CHECK_THROWS_AS(aoa_from_points({1, 2, 3}, {1, 2, 3}), Error);
}

TEST_CASE("aoa_from_points matches the street-corner worked positions") {
  const AoA aoa = aoa_from_points({53.97, 23.24, 2}, {41.59, 39.09, 2});
  CHECK(aoa.theta == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(aoa.phi == doctest::Approx(std::atan2(15.85, -12.38)).epsilon(1e-12));
  CHECK(aoa.phi == doctest::Approx(2.2345).epsilon(1e-3));
}

TEST_CASE("unit_direction axis cases") {
  const Vec3 ux = unit_direction({kPi / 2, 0.0});
  CHECK(distance(ux, {1, 0, 0}) < 1e-12);
  const Vec3 uz = unit_direction({0.0, 1.234});
  CHECK(distance(uz, {0, 0, 1}) < 1e-12);
  const Vec3 uy = unit_direction({kPi / 2, kPi / 2});
  CHECK(distance(uy, {0, 1, 0}) < 1e-12);
  CHECK(unit_direction({0.7, -2.1}).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("aoa/unit_direction round-trip away from the poles") {
  Rng rng(1234);
  for (int i = 0; i < 1000; ++i) {
    const double theta = rng.uniform(0.05, kPi - 0.05);
    const double phi = rng.uniform(-kPi + 1e-6, kPi);
    const Vec3 u = unit_direction({theta, phi});
    const Vec3 back = unit_direction(aoa_from_points({0, 0, 0}, u));
    CHECK(distance(u, back) < 1e-9);
  }
}

TEST_CASE("mirror_point basics and involution") {
  const Facet ground = unit_square_z0();
  CHECK(distance(mirror_point({1, 0, 3}, ground), {1, 0, -3}) < 1e-12);
  CHECK(distance(mirror_point({0.2, -0.3, 0}, ground), {0.2, -0.3, 0}) < 1e-12);

  const Facet wall = make_facet(1, {{1, -1, -1}, {1, 1, -1}, {1, 1, 1}, {1, -1, 1}});
  CHECK(distance(mirror_point({2, 5, 7}, wall), {0, 5, 7}) < 1e-12);

  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    const Vec3 p{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
    CHECK(distance(mirror_point(mirror_point(p, wall), wall), p) < 1e-9);
    CHECK(distance(mirror_point(mirror_point(p, ground), ground), p) < 1e-9);
  }
}

TEST_CASE("ray_facet_intersect hits, misses, and parallels") {
  const Facet ground = unit_square_z0();
  const auto hit = ray_facet_intersect({0, 0, 1}, {0, 0, -1}, ground);
  REQUIRE(hit.has_value());
  CHECK(distance(hit->point, {0, 0, 0}) < 1e-12);
  CHECK(hit->distance == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_FALSE(ray_facet_intersect({0, 0, 1}, {1, 0, 0}, ground).has_value());
  CHECK_FALSE(ray_facet_intersect({2, 2, 1}, {0, 0, -1}, ground).has_value());
  // Behind the origin.
  CHECK_FALSE(ray_facet_intersect({0, 0, 1}, {0, 0, 1}, ground).has_value());
}

TEST_CASE("segment_occluded wall cases") {
  const Facet wall = make_facet(7, {{0, -5, 0}, {0, 5, 0}, {0, 5, 5}, {0, -5, 5}});
  const SceneMesh mesh = make_mesh({wall});
  CHECK(segment_occluded({-1, 0, 1}, {1, 0, 1}, mesh));
  CHECK_FALSE(segment_occluded({-1, 0, 1}, {1, 0, 1}, mesh, {7}));
  CHECK_FALSE(segment_occluded({1, 0, 1}, {2, 0, 1}, mesh));

  const SceneMesh empty = make_mesh({});
  CHECK_FALSE(segment_occluded({0, 0, 0}, {1, 1, 1}, empty));

  // Endpoint exactly on an ignored wall.
  CHECK_FALSE(segment_occluded({0, 0, 1}, {3, 0, 1}, mesh, {7}));
}

TEST_CASE("arrival-angle constraints hold for random geometry") {
  Rng rng(2024);
  for (int i = 0; i < 500; ++i) {
    const Vec3 r{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(0, 10)};
    Vec3 p{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(0, 10)};
    if (std::abs(p.x - r.x) < 1e-3) p.x += 0.5;
    const AoA aoa = aoa_from_points(r, p);

    // Ratio forms as stated: (yP-yR)/(xP-xR) = tan(phi) and
    // (zP-zR)/horizontal = tan(pi/2 - theta).
    const double lhs1 = (p.y - r.y) / (p.x - r.x);
    CHECK(lhs1 == doctest::Approx(std::tan(aoa.phi)).epsilon(1e-9));
    const double horiz = std::hypot(p.x - r.x, p.y - r.y);
    const double lhs2 = (p.z - r.z) / horiz;
    CHECK(lhs2 == doctest::Approx(std::tan(kPi / 2 - aoa.theta)).epsilon(1e-9));
  }
}

TEST_CASE("make_facet validation") {
  CHECK_THROWS_AS(make_facet(0, {{0, 0, 0}, {1, 0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_facet(0, {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(
      make_facet(0, {{0, 0, 0}, {1, 0, 0}, {1, 1, 0.1}, {0, 1, 0}}),
      std::invalid_argument);
  const Facet ok = make_facet(3, {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}});
  CHECK(ok.unit_normal.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("make_mesh rejects duplicate ids and tracks bounds") {
  const Facet a = make_facet(1, {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}});
  const Facet b = make_facet(1, {{0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}});
  CHECK_THROWS_AS(make_mesh({a, b}), std::invalid_argument);
  const Facet c = make_facet(2, {{0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}});
  const SceneMesh mesh = make_mesh({a, c});
  CHECK(mesh.bbox_min == Vec3{0, 0, 0});
  CHECK(mesh.bbox_max == Vec3{1, 1, 1});
}

TEST_CASE("point_facet_distance interior and edge") {
  const Facet ground = unit_square_z0();
  CHECK(point_facet_distance({0, 0, 2}, ground) == doctest::Approx(2.0));
  CHECK(point_facet_distance({2.5, 0, 0}, ground) == doctest::Approx(2.0));
  CHECK(point_facet_distance({0.5, 0.5, 0}, ground) == doctest::Approx(0.0));
}
