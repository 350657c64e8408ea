#include "csmap/scenes.hpp"

namespace csmap {
namespace {

// Known two-buildings configuration; the second building's front face is
// derived so its plane is specular for exactly this triple.
const Vec3 kKnownGmt{28.20, 23.04, 2.0};
const Vec3 kKnownUav{53.97, 23.24, 2.0};
const Vec3 kKnownBouncePoint{41.59, 39.09, 2.0};
constexpr int kKnownWallId = 6;

Facet rect_ground(int id, double x0, double x1, double y0, double y1, double z = 0.0) {
  return make_facet(id, {{x0, y0, z}, {x1, y0, z}, {x1, y1, z}, {x0, y1, z}});
}

// Vertical wall above the base segment a-b.
Facet wall(int id, const Vec3& a, const Vec3& b, double z0, double z1) {
  return make_facet(id, {{a.x, a.y, z0}, {b.x, b.y, z0}, {b.x, b.y, z1}, {a.x, a.y, z1}});
}

// Axis-aligned building: four walls and a roof (no floor facet).
void add_box_building(std::vector<Facet>& facets, int first_id, double x0, double x1,
                      double y0, double y1, double height) {
  facets.push_back(wall(first_id + 0, {x0, y0, 0}, {x1, y0, 0}, 0.0, height));
  facets.push_back(wall(first_id + 1, {x1, y0, 0}, {x1, y1, 0}, 0.0, height));
  facets.push_back(wall(first_id + 2, {x1, y1, 0}, {x0, y1, 0}, 0.0, height));
  facets.push_back(wall(first_id + 3, {x0, y1, 0}, {x0, y0, 0}, 0.0, height));
  facets.push_back(make_facet(first_id + 4, {{x0, y0, height},
                                             {x1, y0, height},
                                             {x1, y1, height},
                                             {x0, y1, height}}));
}

SceneMesh open_field() {
  return make_mesh({rect_ground(0, -50.0, 50.0, -50.0, 50.0)});
}

SceneMesh single_wall() {
  // The panel floats 1.2 m off the ground: receivers shadowed by it keep a
  // ground bounce underneath, so the blocked region is reachable (one-bounce
  // link states) instead of dead.
  std::vector<Facet> facets;
  facets.push_back(rect_ground(0, -30.0, 30.0, -30.0, 30.0));
  facets.push_back(wall(1, {-10.0, 0.0, 0.0}, {10.0, 0.0, 0.0}, 1.2, 6.0));
  return make_mesh(std::move(facets));
}

SceneMesh parallel_walls() {
  std::vector<Facet> facets;
  facets.push_back(wall(0, {0.0, -10.0, 0.0}, {0.0, 10.0, 0.0}, 0.0, 6.0));
  facets.push_back(wall(1, {4.0, -10.0, 0.0}, {4.0, 10.0, 0.0}, 0.0, 6.0));
  return make_mesh(std::move(facets));
}

SceneMesh box_room() {
  const double lx = 10.0, ly = 8.0, lz = 3.0;
  std::vector<Facet> facets;
  facets.push_back(rect_ground(0, 0.0, lx, 0.0, ly));            // floor
  facets.push_back(rect_ground(1, 0.0, lx, 0.0, ly, lz));        // ceiling
  facets.push_back(wall(2, {0, 0, 0}, {lx, 0, 0}, 0.0, lz));     // y = 0
  facets.push_back(wall(3, {lx, 0, 0}, {lx, ly, 0}, 0.0, lz));   // x = lx
  facets.push_back(wall(4, {lx, ly, 0}, {0, ly, 0}, 0.0, lz));   // y = ly
  facets.push_back(wall(5, {0, ly, 0}, {0, 0, 0}, 0.0, lz));     // x = 0
  // Interior partition with a gap near the far wall.
  facets.push_back(wall(6, {5.0, 0.0, 0.0}, {5.0, 5.5, 0.0}, 0.0, lz));
  return make_mesh(std::move(facets));
}

SceneMesh two_buildings() {
  std::vector<Facet> facets;
  facets.push_back(rect_ground(0, 0.0, 80.0, 0.0, 60.0));
  add_box_building(facets, 1, 38.0, 48.0, 18.0, 28.0, 8.0);

  // Second building: its street-facing wall lies in the plane that mirrors
  // kKnownGmt onto kKnownUav at kKnownBouncePoint.
  const Vec3 incoming = (kKnownBouncePoint - kKnownGmt).normalized();
  const Vec3 outgoing = (kKnownUav - kKnownBouncePoint).normalized();
  const Vec3 normal = (outgoing - incoming).normalized();  // toward the street
  const Vec3 along = normal.cross(Vec3{0.0, 0.0, 1.0}).normalized();
  const double half_width = 14.0, depth = 6.0, height = 8.0;
  const Vec3 base1{kKnownBouncePoint.x - half_width * along.x,
                   kKnownBouncePoint.y - half_width * along.y, 0.0};
  const Vec3 base2{kKnownBouncePoint.x + half_width * along.x,
                   kKnownBouncePoint.y + half_width * along.y, 0.0};
  const Vec3 back = -1.0 * normal * depth;
  const Vec3 back1 = base1 + back;
  const Vec3 back2 = base2 + back;
  facets.push_back(wall(kKnownWallId, base1, base2, 0.0, height));  // front
  facets.push_back(wall(7, back1, back2, 0.0, height));
  facets.push_back(wall(8, base1, back1, 0.0, height));
  facets.push_back(wall(9, base2, back2, 0.0, height));
  facets.push_back(make_facet(10, {{base1.x, base1.y, height},
                                   {base2.x, base2.y, height},
                                   {back2.x, back2.y, height},
                                   {back1.x, back1.y, height}}));
  return make_mesh(std::move(facets));
}

}  // namespace

std::vector<std::string> builtin_scene_names() {
  return {"open-field", "single-wall", "parallel-walls", "box-room", "two-buildings"};
}

SceneMesh builtin_scene(const std::string& name) {
  if (name == "open-field") return open_field();
  if (name == "single-wall") return single_wall();
  if (name == "parallel-walls") return parallel_walls();
  if (name == "box-room") return box_room();
  if (name == "two-buildings") return two_buildings();
  throw Error(ErrorCode::FormatError, "unknown builtin scene '" + name + "'");
}

KnownBounce two_buildings_known_bounce() {
  return {kKnownGmt, kKnownUav, kKnownBouncePoint, kKnownWallId};
}

double builtin_scene_gmt_height(const std::string& name) {
  if (name == "box-room") return 1.0;
  if (name == "two-buildings") return 2.0;
  return 1.5;
}

}  // namespace csmap
