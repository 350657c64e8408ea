#pragma once

#include <string>
#include <vector>

#include "csmap/geometry.hpp"

namespace csmap {

/// Names accepted by builtin_scene().
std::vector<std::string> builtin_scene_names();

/// Construct one of the built-in desk-scale scenes:
///   open-field      flat ground only; every link is direct
///   single-wall     ground plus one elevated wall panel
///   parallel-walls  two facing walls (two-bounce geometry, no ground)
///   box-room        closed 10x8x3 room with an interior partition
///   two-buildings   ground and two buildings; one face is a known
///                   specular plane (see two_buildings_known_bounce)
/// Throws FormatError for unknown names.
SceneMesh builtin_scene(const std::string& name);

/// A pre-arranged single-bounce configuration inside `two-buildings`: the
/// second building's street-facing wall is exactly the specular plane for
/// this transmitter/receiver pair, and the direct segment between them is
/// blocked by the first building.
struct KnownBounce {
  Vec3 gmt;
  Vec3 uav;
  Vec3 bounce;
  int facet_id = 0;
};
KnownBounce two_buildings_known_bounce();

/// Ground height used for transmitters in each built-in scene.
double builtin_scene_gmt_height(const std::string& name);

}  // namespace csmap
