#pragma once

#include <random>
#include <string>
#include <vector>

#include "beliefnest/actions.hpp"
#include "beliefnest/world.hpp"

namespace testgen {

using Rng = std::mt19937;

int uniform_int(Rng& rng, int lo, int hi);  // inclusive
double uniform_real(Rng& rng, double lo, double hi);
bool chance(Rng& rng, double p);

struct WorldShape {
  int max_x = 8;
  int max_y = 3;
  int max_z = 8;
  double max_opaque = 0.4;
  int max_agents = 3;
  int max_containers = 3;
};

/// Random world with bounds (0,0,0)..(sx-1, sy-1, sz-1), opaque cells,
/// containers with a few items and agents standing in passable cells.
beliefnest::WorldSpec random_world_spec(Rng& rng, const WorldShape& shape = {});
beliefnest::WorldState random_world(Rng& rng, const WorldShape& shape = {});

beliefnest::Vec3 random_point(Rng& rng, const beliefnest::Bounds& b);
// Either a random point or a cell centre, so axis-aligned and diagonal ties
// are exercised as well as generic rays.
beliefnest::Vec3 random_probe(Rng& rng, const beliefnest::Bounds& b);

/// Random action for `actor`, plausible often enough to succeed sometimes.
beliefnest::Action random_action(Rng& rng, const beliefnest::WorldState& w, const std::string& actor);

inline const std::vector<std::string> kItemNames{"diamond", "apple", "stick"};

}  // namespace testgen
