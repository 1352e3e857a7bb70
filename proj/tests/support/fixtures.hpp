#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "beliefnest/nest.hpp"
#include "beliefnest/scenario.hpp"
#include "beliefnest/world.hpp"

namespace fixtures {

inline std::string scenario_file(const std::string& name) { return std::string(BELIEFNEST_SCENARIO_DIR) + "/" + name; }
inline std::string template_file(const std::string& name) { return std::string(BELIEFNEST_TEMPLATE_DIR) + "/" + name; }
inline std::string golden_file(const std::string& name) { return std::string(BELIEFNEST_GOLDEN_DIR) + "/" + name; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline beliefnest::Scenario scenario(const std::string& name) {
  return beliefnest::load_scenario(scenario_file(name));
}

inline beliefnest::RunOutcome run(const std::string& name) { return beliefnest::run_scenario(scenario(name)); }

// The scenario with every script step from `tick` on removed and no
// assertions, so a test can act at that point itself.
inline beliefnest::RunOutcome run_until(const std::string& name, beliefnest::Tick tick) {
  beliefnest::Scenario sc = scenario(name);
  std::erase_if(sc.script, [&](const beliefnest::ScriptStep& s) { return s.tick >= tick; });
  sc.assertions.clear();
  return beliefnest::run_scenario(sc);
}

inline beliefnest::BlockPos left_chest() { return {-2, -51, -4}; }
inline beliefnest::BlockPos right_chest() { return {2, -51, -4}; }

// A walled room split by an inner wall: agent "one" shares its half with
// a red and a green block, a blue block stands behind the inner wall.
struct Room {
  beliefnest::WorldSpec spec;
  beliefnest::PriorKnowledge prior;
  beliefnest::BlockPos red{2, 0, 4};
  beliefnest::BlockPos green{3, 0, 2};
  beliefnest::BlockPos blue{6, 0, 3};
};

inline Room split_room() {
  using namespace beliefnest;
  Room r;
  r.spec.bounds = {{0, -1, 0}, {8, 2, 6}};
  auto add = [&](BlockPos from, BlockPos to, Cell c, bool prior) { r.spec.cells.push_back({from, to, c, prior}); };
  add({0, -1, 0}, {8, -1, 6}, Cell::opaque("floor"), true);
  add({0, 0, 0}, {8, 2, 0}, Cell::opaque("white_wall"), true);
  add({0, 0, 6}, {8, 2, 6}, Cell::opaque("white_wall"), true);
  add({0, 0, 1}, {0, 2, 5}, Cell::opaque("white_wall"), true);
  add({8, 0, 1}, {8, 2, 5}, Cell::opaque("white_wall"), true);
  add({4, 0, 1}, {4, 2, 4}, Cell::opaque("black_wall"), true);
  add(r.red, r.red, Cell::opaque("red_block"), false);
  add(r.green, r.green, Cell::opaque("green_block"), false);
  add(r.blue, r.blue, Cell::opaque("blue_block"), false);
  AgentBody one;
  one.id = "one";
  one.pose.position = {1.5, 0, 1.5};
  AgentBody two;
  two.id = "two";
  two.pose.position = {6.5, 0, 1.5};
  r.spec.agents = {one, two};
  for (const auto& c : r.spec.cells) {
    if (!c.prior) continue;
    for (int x = c.from.x; x <= c.to.x; ++x)
      for (int y = c.from.y; y <= c.to.y; ++y)
        for (int z = c.from.z; z <= c.to.z; ++z) r.prior.cells[{x, y, z}] = c.cell;
  }
  return r;
}

}  // namespace fixtures
