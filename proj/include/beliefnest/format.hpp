#pragma once

#include <string>

#include "beliefnest/world.hpp"

namespace beliefnest {

// Shortest round-trip decimal; integral values print without a decimal point.
std::string format_number(double v);
// "(x, y, z)"
std::string format_block_pos(BlockPos p);
// "[x, y, z]"
std::string format_vec(Vec3 v);
// Python-dict style, e.g. "{'diamond': 1}" or "{}".
std::string format_items(const Items& items);

}  // namespace beliefnest
