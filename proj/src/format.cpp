#include "beliefnest/format.hpp"

#include <fmt/format.h>

namespace beliefnest {

std::string format_number(double v) {
  if (v == 0.0) return "0";  // avoid "-0"
  return fmt::format("{}", v);
}

std::string format_block_pos(BlockPos p) { return fmt::format("({}, {}, {})", p.x, p.y, p.z); }

std::string format_vec(Vec3 v) {
  return fmt::format("[{}, {}, {}]", format_number(v.x), format_number(v.y), format_number(v.z));
}

std::string format_items(const Items& items) {
  std::string out = "{";
  bool first = true;
  for (const auto& [name, count] : items) {
    if (!first) out += ", ";
    first = false;
    out += fmt::format("'{}': {}", name, count);
  }
  out += "}";
  return out;
}

}  // namespace beliefnest
