#include "beliefnest/perception.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>

#include "beliefnest/error.hpp"
#include "beliefnest/format.hpp"

namespace beliefnest {

namespace {

constexpr double kTieEpsilon = 1e-9;

bool lex_less(Vec3 a, Vec3 b) {
  if (a.x != b.x) return a.x < b.x;
  if (a.y != b.y) return a.y < b.y;
  return a.z < b.z;
}

// Visits every in-between cell; stops early when `visit` returns false.
template <typename Visit>
bool traverse(Vec3 from, Vec3 to, Visit&& visit) {
  if (lex_less(to, from)) std::swap(from, to);
  const std::array<double, 3> p0{from.x, from.y, from.z};
  const std::array<double, 3> d{to.x - from.x, to.y - from.y, to.z - from.z};
  const BlockPos start = containing_cell(from);
  const BlockPos end = containing_cell(to);
  std::array<int, 3> cell{start.x, start.y, start.z};
  const std::array<int, 3> last{end.x, end.y, end.z};
  if (cell == last) return true;

  std::array<int, 3> step{};
  std::array<double, 3> t_max{};
  std::array<double, 3> t_delta{};
  constexpr double kInf = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (d[a] > 0) {
      step[a] = 1;
      t_max[a] = (cell[a] + 1 - p0[a]) / d[a];
      t_delta[a] = 1.0 / d[a];
    } else if (d[a] < 0) {
      step[a] = -1;
      t_max[a] = (cell[a] - p0[a]) / d[a];
      t_delta[a] = -1.0 / d[a];
    } else {
      t_max[a] = kInf;
      t_delta[a] = kInf;
    }
  }

  while (true) {
    const double t = std::min({t_max[0], t_max[1], t_max[2]});
    if (t >= 1.0 - kTieEpsilon) break;  // segment ends inside the current cell
    for (int a = 0; a < 3; ++a) {
      if (t_max[a] - t <= kTieEpsilon) {
        cell[a] += step[a];
        t_max[a] += t_delta[a];
      }
    }
    if (cell == last) break;
    if (!visit(BlockPos{cell[0], cell[1], cell[2]})) return false;
  }
  return true;
}

}  // namespace

Vec3 eye_position(const AgentBody& agent) {
  const Vec3& p = agent.pose.position;
  return {p.x, p.y + kEyeHeight, p.z};
}

Vec3 body_target(const AgentBody& agent) { return cell_center(agent.cell()); }

OcclusionGrid::OcclusionGrid(const WorldState& s)
    : bounds_(s.bounds),
      nx_(s.bounds.max.x - s.bounds.min.x + 1),
      ny_(s.bounds.max.y - s.bounds.min.y + 1),
      nz_(s.bounds.max.z - s.bounds.min.z + 1),
      opaque_(static_cast<std::size_t>(std::max(nx_, 0)) * std::max(ny_, 0) * std::max(nz_, 0), 0) {
  for (const auto& [pos, cell] : s.cells) {
    if (!cell.is_opaque() || !bounds_.contains(pos)) continue;
    const auto idx = (static_cast<std::size_t>(pos.x - bounds_.min.x) * ny_ + (pos.y - bounds_.min.y)) * nz_ +
                     (pos.z - bounds_.min.z);
    opaque_[idx] = 1;
  }
}

bool OcclusionGrid::opaque(BlockPos p) const {
  if (!bounds_.contains(p)) return false;
  const auto idx = (static_cast<std::size_t>(p.x - bounds_.min.x) * ny_ + (p.y - bounds_.min.y)) * nz_ +
                   (p.z - bounds_.min.z);
  return opaque_[idx] != 0;
}

std::vector<BlockPos> cells_between(Vec3 from, Vec3 to) {
  std::vector<BlockPos> out;
  traverse(from, to, [&](BlockPos p) {
    out.push_back(p);
    return true;
  });
  return out;
}

namespace {

// Observation uses this directly: an eye above the top layer still sees.
bool unchecked_sight(const OcclusionGrid& grid, Vec3 from, Vec3 to, double view_radius) {
  if (distance(from, to) > view_radius) return false;
  return traverse(from, to, [&](BlockPos p) { return !grid.opaque(p); });
}

}  // namespace

bool line_of_sight(const OcclusionGrid& grid, Vec3 from, Vec3 to, double view_radius) {
  if (!grid.bounds().contains(from) || !grid.bounds().contains(to)) {
    throw Error(ErrorCode::OutOfBounds,
                "line of sight endpoint outside bounds: " + format_vec(from) + " -> " + format_vec(to));
  }
  return unchecked_sight(grid, from, to, view_radius);
}

bool line_of_sight(const WorldState& s, Vec3 from, Vec3 to, double view_radius) {
  if (!s.bounds.contains(from) || !s.bounds.contains(to)) {
    throw Error(ErrorCode::OutOfBounds,
                "line of sight endpoint outside bounds: " + format_vec(from) + " -> " + format_vec(to));
  }
  if (distance(from, to) > view_radius) return false;
  return traverse(from, to, [&](BlockPos p) { return !s.cell_at(p).is_opaque(); });
}

namespace {

const AgentBody& require_agent(const StateSnapshot& s, const std::string& id) {
  const AgentBody* body = s.find_agent(id);
  if (body == nullptr) throw Error(ErrorCode::UnknownAgent, id);
  return *body;
}

// Cells visible from `eye`, in ascending order. Sibling simulators mostly
// share geometry and poses, so recent answers are kept per thread.
const std::vector<BlockPos>& visible_positions(const OcclusionGrid& grid, Vec3 eye, double r) {
  struct Entry {
    OcclusionGrid grid;
    Vec3 eye;
    double r;
    std::vector<BlockPos> cells;
  };
  constexpr std::size_t kCacheSize = 64;
  thread_local std::deque<Entry> cache;
  for (const auto& e : cache) {
    if (e.eye == eye && e.r == r && e.grid == grid) return e.cells;
  }

  std::vector<BlockPos> cells;
  const Bounds& b = grid.bounds();
  const int x0 = std::max(b.min.x, static_cast<int>(std::floor(eye.x - r)));
  const int x1 = std::min(b.max.x, static_cast<int>(std::floor(eye.x + r)));
  const int y0 = std::max(b.min.y, static_cast<int>(std::floor(eye.y - r)));
  const int y1 = std::min(b.max.y, static_cast<int>(std::floor(eye.y + r)));
  const int z0 = std::max(b.min.z, static_cast<int>(std::floor(eye.z - r)));
  const int z1 = std::min(b.max.z, static_cast<int>(std::floor(eye.z + r)));
  for (int x = x0; x <= x1; ++x) {
    for (int y = y0; y <= y1; ++y) {
      for (int z = z0; z <= z1; ++z) {
        const BlockPos p{x, y, z};
        if (unchecked_sight(grid, eye, cell_center(p), r)) cells.push_back(p);
      }
    }
  }
  if (cache.size() == kCacheSize) cache.pop_back();
  cache.push_front(Entry{grid, eye, r, std::move(cells)});
  return cache.front().cells;
}

std::map<std::string, SeenAgent> agents_in_sight(const StateSnapshot& s, const OcclusionGrid& grid,
                                                 const AgentBody& me, double radius) {
  std::map<std::string, SeenAgent> seen;
  const Vec3 eye = eye_position(me);
  for (const auto& [id, other] : s.agents) {
    if (id == me.id) continue;
    if (unchecked_sight(grid, eye, body_target(other), radius)) {
      seen.emplace(id, SeenAgent{other.pose, other.held_item});
    }
  }
  return seen;
}

}  // namespace

Observation observe(const StateSnapshot& s, const std::string& agent,
                    std::span<const EventRecord> pending_events,
                    std::span<const ChatMessage> pending_chats, const PerceptionConfig& config) {
  const AgentBody& me = require_agent(s, agent);
  const OcclusionGrid grid(s);
  Observation o;
  o.observer = agent;
  o.tick = s.tick;
  o.self = me;

  const Vec3 eye = eye_position(me);
  const double r = config.view_radius;
  for (const BlockPos& p : visible_positions(grid, eye, r)) {
    o.visible_cells.emplace_hint(o.visible_cells.end(), p, s.cell_at(p));
    if (auto it = s.containers.find(p); it != s.containers.end()) o.visible_containers.emplace(p, it->second);
  }
  o.visible_agents = agents_in_sight(s, grid, me, r);

  for (const auto& chat : pending_chats) {
    const AgentBody* speaker = s.find_agent(chat.speaker);
    if (speaker == nullptr) continue;
    if (distance(speaker->pose.position, me.pose.position) <= config.chat_radius) {
      o.heard_chats.push_back(chat);
    }
  }
  for (const auto& e : pending_events) {
    if (e.agent == agent || o.visible_agents.contains(e.agent)) o.witnessed_events.push_back(e);
  }
  return o;
}

std::set<std::string> visible_agents(const StateSnapshot& s, const std::string& agent,
                                     const PerceptionConfig& config) {
  const AgentBody& me = require_agent(s, agent);
  const OcclusionGrid grid(s);
  std::set<std::string> ids;
  for (const auto& [id, _] : agents_in_sight(s, grid, me, config.view_radius)) ids.insert(id);
  return ids;
}

}  // namespace beliefnest
