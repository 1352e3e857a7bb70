#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "beliefnest/event.hpp"
#include "beliefnest/world.hpp"

namespace beliefnest {

struct PerceptionConfig {
  double view_radius = 32.0;
  double chat_radius = 16.0;
};

inline constexpr double kEyeHeight = 1.6;

Vec3 eye_position(const AgentBody& agent);
// Sight target for an agent: the center of the cell it occupies.
Vec3 body_target(const AgentBody& agent);

/// Dense opacity lookup over a snapshot's bounds.
class OcclusionGrid {
 public:
  explicit OcclusionGrid(const WorldState& s);

  const Bounds& bounds() const { return bounds_; }
  bool opaque(BlockPos p) const;
  bool operator==(const OcclusionGrid&) const = default;

 private:
  Bounds bounds_;
  int nx_, ny_, nz_;
  std::vector<unsigned char> opaque_;
};

/// Cells whose interior the segment from -> to crosses with positive length,
/// excluding the cells containing the two endpoints. The traversal always
/// runs from the lexicographically smaller endpoint, so the result does not
/// depend on argument order. Ties (the segment leaving a cell through an
/// edge or corner) advance all tied axes at once.
std::vector<BlockPos> cells_between(Vec3 from, Vec3 to);

bool line_of_sight(const WorldState& s, Vec3 from, Vec3 to, double view_radius);
bool line_of_sight(const OcclusionGrid& grid, Vec3 from, Vec3 to, double view_radius);

struct SeenAgent {
  AgentPose pose;
  std::optional<std::string> held_item;

  bool operator==(const SeenAgent&) const = default;
};

/// Per-tick subjective percept of one agent.
struct Observation {
  std::string observer;
  Tick tick = 0;
  AgentBody self;
  std::map<BlockPos, Cell> visible_cells;
  std::map<BlockPos, Container> visible_containers;
  std::map<std::string, SeenAgent> visible_agents;
  std::vector<ChatMessage> heard_chats;
  std::vector<EventRecord> witnessed_events;

  bool operator==(const Observation&) const = default;
};

Observation observe(const StateSnapshot& s, const std::string& agent,
                    std::span<const EventRecord> pending_events,
                    std::span<const ChatMessage> pending_chats,
                    const PerceptionConfig& config = {});

std::set<std::string> visible_agents(const StateSnapshot& s, const std::string& agent,
                                     const PerceptionConfig& config = {});

}  // namespace beliefnest
