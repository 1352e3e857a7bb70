#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "beliefnest/event.hpp"
#include "beliefnest/perception.hpp"
#include "beliefnest/world.hpp"

namespace beliefnest {

struct VisibilityRecord {
  bool seen_before = false;
  bool visible_now = false;

  bool operator==(const VisibilityRecord&) const = default;
};

/// Static structure (floor, walls) every agent knows from the start.
struct PriorKnowledge {
  std::map<BlockPos, Cell> cells;
};

struct BelievedCell {
  Cell cell;
  VisibilityRecord visibility;

  bool operator==(const BelievedCell&) const = default;
};

struct BelievedContainer {
  std::string block = "chest";
  std::optional<Items> contents;  // nullopt: no data
  VisibilityRecord visibility;

  bool operator==(const BelievedContainer&) const = default;
};

struct BelievedAgent {
  std::optional<AgentPose> last_pose;  // nullopt: never seen
  bool held_item_known = false;
  std::optional<std::string> held_item;
  std::optional<Items> inventory;  // nullopt: no data
  VisibilityRecord visibility;

  bool operator==(const BelievedAgent&) const = default;
};

/// Agent i's persistent belief: last-known values plus visibility flags.
struct BeliefState {
  std::string owner;
  Tick tick = 0;
  std::map<BlockPos, BelievedCell> cells;
  std::map<BlockPos, BelievedContainer> containers;
  std::map<std::string, BelievedAgent> agents;
  AgentBody self;
  std::vector<ChatMessage> chat_memory;
  std::vector<EventRecord> event_memory;
  std::optional<std::string> thought;

  bool operator==(const BeliefState&) const = default;
};

BeliefState init_belief(const std::string& owner, const PriorKnowledge& prior, const AgentBody& self);

/// Overwrites everything visible in `o`, drops visible_now elsewhere, and
/// appends heard chats and witnessed events not already remembered.
/// Witnessed chest interactions adjust believed contents of chests that are
/// not themselves in view.
BeliefState update_belief(const BeliefState& b, const Observation& o);
BeliefState update_belief(BeliefState&& b, const Observation& o);

/// Regions of space whose never-observed cells materialize as `unknown`
/// rather than air.
struct MaterializeOptions {
  Bounds bounds;
  std::vector<Bounds> occludable_interior;
};

StateSnapshot belief_to_state(const BeliefState& b, const MaterializeOptions& options);

/// JSON export using the prompt vocabulary (seen_before, visible_now,
/// "No data", "Cannot be seen").
nlohmann::ordered_json to_json(const BeliefState& b);

}  // namespace beliefnest
