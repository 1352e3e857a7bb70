#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "beliefnest/error.hpp"
#include "beliefnest/event.hpp"
#include "beliefnest/nest.hpp"
#include "beliefnest/world.hpp"

namespace beliefnest {

struct MoveTo { Vec3 target; };
struct BreakBlock { BlockPos pos; };
struct PlaceBlock { BlockPos pos; std::string block; };
struct OpenChest { BlockPos pos; };
struct DepositToChest { BlockPos pos; Items items; };
struct TakeFromChest { BlockPos pos; Items items; };
struct Craft { std::string recipe; };
struct Say { std::string text; };
struct SetThought { std::string text; };

using ActionKind =
    std::variant<MoveTo, BreakBlock, PlaceBlock, OpenChest, DepositToChest, TakeFromChest, Craft, Say, SetThought>;

struct Action {
  ActionKind kind;
  std::string actor;
};

/// Snake-case kind name used in scenario files and the planner wire format.
std::string kind_name(const Action& a);
/// camelCase name written to event logs.
std::string event_action_name(const Action& a);

/// Argument sanity independent of any world: positive item counts,
/// nonempty names. Throws InvalidAction.
void validate(const Action& a);

nlohmann::json to_json(const Action& a);
/// Accepts {"kind": ..., "actor"?: ..., "args": {...}}; `default_actor`
/// fills a missing actor. Throws InvalidAction on unknown kinds or bad args.
Action action_from_json(const nlohmann::json& j, const std::string& default_actor = {});

struct ActionResult {
  bool ok = false;
  std::optional<EventRecord> event;
  std::optional<ErrorCode> error;
  std::string message;
};

/// Runs one action in a control-mode node. On failure the node is left
/// exactly as it was.
ActionResult execute(SimNode& node, const Action& a);

/// Shortest 4-neighbour path (horizontal plane, fixed y) through passable
/// cells, neighbours tried in x-, x+, z-, z+ order. nullopt if unreachable.
std::optional<std::vector<BlockPos>> walkable_path(const StateSnapshot& s, BlockPos from, BlockPos to);

}  // namespace beliefnest
