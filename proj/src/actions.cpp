#include "beliefnest/actions.hpp"

#include <algorithm>
#include <array>
#include <deque>

#include <fmt/format.h>

#include "beliefnest/format.hpp"
#include "beliefnest/timeline.hpp"

namespace beliefnest {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void invalid(const std::string& why) { throw Error(ErrorCode::InvalidAction, why); }

void validate_items(const Items& items) {
  if (items.empty()) invalid("item mapping must not be empty");
  for (const auto& [name, count] : items) {
    if (name.empty()) invalid("item names must be nonempty");
    if (count < 1) invalid("item '" + name + "' count must be >= 1");
  }
}

}  // namespace

std::string kind_name(const Action& a) {
  return std::visit(overloaded{
                        [](const MoveTo&) { return "move_to"; },
                        [](const BreakBlock&) { return "break_block"; },
                        [](const PlaceBlock&) { return "place_block"; },
                        [](const OpenChest&) { return "open_chest"; },
                        [](const DepositToChest&) { return "deposit_to_chest"; },
                        [](const TakeFromChest&) { return "take_from_chest"; },
                        [](const Craft&) { return "craft"; },
                        [](const Say&) { return "say"; },
                        [](const SetThought&) { return "set_thought"; },
                    },
                    a.kind);
}

std::string event_action_name(const Action& a) {
  return std::visit(overloaded{
                        [](const MoveTo&) { return "moveTo"; },
                        [](const BreakBlock&) { return "breakBlock"; },
                        [](const PlaceBlock&) { return "placeBlock"; },
                        [](const OpenChest&) { return "openChest"; },
                        [](const DepositToChest&) { return "depositItemIntoChest"; },
                        [](const TakeFromChest&) { return "takeFromChest"; },
                        [](const Craft&) { return "craft"; },
                        [](const Say&) { return "say"; },
                        [](const SetThought&) { return "setThought"; },
                    },
                    a.kind);
}

void validate(const Action& a) {
  if (!is_valid_agent_id(a.actor)) invalid("invalid actor '" + a.actor + "'");
  std::visit(overloaded{
                 [](const MoveTo&) {},
                 [](const BreakBlock&) {},
                 [](const PlaceBlock& p) {
                   if (p.block.empty()) invalid("place_block needs a block name");
                 },
                 [](const OpenChest&) {},
                 [](const DepositToChest& d) { validate_items(d.items); },
                 [](const TakeFromChest& t) { validate_items(t.items); },
                 [](const Craft& c) {
                   if (c.recipe.empty()) invalid("craft needs a recipe name");
                 },
                 [](const Say&) {},
                 [](const SetThought&) {},
             },
             a.kind);
}

nlohmann::json to_json(const Action& a) {
  nlohmann::json args = std::visit(
      overloaded{
          [](const MoveTo& m) { return nlohmann::json{{"pos", to_json(m.target)}}; },
          [](const BreakBlock& b) { return nlohmann::json{{"pos", to_json(b.pos)}}; },
          [](const PlaceBlock& p) { return nlohmann::json{{"pos", to_json(p.pos)}, {"block", p.block}}; },
          [](const OpenChest& o) { return nlohmann::json{{"pos", to_json(o.pos)}}; },
          [](const DepositToChest& d) { return nlohmann::json{{"pos", to_json(d.pos)}, {"items", d.items}}; },
          [](const TakeFromChest& t) { return nlohmann::json{{"pos", to_json(t.pos)}, {"items", t.items}}; },
          [](const Craft& c) { return nlohmann::json{{"recipe", c.recipe}}; },
          [](const Say& s) { return nlohmann::json{{"text", s.text}}; },
          [](const SetThought& s) { return nlohmann::json{{"text", s.text}}; },
      },
      a.kind);
  return {{"kind", kind_name(a)}, {"actor", a.actor}, {"args", std::move(args)}};
}

Action action_from_json(const nlohmann::json& j, const std::string& default_actor) {
  if (!j.is_object()) invalid("action must be an object");
  if (!j.contains("kind") || !j["kind"].is_string()) invalid("action needs a string 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  const nlohmann::json args = j.value("args", nlohmann::json::object());
  if (!args.is_object()) invalid("'args' must be an object");
  Action a;
  a.actor = j.contains("actor") ? j["actor"].get<std::string>() : default_actor;
  try {
    auto items = [&] {
      Items out;
      const auto& src = args.at("items");
      if (!src.is_object()) invalid("'items' must be an object");
      for (const auto& [name, count] : src.items()) {
        if (!count.is_number_integer()) invalid("item counts must be integers");
        out[name] = count.get<int>();
      }
      return out;
    };
    auto text = [&] {
      const auto& t = args.at("text");
      if (!t.is_string()) invalid("'text' must be a string");
      return t.get<std::string>();
    };
    if (kind == "move_to") a.kind = MoveTo{vec3_from_json(args.at("pos"))};
    else if (kind == "break_block") a.kind = BreakBlock{block_pos_from_json(args.at("pos"))};
    else if (kind == "place_block") a.kind = PlaceBlock{block_pos_from_json(args.at("pos")), args.at("block").get<std::string>()};
    else if (kind == "open_chest") a.kind = OpenChest{block_pos_from_json(args.at("pos"))};
    else if (kind == "deposit_to_chest") a.kind = DepositToChest{block_pos_from_json(args.at("pos")), items()};
    else if (kind == "take_from_chest") a.kind = TakeFromChest{block_pos_from_json(args.at("pos")), items()};
    else if (kind == "craft") a.kind = Craft{args.at("recipe").get<std::string>()};
    else if (kind == "say") a.kind = Say{text()};
    else if (kind == "set_thought") a.kind = SetThought{text()};
    else invalid("unknown action kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    invalid("bad arguments for '" + kind + "': " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidAction) throw;
    invalid("bad arguments for '" + kind + "': " + e.detail());
  }
  validate(a);
  return a;
}

std::optional<std::vector<BlockPos>> walkable_path(const StateSnapshot& s, BlockPos from, BlockPos to) {
  if (!s.bounds.contains(from) || !s.bounds.contains(to)) {
    throw Error(ErrorCode::OutOfBounds, format_block_pos(from) + " -> " + format_block_pos(to));
  }
  if (from == to) return std::vector<BlockPos>{from};
  if (from.y != to.y || !s.cell_at(to).is_passable()) return std::nullopt;

  std::map<BlockPos, BlockPos> parent;
  std::deque<BlockPos> frontier{from};
  parent.emplace(from, from);
  constexpr std::array<std::array<int, 2>, 4> kNeighbours{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
  while (!frontier.empty()) {
    const BlockPos cur = frontier.front();
    frontier.pop_front();
    if (cur == to) break;
    for (const auto& [dx, dz] : kNeighbours) {
      const BlockPos next{cur.x + dx, cur.y, cur.z + dz};
      if (!s.bounds.contains(next) || parent.contains(next) || !s.cell_at(next).is_passable()) continue;
      parent.emplace(next, cur);
      frontier.push_back(next);
    }
  }
  if (!parent.contains(to)) return std::nullopt;
  std::vector<BlockPos> path{to};
  while (path.back() != from) path.push_back(parent.at(path.back()));
  std::reverse(path.begin(), path.end());
  return path;
}

namespace {

struct Failure {
  ErrorCode code;
  std::string message;
};

ActionResult fail(const Failure& f) {
  ActionResult r;
  r.error = f.code;
  r.message = f.message;
  return r;
}

std::optional<Failure> check_reach(const SimNode& node, const AgentBody& actor, BlockPos pos) {
  if (!node.world().bounds.contains(pos)) return Failure{ErrorCode::OutOfRange, format_block_pos(pos) + " is outside the world"};
  const double d = distance(actor.pose.position, cell_center(pos));
  if (d > node.config().interaction_range) {
    return Failure{ErrorCode::OutOfRange,
                   fmt::format("{} is {:.3f} cells from {}, range is {}", format_block_pos(pos), d, actor.id,
                               format_number(node.config().interaction_range))};
  }
  return std::nullopt;
}

std::optional<Failure> require_container(const WorldState& w, BlockPos pos) {
  if (!w.containers.contains(pos)) return Failure{ErrorCode::Blocked, "no container at " + format_block_pos(pos)};
  return std::nullopt;
}

}  // namespace

ActionResult execute(SimNode& node, const Action& a) {
  if (node.mode != Mode::control) {
    return fail({ErrorCode::NotControlMode, node.path.str() + " is in follow mode"});
  }
  try {
    validate(a);
  } catch (const Error& e) {
    return fail({e.code(), e.detail()});
  }
  WorldState& w = node.world();
  AgentBody* actor = w.find_agent(a.actor);
  if (actor == nullptr) return fail({ErrorCode::UnknownAgent, a.actor + " is not in " + node.path.str()});

  EventRecord e;
  e.time = node.tick();
  e.agent = a.actor;
  e.action = event_action_name(a);

  // Each branch validates fully before its first mutation.
  std::optional<Failure> failure = std::visit(
      overloaded{
          [&](const MoveTo& m) -> std::optional<Failure> {
            if (!w.bounds.contains(m.target)) return Failure{ErrorCode::Blocked, format_vec(m.target) + " is outside the world"};
            const auto path = walkable_path(w, actor->cell(), containing_cell(m.target));
            if (!path) return Failure{ErrorCode::Blocked, "no walkable path to " + format_vec(m.target)};
            actor->pose.position = m.target;
            e.description = "position:" + format_vec(m.target);
            return std::nullopt;
          },
          [&](const BreakBlock& b) -> std::optional<Failure> {
            if (auto f = check_reach(node, *actor, b.pos)) return f;
            const Cell cell = w.cell_at(b.pos);
            if (cell.kind == CellKind::air || cell.kind == CellKind::unknown) {
              return Failure{ErrorCode::Blocked, "nothing to break at " + format_block_pos(b.pos)};
            }
            if (cell.kind == CellKind::container && !w.containers.at(b.pos).contents.empty()) {
              return Failure{ErrorCode::Blocked, "container at " + format_block_pos(b.pos) + " is not empty"};
            }
            w.containers.erase(b.pos);
            w.set_cell(b.pos, Cell::air());
            actor->inventory[cell.type_name()] += 1;
            e.description = "block:" + cell.type_name() + " & pos:" + format_block_pos(b.pos);
            e.target = b.pos;
            return std::nullopt;
          },
          [&](const PlaceBlock& p) -> std::optional<Failure> {
            if (auto f = check_reach(node, *actor, p.pos)) return f;
            if (w.cell_at(p.pos).kind != CellKind::air) {
              return Failure{ErrorCode::Blocked, format_block_pos(p.pos) + " is occupied"};
            }
            for (const auto& [_, body] : w.agents) {
              if (body.cell() == p.pos) return Failure{ErrorCode::Blocked, body.id + " stands at " + format_block_pos(p.pos)};
            }
            if (!remove_items(actor->inventory, {{p.block, 1}})) {
              return Failure{ErrorCode::InsufficientItems, a.actor + " has no " + p.block};
            }
            if (p.block == "lever") {
              w.set_cell(p.pos, Cell::lever());
            } else if (p.block == "chest") {
              w.set_cell(p.pos, Cell::container(p.block));
              w.containers[p.pos] = Container{p.pos, {}, true};
            } else {
              w.set_cell(p.pos, Cell::opaque(p.block));
            }
            e.description = "block:" + p.block + " & pos:" + format_block_pos(p.pos);
            e.target = p.pos;
            return std::nullopt;
          },
          [&](const OpenChest& o) -> std::optional<Failure> {
            if (auto f = require_container(w, o.pos)) return f;
            if (auto f = check_reach(node, *actor, o.pos)) return f;
            e.description = "chest:" + format_block_pos(o.pos);
            e.target = o.pos;
            return std::nullopt;
          },
          [&](const DepositToChest& d) -> std::optional<Failure> {
            if (auto f = require_container(w, d.pos)) return f;
            if (auto f = check_reach(node, *actor, d.pos)) return f;
            if (!remove_items(actor->inventory, d.items)) {
              return Failure{ErrorCode::InsufficientItems, a.actor + " lacks " + format_items(d.items)};
            }
            add_items(w.containers.at(d.pos).contents, d.items);
            e.description = "chest:" + format_block_pos(d.pos) + " & items:" + format_items(d.items);
            e.target = d.pos;
            e.items = d.items;
            return std::nullopt;
          },
          [&](const TakeFromChest& t) -> std::optional<Failure> {
            if (auto f = require_container(w, t.pos)) return f;
            if (auto f = check_reach(node, *actor, t.pos)) return f;
            if (!remove_items(w.containers.at(t.pos).contents, t.items)) {
              return Failure{ErrorCode::InsufficientItems,
                             format_block_pos(t.pos) + " does not hold " + format_items(t.items)};
            }
            add_items(actor->inventory, t.items);
            e.description = "chest:" + format_block_pos(t.pos) + " & items:" + format_items(t.items);
            e.target = t.pos;
            e.items = t.items;
            return std::nullopt;
          },
          [&](const Craft& c) -> std::optional<Failure> {
            auto it = node.config().recipes.find(c.recipe);
            if (it == node.config().recipes.end()) return Failure{ErrorCode::NoSuchRecipe, c.recipe};
            if (!remove_items(actor->inventory, it->second.inputs)) {
              return Failure{ErrorCode::InsufficientItems, a.actor + " lacks inputs for " + c.recipe};
            }
            add_items(actor->inventory, it->second.outputs);
            e.description = "recipe:" + c.recipe + " & inputs:" + format_items(it->second.inputs) +
                            " & outputs:" + format_items(it->second.outputs);
            return std::nullopt;
          },
          [&](const Say& s) -> std::optional<Failure> {
            int ordinal = 0;
            for (const auto& chat : node.pending_chats) {
              if (chat.tick == node.tick()) ++ordinal;
            }
            node.pending_chats.push_back(ChatMessage{node.tick(), a.actor, s.text, ordinal});
            e.description = "message:" + s.text;
            return std::nullopt;
          },
          [&](const SetThought& t) -> std::optional<Failure> {
            auto it = node.beliefs().find(a.actor);
            if (it == node.beliefs().end()) return Failure{ErrorCode::UnknownAgent, a.actor};
            it->second.thought = t.text;
            e.description = "thought:" + t.text;
            return std::nullopt;
          },
      },
      a.kind);
  if (failure) return fail(*failure);

  log_event(node, e);
  ActionResult r;
  r.ok = true;
  r.event = node.live.log.back();
  return r;
}

}  // namespace beliefnest
