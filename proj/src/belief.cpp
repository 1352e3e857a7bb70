#include "beliefnest/belief.hpp"

#include <algorithm>
#include <type_traits>

#include "beliefnest/error.hpp"
#include "beliefnest/format.hpp"

namespace beliefnest {

BeliefState init_belief(const std::string& owner, const PriorKnowledge& prior, const AgentBody& self) {
  BeliefState b;
  b.owner = owner;
  b.self = self;
  for (const auto& [pos, cell] : prior.cells) {
    b.cells.emplace(pos, BelievedCell{cell, {true, false}});
  }
  return b;
}

namespace {

template <typename T>
bool remembered(const std::vector<T>& memory, const T& item, Tick tick) {
  for (auto it = memory.rbegin(); it != memory.rend(); ++it) {
    const Tick t = [&] {
      if constexpr (std::is_same_v<T, EventRecord>) return it->time;
      else return it->tick;
    }();
    if (t < tick) return false;
    if (*it == item) return true;
  }
  return false;
}

void apply_witnessed_delta(BeliefState& b, const EventRecord& e, const Observation& o) {
  if (!e.target || o.visible_containers.contains(*e.target)) return;
  auto it = b.containers.find(*e.target);
  if (it == b.containers.end() || !it->second.contents) return;
  Items& contents = *it->second.contents;
  if (e.action == "depositItemIntoChest") {
    add_items(contents, e.items);
  } else if (e.action == "takeFromChest") {
    for (const auto& [name, count] : e.items) {
      auto c = contents.find(name);
      if (c == contents.end()) continue;
      c->second -= count;
      if (c->second <= 0) contents.erase(c);
    }
  }
}

}  // namespace

BeliefState update_belief(const BeliefState& b, const Observation& o) { return update_belief(BeliefState(b), o); }

BeliefState update_belief(BeliefState&& b, const Observation& o) {
  if (o.observer != b.owner) {
    throw Error(ErrorCode::ObserverMismatch, "observation of " + o.observer + " for belief of " + b.owner);
  }
  if (o.tick < b.tick) {
    throw Error(ErrorCode::TimeRegression,
                "observation tick " + std::to_string(o.tick) + " < belief tick " + std::to_string(b.tick));
  }
  BeliefState next = std::move(b);
  for (auto& [_, c] : next.cells) c.visibility.visible_now = false;
  for (auto& [_, c] : next.containers) c.visibility.visible_now = false;
  for (auto& [_, a] : next.agents) a.visibility.visible_now = false;

  for (const auto& [pos, cell] : o.visible_cells) {
    next.cells[pos] = BelievedCell{cell, {true, true}};
    if (cell.kind != CellKind::container) next.containers.erase(pos);
  }
  for (const auto& [pos, container] : o.visible_containers) {
    BelievedContainer& bc = next.containers[pos];
    const auto cell = o.visible_cells.find(pos);
    if (cell != o.visible_cells.end()) bc.block = cell->second.block;
    bc.contents = container.contents_known ? std::optional<Items>(container.contents) : std::nullopt;
    bc.visibility = {true, true};
  }
  for (const auto& [id, seen] : o.visible_agents) {
    BelievedAgent& a = next.agents[id];
    a.last_pose = seen.pose;
    a.held_item_known = true;
    a.held_item = seen.held_item;
    a.visibility = {true, true};
  }
  next.self = o.self;

  for (const auto& chat : o.heard_chats) {
    if (!remembered(next.chat_memory, chat, chat.tick)) next.chat_memory.push_back(chat);
  }
  for (const auto& e : o.witnessed_events) {
    if (remembered(next.event_memory, e, e.time)) continue;
    next.event_memory.push_back(e);
    apply_witnessed_delta(next, e, o);
  }
  auto by_tick = [](const auto& a, const auto& b) { return a.tick < b.tick; };
  std::stable_sort(next.chat_memory.begin(), next.chat_memory.end(), by_tick);
  std::stable_sort(next.event_memory.begin(), next.event_memory.end(),
                   [](const EventRecord& a, const EventRecord& b) { return a.time < b.time; });
  next.tick = o.tick;
  return next;
}

StateSnapshot belief_to_state(const BeliefState& b, const MaterializeOptions& options) {
  StateSnapshot s;
  s.bounds = options.bounds;
  s.tick = b.tick;
  for (const auto& [pos, bc] : b.cells) {
    if (!options.bounds.contains(pos)) continue;
    if (bc.cell.kind == CellKind::container) {
      // Prior containers never looked into still need a container entry.
      s.set_cell(pos, bc.cell);
      s.containers[pos] = Container{pos, {}, false};
    } else {
      s.set_cell(pos, bc.cell);
    }
  }
  for (const auto& [pos, bc] : b.containers) {
    if (!options.bounds.contains(pos)) continue;
    s.set_cell(pos, Cell::container(bc.block));
    s.containers[pos] = Container{pos, bc.contents.value_or(Items{}), bc.contents.has_value()};
  }
  for (const auto& region : options.occludable_interior) {
    for (int x = region.min.x; x <= region.max.x; ++x)
      for (int y = region.min.y; y <= region.max.y; ++y)
        for (int z = region.min.z; z <= region.max.z; ++z) {
          const BlockPos p{x, y, z};
          if (options.bounds.contains(p) && !b.cells.contains(p)) s.set_cell(p, Cell::unknown());
        }
  }
  s.agents[b.self.id] = b.self;
  for (const auto& [id, a] : b.agents) {
    if (!a.visibility.seen_before || !a.last_pose || id == b.self.id) continue;
    AgentBody body;
    body.id = id;
    body.pose = *a.last_pose;
    if (a.held_item_known) body.held_item = a.held_item;
    body.inventory = a.inventory.value_or(Items{});
    s.agents[id] = std::move(body);
  }
  return s;
}

nlohmann::ordered_json to_json(const BeliefState& b) {
  nlohmann::ordered_json j;
  j["owner"] = b.owner;
  j["tick"] = b.tick;
  j["thought"] = b.thought ? nlohmann::ordered_json(*b.thought) : nlohmann::ordered_json("No thought");
  j["self"] = {{"position", format_vec(b.self.pose.position)},
               {"helditem", b.self.held_item.value_or("None")},
               {"inventory", b.self.inventory.empty() ? nlohmann::ordered_json("No data")
                                                      : nlohmann::ordered_json(b.self.inventory)}};
  auto cells = nlohmann::ordered_json::object();
  for (const auto& [pos, bc] : b.cells) {
    if (bc.cell.kind == CellKind::air) continue;
    cells[format_block_pos(pos)] = {{"block", bc.cell.type_name()},
                                    {"seen_before", bc.visibility.seen_before},
                                    {"visible_now", bc.visibility.visible_now}};
  }
  j["cells"] = std::move(cells);
  auto containers = nlohmann::ordered_json::object();
  for (const auto& [pos, bc] : b.containers) {
    containers[format_block_pos(pos)] = {
        {"contents", bc.contents ? nlohmann::ordered_json(format_items(*bc.contents))
                                 : nlohmann::ordered_json("No data")},
        {"seen_before", bc.visibility.seen_before},
        {"visible_now", bc.visibility.visible_now}};
  }
  j["containers"] = std::move(containers);
  auto agents = nlohmann::ordered_json::object();
  for (const auto& [id, a] : b.agents) {
    nlohmann::ordered_json aj;
    aj["position"] = a.visibility.visible_now && a.last_pose
                         ? nlohmann::ordered_json(format_vec(a.last_pose->position))
                         : nlohmann::ordered_json("Cannot be seen");
    aj["last_position"] = a.last_pose ? nlohmann::ordered_json(format_vec(a.last_pose->position))
                                      : nlohmann::ordered_json("No data");
    aj["helditem"] = a.held_item_known ? nlohmann::ordered_json(a.held_item.value_or("None"))
                                       : nlohmann::ordered_json("No data");
    aj["inventory"] = a.inventory ? nlohmann::ordered_json(*a.inventory) : nlohmann::ordered_json("No data");
    aj["seen_before"] = a.visibility.seen_before;
    aj["visible_now"] = a.visibility.visible_now;
    agents[id] = std::move(aj);
  }
  j["agents"] = std::move(agents);
  auto chats = nlohmann::ordered_json::array();
  for (const auto& c : b.chat_memory) chats.push_back(nlohmann::ordered_json(to_json(c)));
  j["chats"] = std::move(chats);
  auto events = nlohmann::ordered_json::array();
  for (const auto& e : b.event_memory) events.push_back(e.row());
  j["events"] = std::move(events);
  return j;
}

}  // namespace beliefnest
