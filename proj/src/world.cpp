#include "beliefnest/world.hpp"

#include <cmath>
#include <set>

#include "beliefnest/error.hpp"
#include "beliefnest/format.hpp"

namespace beliefnest {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::DuplicateAgentId: return "DuplicateAgentId";
    case ErrorCode::ContainerCellMismatch: return "ContainerCellMismatch";
    case ErrorCode::UnknownAgent: return "UnknownAgent";
    case ErrorCode::ObserverMismatch: return "ObserverMismatch";
    case ErrorCode::TimeRegression: return "TimeRegression";
    case ErrorCode::ChildExists: return "ChildExists";
    case ErrorCode::DepthExceeded: return "DepthExceeded";
    case ErrorCode::NoSuchChild: return "NoSuchChild";
    case ErrorCode::InvalidPath: return "InvalidPath";
    case ErrorCode::DuplicateBranchId: return "DuplicateBranchId";
    case ErrorCode::NoSuchBranch: return "NoSuchBranch";
    case ErrorCode::TimeMismatch: return "TimeMismatch";
    case ErrorCode::NotControlMode: return "NotControlMode";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InsufficientItems: return "InsufficientItems";
    case ErrorCode::NoSuchRecipe: return "NoSuchRecipe";
    case ErrorCode::Blocked: return "Blocked";
    case ErrorCode::InvalidAction: return "InvalidAction";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownFilter: return "UnknownFilter";
    case ErrorCode::DuplicateFilter: return "DuplicateFilter";
    case ErrorCode::UnresolvedBranch: return "UnresolvedBranch";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::NoKnownChests: return "NoKnownChests";
    case ErrorCode::NoInformation: return "NoInformation";
    case ErrorCode::ServiceUnreachable: return "ServiceUnreachable";
    case ErrorCode::MalformedPlan: return "MalformedPlan";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::QueryError: return "QueryError";
  }
  return "Unknown";
}

Vec3 cell_center(BlockPos p) { return {p.x + 0.5, p.y + 0.5, p.z + 0.5}; }

BlockPos containing_cell(Vec3 v) {
  return {static_cast<int>(std::floor(v.x)), static_cast<int>(std::floor(v.y)),
          static_cast<int>(std::floor(v.z))};
}

double distance(Vec3 a, Vec3 b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

bool Bounds::contains(BlockPos p) const {
  return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
         p.z <= max.z;
}

bool Bounds::contains(Vec3 v) const {
  return v.x >= min.x && v.x < max.x + 1.0 && v.y >= min.y && v.y < max.y + 1.0 &&
         v.z >= min.z && v.z < max.z + 1.0;
}

bool Bounds::contains(const Bounds& other) const {
  return contains(other.min) && contains(other.max);
}

std::string Cell::type_name() const {
  switch (kind) {
    case CellKind::air: return "air";
    case CellKind::unknown: return "unknown";
    case CellKind::lever: return "lever";
    case CellKind::opaque:
    case CellKind::container: return block;
  }
  return {};
}

std::string to_string(CellKind kind) {
  switch (kind) {
    case CellKind::air: return "air";
    case CellKind::opaque: return "opaque";
    case CellKind::container: return "container";
    case CellKind::lever: return "lever";
    case CellKind::unknown: return "unknown";
  }
  return {};
}

void add_items(Items& into, const Items& delta) {
  for (const auto& [name, count] : delta) {
    if (count <= 0) continue;
    into[name] += count;
  }
}

bool has_items(const Items& from, const Items& wanted) {
  for (const auto& [name, count] : wanted) {
    auto it = from.find(name);
    if (it == from.end() || it->second < count) return false;
  }
  return true;
}

bool remove_items(Items& from, const Items& delta) {
  if (!has_items(from, delta)) return false;
  for (const auto& [name, count] : delta) {
    auto it = from.find(name);
    it->second -= count;
    if (it->second <= 0) from.erase(it);
  }
  return true;
}

int total_count(const Items& items) {
  int total = 0;
  for (const auto& [_, count] : items) total += count;
  return total;
}

bool is_valid_agent_id(const std::string& id) {
  return !id.empty() && id.find('/') == std::string::npos &&
         id.find(':') == std::string::npos && id.find('@') == std::string::npos;
}

const Cell& WorldState::cell_at(BlockPos p) const {
  static const Cell kAir{};
  auto it = cells.find(p);
  return it == cells.end() ? kAir : it->second;
}

void WorldState::set_cell(BlockPos p, Cell c) {
  if (c.kind == CellKind::air) {
    cells.erase(p);
  } else {
    cells[p] = std::move(c);
  }
}

const AgentBody* WorldState::find_agent(const std::string& id) const {
  auto it = agents.find(id);
  return it == agents.end() ? nullptr : &it->second;
}

AgentBody* WorldState::find_agent(const std::string& id) {
  auto it = agents.find(id);
  return it == agents.end() ? nullptr : &it->second;
}

void check_invariants(const WorldState& world) {
  for (const auto& [pos, container] : world.containers) {
    if (container.pos != pos || world.cell_at(pos).kind != CellKind::container) {
      throw Error(ErrorCode::ContainerCellMismatch,
                  "container at " + format_block_pos(pos) + " has no container cell");
    }
  }
  for (const auto& [pos, cell] : world.cells) {
    if (cell.kind == CellKind::container && !world.containers.contains(pos)) {
      throw Error(ErrorCode::ContainerCellMismatch,
                  "container cell at " + format_block_pos(pos) + " has no container");
    }
  }
}

WorldState create_world(const WorldSpec& spec) {
  WorldState world;
  world.bounds = spec.bounds;
  for (const auto& entry : spec.cells) {
    if (!spec.bounds.contains(entry.from) || !spec.bounds.contains(entry.to)) {
      throw Error(ErrorCode::OutOfBounds, "cell range " + format_block_pos(entry.from) +
                                              ".." + format_block_pos(entry.to));
    }
    for (int x = std::min(entry.from.x, entry.to.x); x <= std::max(entry.from.x, entry.to.x); ++x)
      for (int y = std::min(entry.from.y, entry.to.y); y <= std::max(entry.from.y, entry.to.y); ++y)
        for (int z = std::min(entry.from.z, entry.to.z); z <= std::max(entry.from.z, entry.to.z); ++z)
          world.set_cell({x, y, z}, entry.cell);
  }
  for (const auto& c : spec.containers) {
    if (!spec.bounds.contains(c.pos)) {
      throw Error(ErrorCode::OutOfBounds, "container " + format_block_pos(c.pos));
    }
    const Cell& existing = world.cell_at(c.pos);
    if (existing.kind != CellKind::air &&
        !(existing.kind == CellKind::container && existing.block == c.block)) {
      throw Error(ErrorCode::ContainerCellMismatch,
                  "container " + format_block_pos(c.pos) + " overlaps a " +
                      to_string(existing.kind) + " cell");
    }
    world.set_cell(c.pos, Cell::container(c.block));
    Container container{c.pos, {}, true};
    add_items(container.contents, c.contents);
    world.containers[c.pos] = std::move(container);
  }
  for (const auto& agent : spec.agents) {
    if (!is_valid_agent_id(agent.id)) {
      throw Error(ErrorCode::UnknownAgent, "invalid agent id '" + agent.id + "'");
    }
    if (!spec.bounds.contains(agent.pose.position)) {
      throw Error(ErrorCode::OutOfBounds, "agent " + agent.id + " at " +
                                              format_vec(agent.pose.position));
    }
    if (world.agents.contains(agent.id)) {
      throw Error(ErrorCode::DuplicateAgentId, agent.id);
    }
    world.agents[agent.id] = agent;
  }
  check_invariants(world);
  world.tick = 0;
  return world;
}

StateSnapshot get_state(const WorldState& world) { return world; }

void apply_state(WorldState& world, const StateSnapshot& snapshot) {
  if (!world.bounds.contains(snapshot.bounds)) {
    throw Error(ErrorCode::OutOfBounds, "snapshot bounds exceed world bounds");
  }
  for (const auto& [id, body] : snapshot.agents) {
    if (!world.bounds.contains(body.pose.position)) {
      throw Error(ErrorCode::OutOfBounds, "agent " + id + " outside world bounds");
    }
  }
  const Bounds keep = world.bounds;
  world = snapshot;
  world.bounds = keep;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(BlockPos p) { return nlohmann::json::array({p.x, p.y, p.z}); }

nlohmann::json to_json(Vec3 v) { return nlohmann::json::array({v.x, v.y, v.z}); }

namespace {

nlohmann::json cell_to_json(const Cell& c) {
  nlohmann::json j;
  j["kind"] = to_string(c.kind);
  if (!c.block.empty()) j["block"] = c.block;
  return j;
}

[[noreturn]] void schema_error(const std::string& where, const std::string& reason) {
  throw Error(ErrorCode::SchemaError, where + ": " + reason);
}

}  // namespace

nlohmann::json to_json(const WorldState& w) {
  nlohmann::json j;
  j["bounds"] = {{"min", to_json(w.bounds.min)}, {"max", to_json(w.bounds.max)}};
  j["tick"] = w.tick;
  auto cells = nlohmann::json::array();
  for (const auto& [pos, cell] : w.cells) {
    auto c = cell_to_json(cell);
    c["pos"] = to_json(pos);
    cells.push_back(std::move(c));
  }
  j["cells"] = std::move(cells);
  auto containers = nlohmann::json::array();
  for (const auto& [pos, c] : w.containers) {
    nlohmann::json cj{{"pos", to_json(pos)}, {"contents", c.contents}};
    if (!c.contents_known) cj["contents_known"] = false;
    containers.push_back(std::move(cj));
  }
  j["containers"] = std::move(containers);
  auto agents = nlohmann::json::array();
  for (const auto& [id, a] : w.agents) {
    nlohmann::json aj{{"id", id}, {"position", to_json(a.pose.position)}, {"yaw", a.pose.yaw},
                      {"inventory", a.inventory}};
    aj["held_item"] = a.held_item ? nlohmann::json(*a.held_item) : nlohmann::json(nullptr);
    agents.push_back(std::move(aj));
  }
  j["agents"] = std::move(agents);
  return j;
}

BlockPos block_pos_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::SchemaError, "expected [x, y, z] integer triple, got " + j.dump());
  }
  for (const auto& v : j) {
    if (!v.is_number_integer()) {
      throw Error(ErrorCode::SchemaError, "expected integer coordinates, got " + j.dump());
    }
  }
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

Vec3 vec3_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
      !j[2].is_number()) {
    throw Error(ErrorCode::SchemaError, "expected [x, y, z] number triple, got " + j.dump());
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Cell cell_from_json(const nlohmann::json& j) {
  const std::string kind = j.value("kind", "");
  const std::string block = j.value("block", "");
  if (kind == "air") return Cell::air();
  if (kind == "unknown") return Cell::unknown();
  if (kind == "lever") return Cell::lever();
  if (kind == "opaque") return Cell::opaque(block.empty() ? "stone" : block);
  if (kind == "container") return Cell::container(block.empty() ? "chest" : block);
  throw Error(ErrorCode::SchemaError, "unknown cell kind '" + kind + "'");
}

namespace {

Items items_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected an item mapping");
  Items items;
  for (const auto& [name, count] : j.items()) {
    if (!count.is_number_integer() || count.get<int>() < 0) {
      schema_error(where + "/" + name, "item counts must be nonnegative integers");
    }
    if (count.get<int>() > 0) items[name] = count.get<int>();
  }
  return items;
}

template <typename F>
auto at_path(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaError) schema_error(where, e.detail());
    throw;
  } catch (const nlohmann::json::exception& e) {
    schema_error(where, e.what());
  }
}

}  // namespace

WorldSpec world_spec_from_json(const nlohmann::json& j) {
  WorldSpec spec;
  if (!j.is_object()) schema_error("/world", "expected an object");
  if (!j.contains("bounds")) schema_error("/world/bounds", "missing");
  spec.bounds.min = at_path("/world/bounds/min", [&] { return block_pos_from_json(j.at("bounds").at("min")); });
  spec.bounds.max = at_path("/world/bounds/max", [&] { return block_pos_from_json(j.at("bounds").at("max")); });
  if (j.contains("cells")) {
    const auto& cells = j.at("cells");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string where = "/world/cells/" + std::to_string(i);
      const auto& c = cells[i];
      CellSpec cs = at_path(where, [&] {
        CellSpec s;
        if (c.contains("pos")) {
          s.from = s.to = block_pos_from_json(c.at("pos"));
        } else {
          s.from = block_pos_from_json(c.at("from"));
          s.to = block_pos_from_json(c.at("to"));
        }
        s.cell = cell_from_json(c);
        s.prior = c.value("prior", false);
        return s;
      });
      spec.cells.push_back(std::move(cs));
    }
  }
  if (j.contains("containers")) {
    const auto& cs = j.at("containers");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string where = "/world/containers/" + std::to_string(i);
      spec.containers.push_back(at_path(where, [&] {
        ContainerSpec s;
        s.pos = block_pos_from_json(cs[i].at("pos"));
        s.block = cs[i].value("block", "chest");
        if (cs[i].contains("contents")) s.contents = items_from_json(cs[i].at("contents"), where + "/contents");
        return s;
      }));
    }
  }
  if (j.contains("agents")) {
    const auto& as = j.at("agents");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < as.size(); ++i) {
      const std::string where = "/world/agents/" + std::to_string(i);
      spec.agents.push_back(at_path(where, [&] {
        AgentBody a;
        a.id = as[i].at("id").get<std::string>();
        if (!is_valid_agent_id(a.id)) schema_error(where + "/id", "invalid agent id '" + a.id + "'");
        a.pose.position = vec3_from_json(as[i].at("position"));
        a.pose.yaw = as[i].value("yaw", 0.0);
        if (a.pose.yaw < 0.0 || a.pose.yaw >= 360.0) schema_error(where + "/yaw", "must lie in [0, 360)");
        if (as[i].contains("held_item") && !as[i].at("held_item").is_null()) {
          a.held_item = as[i].at("held_item").get<std::string>();
        }
        if (as[i].contains("inventory")) a.inventory = items_from_json(as[i].at("inventory"), where + "/inventory");
        return a;
      }));
    }
  }
  return spec;
}

}  // namespace beliefnest
