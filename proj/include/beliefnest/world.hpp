#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace beliefnest {

using Tick = std::int64_t;

/// Integer lattice coordinate of a unit cell.
struct BlockPos {
  int x = 0;
  int y = 0;
  int z = 0;

  auto operator<=>(const BlockPos&) const = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Vec3&) const = default;
};

Vec3 cell_center(BlockPos p);
BlockPos containing_cell(Vec3 v);
double distance(Vec3 a, Vec3 b);

/// Inclusive axis-aligned box of cells.
struct Bounds {
  BlockPos min;
  BlockPos max;

  bool contains(BlockPos p) const;
  bool contains(Vec3 v) const;
  bool contains(const Bounds& other) const;
  bool operator==(const Bounds&) const = default;
};

enum class CellKind { air, opaque, container, lever, unknown };

struct Cell {
  CellKind kind = CellKind::air;
  std::string block;  // block name for opaque/container cells, empty otherwise

  static Cell air() { return {}; }
  static Cell unknown() { return {CellKind::unknown, {}}; }
  static Cell lever() { return {CellKind::lever, {}}; }
  static Cell opaque(std::string name) { return {CellKind::opaque, std::move(name)}; }
  static Cell container(std::string name) { return {CellKind::container, std::move(name)}; }

  bool is_opaque() const { return kind == CellKind::opaque; }
  // Agents can stand in air and lever cells only.
  bool is_passable() const { return kind == CellKind::air || kind == CellKind::lever; }
  // Name used by block-type queries ("chest", "lever", "stone", ...).
  std::string type_name() const;

  bool operator==(const Cell&) const = default;
};

using Items = std::map<std::string, int>;

void add_items(Items& into, const Items& delta);
// Returns false (and leaves `from` untouched) when any count is insufficient.
bool remove_items(Items& from, const Items& delta);
bool has_items(const Items& from, const Items& wanted);
int total_count(const Items& items);

struct Container {
  BlockPos pos;
  Items contents;
  // False for containers materialized from a belief that never saw inside.
  bool contents_known = true;

  bool operator==(const Container&) const = default;
};

struct AgentPose {
  Vec3 position;
  double yaw = 0.0;  // degrees in [0, 360)

  bool operator==(const AgentPose&) const = default;
};

struct AgentBody {
  std::string id;
  AgentPose pose;
  std::optional<std::string> held_item;
  Items inventory;

  BlockPos cell() const { return containing_cell(pose.position); }
  bool operator==(const AgentBody&) const = default;
};

bool is_valid_agent_id(const std::string& id);

/// Ground-truth (or belief-materialized) voxel world. Cells absent from the
/// map are air; every container entry is mirrored by a container cell.
struct WorldState {
  Bounds bounds;
  std::map<BlockPos, Cell> cells;
  std::map<BlockPos, Container> containers;
  std::map<std::string, AgentBody> agents;
  Tick tick = 0;

  const Cell& cell_at(BlockPos p) const;
  // Stores `c` at `p`; storing air erases the entry so the map stays sparse.
  void set_cell(BlockPos p, Cell c);
  const AgentBody* find_agent(const std::string& id) const;
  AgentBody* find_agent(const std::string& id);

  bool operator==(const WorldState&) const = default;
};

/// A snapshot is a detached value copy of a WorldState.
using StateSnapshot = WorldState;

struct CellSpec {
  BlockPos from;
  BlockPos to;  // inclusive; equals `from` for single cells
  Cell cell;
  bool prior = false;  // part of the a-priori knowledge every agent starts with
};

struct ContainerSpec {
  BlockPos pos;
  std::string block = "chest";
  Items contents;
};

struct WorldSpec {
  Bounds bounds;
  std::vector<CellSpec> cells;
  std::vector<ContainerSpec> containers;
  std::vector<AgentBody> agents;
};

WorldState create_world(const WorldSpec& spec);
StateSnapshot get_state(const WorldState& world);
void apply_state(WorldState& world, const StateSnapshot& snapshot);

/// Throws ContainerCellMismatch when the container/cell cross-invariant fails.
void check_invariants(const WorldState& world);

// JSON helpers shared by the scenario loader, belief export and reports.
nlohmann::json to_json(BlockPos p);
nlohmann::json to_json(Vec3 v);
nlohmann::json to_json(const WorldState& w);
BlockPos block_pos_from_json(const nlohmann::json& j);
Vec3 vec3_from_json(const nlohmann::json& j);
Cell cell_from_json(const nlohmann::json& j);
std::string to_string(CellKind kind);
WorldSpec world_spec_from_json(const nlohmann::json& j);

}  // namespace beliefnest
