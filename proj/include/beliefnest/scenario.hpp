#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "beliefnest/actions.hpp"
#include "beliefnest/nest.hpp"
#include "beliefnest/planner.hpp"
#include "beliefnest/world.hpp"

namespace beliefnest {

struct TreeEntry {
  SimPath path;
  Mode mode = Mode::follow;
};

/// Line-of-sight expectation checked when the scenario loads: an agent
/// standing at `viewer` does (not) see the cell containing `target`.
struct SightCheck {
  Vec3 viewer;
  Vec3 target;
  bool visible = true;
  std::string note;
};

struct ScriptStep {
  enum class Kind { action, set_mode, spawn, remove, create_branch, switch_branch, rounds };

  Kind kind = Kind::action;
  Tick tick = 0;
  SimPath path;  // node acted on; for spawn/remove the child's own path
  std::optional<Action> action;
  Mode mode = Mode::follow;
  std::string branch;
  int rounds = 0;
};

std::string to_string(ScriptStep::Kind k);

struct Query {
  enum class Kind { container_contents, chat_memory, belief_visibility, planner_target, event_log };

  Kind kind = Kind::container_contents;
  std::string text;
  SimPath path;
  std::string branch = kMainBranch;
  std::string agent;
  std::optional<BlockPos> pos;
  std::string planner;
  std::string task;
};

/// e.g. `container_contents(root/observer, main, (2,-51,-4))`. Throws QueryError.
Query parse_query(const std::string& text);

struct Assertion {
  std::string name;
  Query query;
  nlohmann::json expected;
};

struct Scenario {
  std::string name;
  WorldSpec world;
  NestConfig config;
  AnnouncementRules rules;
  std::vector<std::string> tracked_block_types{"chest", "lever"};
  std::vector<TreeEntry> tree;
  std::vector<SightCheck> checks;
  std::vector<ScriptStep> script;
  std::vector<Assertion> assertions;
};

/// Reads and validates a scenario file. `include` entries name other files
/// (relative to the including file) whose content is merged underneath:
/// objects merge key by key, arrays concatenate, scalars of the including
/// file win. Throws SchemaError with a JSON-pointer-like location.
Scenario load_scenario(const std::filesystem::path& file);
Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::json read_scenario_document(const std::filesystem::path& file);

struct StepTrace {
  std::size_t index = 0;
  Tick tick = 0;
  std::string kind;
  std::string path;
  std::string detail;
};

struct AssertionResult {
  std::string name;
  std::string query;
  nlohmann::json expected;
  nlohmann::json actual;
  bool passed = false;
  std::optional<std::string> error;
};

struct RunReport {
  std::string scenario;
  Tick final_tick = 0;
  std::vector<StepTrace> steps;
  std::vector<AssertionResult> assertions;

  bool passed() const;
  nlohmann::ordered_json to_json() const;
  std::string to_text() const;
};

struct RunOutcome {
  RunReport report;
  std::unique_ptr<SimNode> root;
};

/// Builds the tree, replays the script and evaluates every assertion.
/// Scripted steps sharing a tick run back to back; after each such group
/// the tree is stepped until nothing but the clock changes (at least one
/// round, at most twice the depth limit). Errors carry the script index.
RunOutcome run_scenario(const Scenario& sc);

nlohmann::json evaluate_query(const SimNode& root, const Query& q, const Scenario& sc);

/// Rounds until two consecutive tree fingerprints agree; returns the number
/// of rounds taken.
int settle(SimNode& root, int max_rounds);

}  // namespace beliefnest
