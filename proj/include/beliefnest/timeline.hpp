#pragma once

#include <map>
#include <string>
#include <vector>

#include "beliefnest/belief.hpp"
#include "beliefnest/event.hpp"
#include "beliefnest/world.hpp"

namespace beliefnest {

struct SimNode;

inline constexpr const char* kMainBranch = "main";

/// Everything a branch saves and restores for one simulator.
struct Situation {
  WorldState world;
  std::map<std::string, BeliefState> beliefs;
  std::vector<EventRecord> log;

  Tick tick() const { return world.tick; }
  bool operator==(const Situation&) const = default;
};

/// Saved branch situations of one node. The entry for the active branch is
/// refreshed whenever the node leaves it; the node's live situation is the
/// authoritative state of the active branch.
struct Timeline {
  std::string active = kMainBranch;
  std::map<std::string, Situation> branches;
};

bool is_valid_branch_id(const std::string& id);

void create_branch(SimNode& node, const std::string& id);
void switch_branch(SimNode& node, const std::string& id);
// Appends to the active branch log and to this tick's pending events.
// Assigns the record's ordinal within its tick.
void log_event(SimNode& node, EventRecord e);

/// Live situation for the active branch, saved one otherwise.
const Situation& branch_situation(const SimNode& node, const std::string& id);

}  // namespace beliefnest
