#include "beliefnest/timeline.hpp"

#include <algorithm>

#include "beliefnest/error.hpp"
#include "beliefnest/nest.hpp"

namespace beliefnest {

bool is_valid_branch_id(const std::string& id) {
  return !id.empty() && id.find_first_of("/:@ ") == std::string::npos;
}

void create_branch(SimNode& node, const std::string& id) {
  if (!is_valid_branch_id(id)) {
    throw Error(ErrorCode::NoSuchBranch, "invalid branch id '" + id + "'");
  }
  if (node.timeline.branches.contains(id)) {
    throw Error(ErrorCode::DuplicateBranchId, node.path.str() + ":" + id);
  }
  node.timeline.branches.emplace(id, node.live);
}

void switch_branch(SimNode& node, const std::string& id) {
  auto target = node.timeline.branches.find(id);
  if (target == node.timeline.branches.end()) {
    throw Error(ErrorCode::NoSuchBranch, node.path.str() + ":" + id);
  }
  if (id == node.timeline.active) return;
  node.timeline.branches[node.timeline.active] = node.live;
  node.live = target->second;
  node.timeline.active = id;
  node.inbox.clear();
  node.pending_events.clear();
  node.pending_chats.clear();
  // Followers keep only what the restored parent belief remembers and
  // rebuild their beliefs from the next snapshot.
  for (auto& [agent, child] : node.children) {
    if (child->mode != Mode::follow) continue;
    const auto it = node.live.beliefs.find(agent);
    if (it == node.live.beliefs.end()) continue;
    const auto& memory = it->second.event_memory;
    std::erase_if(child->live.log, [&](const EventRecord& e) {
      return std::find(memory.begin(), memory.end(), e) == memory.end();
    });
    child->inbox.clear();
    child->resync_beliefs = true;
  }
}

void log_event(SimNode& node, EventRecord e) {
  if (e.time != node.tick()) {
    throw Error(ErrorCode::TimeMismatch, "event at tick " + std::to_string(e.time) + " logged at tick " +
                                             std::to_string(node.tick()) + " in " + node.path.str());
  }
  int ordinal = 0;
  for (auto it = node.live.log.rbegin(); it != node.live.log.rend() && it->time == e.time; ++it) ++ordinal;
  e.ordinal = ordinal;
  node.live.log.push_back(e);
  node.pending_events.push_back(std::move(e));
}

const Situation& branch_situation(const SimNode& node, const std::string& id) {
  if (id == node.timeline.active) return node.live;
  auto it = node.timeline.branches.find(id);
  if (it == node.timeline.branches.end()) {
    throw Error(ErrorCode::NoSuchBranch, node.path.str() + ":" + id);
  }
  return it->second;
}

}  // namespace beliefnest
