#pragma once

#include <map>
#include <string>
#include <vector>

#include "beliefnest/actions.hpp"
#include "beliefnest/nest.hpp"

namespace beliefnest {

struct PlanRequest {
  SimPath path;
  std::string branch = kMainBranch;
  std::string agent;
  std::string task;
  std::string prompt;
};

struct Plan {
  std::vector<Action> actions;
  std::string rationale;
};

/// Named regions and the chat patterns that announce them. Each pattern's
/// first capture group is a region name.
struct AnnouncementRules {
  std::map<std::string, Bounds> locations;
  std::vector<std::string> chat_patterns;
};

/// Point an agent walks to when sent to a region: horizontal centre of the
/// region at its lowest layer.
Vec3 region_target(const Bounds& region);

/// Walk to a chest holding the task's item, open it and take one. Falls back
/// to opening the nearest chest the agent has seen when no chest is known to
/// hold the item. Throws NoKnownChests, UnresolvedBranch, UnknownAgent.
Plan chest_seeker_plan(const SimNode& root, const PlanRequest& req);

/// Walk to where the agent named in the task last announced it would be,
/// or to where it was last seen. Throws NoInformation.
Plan announcement_follower_plan(const SimNode& root, const PlanRequest& req, const AnnouncementRules& rules);

/// POSTs {"prompt", "task"} as JSON to `endpoint` ("http://host:port/path")
/// and validates the returned action list. Throws ServiceUnreachable,
/// MalformedPlan.
Plan external_plan(const PlanRequest& req, const std::string& endpoint);

/// Parses a planner response body; shared by external_plan and tests.
Plan plan_from_json(const nlohmann::json& body, const std::string& actor);

}  // namespace beliefnest
