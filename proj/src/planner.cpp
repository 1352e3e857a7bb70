#include "beliefnest/planner.hpp"

#include <deque>
#include <limits>
#include <regex>
#include <set>

#include <httplib.h>

#include "beliefnest/error.hpp"
#include "beliefnest/format.hpp"

namespace beliefnest {

Vec3 region_target(const Bounds& region) {
  return {(region.min.x + region.max.x + 1) / 2.0, static_cast<double>(region.min.y),
          (region.min.z + region.max.z + 1) / 2.0};
}

namespace {

struct Resolved {
  const SimNode& node;
  const Situation& situation;
  const BeliefState& belief;
  const AgentBody& body;
};

Resolved resolve(const SimNode& root, const PlanRequest& req) {
  const SimNode* node = find_node(root, req.path);
  if (node == nullptr) throw Error(ErrorCode::UnresolvedBranch, req.path.str() + ": no such simulator");
  const Situation& s = branch_situation(*node, req.branch);
  const AgentBody* body = s.world.find_agent(req.agent);
  auto belief = s.beliefs.find(req.agent);
  if (body == nullptr || belief == s.beliefs.end()) {
    throw Error(ErrorCode::UnknownAgent, req.agent + " is not in " + req.path.str());
  }
  return {*node, s, belief->second, *body};
}

std::string task_item(const std::string& task) {
  static const std::regex kGet(R"(Get an? (\w+))", std::regex::icase);
  std::smatch m;
  if (std::regex_search(task, m, kGet)) return m[1];
  return task;
}

bool in_reach(Vec3 from, BlockPos target, double range) { return distance(from, cell_center(target)) <= range; }

// Nearest walkable standing point (by BFS order at the agent's level) that
// reaches `target`.
Vec3 approach_point(const WorldState& w, const AgentBody& body, BlockPos target, double range) {
  if (in_reach(body.pose.position, target, range)) return body.pose.position;
  const double y = body.pose.position.y;
  const BlockPos start = body.cell();
  std::set<BlockPos> seen{start};
  std::deque<BlockPos> frontier{start};
  constexpr int kNeighbours[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  while (!frontier.empty()) {
    const BlockPos cur = frontier.front();
    frontier.pop_front();
    const Vec3 stand{cur.x + 0.5, y, cur.z + 0.5};
    if (in_reach(stand, target, range)) return stand;
    for (const auto& d : kNeighbours) {
      const BlockPos next{cur.x + d[0], cur.y, cur.z + d[1]};
      if (!w.bounds.contains(next) || seen.contains(next) || !w.cell_at(next).is_passable()) continue;
      seen.insert(next);
      frontier.push_back(next);
    }
  }
  throw Error(ErrorCode::Blocked, body.id + " cannot reach " + format_block_pos(target));
}

}  // namespace

Plan chest_seeker_plan(const SimNode& root, const PlanRequest& req) {
  const Resolved r = resolve(root, req);
  const std::string item = task_item(req.task);
  const double range = r.node.config().interaction_range;

  std::optional<BlockPos> chest;
  for (const auto& [pos, c] : r.situation.world.containers) {
    if (c.contents_known && has_items(c.contents, {{item, 1}})) {
      chest = pos;
      break;
    }
  }
  Plan plan;
  if (chest) {
    const Vec3 stand = approach_point(r.situation.world, r.body, *chest, range);
    plan.actions = {Action{MoveTo{stand}, req.agent}, Action{OpenChest{*chest}, req.agent},
                    Action{TakeFromChest{*chest, {{item, 1}}}, req.agent}};
    plan.rationale = req.agent + " believes " + format_block_pos(*chest) + " holds " + item;
    return plan;
  }

  double best = std::numeric_limits<double>::infinity();
  for (const auto& [pos, c] : r.belief.containers) {
    if (!c.visibility.seen_before) continue;
    const double d = distance(r.body.pose.position, cell_center(pos));
    if (d < best) {
      best = d;
      chest = pos;
    }
  }
  if (!chest) throw Error(ErrorCode::NoKnownChests, req.agent + " at " + req.path.str() + " knows no chest");
  const Vec3 stand = approach_point(r.situation.world, r.body, *chest, range);
  plan.actions = {Action{MoveTo{stand}, req.agent}, Action{OpenChest{*chest}, req.agent}};
  plan.rationale = "no chest known to hold " + item + "; checking nearest " + format_block_pos(*chest);
  return plan;
}

Plan announcement_follower_plan(const SimNode& root, const PlanRequest& req, const AnnouncementRules& rules) {
  const Resolved r = resolve(root, req);

  std::optional<std::string> target;
  const std::regex word(R"(\w+)");
  for (auto it = std::sregex_iterator(req.task.begin(), req.task.end(), word); it != std::sregex_iterator();
       ++it) {
    const std::string w = it->str();
    if (w != req.agent && (r.belief.agents.contains(w) || r.situation.world.find_agent(w) != nullptr)) {
      target = w;
      break;
    }
  }
  if (!target) throw Error(ErrorCode::NoInformation, "task names no known agent: '" + req.task + "'");

  std::vector<std::regex> patterns;
  for (const auto& p : rules.chat_patterns) patterns.emplace_back(p);
  const auto& memory = r.belief.chat_memory;
  for (auto chat = memory.rbegin(); chat != memory.rend(); ++chat) {
    if (chat->speaker != *target) continue;
    for (const auto& p : patterns) {
      std::smatch m;
      if (!std::regex_search(chat->text, m, p) || m.size() < 2) continue;
      auto region = rules.locations.find(m[1]);
      if (region == rules.locations.end()) continue;
      Plan plan;
      plan.actions = {Action{MoveTo{region_target(region->second)}, req.agent}};
      plan.rationale = *target + " said \"" + chat->text + "\" at tick " + std::to_string(chat->tick);
      return plan;
    }
  }

  auto seen = r.belief.agents.find(*target);
  if (seen != r.belief.agents.end() && seen->second.last_pose) {
    Plan plan;
    plan.actions = {Action{MoveTo{seen->second.last_pose->position}, req.agent}};
    plan.rationale = *target + " was last seen at " + format_vec(seen->second.last_pose->position);
    return plan;
  }
  throw Error(ErrorCode::NoInformation, req.agent + " has no announcement or sighting of " + *target);
}

Plan plan_from_json(const nlohmann::json& body, const std::string& actor) {
  if (!body.is_object() || !body.contains("actions") || !body["actions"].is_array()) {
    throw Error(ErrorCode::MalformedPlan, "response needs an 'actions' array");
  }
  Plan plan;
  for (std::size_t i = 0; i < body["actions"].size(); ++i) {
    const auto& j = body["actions"][i];
    try {
      Action a = action_from_json(j, actor);
      if (a.actor != actor) {
        throw Error(ErrorCode::MalformedPlan, "action " + std::to_string(i) + " is for " + a.actor + ", not " + actor);
      }
      plan.actions.push_back(std::move(a));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::MalformedPlan) throw;
      throw Error(ErrorCode::MalformedPlan, "action " + std::to_string(i) + ": " + e.detail());
    }
  }
  if (body.contains("rationale")) {
    if (!body["rationale"].is_string()) throw Error(ErrorCode::MalformedPlan, "'rationale' must be a string");
    plan.rationale = body["rationale"].get<std::string>();
  }
  return plan;
}

Plan external_plan(const PlanRequest& req, const std::string& endpoint) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(endpoint, m, kUrl)) {
    throw Error(ErrorCode::ServiceUnreachable, "not an http endpoint: '" + endpoint + "'");
  }
  const std::string path = m[2].matched ? m[2].str() : "/";
  httplib::Client client(m[1].str());
  client.set_connection_timeout(5);
  client.set_read_timeout(30);
  const nlohmann::json request{{"prompt", req.prompt}, {"task", req.task}};
  auto res = client.Post(path, request.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::ServiceUnreachable, endpoint + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::MalformedPlan, endpoint + " answered HTTP " + std::to_string(res->status));
  }
  nlohmann::json body;
  try {
    body = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedPlan, std::string("response is not JSON: ") + e.what());
  }
  return plan_from_json(body, req.agent);
}

}  // namespace beliefnest
