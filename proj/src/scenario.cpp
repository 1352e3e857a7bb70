#include "beliefnest/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "beliefnest/error.hpp"
#include "beliefnest/format.hpp"
#include "beliefnest/perception.hpp"

namespace beliefnest {

using nlohmann::json;

std::string to_string(ScriptStep::Kind k) {
  switch (k) {
    case ScriptStep::Kind::action: return "action";
    case ScriptStep::Kind::set_mode: return "set_mode";
    case ScriptStep::Kind::spawn: return "spawn";
    case ScriptStep::Kind::remove: return "remove";
    case ScriptStep::Kind::create_branch: return "create_branch";
    case ScriptStep::Kind::switch_branch: return "switch_branch";
    case ScriptStep::Kind::rounds: return "rounds";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Queries

namespace {

[[noreturn]] void query_error(const std::string& text, const std::string& reason) {
  throw Error(ErrorCode::QueryError, "'" + text + "': " + reason);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\n");
  return std::string(s.substr(b, e - b + 1));
}

// Splits on commas outside parentheses and quotes.
std::vector<std::string> split_args(const std::string& text, std::string_view body) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  char quote = 0;
  for (char c : body) {
    if (quote) {
      cur += c;
      if (c == quote) quote = 0;
      continue;
    }
    if (c == '"' || c == '\'') quote = c;
    else if (c == '(') ++depth;
    else if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
      continue;
    }
    cur += c;
  }
  if (quote || depth != 0) query_error(text, "unbalanced quotes or parentheses");
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

BlockPos parse_pos(const std::string& text, const std::string& arg) {
  if (arg.size() < 2 || arg.front() != '(' || arg.back() != ')') query_error(text, "expected (x, y, z), got " + arg);
  std::istringstream in(arg.substr(1, arg.size() - 2));
  BlockPos p;
  char c1 = 0, c2 = 0;
  if (!(in >> p.x >> c1 >> p.y >> c2 >> p.z) || c1 != ',' || c2 != ',') {
    query_error(text, "expected integer (x, y, z), got " + arg);
  }
  in >> std::ws;
  if (!in.eof()) query_error(text, "trailing text in " + arg);
  return p;
}

std::string unquote(const std::string& arg) {
  if (arg.size() >= 2 && (arg.front() == '"' || arg.front() == '\'') && arg.back() == arg.front()) {
    return arg.substr(1, arg.size() - 2);
  }
  return arg;
}

}  // namespace

Query parse_query(const std::string& text) {
  Query q;
  q.text = trim(text);
  const auto open = q.text.find('(');
  if (open == std::string::npos || q.text.back() != ')') query_error(text, "expected name(args)");
  const std::string name = trim(std::string_view(q.text).substr(0, open));
  const auto args = split_args(text, std::string_view(q.text).substr(open + 1, q.text.size() - open - 2));

  auto arity = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) {
      query_error(text, fmt::format("{} takes {} to {} arguments, got {}", name, lo, hi, args.size()));
    }
  };
  try {
    if (name == "container_contents") {
      q.kind = Query::Kind::container_contents;
      arity(2, 3);
      if (args.size() == 3) q.pos = parse_pos(text, args[2]);
    } else if (name == "chat_memory") {
      q.kind = Query::Kind::chat_memory;
      arity(3, 3);
      q.agent = args[2];
    } else if (name == "belief_visibility") {
      q.kind = Query::Kind::belief_visibility;
      arity(4, 4);
      q.agent = args[2];
      q.pos = parse_pos(text, args[3]);
    } else if (name == "planner_target") {
      q.kind = Query::Kind::planner_target;
      arity(5, 5);
      q.agent = args[2];
      q.planner = args[3];
      q.task = unquote(args[4]);
      if (q.planner != "chest_seeker" && q.planner != "announcement_follower") {
        query_error(text, "unknown planner '" + q.planner + "'");
      }
    } else if (name == "event_log") {
      q.kind = Query::Kind::event_log;
      arity(2, 2);
    } else {
      query_error(text, "unknown query '" + name + "'");
    }
    q.path = SimPath::parse(args[0]);
    q.branch = args[1];
    if (!is_valid_branch_id(q.branch)) query_error(text, "bad branch id '" + q.branch + "'");
    if (!q.agent.empty() && !is_valid_agent_id(q.agent)) query_error(text, "bad agent id '" + q.agent + "'");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::QueryError) throw;
    query_error(text, e.detail());
  }
  return q;
}

namespace {

json items_json(const Items& items) {
  json j = json::object();
  for (const auto& [name, count] : items) j[name] = count;
  return j;
}

}  // namespace

json evaluate_query(const SimNode& root, const Query& q, const Scenario& sc) {
  const SimNode* node = find_node(root, q.path);
  if (node == nullptr) query_error(q.text, "no simulator at " + q.path.str());
  const Situation* s = nullptr;
  try {
    s = &branch_situation(*node, q.branch);
  } catch (const Error& e) {
    query_error(q.text, e.detail());
  }
  auto belief = [&]() -> const BeliefState& {
    auto it = s->beliefs.find(q.agent);
    if (it == s->beliefs.end()) query_error(q.text, q.agent + " has no belief at " + q.path.str());
    return it->second;
  };

  switch (q.kind) {
    case Query::Kind::container_contents: {
      if (q.pos) {
        auto it = s->world.containers.find(*q.pos);
        if (it == s->world.containers.end() || !it->second.contents_known) return nullptr;
        return items_json(it->second.contents);
      }
      json out = json::object();
      for (const auto& [pos, c] : s->world.containers) {
        if (c.contents_known && !c.contents.empty()) out[format_block_pos(pos)] = items_json(c.contents);
      }
      return out;
    }
    case Query::Kind::chat_memory: {
      json out = json::array();
      for (const auto& c : belief().chat_memory) out.push_back(c.speaker + ": " + c.text);
      return out;
    }
    case Query::Kind::belief_visibility: {
      const BeliefState& b = belief();
      auto it = b.cells.find(*q.pos);
      if (it == b.cells.end()) return nullptr;
      return {{"seen_before", it->second.visibility.seen_before}, {"visible_now", it->second.visibility.visible_now}};
    }
    case Query::Kind::planner_target: {
      PlanRequest req{q.path, q.branch, q.agent, q.task, {}};
      if (q.planner == "chest_seeker") {
        const Plan plan = chest_seeker_plan(root, req);
        for (const auto& a : plan.actions) {
          if (const auto* open = std::get_if<OpenChest>(&a.kind)) return to_json(open->pos);
        }
        return nullptr;
      }
      const Plan plan = announcement_follower_plan(root, req, sc.rules);
      const Vec3 target = std::get<MoveTo>(plan.actions.front().kind).target;
      for (const auto& [name, region] : sc.rules.locations) {
        if (region.contains(target)) return name;
      }
      return to_json(target);
    }
    case Query::Kind::event_log: {
      json out = json::array();
      for (const auto& e : s->log) out.push_back(e.row());
      return out;
    }
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Loading

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& reason) {
  throw Error(ErrorCode::SchemaError, where + ": " + reason);
}

void merge_under(json& base, const json& overlay) {
  if (base.is_object() && overlay.is_object()) {
    for (const auto& [key, value] : overlay.items()) {
      if (base.contains(key)) merge_under(base[key], value);
      else base[key] = value;
    }
  } else if (base.is_array() && overlay.is_array()) {
    for (const auto& v : overlay) base.push_back(v);
  } else {
    base = overlay;
  }
}

json read_json_file(const std::filesystem::path& file, std::set<std::filesystem::path>& visiting) {
  std::ifstream in(file);
  if (!in) schema_error(file.string(), "cannot open file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    schema_error(file.string(), e.what());
  }
  if (!doc.is_object()) schema_error(file.string(), "top level must be an object");
  if (!doc.contains("include")) return doc;

  const auto canonical = std::filesystem::weakly_canonical(file);
  if (!visiting.insert(canonical).second) schema_error(file.string(), "include cycle");
  json includes = doc["include"];
  doc.erase("include");
  if (includes.is_string()) includes = json::array({includes});
  if (!includes.is_array()) schema_error("/include", "expected a file name or list of file names");
  json merged = json::object();
  for (const auto& inc : includes) {
    if (!inc.is_string()) schema_error("/include", "expected a file name");
    merge_under(merged, read_json_file(file.parent_path() / inc.get<std::string>(), visiting));
  }
  merge_under(merged, doc);
  visiting.erase(canonical);
  return merged;
}

template <typename F>
auto at(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaError && e.detail().starts_with("/")) throw;
    schema_error(where, e.detail());
  } catch (const json::exception& e) {
    schema_error(where, e.what());
  }
}

Bounds bounds_from_json(const json& j) {
  Bounds b{block_pos_from_json(j.at("min")), block_pos_from_json(j.at("max"))};
  if (b.min.x > b.max.x || b.min.y > b.max.y || b.min.z > b.max.z) {
    throw Error(ErrorCode::SchemaError, "min exceeds max");
  }
  return b;
}

Items items_from(const json& j) {
  Items items;
  for (const auto& [name, count] : j.items()) {
    if (!count.is_number_integer() || count.get<int>() < 1) throw Error(ErrorCode::SchemaError, "bad count for " + name);
    items[name] = count.get<int>();
  }
  return items;
}

void check_path_agents(const std::string& where, const SimPath& p, const std::set<std::string>& agents) {
  for (const auto& id : p.ids) {
    if (!agents.contains(id)) schema_error(where, "undeclared agent '" + id + "' in " + p.str());
  }
}

ScriptStep step_from_json(const json& j, const std::string& where, const std::set<std::string>& agents) {
  ScriptStep st;
  st.tick = j.at("tick").get<Tick>();
  if (st.tick < 0) schema_error(where + "/tick", "must be >= 0");
  const std::string kind = j.at("do").get<std::string>();
  st.path = SimPath::parse(j.value("path", "root"));
  check_path_agents(where + "/path", st.path, agents);
  if (kind == "action") {
    st.kind = ScriptStep::Kind::action;
    try {
      st.action = action_from_json(j.at("action"));
    } catch (const Error& e) {
      schema_error(where + "/action", e.detail());
    }
    if (!agents.contains(st.action->actor)) schema_error(where + "/action/actor", "undeclared agent '" + st.action->actor + "'");
  } else if (kind == "set_mode") {
    st.kind = ScriptStep::Kind::set_mode;
    st.mode = mode_from_string(j.at("mode").get<std::string>());
  } else if (kind == "spawn" || kind == "remove") {
    st.kind = kind == "spawn" ? ScriptStep::Kind::spawn : ScriptStep::Kind::remove;
    if (st.path.is_root()) schema_error(where + "/path", kind + " needs a child path");
  } else if (kind == "create_branch" || kind == "switch_branch") {
    st.kind = kind == "create_branch" ? ScriptStep::Kind::create_branch : ScriptStep::Kind::switch_branch;
    st.branch = j.at("branch").get<std::string>();
    if (!is_valid_branch_id(st.branch)) schema_error(where + "/branch", "invalid branch id '" + st.branch + "'");
  } else if (kind == "rounds") {
    st.kind = ScriptStep::Kind::rounds;
    st.rounds = j.at("rounds").get<int>();
    if (st.rounds < 0) schema_error(where + "/rounds", "must be >= 0");
  } else {
    schema_error(where + "/do", "unknown step kind '" + kind + "'");
  }
  return st;
}

}  // namespace

nlohmann::json read_scenario_document(const std::filesystem::path& file) {
  std::set<std::filesystem::path> visiting;
  return read_json_file(file, visiting);
}

Scenario scenario_from_json(const json& doc) {
  Scenario sc;
  sc.name = doc.value("name", "unnamed");
  if (!doc.contains("world")) schema_error("/world", "missing");
  sc.world = world_spec_from_json(doc["world"]);

  NestConfig& cfg = sc.config;
  at("/config", [&] {
    const json c = doc.value("config", json::object());
    cfg.perception.view_radius = c.value("view_radius", cfg.perception.view_radius);
    cfg.perception.chat_radius = c.value("chat_radius", cfg.perception.chat_radius);
    cfg.interaction_range = c.value("interaction_range", cfg.interaction_range);
    cfg.max_depth = c.value("max_depth", cfg.max_depth);
    cfg.allow_self_nesting = c.value("allow_self_nesting", cfg.allow_self_nesting);
    if (cfg.perception.view_radius <= 0 || cfg.perception.chat_radius < 0 || cfg.interaction_range <= 0) {
      throw Error(ErrorCode::SchemaError, "radii must be positive");
    }
    if (c.contains("occludable_interior")) {
      for (const auto& r : c["occludable_interior"]) cfg.occludable_interior.push_back(bounds_from_json(r));
    }
    return 0;
  });
  for (const auto& cs : sc.world.cells) {
    if (!cs.prior) continue;
    for (int x = cs.from.x; x <= cs.to.x; ++x)
      for (int y = cs.from.y; y <= cs.to.y; ++y)
        for (int z = cs.from.z; z <= cs.to.z; ++z) cfg.prior.cells[{x, y, z}] = cs.cell;
  }
  if (doc.contains("recipes")) {
    for (const auto& [name, r] : doc["recipes"].items()) {
      cfg.recipes[name] = at("/recipes/" + name, [&] {
        return Recipe{items_from(r.at("inputs")), items_from(r.at("outputs"))};
      });
    }
  }
  if (doc.contains("locations")) {
    for (const auto& [name, r] : doc["locations"].items()) {
      sc.rules.locations[name] = at("/locations/" + name, [&] { return bounds_from_json(r); });
    }
  }
  if (doc.contains("chat_patterns")) {
    sc.rules.chat_patterns = at("/chat_patterns", [&] { return doc["chat_patterns"].get<std::vector<std::string>>(); });
    for (std::size_t i = 0; i < sc.rules.chat_patterns.size(); ++i) {
      try {
        std::regex re(sc.rules.chat_patterns[i]);
        if (re.mark_count() < 1) schema_error(fmt::format("/chat_patterns/{}", i), "needs a capture group");
      } catch (const std::regex_error& e) {
        schema_error(fmt::format("/chat_patterns/{}", i), e.what());
      }
    }
  }
  if (doc.contains("tracked_block_types")) {
    sc.tracked_block_types =
        at("/tracked_block_types", [&] { return doc["tracked_block_types"].get<std::vector<std::string>>(); });
  }

  std::set<std::string> agents;
  for (const auto& a : sc.world.agents) agents.insert(a.id);

  std::set<SimPath> declared{SimPath{}};
  if (doc.contains("tree")) {
    const json& tree = doc["tree"];
    for (std::size_t i = 0; i < tree.size(); ++i) {
      const std::string where = fmt::format("/tree/{}", i);
      TreeEntry e = at(where, [&] {
        TreeEntry t;
        const json& node = tree[i];
        t.path = SimPath::parse(node.is_string() ? node.get<std::string>() : node.at("path").get<std::string>());
        if (node.is_object() && node.contains("mode")) t.mode = mode_from_string(node["mode"].get<std::string>());
        return t;
      });
      if (e.path.is_root()) schema_error(where, "the root is implicit");
      check_path_agents(where, e.path, agents);
      SimPath parent = e.path;
      parent.ids.pop_back();
      if (!declared.contains(parent)) schema_error(where, "parent of " + e.path.str() + " is not declared earlier");
      if (e.path.depth() > cfg.max_depth) schema_error(where, e.path.str() + " exceeds max_depth");
      if (!declared.insert(e.path).second) schema_error(where, "duplicate " + e.path.str());
      sc.tree.push_back(std::move(e));
    }
  }

  if (doc.contains("checks")) {
    const json& checks = doc["checks"];
    for (std::size_t i = 0; i < checks.size(); ++i) {
      sc.checks.push_back(at(fmt::format("/checks/{}", i), [&] {
        const json& c = checks[i];
        return SightCheck{vec3_from_json(c.at("viewer")), vec3_from_json(c.at("target")), c.at("visible").get<bool>(),
                          c.value("note", "")};
      }));
    }
  }

  if (doc.contains("script")) {
    const json& script = doc["script"];
    Tick last = 0;
    for (std::size_t i = 0; i < script.size(); ++i) {
      const std::string where = fmt::format("/script/{}", i);
      ScriptStep st = at(where, [&] { return step_from_json(script[i], where, agents); });
      if (st.tick < last) schema_error(where + "/tick", "script ticks must be nondecreasing");
      last = st.tick;
      sc.script.push_back(std::move(st));
    }
  }

  if (doc.contains("assertions")) {
    const json& as = doc["assertions"];
    for (std::size_t i = 0; i < as.size(); ++i) {
      const std::string where = fmt::format("/assertions/{}", i);
      Assertion a = at(where, [&] {
        Assertion out;
        out.query = parse_query(as[i].at("query").get<std::string>());
        out.name = as[i].value("name", out.query.text);
        out.expected = as[i].at("expect");
        return out;
      });
      check_path_agents(where + "/query", a.query.path, agents);
      if (!a.query.agent.empty() && !agents.contains(a.query.agent)) {
        schema_error(where + "/query", "undeclared agent '" + a.query.agent + "'");
      }
      sc.assertions.push_back(std::move(a));
    }
  }

  // Static sight lines the scenario's geometry relies on.
  const WorldState initial = at("/world", [&] { return create_world(sc.world); });
  for (std::size_t i = 0; i < sc.checks.size(); ++i) {
    const SightCheck& c = sc.checks[i];
    const Vec3 eye{c.viewer.x, c.viewer.y + kEyeHeight, c.viewer.z};
    const bool seen = at(fmt::format("/checks/{}", i), [&] {
      return line_of_sight(initial, eye, cell_center(containing_cell(c.target)), cfg.perception.view_radius);
    });
    if (seen != c.visible) {
      schema_error(fmt::format("/checks/{}", i),
                   fmt::format("{} -> {} expected {}, got {}{}", format_vec(c.viewer), format_vec(c.target),
                               c.visible ? "visible" : "hidden", seen ? "visible" : "hidden",
                               c.note.empty() ? "" : " (" + c.note + ")"));
    }
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& file) { return scenario_from_json(read_scenario_document(file)); }

// ---------------------------------------------------------------------------
// Running

namespace {

std::string tree_fingerprint(SimNode& root) {
  std::string out;
  for (const SimNode* n : nodes_breadth_first(static_cast<const SimNode&>(root))) {
    out += content_fingerprint(*n);
    fmt::format_to(std::back_inserter(out), "#{}\n", n->inbox.size());
  }
  return out;
}

std::string describe(const ScriptStep& st) {
  switch (st.kind) {
    case ScriptStep::Kind::action: return to_json(*st.action).dump();
    case ScriptStep::Kind::set_mode: return to_string(st.mode);
    case ScriptStep::Kind::create_branch:
    case ScriptStep::Kind::switch_branch: return st.branch;
    case ScriptStep::Kind::rounds: return std::to_string(st.rounds);
    default: return {};
  }
}

SimNode& node_at(SimNode& root, const SimPath& p) {
  SimNode* n = find_node(root, p);
  if (n == nullptr) throw Error(ErrorCode::NoSuchChild, "no simulator at " + p.str());
  return *n;
}

void apply_step(SimNode& root, const ScriptStep& st) {
  switch (st.kind) {
    case ScriptStep::Kind::action: {
      const ActionResult r = execute(node_at(root, st.path), *st.action);
      if (!r.ok) throw Error(*r.error, r.message);
      break;
    }
    case ScriptStep::Kind::set_mode: set_mode(node_at(root, st.path), st.mode); break;
    case ScriptStep::Kind::spawn:
    case ScriptStep::Kind::remove: {
      SimPath parent = st.path;
      const std::string id = parent.ids.back();
      parent.ids.pop_back();
      if (st.kind == ScriptStep::Kind::spawn) spawn_child(node_at(root, parent), id);
      else remove_child(node_at(root, parent), id);
      break;
    }
    case ScriptStep::Kind::create_branch: create_branch(node_at(root, st.path), st.branch); break;
    case ScriptStep::Kind::switch_branch: switch_branch(node_at(root, st.path), st.branch); break;
    case ScriptStep::Kind::rounds: run_deterministic(root, st.rounds); break;
  }
}

}  // namespace

int settle(SimNode& root, int max_rounds) {
  std::string before = tree_fingerprint(root);
  int rounds = 0;
  while (rounds < max_rounds) {
    run_deterministic(root, 1);
    ++rounds;
    std::string after = tree_fingerprint(root);
    if (after == before) break;
    before = std::move(after);
  }
  return rounds;
}

RunOutcome run_scenario(const Scenario& sc) {
  RunOutcome out;
  out.report.scenario = sc.name;
  auto context = std::make_shared<NestContext>(sc.config);
  out.root = make_root(create_world(sc.world), context);
  SimNode& root = *out.root;
  const int cap = static_cast<int>(2 * std::max<std::size_t>(sc.config.max_depth, 1));

  // Each child starts from its parent's belief, so the parent has to have
  // looked around first.
  for (const auto& e : sc.tree) {
    settle(root, cap);
    SimPath parent = e.path;
    parent.ids.pop_back();
    SimNode& p = node_at(root, parent);
    spawn_child(p, e.path.ids.back());
    if (e.mode == Mode::control) set_mode(*p.child(e.path.ids.back()), Mode::control);
  }
  settle(root, cap);

  for (std::size_t i = 0; i < sc.script.size(); ++i) {
    const ScriptStep& st = sc.script[i];
    try {
      if (root.tick() > st.tick) {
        throw Error(ErrorCode::TimeMismatch,
                    fmt::format("the tree already reached tick {} while settling", root.tick()));
      }
      while (root.tick() < st.tick) run_deterministic(root, 1);
      apply_step(root, st);
      out.report.steps.push_back({i, st.tick, to_string(st.kind), st.path.str(), describe(st)});
      const bool last_of_tick = i + 1 == sc.script.size() || sc.script[i + 1].tick != st.tick;
      if (last_of_tick && st.kind != ScriptStep::Kind::rounds) settle(root, cap);
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("script[{}] (tick {}, {}): {}", i, st.tick, to_string(st.kind), e.detail()));
    }
  }
  out.report.final_tick = root.tick();

  for (const auto& a : sc.assertions) {
    AssertionResult r;
    r.name = a.name;
    r.query = a.query.text;
    r.expected = a.expected;
    try {
      r.actual = evaluate_query(root, a.query, sc);
      r.passed = r.actual == r.expected;
    } catch (const Error& e) {
      r.error = e.what();
    }
    out.report.assertions.push_back(std::move(r));
  }
  return out;
}

bool RunReport::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const AssertionResult& r) { return r.passed; });
}

nlohmann::ordered_json RunReport::to_json() const {
  nlohmann::ordered_json j;
  j["scenario"] = scenario;
  j["passed"] = passed();
  j["final_tick"] = final_tick;
  auto steps_j = nlohmann::ordered_json::array();
  for (const auto& s : steps) {
    steps_j.push_back({{"index", s.index}, {"tick", s.tick}, {"kind", s.kind}, {"path", s.path}, {"detail", s.detail}});
  }
  j["steps"] = std::move(steps_j);
  auto as = nlohmann::ordered_json::array();
  for (const auto& r : assertions) {
    nlohmann::ordered_json a;
    a["name"] = r.name;
    a["query"] = r.query;
    a["passed"] = r.passed;
    a["expected"] = r.expected;
    a["actual"] = r.actual;
    if (r.error) a["error"] = *r.error;
    as.push_back(std::move(a));
  }
  j["assertions"] = std::move(as);
  return j;
}

std::string RunReport::to_text() const {
  std::string out = fmt::format("scenario {} (final tick {})\n", scenario, final_tick);
  for (const auto& r : assertions) {
    out += fmt::format("  [{}] {}\n", r.passed ? "PASS" : "FAIL", r.name);
    if (!r.passed) {
      out += fmt::format("         query:    {}\n         expected: {}\n", r.query, r.expected.dump());
      if (r.error) out += fmt::format("         error:    {}\n", *r.error);
      else out += fmt::format("         actual:   {}\n", r.actual.dump());
    }
  }
  std::size_t passed_count = 0;
  for (const auto& r : assertions) passed_count += r.passed ? 1 : 0;
  out += fmt::format("{}/{} assertions passed\n", passed_count, assertions.size());
  return out;
}

}  // namespace beliefnest
