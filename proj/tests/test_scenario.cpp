#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "beliefnest/error.hpp"
#include "beliefnest/scenario.hpp"
#include "fixtures.hpp"

using namespace beliefnest;
using nlohmann::json;

namespace {

const std::vector<std::string> kBundled{"sally_anne_c1.json", "sally_anne_c2.json", "sally_anne_c3.json",
                                        "ice_cream_van.json"};

Error error_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an error");
  return Error(ErrorCode::SchemaError, "");
}

json small_doc() {
  return json::parse(R"js({
    "name": "small",
    "world": {
      "bounds": {"min": [0, -1, 0], "max": [6, 2, 6]},
      "cells": [{"from": [0, -1, 0], "to": [6, -1, 6], "kind": "opaque", "block": "dirt", "prior": true}],
      "containers": [{"pos": [3, 0, 3], "contents": {"apple": 2}}],
      "agents": [
        {"id": "ann", "position": [1.5, 0, 1.5]},
        {"id": "bob", "position": [5.5, 0, 5.5], "held_item": "stick"}
      ]
    },
    "tree": ["root/ann"],
    "script": [],
    "assertions": []
  })js");
}

std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "beliefnest_scenario_test";
  std::filesystem::create_directories(dir);
  return dir;
}

void write(const std::filesystem::path& p, const json& j) { std::ofstream(p) << j.dump(2); }

}  // namespace

TEST_CASE("the first condition loads with its tree") {
  const Scenario sc = fixtures::scenario("sally_anne_c1.json");
  CHECK(sc.name == "sally_anne_c1");
  CHECK(sc.world.agents.size() == 3);
  CHECK(sc.world.containers.size() == 2);
  REQUIRE(sc.tree.size() == 2);
  CHECK(sc.tree[0].path.str() == "root/observer");
  CHECK(sc.tree[1].path.str() == "root/observer/sally");
  CHECK(sc.tree[1].mode == Mode::follow);
  // The shared world's deposit comes first, then this condition's steps.
  REQUIRE(sc.script.size() == 4);
  CHECK(sc.script[0].tick == 69);
  CHECK(sc.assertions.size() == 6);
  CHECK_FALSE(sc.config.prior.cells.empty());
}

TEST_CASE("every bundled scenario passes its assertions") {
  for (const auto& name : kBundled) {
    INFO(name);
    const RunOutcome out = fixtures::run(name);
    CHECK(out.report.passed());
    CHECK_FALSE(out.report.assertions.empty());
  }
}

TEST_CASE("runs are deterministic") {
  for (const auto& name : kBundled) {
    INFO(name);
    CHECK(fixtures::run(name).report.to_json().dump() == fixtures::run(name).report.to_json().dump());
  }
}

TEST_CASE("every scripted action appears exactly once in the root log at its tick") {
  for (const auto& name : kBundled) {
    INFO(name);
    const Scenario sc = fixtures::scenario(name);
    const RunOutcome out = run_scenario(sc);
    for (const auto& st : sc.script) {
      if (st.kind != ScriptStep::Kind::action || !st.path.is_root()) continue;
      const std::string action = event_action_name(*st.action);
      int expected = 0;
      for (const auto& other : sc.script) {
        if (other.kind == ScriptStep::Kind::action && other.path.is_root() && other.tick == st.tick &&
            other.action->actor == st.action->actor && event_action_name(*other.action) == action) {
          ++expected;
        }
      }
      int found = 0;
      for (const auto& e : out.root->live.log) {
        if (e.time == st.tick && e.agent == st.action->actor && e.action == action) ++found;
      }
      CHECK(found == expected);
    }
  }
}

TEST_CASE("an empty script only builds the tree") {
  const Scenario sc = scenario_from_json(small_doc());
  const RunOutcome out = run_scenario(sc);
  CHECK(out.report.steps.empty());
  CHECK(out.report.passed());
  CHECK(out.root->live.log.empty());
  CHECK(out.root->child("ann") != nullptr);
  const WorldState start = create_world(sc.world);
  WorldState now = out.root->world();
  now.tick = 0;
  CHECK(now == start);
}

TEST_CASE("schema errors name the offending location") {
  auto schema_error = [](const json& doc) { return error_of([&] { scenario_from_json(doc); }); };

  SUBCASE("undeclared agent in the script") {
    json doc = small_doc();
    doc["script"] = json::parse(R"js([{"tick": 1, "do": "action", "action": {"kind": "say", "actor": "cid", "args": {"text": "x"}}}])js");
    const Error e = schema_error(doc);
    CHECK(e.code() == ErrorCode::SchemaError);
    CHECK(e.detail().starts_with("/script/0"));
  }
  SUBCASE("ticks going backwards") {
    json doc = small_doc();
    doc["script"] = json::parse(R"js([
      {"tick": 5, "do": "action", "action": {"kind": "say", "actor": "ann", "args": {"text": "x"}}},
      {"tick": 4, "do": "action", "action": {"kind": "say", "actor": "ann", "args": {"text": "y"}}}])js");
    CHECK(schema_error(doc).detail().starts_with("/script/1/tick"));
  }
  SUBCASE("unknown step kind") {
    json doc = small_doc();
    doc["script"] = json::parse(R"js([{"tick": 1, "do": "dance"}])js");
    CHECK(schema_error(doc).code() == ErrorCode::SchemaError);
  }
  SUBCASE("tree entry before its parent") {
    json doc = small_doc();
    doc["tree"] = json::parse(R"js(["root/ann/bob", "root/ann"])js");
    CHECK(schema_error(doc).detail().starts_with("/tree/0"));
  }
  SUBCASE("tree deeper than allowed") {
    json doc = small_doc();
    doc["config"] = {{"max_depth", 1}};
    doc["tree"] = json::parse(R"js(["root/ann", "root/ann/bob"])js");
    CHECK(schema_error(doc).detail().starts_with("/tree/1"));
  }
  SUBCASE("chat pattern without a capture group") {
    json doc = small_doc();
    doc["chat_patterns"] = json::array({"going somewhere"});
    CHECK(schema_error(doc).detail().starts_with("/chat_patterns/0"));
  }
  SUBCASE("sight check that does not hold") {
    json doc = small_doc();
    doc["checks"] = json::parse(R"js([{"viewer": [1.5, 0, 1.5], "target": [5.5, 0, 5.5], "visible": false}])js");
    CHECK(schema_error(doc).detail().starts_with("/checks/0"));
  }
  SUBCASE("missing world") {
    json doc = small_doc();
    doc.erase("world");
    CHECK(schema_error(doc).detail().starts_with("/world"));
  }
  SUBCASE("bad assertion query") {
    json doc = small_doc();
    doc["assertions"] = json::parse(R"js([{"query": "container_contents(root)", "expect": null}])js");
    CHECK(schema_error(doc).code() == ErrorCode::SchemaError);
  }
  SUBCASE("agent outside the world") {
    json doc = small_doc();
    doc["world"]["agents"][0]["position"] = json::array({9.5, 0, 1.5});
    CHECK(schema_error(doc).code() == ErrorCode::SchemaError);
  }
}

TEST_CASE("files and includes") {
  const auto dir = temp_dir();
  json base = small_doc();
  base.erase("tree");
  base["assertions"] = json::parse(R"js([{"name": "base", "query": "event_log(root, main)", "expect": []}])js");
  write(dir / "base.json", base);
  json top = json::parse(R"js({"include": "base.json", "name": "top", "tree": ["root/bob"],
                            "assertions": [{"name": "top", "query": "event_log(root, main)", "expect": []}],
                            "world": {"agents": [{"id": "cid", "position": [2.5, 0, 2.5]}]}})js");
  write(dir / "top.json", top);
  const Scenario sc = load_scenario(dir / "top.json");
  CHECK(sc.name == "top");
  CHECK(sc.world.agents.size() == 3);
  CHECK(sc.assertions.size() == 2);
  CHECK(sc.tree.size() == 1);
  CHECK(run_scenario(sc).report.passed());

  write(dir / "loop_a.json", json::parse(R"js({"include": "loop_b.json"})js"));
  write(dir / "loop_b.json", json::parse(R"js({"include": "loop_a.json"})js"));
  CHECK(error_of([&] { load_scenario(dir / "loop_a.json"); }).code() == ErrorCode::SchemaError);
  CHECK(error_of([&] { load_scenario(dir / "absent.json"); }).code() == ErrorCode::SchemaError);
  std::ofstream(dir / "broken.json") << "{ not json";
  CHECK(error_of([&] { load_scenario(dir / "broken.json"); }).code() == ErrorCode::SchemaError);
}

TEST_CASE("failing script steps carry their position") {
  json doc = small_doc();
  doc["script"] = json::parse(R"js([{"tick": 20, "do": "action", "action": {"kind": "craft", "actor": "ann", "args": {"recipe": "cake"}}}])js");
  const Error e = error_of([&] { run_scenario(scenario_from_json(doc)); });
  CHECK(e.code() == ErrorCode::NoSuchRecipe);
  CHECK(e.detail().starts_with("script[0] (tick 20, action)"));
}

TEST_CASE("scripted tree and branch operations") {
  json doc = small_doc();
  doc["script"] = json::parse(R"js([
    {"tick": 20, "do": "spawn", "path": "root/bob"},
    {"tick": 20, "do": "create_branch", "path": "root", "branch": "alt"},
    {"tick": 30, "do": "action", "action": {"kind": "move_to", "actor": "ann", "args": {"pos": [2.5, 0, 2.5]}}},
    {"tick": 40, "do": "action", "action": {"kind": "take_from_chest", "actor": "ann", "args": {"pos": [3, 0, 3], "items": {"apple": 1}}}},
    {"tick": 50, "do": "set_mode", "path": "root/ann", "mode": "control"},
    {"tick": 60, "do": "rounds", "rounds": 2},
    {"tick": 70, "do": "switch_branch", "path": "root", "branch": "alt"},
    {"tick": 70, "do": "remove", "path": "root/bob"}
  ])js");
  doc["assertions"] = json::parse(R"js([
    {"name": "alt branch has both apples", "query": "container_contents(root, alt, (3,0,3))", "expect": {"apple": 2}},
    {"name": "main branch kept the take", "query": "container_contents(root, main, (3,0,3))", "expect": {"apple": 1}},
    {"name": "ann's node saw it before going offline",
     "query": "container_contents(root/ann, main, (3,0,3))", "expect": {"apple": 1}}
  ])js");
  const RunOutcome out = run_scenario(scenario_from_json(doc));
  CHECK(out.report.steps.size() == 8);
  for (const auto& a : out.report.assertions) {
    INFO(a.name << " actual=" << a.actual.dump() << " error=" << a.error.value_or(""));
    CHECK(a.passed);
  }
  CHECK(out.root->child("bob") == nullptr);
  CHECK(out.root->timeline.active == "alt");
  CHECK(out.root->child("ann")->mode == Mode::control);
}

TEST_CASE("query parsing") {
  const Query q = parse_query("belief_visibility(root/observer/sally, main, sally, (-2,-51,-4))");
  CHECK(q.kind == Query::Kind::belief_visibility);
  CHECK(q.path.str() == "root/observer/sally");
  CHECK(q.agent == "sally");
  CHECK(q.pos == BlockPos{-2, -51, -4});
  const Query p = parse_query("planner_target(root, main, sally, chest_seeker, \"Get a diamond, please.\")");
  CHECK(p.task == "Get a diamond, please.");
  for (const char* bad : {"nonsense", "event_log(root)", "chat_memory(root, main)", "teleport(root, main)",
                          "container_contents(root, main, (1,2))", "planner_target(root, main, sally, oracle, \"x\")",
                          "event_log(nowhere, main)"}) {
    INFO(bad);
    CHECK(error_of([&] { parse_query(bad); }).code() == ErrorCode::QueryError);
  }
}

TEST_CASE("query evaluation") {
  const Scenario sc = fixtures::scenario("sally_anne_c1.json");
  const RunOutcome out = run_scenario(sc);
  const SimNode& root = *out.root;
  auto eval = [&](const std::string& q) { return evaluate_query(root, parse_query(q), sc); };
  CHECK(eval("container_contents(root/observer, main, (2,-51,-4))") == json{{"diamond", 1}});
  CHECK(eval("container_contents(root/observer, main, (0,-51,-4))").is_null());
  CHECK(eval("container_contents(root/observer/sally, main)") == json{{"(-2, -51, -4)", {{"diamond", 1}}}});
  CHECK(eval("belief_visibility(root, main, observer, (2,-51,-4))") == json{{"seen_before", true}, {"visible_now", true}});
  CHECK(eval("belief_visibility(root, main, sally, (100,0,0))").is_null());
  CHECK(eval("chat_memory(root, main, sally)") == json::array());
  CHECK(eval("planner_target(root, main, sally, chest_seeker, \"Get a diamond\")") == json::array({2, -51, -4}));
  CHECK(eval("event_log(root/observer/sally, main)").size() == 2);
  CHECK(error_of([&] { eval("event_log(root/nobody, main)"); }).code() == ErrorCode::QueryError);

  const Scenario van = fixtures::scenario("ice_cream_van.json");
  const RunOutcome van_out = run_scenario(van);
  CHECK(evaluate_query(*van_out.root, parse_query("chat_memory(root/observer/john/mary, main, mary)"), van) ==
        json::array({"seller: I will stay at A today."}));
  CHECK(evaluate_query(*van_out.root,
                       parse_query("planner_target(root/observer/mary, main, mary, announcement_follower, \"Go to the seller\")"),
                       van) == "B");
}

TEST_CASE("report formats") {
  const RunOutcome out = fixtures::run("sally_anne_c1.json");
  const auto j = out.report.to_json();
  CHECK(j["scenario"] == "sally_anne_c1");
  CHECK(j["passed"] == true);
  CHECK(j["final_tick"].is_number_integer());
  REQUIRE(j["assertions"].size() == 6);
  for (const auto& a : j["assertions"]) {
    CHECK(a["passed"].is_boolean());
    CHECK(a.contains("expected"));
    CHECK(a.contains("actual"));
  }
  CHECK(j["steps"].size() == 4);
  const std::string text = out.report.to_text();
  CHECK(text.find("6/6 assertions passed") != std::string::npos);
  CHECK(text.find("[PASS] sally is predicted to open the left chest") != std::string::npos);
}

TEST_CASE("a failing assertion is reported, not thrown") {
  Scenario sc = fixtures::scenario("sally_anne_c1.json");
  sc.assertions[0].expected = json::object();
  sc.assertions[1].query = parse_query("event_log(root/ghost, main)");
  const RunOutcome out = run_scenario(sc);
  CHECK_FALSE(out.report.passed());
  CHECK_FALSE(out.report.assertions[0].passed);
  CHECK(out.report.assertions[1].error);
  CHECK(out.report.to_text().find("[FAIL]") != std::string::npos);
}
