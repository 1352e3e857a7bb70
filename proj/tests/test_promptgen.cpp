#include <doctest.h>

#include "beliefnest/error.hpp"
#include "beliefnest/promptgen.hpp"
#include "fixtures.hpp"

using namespace beliefnest;

namespace {

const FilterRegistry& registry() {
  static const FilterRegistry r = FilterRegistry::with_builtins();
  return r;
}

const RunOutcome& condition_one() {
  static const RunOutcome out = fixtures::run("sally_anne_c1.json");
  return out;
}

std::string sally_filter(const std::string& name, const std::vector<std::string>& args = {}) {
  return filter_output(name, *condition_one().root, BranchRef::parse("root/observer/sally:main@sally"), registry(),
                       args);
}

Error error_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an error");
  return Error(ErrorCode::SchemaError, "");
}

}  // namespace

TEST_CASE("branch references") {
  const BranchRef full = BranchRef::parse("root/observer/sally:main@sally");
  CHECK(full.path.str() == "root/observer/sally");
  CHECK(full.branch == "main");
  CHECK(full.owner == "sally");
  CHECK(full.str() == "root/observer/sally:main@sally");

  const BranchRef bare = BranchRef::parse("root/observer");
  CHECK(bare.branch == "main");
  CHECK_FALSE(bare.owner);
  CHECK(bare.perspective_owner() == "observer");
  CHECK(BranchRef::parse("root:alt@anne").perspective_owner() == "anne");
  CHECK(error_of([] { BranchRef::parse("root").perspective_owner(); }).code() == ErrorCode::UnresolvedBranch);
  CHECK(error_of([] { BranchRef::parse("observer:main"); }).code() == ErrorCode::InvalidPath);
}

TEST_CASE("template grammar") {
  SUBCASE("pure literal") {
    const Template t = parse_template("just text\nover lines", registry());
    REQUIRE(t.segments.size() == 1);
    CHECK(t.segments[0].type == TemplateSegment::Type::literal);
    CHECK(t.segments[0].raw == "just text\nover lines");
  }
  SUBCASE("filter with a list argument") {
    const Template t = parse_template(R"({{ branch | blocks(["chest"]) }})", registry());
    REQUIRE(t.segments.size() == 1);
    const auto& s = t.segments[0];
    CHECK(s.type == TemplateSegment::Type::expression);
    CHECK(s.name == "branch");
    CHECK(s.filter == "blocks");
    CHECK(s.args == std::vector<std::string>{"chest"});
  }
  SUBCASE("whitespace and several arguments") {
    const Template t = parse_template("{{branch|blocks( [ 'chest' , \"lever\" ] )}}", registry());
    REQUIRE(t.segments.size() == 1);
    CHECK(t.segments[0].args == std::vector<std::string>{"chest", "lever"});
  }
  SUBCASE("placeholders and stray dollars") {
    const Template t = parse_template("a $$LAST_CODE$$ b $$ c $$lower$$", registry());
    REQUIRE(t.segments.size() == 3);
    CHECK(t.segments[1].type == TemplateSegment::Type::placeholder);
    CHECK(t.segments[1].name == "LAST_CODE");
    CHECK(t.segments[1].offset == 2);
    CHECK(t.segments[2].raw == " b $$ c $$lower$$");
  }
  SUBCASE("unknown filter is reported at its offset") {
    const Error e = error_of([] { parse_template("ab {{ branch | nosuchfilter }}", registry()); });
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(e.detail().find("offset 15") != std::string::npos);
  }
  SUBCASE("malformed expressions") {
    for (const char* bad : {"{{ branch ", "{{ | chests }}", "{{ branch | blocks([chest]) }}",
                            "{{ branch | blocks(\"chest\") }}", "{{ branch | blocks(['chest') }}", "{{ a b }}"}) {
      INFO(bad);
      CHECK(error_of([&] { parse_template(bad, registry()); }).code() == ErrorCode::ParseError);
    }
  }
}

TEST_CASE("templates serialize back to their source") {
  for (const std::string text :
       {std::string("plain"), std::string("{{ x }}{{y|thought}}$$A$$"), std::string("$$ {{ branch | blocks([ 'a' ]) }} $"),
        fixtures::read_text(fixtures::template_file("chest_task_prompt.txt"))}) {
    const Template t = parse_template(text, registry());
    CHECK(t.serialize() == text);
    CHECK(t.source == text);
  }
}

TEST_CASE("rendering variables and placeholders") {
  const SimNode& root = *condition_one().root;
  PromptContext ctx;
  ctx.bindings["task"] = "Get a diamond from a chest.";
  CHECK(render(parse_template("Task: {{ task }}", registry()), ctx, root, registry()) ==
        "Task: Get a diamond from a chest.");
  CHECK(render(parse_template("$$LAST_CODE$$|$$LAST_ERROR$$", registry()), ctx, root, registry()) ==
        "No code was executed|No error");
  ctx.placeholders["LAST_CODE"] = "bot.chat('hi')";
  CHECK(render(parse_template("$$LAST_CODE$$", registry()), ctx, root, registry()) == "bot.chat('hi')");
  CHECK(error_of([&] { render(parse_template("$$OTHER$$", registry()), ctx, root, registry()); }).code() ==
        ErrorCode::UnboundVariable);
  CHECK(error_of([&] { render(parse_template("{{ missing }}", registry()), ctx, root, registry()); }).code() ==
        ErrorCode::UnboundVariable);
  ctx.bindings["branch"] = "root/nowhere:main@sally";
  CHECK(error_of([&] { render(parse_template("{{ branch | thought }}", registry()), ctx, root, registry()); }).code() ==
        ErrorCode::UnresolvedBranch);
  ctx.bindings["branch"] = "root/observer/sally:other@sally";
  CHECK(error_of([&] { render(parse_template("{{ branch | thought }}", registry()), ctx, root, registry()); }).code() ==
        ErrorCode::UnresolvedBranch);
}

TEST_CASE("filters on the simulated sally after the first condition") {
  CHECK(sally_filter("chests") == "(-2, -51, -4): {'diamond': 1}\n(2, -51, -4): {}");
  CHECK(sally_filter("thought") == "No thought");
  CHECK(sally_filter("chat_log") == "No chats");
  CHECK(sally_filter("position") == "[-4.551, -51, -5.871]");
  CHECK(sally_filter("inventory") == "No data");
  const auto players = nlohmann::json::parse(sally_filter("other_players"));
  CHECK(players == nlohmann::json::parse(
                       R"({"anne":{"position":"Cannot be seen","helditem":"iron_chestplate","inventory":"No data"}})"));
  const std::string blocks = sally_filter("blocks", {"lever"});
  CHECK(blocks.starts_with("lever visibilities: Not observed\nchest visibilities:"));
  const std::string chest_only = sally_filter("blocks", {"chest"});
  CHECK(chest_only.ends_with("lever visibilities: Not observed"));
  CHECK(chest_only.find("\"seen_before\": true") != std::string::npos);
  CHECK(sally_filter("events_and_visibilities").starts_with(
      "time;action;agent_name;description\n69;depositItemIntoChest;sally;chest:(-2, -51, -4) & items:{'diamond': 1}"));
}

TEST_CASE("filters with empty state") {
  Scenario sc = fixtures::scenario("ice_cream_van.json");
  const RunOutcome out = run_scenario(sc);
  const SimNode& root = *out.root;
  const auto ref = BranchRef::parse("root/observer/john/mary:main@mary");
  CHECK(filter_output("chests", root, ref, registry()) == "No chests");
  const std::string chats = filter_output("chat_log", root, ref, registry());
  CHECK(chats == "10; seller: I will stay at A today.");
  const std::string real = filter_output("chat_log", root, BranchRef::parse("root:main@mary"), registry());
  CHECK(real.find("I am going to B.") != std::string::npos);
}

TEST_CASE("thought and self inventory") {
  RunOutcome out = fixtures::run("sally_anne_c1.json");
  SimNode& root = *out.root;
  root.beliefs().at("anne").thought = "moved it";
  const auto ref = BranchRef::parse("root:main@anne");
  CHECK(filter_output("thought", root, ref, registry()) == "moved it");
  CHECK(filter_output("inventory", root, ref, registry()) == "No data");
  root.beliefs().at("anne").self.inventory = {{"diamond", 2}};
  CHECK(filter_output("inventory", root, ref, registry()) == "{'diamond': 2}");
  CHECK(error_of([&] { filter_output("nope", root, ref, registry()); }).code() == ErrorCode::UnknownFilter);
  CHECK(error_of([&] { filter_output("thought", root, BranchRef::parse("root:main@ghost"), registry()); }).code() ==
        ErrorCode::UnresolvedBranch);
}

TEST_CASE("custom filters") {
  FilterRegistry r = FilterRegistry::with_builtins();
  CHECK(error_of([&] { r.add("chests", [](const FilterInput&, const std::vector<std::string>&) { return ""; }); })
            .code() == ErrorCode::DuplicateFilter);
  r.add("tick", [](const FilterInput& in, const std::vector<std::string>&) { return std::to_string(in.situation.tick()); });
  CHECK(r.contains("tick"));
  const SimNode& root = *condition_one().root;
  PromptContext ctx;
  ctx.bindings["branch"] = "root:main@anne";
  CHECK(render(parse_template("t={{ branch | tick }}", r), ctx, root, r) == "t=" + std::to_string(root.tick()));
  CHECK(error_of([] { registry().get("tick"); }).code() == ErrorCode::UnknownFilter);
}

TEST_CASE("the chest template renders the golden prompt") {
  const SimNode& root = *condition_one().root;
  const Template t = parse_template(fixtures::read_text(fixtures::template_file("chest_task_prompt.txt")), registry());
  PromptContext ctx;
  ctx.bindings["branch"] = "root/observer/sally:main@sally";
  ctx.bindings["task"] = "Get a diamond from a chest.";
  CHECK(render(t, ctx, root, registry()) == fixtures::read_text(fixtures::golden_file("sally_anne_c1_prompt.txt")));
}
