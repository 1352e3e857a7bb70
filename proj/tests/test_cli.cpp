#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "beliefnest_cli_test";
  fs::create_directories(dir);
  return dir;
}

Result cli(const std::vector<std::string>& args) {
  const fs::path err_file = scratch() / "stderr.txt";
  std::string cmd = quote(BELIEFNEST_CLI);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>" + quote(err_file.string());
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = fixtures::read_text(err_file.string());
  return r;
}

std::string c1() { return fixtures::scenario_file("sally_anne_c1.json"); }

}  // namespace

TEST_CASE("run reports and exit codes") {
  const Result ok = cli({"run", c1()});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("6/6 assertions passed") != std::string::npos);

  const Result missing = cli({"run", (scratch() / "nope.json").string()});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("error:") != std::string::npos);

  CHECK(cli({}).code == 2);
  CHECK(cli({"run"}).code == 2);
  CHECK(cli({"fly", c1()}).code == 2);
}

TEST_CASE("the JSON report follows its schema") {
  const Result r = cli({"run", c1(), "--json"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  REQUIRE(j.is_object());
  CHECK(j.at("scenario") == "sally_anne_c1");
  CHECK(j.at("passed") == true);
  CHECK(j.at("final_tick").is_number_integer());
  for (const auto& s : j.at("steps")) {
    CHECK(s.at("index").is_number_integer());
    CHECK(s.at("tick").is_number_integer());
    CHECK(s.at("kind").is_string());
    CHECK(s.at("path").is_string());
    CHECK(s.at("detail").is_string());
  }
  REQUIRE(j.at("assertions").size() == 6);
  for (const auto& a : j.at("assertions")) {
    CHECK(a.at("name").is_string());
    CHECK(a.at("query").is_string());
    CHECK(a.at("passed") == true);
    CHECK(a.contains("expected"));
    CHECK(a.contains("actual"));
    CHECK_FALSE(a.contains("error"));
  }
}

TEST_CASE("a failing assertion exits with 1") {
  json doc = json::parse(fixtures::read_text(c1()));
  doc["include"] = fixtures::scenario_file("sally_anne_world.json");
  doc["assertions"][0]["expect"] = json::object();
  const fs::path file = scratch() / "wrong_expectation.json";
  std::ofstream(file) << doc.dump();
  const Result r = cli({"run", file.string(), "--json"});
  CHECK(r.code == 1);
  const json j = json::parse(r.out);
  CHECK(j["passed"] == false);
  CHECK(j["assertions"][0]["passed"] == false);
  CHECK(j["assertions"][1]["passed"] == true);
}

TEST_CASE("prompt rendering") {
  const std::string tmpl = fixtures::template_file("chest_task_prompt.txt");
  const Result r = cli({"prompt", c1(), "--sim", "root/observer/sally:main@sally", "--template", tmpl, "--task",
                        "Get a diamond from a chest."});
  CHECK(r.code == 0);
  CHECK(r.out == fixtures::read_text(fixtures::golden_file("sally_anne_c1_prompt.txt")));
  CHECK(r.err.empty());

  const Result no_task = cli({"prompt", c1(), "--sim", "root/observer/sally:main@sally", "--template", tmpl});
  CHECK(no_task.code == 0);
  CHECK(no_task.err.find("warning") != std::string::npos);
  CHECK(no_task.out.ends_with("Task: \n"));

  const fs::path bad = scratch() / "bad_template.txt";
  std::ofstream(bad) << "ab {{ branch | nosuchfilter }}";
  const Result unknown = cli({"prompt", c1(), "--sim", "root/observer/sally", "--template", bad.string()});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("offset 15") != std::string::npos);

  const Result nowhere = cli({"prompt", c1(), "--sim", "root/ghost:main@ghost", "--template", tmpl});
  CHECK(nowhere.code == 2);
}

TEST_CASE("queries") {
  const Result contents = cli({"query", c1(), "container_contents(root/observer, main, (2,-51,-4))"});
  CHECK(contents.code == 0);
  CHECK(contents.out == "{\"diamond\":1}\n");

  const Result log = cli({"query", c1(), "event_log(root, main)"});
  CHECK(log.code == 0);
  CHECK(log.out.find("69;depositItemIntoChest;sally;chest:(-2, -51, -4) & items:{'diamond': 1}") != std::string::npos);

  CHECK(cli({"query", c1(), "event_log(root/nobody, main)"}).code == 3);
  CHECK(cli({"query", c1(), "event_log(root"}).code == 2);
}

TEST_CASE("dump and trace") {
  const Result all = cli({"dump", c1()});
  REQUIRE(all.code == 0);
  const json nodes = json::parse(all.out);
  REQUIRE(nodes.size() == 3);
  CHECK(nodes[0]["path"] == "root");
  CHECK(nodes[2]["path"] == "root/observer/sally");
  CHECK(nodes[2]["beliefs"].contains("sally"));

  const Result one = cli({"dump", c1(), "--sim", "root/observer:main"});
  REQUIRE(one.code == 0);
  CHECK(json::parse(one.out).size() == 1);
  CHECK(cli({"dump", c1(), "--sim", "root/ghost"}).code == 2);

  const fs::path trace = scratch() / "trace";
  fs::remove_all(trace);
  REQUIRE(cli({"run", c1(), "--trace", trace.string()}).code == 0);
  CHECK(fs::exists(trace / "report.json"));
  CHECK(fs::exists(trace / "root.observer.sally.beliefs.json"));
  const std::string events = fixtures::read_text((trace / "root.events.csv").string());
  CHECK(events.starts_with("time;action;agent_name;description\n69;"));
}

TEST_CASE("concurrent mode and depth override") {
  const Result r = cli({"run", fixtures::scenario_file("ice_cream_van.json"), "--concurrent"});
  CHECK(r.code == 0);
  CHECK(r.err.find("invariants hold") != std::string::npos);
  // The van's tree is three levels deep.
  CHECK(cli({"--max-depth", "2", "run", fixtures::scenario_file("ice_cream_van.json")}).code == 2);
}

TEST_CASE("repeated runs print identical bytes") {
  for (const char* name : {"sally_anne_c1.json", "sally_anne_c3.json", "ice_cream_van.json"}) {
    INFO(name);
    const std::string file = fixtures::scenario_file(name);
    CHECK(cli({"run", file, "--json"}).out == cli({"run", file, "--json"}).out);
  }
}
