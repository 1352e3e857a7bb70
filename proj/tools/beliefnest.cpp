// Command-line driver: run scenarios, render prompts, evaluate queries and
// dump simulator state.
//
// Exit codes: 0 success, 1 assertion failure, 2 usage or schema error,
// 3 runtime error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "beliefnest/error.hpp"
#include "beliefnest/planner.hpp"
#include "beliefnest/promptgen.hpp"
#include "beliefnest/scenario.hpp"

namespace fs = std::filesystem;
using namespace beliefnest;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string scenario;
  bool json = false;
  std::string trace_dir;
  bool concurrent = false;
  int concurrent_steps = 5;
  std::optional<int> max_depth;
  std::string planner_url;
  std::string sim;
  std::string template_file;
  std::optional<std::string> task;
  std::vector<std::string> placeholders;
  std::string query;
};

// Errors raised while reading inputs map to the usage exit code.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Scenario load(const Options& opt) {
  try {
    nlohmann::json doc = read_scenario_document(opt.scenario);
    if (opt.max_depth) doc["config"]["max_depth"] = *opt.max_depth;
    return scenario_from_json(doc);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string file_stem(const SimPath& p) {
  std::string out = p.str();
  std::replace(out.begin(), out.end(), '/', '.');
  return out;
}

void write_trace(const fs::path& dir, const SimNode& root, const RunReport& report) {
  fs::create_directories(dir);
  std::ofstream(dir / "report.json") << report.to_json().dump(2) << '\n';
  for (const SimNode* n : nodes_breadth_first(root)) {
    std::ofstream events(dir / (file_stem(n->path) + ".events.csv"));
    events << kEventLogHeader << '\n';
    for (const auto& e : n->live.log) events << e.row() << '\n';
    nlohmann::ordered_json beliefs = nlohmann::ordered_json::object();
    for (const auto& [id, b] : n->beliefs()) beliefs[id] = to_json(b);
    std::ofstream(dir / (file_stem(n->path) + ".beliefs.json")) << beliefs.dump(2) << '\n';
  }
}

// Concurrent execution on top of the finished deterministic run; only
// structural invariants are checked since thread timing is not reproducible.
void check_concurrent(SimNode& root, int steps) {
  run_concurrent(root, steps);
  std::size_t nodes = 0;
  for (SimNode* n : nodes_breadth_first(root)) {
    check_invariants(n->world());
    ++nodes;
  }
  std::cerr << fmt::format("concurrent: {} nodes x {} steps, invariants hold\n", nodes, steps);
}

int cmd_run(const Options& opt) {
  const Scenario sc = load(opt);
  RunOutcome out = run_scenario(sc);
  if (!opt.trace_dir.empty()) write_trace(opt.trace_dir, *out.root, out.report);
  if (opt.json) std::cout << out.report.to_json().dump(2) << '\n';
  else std::cout << out.report.to_text();
  if (opt.concurrent) check_concurrent(*out.root, opt.concurrent_steps);
  return out.report.passed() ? kExitPass : kExitFail;
}

int cmd_prompt(const Options& opt) {
  const Scenario sc = load(opt);
  const FilterRegistry registry = FilterRegistry::with_builtins(sc.tracked_block_types);
  Template tmpl;
  BranchRef ref;
  PromptContext ctx;
  try {
    tmpl = parse_template(read_file(opt.template_file), registry);
    ref = BranchRef::parse(opt.sim);
    ref.perspective_owner();
    for (const auto& p : opt.placeholders) {
      const auto eq = p.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects NAME=value, got '" + p + "'");
      ctx.placeholders[p.substr(0, eq)] = p.substr(eq + 1);
    }
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (!opt.task) std::cerr << "warning: --task not given; {{ task }} renders empty\n";
  ctx.bindings["branch"] = ref.str();
  ctx.bindings["task"] = opt.task.value_or("");

  RunOutcome out = run_scenario(sc);
  std::string text;
  try {
    text = render(tmpl, ctx, *out.root, registry);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnresolvedBranch) throw UsageError(e.what());
    throw;
  }
  std::cout << text;
  if (!opt.planner_url.empty()) {
    PlanRequest req{ref.path, ref.branch, ref.perspective_owner(), ctx.bindings["task"], text};
    const Plan plan = external_plan(req, opt.planner_url);
    nlohmann::ordered_json j;
    j["actions"] = nlohmann::ordered_json::array();
    for (const auto& a : plan.actions) j["actions"].push_back(nlohmann::ordered_json::parse(to_json(a).dump()));
    j["rationale"] = plan.rationale;
    std::cout << "\n---\n" << j.dump(2) << '\n';
  }
  return kExitPass;
}

int cmd_query(const Options& opt) {
  Query q;
  try {
    q = parse_query(opt.query);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const Scenario sc = load(opt);
  RunOutcome out = run_scenario(sc);
  std::cout << evaluate_query(*out.root, q, sc).dump() << '\n';
  return kExitPass;
}

nlohmann::ordered_json dump_node(const SimNode& n, const std::string& branch) {
  const Situation& s = branch_situation(n, branch);
  nlohmann::ordered_json j;
  j["path"] = n.path.str();
  j["branch"] = branch;
  j["mode"] = to_string(n.mode);
  j["tick"] = s.tick();
  j["world"] = nlohmann::ordered_json::parse(to_json(s.world).dump());
  j["beliefs"] = nlohmann::ordered_json::object();
  for (const auto& [id, b] : s.beliefs) j["beliefs"][id] = to_json(b);
  j["log"] = nlohmann::ordered_json::array();
  for (const auto& e : s.log) j["log"].push_back(e.row());
  return j;
}

int cmd_dump(const Options& opt) {
  const Scenario sc = load(opt);
  RunOutcome out = run_scenario(sc);
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  if (opt.sim.empty()) {
    for (const SimNode* n : nodes_breadth_first(static_cast<const SimNode&>(*out.root))) {
      j.push_back(dump_node(*n, n->timeline.active));
    }
  } else {
    BranchRef ref;
    try {
      ref = BranchRef::parse(opt.sim);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    const SimNode* n = find_node(static_cast<const SimNode&>(*out.root), ref.path);
    if (n == nullptr) throw UsageError("no simulator at " + ref.path.str());
    j.push_back(dump_node(*n, ref.branch));
  }
  std::cout << j.dump(2) << '\n';
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nested belief simulators: scenarios, prompts, queries"};
  app.require_subcommand(1);
  Options opt;
  bool seedless = true;
  app.add_option("--planner-url", opt.planner_url, "External planner endpoint (http://host:port/path)");
  app.add_option("--max-depth", opt.max_depth, "Override the scenario's nesting depth limit")->check(CLI::Range(0, 64));
  app.add_flag("--seedless", seedless, "Runs are always deterministic; accepted for compatibility");
  app.add_flag("--json", opt.json, "Machine-readable output");

  auto* run = app.add_subcommand("run", "Replay a scenario and check its assertions");
  run->add_option("scenario", opt.scenario, "Scenario file")->required();
  run->add_flag("--json", opt.json, "Print the report as JSON");
  run->add_option("--trace", opt.trace_dir, "Write per-node event logs and belief dumps here");
  run->add_flag("--concurrent", opt.concurrent, "Afterwards run every node on its own thread and check invariants");
  run->add_option("--concurrent-steps", opt.concurrent_steps, "Root steps for --concurrent")->check(CLI::Range(1, 1000));

  auto* prompt = app.add_subcommand("prompt", "Render a prompt template against a simulator branch");
  prompt->add_option("scenario", opt.scenario, "Scenario file")->required();
  prompt->add_option("--sim", opt.sim, "Branch reference, e.g. root/observer/sally:main@sally")->required();
  prompt->add_option("--template", opt.template_file, "Template file")->required();
  prompt->add_option("--task", opt.task, "Text bound to {{ task }}");
  prompt->add_option("--set", opt.placeholders, "Placeholder value NAME=text (repeatable)");

  auto* query = app.add_subcommand("query", "Evaluate one query after the scenario ran");
  query->add_option("scenario", opt.scenario, "Scenario file")->required();
  query->add_option("query", opt.query, "e.g. \"event_log(root, main)\"")->required();

  auto* dump = app.add_subcommand("dump", "Print world, beliefs and log of simulators as JSON");
  dump->add_option("scenario", opt.scenario, "Scenario file")->required();
  dump->add_option("--sim", opt.sim, "Only this simulator branch (path:branch)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*run) return cmd_run(opt);
    if (*prompt) return cmd_prompt(opt);
    if (*query) return cmd_query(opt);
    if (*dump) return cmd_dump(opt);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
