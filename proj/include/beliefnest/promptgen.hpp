#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "beliefnest/belief.hpp"
#include "beliefnest/nest.hpp"
#include "beliefnest/timeline.hpp"

namespace beliefnest {

/// `<sim-path>:<branch-id>@<agent>`; branch defaults to main and the
/// perspective owner to the last path element.
struct BranchRef {
  SimPath path;
  std::string branch = kMainBranch;
  std::optional<std::string> owner;

  static BranchRef parse(std::string_view text);
  std::string str() const;
  // Throws UnresolvedBranch at the root when no owner was given.
  std::string perspective_owner() const;
};

struct TemplateSegment {
  enum class Type { literal, placeholder, expression };

  Type type = Type::literal;
  std::string raw;       // exact source text of this segment
  std::string name;      // placeholder NAME or expression variable
  std::optional<std::string> filter;
  std::vector<std::string> args;
  std::size_t offset = 0;
};

struct Template {
  std::string source;
  std::vector<TemplateSegment> segments;

  // Concatenation of the segments' source text.
  std::string serialize() const;
};

/// What a filter sees: one node's situation on one branch, from one
/// agent's perspective.
struct FilterInput {
  const SimNode& node;
  const Situation& situation;
  const std::string& owner;
  const BeliefState& belief;
};

using Filter = std::function<std::string(const FilterInput&, const std::vector<std::string>& args)>;

class FilterRegistry {
 public:
  // Registry preloaded with thought, chat_log, position, chests, inventory,
  // other_players, blocks and events_and_visibilities. `tracked_block_types`
  // are always reported by `blocks` after the requested ones.
  static FilterRegistry with_builtins(std::vector<std::string> tracked_block_types = {"chest", "lever"});

  void add(const std::string& name, Filter f);  // DuplicateFilter if taken
  bool contains(const std::string& name) const { return filters_.contains(name); }
  const Filter& get(const std::string& name) const;

 private:
  std::map<std::string, Filter> filters_;
};

Template parse_template(std::string_view text, const FilterRegistry& registry);

inline constexpr const char* kDefaultLastCode = "No code was executed";
inline constexpr const char* kDefaultLastError = "No error";

struct PromptContext {
  std::map<std::string, std::string> bindings;      // e.g. branch, task
  std::map<std::string, std::string> placeholders;  // $$NAME$$ values
};

std::string render(const Template& t, const PromptContext& ctx, const SimNode& root,
                   const FilterRegistry& registry);

/// Resolves a reference against a tree and runs one filter.
std::string filter_output(const std::string& name, const SimNode& root, const BranchRef& ref,
                          const FilterRegistry& registry, const std::vector<std::string>& args = {});

}  // namespace beliefnest
