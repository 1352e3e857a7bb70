#pragma once

#include <optional>
#include <string>

#include "beliefnest/world.hpp"

namespace beliefnest {

/// One row of the action log: "time;action;agent;description".
///
/// `description` is the rendered `key:value` text; `target` and `items`
/// carry the same information in structured form so that witnesses can
/// apply container deltas without reparsing text.
struct EventRecord {
  Tick time = 0;
  std::string action;
  std::string agent;
  std::string description;
  std::optional<BlockPos> target;
  Items items;
  int ordinal = 0;  // position among the logging node's events at `time`

  std::string row() const;
  bool operator==(const EventRecord&) const = default;
};

struct ChatMessage {
  Tick tick = 0;
  std::string speaker;
  std::string text;
  int ordinal = 0;

  bool operator==(const ChatMessage&) const = default;
};

inline constexpr const char* kEventLogHeader = "time;action;agent_name;description";

nlohmann::json to_json(const EventRecord& e);
nlohmann::json to_json(const ChatMessage& c);

}  // namespace beliefnest
