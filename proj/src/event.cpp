#include "beliefnest/event.hpp"

#include <fmt/format.h>

namespace beliefnest {

std::string EventRecord::row() const {
  return fmt::format("{};{};{};{}", time, action, agent, description);
}

nlohmann::json to_json(const EventRecord& e) {
  nlohmann::json j{{"time", e.time},
                   {"action", e.action},
                   {"agent", e.agent},
                   {"description", e.description}};
  return j;
}

nlohmann::json to_json(const ChatMessage& c) {
  return {{"tick", c.tick}, {"speaker", c.speaker}, {"text", c.text}};
}

}  // namespace beliefnest
