#pragma once

#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "beliefnest/belief.hpp"
#include "beliefnest/perception.hpp"
#include "beliefnest/timeline.hpp"
#include "beliefnest/world.hpp"

namespace beliefnest {

/// Sequence of agent ids from the real-world simulator down to a belief
/// simulator. Text form: "root" or "root/<id>/<id>...".
struct SimPath {
  std::vector<std::string> ids;

  static SimPath parse(std::string_view text);
  std::string str() const;
  SimPath child(const std::string& id) const;
  std::size_t depth() const { return ids.size(); }
  bool is_root() const { return ids.empty(); }

  auto operator<=>(const SimPath&) const = default;
};

enum class Mode { control, follow };

std::string to_string(Mode m);
Mode mode_from_string(std::string_view text);

struct Recipe {
  Items inputs;
  Items outputs;
};

struct NestConfig {
  PerceptionConfig perception;
  PriorKnowledge prior;
  std::vector<Bounds> occludable_interior;
  std::size_t max_depth = 4;
  bool allow_self_nesting = false;
  double interaction_range = 3.0;
  std::map<std::string, Recipe> recipes;
};

struct DeliveryRecord {
  std::string path;
  Tick snapshot_tick = 0;
};

/// Configuration and audit trail shared by every node of one tree.
class NestContext {
 public:
  explicit NestContext(NestConfig config) : config_(std::move(config)) {}

  const NestConfig& config() const { return config_; }

  void record_delivery(DeliveryRecord r) const;
  std::vector<DeliveryRecord> deliveries() const;

 private:
  NestConfig config_;
  mutable std::mutex mutex_;
  mutable std::vector<DeliveryRecord> deliveries_;
};

/// Full-state belief propagation from a parent to the child simulator of
/// one agent. Events and chats the agent newly perceived ride along so the
/// child's agents can witness and hear them in turn.
struct BeliefMessage {
  SimPath target;
  StateSnapshot snapshot;
  std::vector<EventRecord> events;
  std::vector<ChatMessage> chats;
};

/// FIFO of belief messages; safe to push from the parent's execution
/// context while the child pops from its own.
class Inbox {
 public:
  void push(BeliefMessage m);
  std::optional<BeliefMessage> try_pop();
  // Blocks until a message is available or the inbox is closed. Returns
  // false when closed and empty.
  bool wait_ready();
  void clear();
  void close();
  void reopen();
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<BeliefMessage> queue_;
  bool closed_ = false;
};

struct SimNode {
  SimPath path;
  Mode mode = Mode::follow;
  std::optional<Mode> requested_mode;
  bool resync_beliefs = false;
  Situation live;
  Timeline timeline;
  std::map<std::string, std::unique_ptr<SimNode>> children;
  Inbox inbox;
  std::vector<EventRecord> pending_events;
  std::vector<ChatMessage> pending_chats;
  std::shared_ptr<const NestContext> context;

  WorldState& world() { return live.world; }
  const WorldState& world() const { return live.world; }
  std::map<std::string, BeliefState>& beliefs() { return live.beliefs; }
  const std::map<std::string, BeliefState>& beliefs() const { return live.beliefs; }
  Tick tick() const { return live.world.tick; }
  const NestConfig& config() const { return context->config(); }
  SimNode* child(const std::string& id) const;
};

/// Real-world simulator in control mode, one belief per agent.
std::unique_ptr<SimNode> make_root(WorldState world, std::shared_ptr<NestContext> context);

SimPath spawn_child(SimNode& node, const std::string& agent);
void remove_child(SimNode& node, const std::string& agent);
void set_mode(SimNode& node, Mode m);

/// One iteration of the asynchronous update loop on a single node.
void step(SimNode& node);

/// `rounds` rounds; each steps every node once in breadth-first order.
void run_deterministic(SimNode& root, int rounds);

/// Every node loops on its own thread: control-mode nodes take
/// `control_steps` steps, follow-mode nodes block on their inbox until
/// their parent finishes and the inbox drains.
void run_concurrent(SimNode& root, int control_steps);

SimNode* find_node(SimNode& root, const SimPath& path);
const SimNode* find_node(const SimNode& root, const SimPath& path);
std::vector<SimNode*> nodes_breadth_first(SimNode& root);
std::vector<const SimNode*> nodes_breadth_first(const SimNode& root);

MaterializeOptions materialize_options(const SimNode& node);

/// Tick-insensitive fingerprint of a node's world and beliefs; two equal
/// fingerprints mean a step changed nothing but the clock.
std::string content_fingerprint(const SimNode& node);

}  // namespace beliefnest
