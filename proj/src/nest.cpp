#include "beliefnest/nest.hpp"

#include <algorithm>
#include <deque>
#include <thread>

#include <fmt/compile.h>
#include <fmt/format.h>

#include "beliefnest/error.hpp"

namespace beliefnest {

SimPath SimPath::parse(std::string_view text) {
  SimPath path;
  if (text == "root") return path;
  if (!text.starts_with("root/")) {
    throw Error(ErrorCode::InvalidPath, "simulator path must start with 'root': '" + std::string(text) + "'");
  }
  std::string_view rest = text.substr(5);
  while (true) {
    const auto slash = rest.find('/');
    std::string id(rest.substr(0, slash));
    if (!is_valid_agent_id(id)) {
      throw Error(ErrorCode::InvalidPath, "bad agent id in path '" + std::string(text) + "'");
    }
    path.ids.push_back(std::move(id));
    if (slash == std::string_view::npos) break;
    rest = rest.substr(slash + 1);
  }
  return path;
}

std::string SimPath::str() const {
  std::string out = "root";
  for (const auto& id : ids) out += "/" + id;
  return out;
}

SimPath SimPath::child(const std::string& id) const {
  SimPath p = *this;
  p.ids.push_back(id);
  return p;
}

std::string to_string(Mode m) { return m == Mode::control ? "control" : "follow"; }

Mode mode_from_string(std::string_view text) {
  if (text == "control") return Mode::control;
  if (text == "follow") return Mode::follow;
  throw Error(ErrorCode::SchemaError, "mode must be 'control' or 'follow', got '" + std::string(text) + "'");
}

void NestContext::record_delivery(DeliveryRecord r) const {
  std::lock_guard lock(mutex_);
  deliveries_.push_back(std::move(r));
}

std::vector<DeliveryRecord> NestContext::deliveries() const {
  std::lock_guard lock(mutex_);
  return deliveries_;
}

// ---------------------------------------------------------------------------
// Inbox

void Inbox::push(BeliefMessage m) {
  {
    std::lock_guard lock(mutex_);
    queue_.push_back(std::move(m));
  }
  cv_.notify_all();
}

std::optional<BeliefMessage> Inbox::try_pop() {
  std::lock_guard lock(mutex_);
  if (queue_.empty()) return std::nullopt;
  BeliefMessage m = std::move(queue_.front());
  queue_.pop_front();
  return m;
}

bool Inbox::wait_ready() {
  std::unique_lock lock(mutex_);
  cv_.wait(lock, [&] { return !queue_.empty() || closed_; });
  return !queue_.empty();
}

void Inbox::clear() {
  std::lock_guard lock(mutex_);
  queue_.clear();
}

void Inbox::close() {
  {
    std::lock_guard lock(mutex_);
    closed_ = true;
  }
  cv_.notify_all();
}

void Inbox::reopen() {
  std::lock_guard lock(mutex_);
  closed_ = false;
}

std::size_t Inbox::size() const {
  std::lock_guard lock(mutex_);
  return queue_.size();
}

// ---------------------------------------------------------------------------
// Tree

SimNode* SimNode::child(const std::string& id) const {
  auto it = children.find(id);
  return it == children.end() ? nullptr : it->second.get();
}

MaterializeOptions materialize_options(const SimNode& node) {
  return {node.world().bounds, node.config().occludable_interior};
}

namespace {

void sync_roster(SimNode& node) {
  auto& beliefs = node.beliefs();
  for (auto it = beliefs.begin(); it != beliefs.end();) {
    it = node.world().agents.contains(it->first) ? std::next(it) : beliefs.erase(it);
  }
  for (const auto& [id, body] : node.world().agents) {
    if (!beliefs.contains(id)) beliefs.emplace(id, init_belief(id, node.config().prior, body));
  }
}

std::unique_ptr<SimNode> make_node(SimPath path, WorldState world, Mode mode,
                                   std::shared_ptr<const NestContext> context) {
  auto node = std::make_unique<SimNode>();
  node->path = std::move(path);
  node->mode = mode;
  node->context = std::move(context);
  node->live.world = std::move(world);
  sync_roster(*node);
  node->timeline.branches[kMainBranch] = node->live;
  return node;
}

}  // namespace

std::unique_ptr<SimNode> make_root(WorldState world, std::shared_ptr<NestContext> context) {
  return make_node(SimPath{}, std::move(world), Mode::control, std::move(context));
}

SimPath spawn_child(SimNode& node, const std::string& agent) {
  if (!node.world().agents.contains(agent)) {
    throw Error(ErrorCode::UnknownAgent, agent + " is not present in " + node.path.str());
  }
  if (node.children.contains(agent)) {
    throw Error(ErrorCode::ChildExists, node.path.child(agent).str());
  }
  if (node.path.depth() + 1 > node.config().max_depth) {
    throw Error(ErrorCode::DepthExceeded, fmt::format("{} would exceed max depth {}",
                                                      node.path.child(agent).str(), node.config().max_depth));
  }
  if (!node.config().allow_self_nesting && !node.path.ids.empty() && node.path.ids.back() == agent) {
    throw Error(ErrorCode::InvalidPath, "self-nesting disabled: " + node.path.child(agent).str());
  }
  const BeliefState& belief = node.beliefs().at(agent);
  SimPath path = node.path.child(agent);
  auto child = make_node(path, belief_to_state(belief, materialize_options(node)), Mode::follow, node.context);
  node.children.emplace(agent, std::move(child));
  return path;
}

void remove_child(SimNode& node, const std::string& agent) {
  auto it = node.children.find(agent);
  if (it == node.children.end()) {
    throw Error(ErrorCode::NoSuchChild, node.path.child(agent).str());
  }
  node.children.erase(it);
}

void set_mode(SimNode& node, Mode m) {
  if (m == node.mode) {
    node.requested_mode.reset();
  } else {
    node.requested_mode = m;
  }
}

void step(SimNode& node) {
  if (node.requested_mode) {
    if (*node.requested_mode == Mode::control) {
      node.inbox.clear();
    } else {
      node.resync_beliefs = true;
    }
    node.mode = *node.requested_mode;
    node.requested_mode.reset();
  }

  if (node.mode == Mode::control) {
    node.inbox.clear();
  } else {
    auto message = node.inbox.try_pop();
    if (!message) {
      node.pending_events.clear();
      node.pending_chats.clear();
      return;
    }
    node.context->record_delivery({node.path.str(), message->snapshot.tick});
    if (message->snapshot.tick < node.tick()) {
      // The parent went back to an earlier branch; so does this node.
      std::erase_if(node.live.log, [&](const EventRecord& e) { return e.time > message->snapshot.tick; });
      node.resync_beliefs = true;
    }
    apply_state(node.world(), message->snapshot);
    if (node.resync_beliefs) {
      // Beliefs from a control period or a later branch are dropped.
      node.beliefs().clear();
      node.resync_beliefs = false;
    }
    sync_roster(node);
    for (auto& e : message->events) {
      node.live.log.push_back(e);
      node.pending_events.push_back(std::move(e));
    }
    for (auto& c : message->chats) node.pending_chats.push_back(std::move(c));
  }

  const StateSnapshot s = get_state(node.world());
  const MaterializeOptions materialize = materialize_options(node);
  for (auto& [id, belief] : node.beliefs()) {
    const Observation o = observe(s, id, node.pending_events, node.pending_chats, node.config().perception);
    SimNode* child = node.child(id);
    BeliefMessage m;
    if (child != nullptr) {
      for (const auto& e : o.witnessed_events) {
        if (std::find(belief.event_memory.begin(), belief.event_memory.end(), e) == belief.event_memory.end()) {
          m.events.push_back(e);
        }
      }
      for (const auto& c : o.heard_chats) {
        if (std::find(belief.chat_memory.begin(), belief.chat_memory.end(), c) == belief.chat_memory.end()) {
          m.chats.push_back(c);
        }
      }
    }
    belief = update_belief(std::move(belief), o);
    if (child != nullptr) {
      m.target = child->path;
      m.snapshot = belief_to_state(belief, materialize);
      child->inbox.push(std::move(m));
    }
  }

  node.pending_events.clear();
  node.pending_chats.clear();
  if (node.mode == Mode::control) ++node.world().tick;
}

std::vector<SimNode*> nodes_breadth_first(SimNode& root) {
  std::vector<SimNode*> order{&root};
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (auto& [_, child] : order[i]->children) order.push_back(child.get());
  }
  return order;
}

std::vector<const SimNode*> nodes_breadth_first(const SimNode& root) {
  std::vector<const SimNode*> order{&root};
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (const auto& [_, child] : order[i]->children) order.push_back(child.get());
  }
  return order;
}

void run_deterministic(SimNode& root, int rounds) {
  for (int r = 0; r < rounds; ++r) {
    for (SimNode* node : nodes_breadth_first(root)) step(*node);
  }
}

void run_concurrent(SimNode& root, int control_steps) {
  const auto nodes = nodes_breadth_first(root);
  for (SimNode* node : nodes) node->inbox.reopen();
  {
    std::vector<std::jthread> workers;
    workers.reserve(nodes.size());
    for (SimNode* node : nodes) {
      workers.emplace_back([node, control_steps] {
        const Mode effective = node->requested_mode.value_or(node->mode);
        if (effective == Mode::control) {
          for (int i = 0; i < control_steps; ++i) step(*node);
        } else {
          while (node->inbox.wait_ready()) step(*node);
        }
        for (auto& [_, child] : node->children) child->inbox.close();
      });
    }
  }
  for (SimNode* node : nodes) node->inbox.reopen();
}

SimNode* find_node(SimNode& root, const SimPath& path) {
  SimNode* node = &root;
  for (const auto& id : path.ids) {
    node = node->child(id);
    if (node == nullptr) return nullptr;
  }
  return node;
}

const SimNode* find_node(const SimNode& root, const SimPath& path) {
  const SimNode* node = &root;
  for (const auto& id : path.ids) {
    node = node->child(id);
    if (node == nullptr) return nullptr;
  }
  return node;
}

namespace {

void append_cell(std::string& out, BlockPos p, const Cell& c) {
  const int raw[4] = {p.x, p.y, p.z, static_cast<int>(c.kind)};
  out.append(reinterpret_cast<const char*>(raw), sizeof raw);
  out += c.block;
  out += ';';
}

void append_items(std::string& out, const Items& items) {
  out += '{';
  for (const auto& [name, count] : items) fmt::format_to(std::back_inserter(out), FMT_COMPILE("{}={},"), name, count);
  out += '}';
}

void append_world(std::string& out, const WorldState& w) {
  out += "W|";
  for (const auto& [p, c] : w.cells) append_cell(out, p, c);
  out += "|C|";
  for (const auto& [p, c] : w.containers) {
    fmt::format_to(std::back_inserter(out), FMT_COMPILE("{},{},{}:{}"), p.x, p.y, p.z, c.contents_known);
    append_items(out, c.contents);
  }
  out += "|A|";
  for (const auto& [id, a] : w.agents) {
    fmt::format_to(std::back_inserter(out), FMT_COMPILE("{}@{},{},{},{}:{}"), id, a.pose.position.x, a.pose.position.y, a.pose.position.z,
                       a.pose.yaw, a.held_item.value_or("-"));
    append_items(out, a.inventory);
  }
}

void append_belief(std::string& out, const BeliefState& b) {
  out += "B|" + b.owner + "|";
  for (const auto& [p, bc] : b.cells) {
    append_cell(out, p, bc.cell);
    out += bc.visibility.seen_before ? 'S' : 's';
    out += bc.visibility.visible_now ? 'V' : 'v';
  }
  out += "|C|";
  for (const auto& [p, bc] : b.containers) {
    fmt::format_to(std::back_inserter(out), FMT_COMPILE("{},{},{}:{}:{}{}"), p.x, p.y, p.z, bc.block, bc.visibility.seen_before,
                       bc.visibility.visible_now);
    if (bc.contents) append_items(out, *bc.contents);
    else out += "?";
  }
  out += "|A|";
  for (const auto& [id, a] : b.agents) {
    out += id + "@";
    if (a.last_pose) {
      fmt::format_to(std::back_inserter(out), FMT_COMPILE("{},{},{},{}"), a.last_pose->position.x, a.last_pose->position.y,
                         a.last_pose->position.z, a.last_pose->yaw);
    }
    fmt::format_to(std::back_inserter(out), FMT_COMPILE(":{}:{}:{}{}"), a.held_item_known, a.held_item.value_or("-"), a.visibility.seen_before,
                       a.visibility.visible_now);
    if (a.inventory) append_items(out, *a.inventory);
  }
  fmt::format_to(std::back_inserter(out), FMT_COMPILE("|self:{},{},{}:{}"), b.self.pose.position.x, b.self.pose.position.y,
                     b.self.pose.position.z, b.self.held_item.value_or("-"));
  append_items(out, b.self.inventory);
  fmt::format_to(std::back_inserter(out), FMT_COMPILE("|mem:{}:{}|{}"), b.chat_memory.size(), b.event_memory.size(), b.thought.value_or("-"));
}

}  // namespace

std::string content_fingerprint(const SimNode& node) {
  std::string out;
  out += node.path.str() + "|" + to_string(node.mode) + "|";
  append_world(out, node.world());
  for (const auto& [_, b] : node.beliefs()) append_belief(out, b);
  fmt::format_to(std::back_inserter(out), FMT_COMPILE("|log:{}"), node.live.log.size());
  return out;
}

}  // namespace beliefnest
