#include "beliefnest/promptgen.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "beliefnest/error.hpp"
#include "beliefnest/format.hpp"

namespace beliefnest {

BranchRef BranchRef::parse(std::string_view text) {
  BranchRef ref;
  std::string_view rest = text;
  if (const auto at = rest.find('@'); at != std::string_view::npos) {
    std::string owner(rest.substr(at + 1));
    if (!is_valid_agent_id(owner)) {
      throw Error(ErrorCode::InvalidPath, "bad perspective owner in '" + std::string(text) + "'");
    }
    ref.owner = std::move(owner);
    rest = rest.substr(0, at);
  }
  if (const auto colon = rest.find(':'); colon != std::string_view::npos) {
    ref.branch = std::string(rest.substr(colon + 1));
    if (!is_valid_branch_id(ref.branch)) {
      throw Error(ErrorCode::InvalidPath, "bad branch id in '" + std::string(text) + "'");
    }
    rest = rest.substr(0, colon);
  }
  ref.path = SimPath::parse(rest);
  return ref;
}

std::string BranchRef::str() const {
  std::string out = path.str() + ":" + branch;
  if (owner) out += "@" + *owner;
  return out;
}

std::string BranchRef::perspective_owner() const {
  if (owner) return *owner;
  if (path.is_root()) throw Error(ErrorCode::UnresolvedBranch, str() + " names no perspective owner");
  return path.ids.back();
}

std::string Template::serialize() const {
  std::string out;
  for (const auto& s : segments) out += s.raw;
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

[[noreturn]] void parse_error(std::size_t offset, const std::string& reason) {
  throw Error(ErrorCode::ParseError, fmt::format("at offset {}: {}", offset, reason));
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, std::size_t pos) : text_(text), pos_(pos) {}

  TemplateSegment parse() {
    TemplateSegment seg;
    seg.type = TemplateSegment::Type::expression;
    seg.offset = pos_;
    pos_ += 2;  // "{{"
    skip_ws();
    seg.name = ident("variable name");
    skip_ws();
    if (peek() == '|') {
      ++pos_;
      skip_ws();
      filter_offset_ = pos_;
      seg.filter = ident("filter name");
      skip_ws();
      if (peek() == '(') {
        ++pos_;
        skip_ws();
        if (peek() != ')') seg.args = list();
        skip_ws();
        expect(')');
        skip_ws();
      }
    }
    if (text_.substr(pos_, 2) != "}}") parse_error(pos_, "expected '}}'");
    pos_ += 2;
    seg.raw = std::string(text_.substr(seg.offset, pos_ - seg.offset));
    return seg;
  }

  std::size_t end() const { return pos_; }
  std::size_t filter_offset() const { return filter_offset_; }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c) {
    if (peek() != c) parse_error(pos_, fmt::format("expected '{}'", c));
    ++pos_;
  }

  std::string ident(const char* what) {
    if (!is_ident_start(peek())) parse_error(pos_, fmt::format("expected {}", what));
    const std::size_t start = pos_;
    while (is_ident_char(peek())) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::vector<std::string> list() {
    expect('[');
    std::vector<std::string> out;
    skip_ws();
    if (peek() == ']') {
      ++pos_;
      return out;
    }
    while (true) {
      skip_ws();
      out.push_back(quoted());
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect(']');
      return out;
    }
  }

  std::string quoted() {
    const char quote = peek();
    if (quote != '"' && quote != '\'') parse_error(pos_, "expected a quoted string");
    const std::size_t start = pos_++;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != quote) {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out += text_[pos_++];
    }
    if (pos_ >= text_.size()) parse_error(start, "unterminated string");
    ++pos_;
    return out;
  }

  std::string_view text_;
  std::size_t pos_;
  std::size_t filter_offset_ = 0;
};

// Length of a `$$NAME$$` placeholder starting at `pos`, or 0.
std::size_t placeholder_length(std::string_view text, std::size_t pos) {
  if (text.substr(pos, 2) != "$$") return 0;
  std::size_t i = pos + 2;
  while (i < text.size() && (std::isupper(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
  if (i == pos + 2 || text.substr(i, 2) != "$$") return 0;
  return i + 2 - pos;
}

}  // namespace

Template parse_template(std::string_view text, const FilterRegistry& registry) {
  Template t;
  t.source = std::string(text);
  std::string literal;
  std::size_t literal_start = 0;
  auto flush = [&] {
    if (literal.empty()) return;
    TemplateSegment seg;
    seg.raw = literal;
    seg.offset = literal_start;
    t.segments.push_back(std::move(seg));
    literal.clear();
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    if (const std::size_t len = placeholder_length(text, pos); len > 0) {
      flush();
      TemplateSegment seg;
      seg.type = TemplateSegment::Type::placeholder;
      seg.raw = std::string(text.substr(pos, len));
      seg.name = seg.raw.substr(2, len - 4);
      seg.offset = pos;
      t.segments.push_back(std::move(seg));
      pos += len;
      continue;
    }
    if (text.substr(pos, 2) == "{{") {
      flush();
      ExpressionParser p(text, pos);
      TemplateSegment seg = p.parse();
      if (seg.filter && !registry.contains(*seg.filter)) {
        parse_error(p.filter_offset(), "unknown filter '" + *seg.filter + "'");
      }
      t.segments.push_back(std::move(seg));
      pos = p.end();
      continue;
    }
    if (literal.empty()) literal_start = pos;
    literal += text[pos++];
  }
  flush();
  return t;
}

// ---------------------------------------------------------------------------
// Filters

namespace {

using ordered = nlohmann::ordered_json;

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i > 0) out += '\n';
    out += lines[i];
  }
  return out;
}

std::string thought_filter(const FilterInput& in, const std::vector<std::string>&) {
  return in.belief.thought.value_or("No thought");
}

std::string chat_log_filter(const FilterInput& in, const std::vector<std::string>&) {
  if (in.belief.chat_memory.empty()) return "No chats";
  std::vector<std::string> lines;
  for (const auto& c : in.belief.chat_memory) lines.push_back(fmt::format("{}; {}: {}", c.tick, c.speaker, c.text));
  return join_lines(lines);
}

std::string position_filter(const FilterInput& in, const std::vector<std::string>&) {
  return format_vec(in.belief.self.pose.position);
}

std::string chests_filter(const FilterInput& in, const std::vector<std::string>&) {
  std::vector<std::string> lines;
  for (const auto& [pos, c] : in.belief.containers) {
    lines.push_back(format_block_pos(pos) + ": " + (c.contents ? format_items(*c.contents) : "No data"));
  }
  if (lines.empty()) return "No chests";
  return join_lines(lines);
}

std::string inventory_filter(const FilterInput& in, const std::vector<std::string>&) {
  const Items& inv = in.belief.self.inventory;
  return inv.empty() ? "No data" : format_items(inv);
}

std::string other_players_filter(const FilterInput& in, const std::vector<std::string>&) {
  ordered out = ordered::object();
  for (const auto& [id, a] : in.belief.agents) {
    if (id == in.owner || !a.visibility.seen_before) continue;
    ordered rec;
    if (a.visibility.visible_now && a.last_pose) rec["position"] = format_vec(a.last_pose->position);
    else rec["position"] = "Cannot be seen";
    if (!a.held_item_known) rec["helditem"] = "No data";
    else rec["helditem"] = a.held_item.value_or("None");
    rec["inventory"] = a.inventory ? format_items(*a.inventory) : "No data";
    out[id] = std::move(rec);
  }
  if (out.empty()) return "No players seen";
  return out.dump(2);
}

std::string blocks_section(const BeliefState& b, const std::string& type) {
  ordered records = ordered::object();
  for (const auto& [pos, bc] : b.cells) {
    if (bc.cell.type_name() != type || !bc.visibility.seen_before) continue;
    records[format_block_pos(pos)] = {
        {"Me", {{"seen_before", bc.visibility.seen_before}, {"visible_now", bc.visibility.visible_now}}}};
  }
  if (records.empty()) return type + " visibilities: Not observed";
  return type + " visibilities:" + records.dump(2);
}

std::string events_filter(const FilterInput& in, const std::vector<std::string>&) {
  std::vector<std::string> lines{kEventLogHeader};
  for (const auto& e : in.belief.event_memory) lines.push_back(e.row());
  return join_lines(lines);
}

}  // namespace

FilterRegistry FilterRegistry::with_builtins(std::vector<std::string> tracked_block_types) {
  FilterRegistry r;
  r.add("thought", thought_filter);
  r.add("chat_log", chat_log_filter);
  r.add("position", position_filter);
  r.add("chests", chests_filter);
  r.add("inventory", inventory_filter);
  r.add("other_players", other_players_filter);
  r.add("blocks", [tracked = std::move(tracked_block_types)](const FilterInput& in,
                                                            const std::vector<std::string>& args) {
    std::vector<std::string> types = args;
    for (const auto& t : tracked) {
      if (std::find(types.begin(), types.end(), t) == types.end()) types.push_back(t);
    }
    std::vector<std::string> sections;
    for (const auto& t : types) sections.push_back(blocks_section(in.belief, t));
    return join_lines(sections);
  });
  r.add("events_and_visibilities", events_filter);
  return r;
}

void FilterRegistry::add(const std::string& name, Filter f) {
  if (filters_.contains(name)) throw Error(ErrorCode::DuplicateFilter, name);
  filters_.emplace(name, std::move(f));
}

const Filter& FilterRegistry::get(const std::string& name) const {
  auto it = filters_.find(name);
  if (it == filters_.end()) throw Error(ErrorCode::UnknownFilter, name);
  return it->second;
}

std::string filter_output(const std::string& name, const SimNode& root, const BranchRef& ref,
                          const FilterRegistry& registry, const std::vector<std::string>& args) {
  const Filter& f = registry.get(name);
  const SimNode* node = find_node(root, ref.path);
  if (node == nullptr) throw Error(ErrorCode::UnresolvedBranch, ref.str() + ": no such simulator");
  const Situation* situation = nullptr;
  try {
    situation = &branch_situation(*node, ref.branch);
  } catch (const Error&) {
    throw Error(ErrorCode::UnresolvedBranch, ref.str() + ": no such branch");
  }
  const std::string owner = ref.perspective_owner();
  auto it = situation->beliefs.find(owner);
  if (it == situation->beliefs.end()) {
    throw Error(ErrorCode::UnresolvedBranch, ref.str() + ": " + owner + " has no belief there");
  }
  return f(FilterInput{*node, *situation, owner, it->second}, args);
}

std::string render(const Template& t, const PromptContext& ctx, const SimNode& root,
                   const FilterRegistry& registry) {
  std::string out;
  for (const auto& seg : t.segments) {
    switch (seg.type) {
      case TemplateSegment::Type::literal:
        out += seg.raw;
        break;
      case TemplateSegment::Type::placeholder: {
        if (auto it = ctx.placeholders.find(seg.name); it != ctx.placeholders.end()) out += it->second;
        else if (seg.name == "LAST_CODE") out += kDefaultLastCode;
        else if (seg.name == "LAST_ERROR") out += kDefaultLastError;
        else throw Error(ErrorCode::UnboundVariable, fmt::format("{} at offset {}", seg.raw, seg.offset));
        break;
      }
      case TemplateSegment::Type::expression: {
        auto it = ctx.bindings.find(seg.name);
        if (it == ctx.bindings.end()) {
          throw Error(ErrorCode::UnboundVariable, fmt::format("'{}' at offset {}", seg.name, seg.offset));
        }
        if (!seg.filter) {
          out += it->second;
          break;
        }
        BranchRef ref;
        try {
          ref = BranchRef::parse(it->second);
        } catch (const Error& e) {
          throw Error(ErrorCode::UnresolvedBranch, "'" + seg.name + "': " + e.detail());
        }
        out += filter_output(*seg.filter, root, ref, registry, seg.args);
        break;
      }
    }
  }
  return out;
}

}  // namespace beliefnest
