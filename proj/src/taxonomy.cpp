#include "igkit/taxonomy.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <istream>

#include "igkit/error.hpp"

namespace igkit {

namespace {

constexpr std::array<std::string_view, 2> kAgentNames = {"Authority", "Participant"};
constexpr std::array<std::string_view, 5> kObjectNames = {
    "ProductManagement", "ProjectManagement", "Authority", "Product", "Participants"};
constexpr std::array<std::string_view, 5> kDeonticNames = {
    "Strong", "Weak", "Proscriptive", "Stative", "Other"};

template <typename Enum, std::size_t N>
std::optional<Enum> parse_enum(const std::array<std::string_view, N>& names,
                               std::string_view name) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == name) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> words_of(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (char ch : text) {
    const auto uc = static_cast<unsigned char>(ch);
    if (std::isalnum(uc) || ch == '\'' || ch == '-' || uc >= 0x80) {
      current.push_back(static_cast<char>(std::tolower(uc)));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (const std::string& w : words) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

}  // namespace

std::string_view to_string(AgentCategory c) { return kAgentNames[static_cast<std::size_t>(c)]; }
std::string_view to_string(ObjectCategory c) { return kObjectNames[static_cast<std::size_t>(c)]; }
std::string_view to_string(DeonticClass c) { return kDeonticNames[static_cast<std::size_t>(c)]; }

std::optional<AgentCategory> parse_agent_category(std::string_view name) {
  return parse_enum<AgentCategory>(kAgentNames, name);
}
std::optional<ObjectCategory> parse_object_category(std::string_view name) {
  return parse_enum<ObjectCategory>(kObjectNames, name);
}
std::optional<DeonticClass> parse_deontic_class(std::string_view name) {
  return parse_enum<DeonticClass>(kDeonticNames, name);
}

std::string_view to_string(ComponentKind kind) {
  return kind == ComponentKind::Agent ? "agent" : "object";
}

CategoryMap parse_taxonomy(std::istream& in) {
  CategoryMap map;
  enum class Section { None, Agents, Objects } section = Section::None;
  std::string raw;
  std::size_t number = 0;
  auto fail = [&](const std::string& msg) {
    throw Error("taxonomy line " + std::to_string(number) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++number;
    // Comments run from '#' or ';' at line start or after whitespace.
    std::string_view body = raw;
    for (std::size_t i = 0; i < body.size(); ++i) {
      if ((body[i] == '#' || body[i] == ';') &&
          (i == 0 || std::isspace(static_cast<unsigned char>(body[i - 1])))) {
        body = body.substr(0, i);
        break;
      }
    }
    const std::string line = trim(body);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      const std::string name = lower(trim(std::string_view(line).substr(1, line.size() - 2)));
      if (name == "agents") section = Section::Agents;
      else if (name == "objects") section = Section::Objects;
      else fail("unknown section [" + name + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) fail("empty key");

    if (section == Section::None) {
      if (lower(key) != "default") fail("unknown top-level key \"" + key + "\"");
      const std::string v = lower(value);
      if (v == "error") map.default_policy = DefaultPolicy::Error;
      else if (v == "other") map.default_policy = DefaultPolicy::OtherBucket;
      else fail("unknown default policy \"" + value + "\" (expected error or other)");
      continue;
    }

    if (key.rfind("cluster:", 0) == 0) {
      const std::string id = key.substr(8);
      if (id.empty() || !std::all_of(id.begin(), id.end(), [](char c) {
            return std::isdigit(static_cast<unsigned char>(c)) != 0;
          })) {
        fail("bad cluster key \"" + key + "\"");
      }
      key = "cluster:" + std::to_string(std::stoi(id));
    } else {
      key = join_words(words_of(key));
      if (key.empty()) fail("empty literal key");
    }

    if (section == Section::Agents) {
      const auto category = parse_agent_category(value);
      if (!category) fail("unknown agent category \"" + value + "\"");
      if (!map.agent_rules.emplace(key, *category).second) {
        fail("duplicate agent key \"" + key + "\"");
      }
    } else {
      const auto category = parse_object_category(value);
      if (!category) fail("unknown object category \"" + value + "\"");
      if (!map.object_rules.emplace(key, *category).second) {
        fail("duplicate object key \"" + key + "\"");
      }
    }
  }
  return map;
}

CategoryMap load_taxonomy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open taxonomy " + path.string());
  try {
    return parse_taxonomy(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string category_name(const Category& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, OtherBucket>) {
          return "Other";
        } else {
          return std::string(to_string(v));
        }
      },
      c);
}

std::string head_noun(std::string_view span_text) {
  const auto words = words_of(span_text);
  return words.empty() ? std::string() : words.back();
}

namespace {

template <typename Rules>
std::optional<typename Rules::mapped_type> lookup(const Rules& rules,
                                                  const ComponentSpan& span,
                                                  const ClusterAssignment& assignment) {
  if (const auto id = assignment.find(span.ref()); id && !id->is_noise()) {
    if (auto it = rules.find("cluster:" + std::to_string(id->value())); it != rules.end()) {
      return it->second;
    }
  }
  const auto words = words_of(span.text);
  if (words.empty()) return std::nullopt;
  if (auto it = rules.find(join_words(words)); it != rules.end()) return it->second;
  const std::string& head = words.back();
  if (auto it = rules.find(head); it != rules.end()) return it->second;
  if (head.size() > 1 && head.back() == 's') {
    if (auto it = rules.find(head.substr(0, head.size() - 1)); it != rules.end()) {
      return it->second;
    }
  }
  return std::nullopt;
}

}  // namespace

Category categorize_component(const ComponentSpan& span,
                              const ClusterAssignment& assignment,
                              const CategoryMap& map, ComponentKind kind) {
  const ComponentLabel expected =
      kind == ComponentKind::Agent ? ComponentLabel::A : ComponentLabel::B;
  if (span.label != expected) {
    throw Error("span " + span.ref() + " has label " + std::string(to_string(span.label)) +
                ", cannot categorize as " + std::string(to_string(kind)));
  }
  std::optional<Category> found;
  if (kind == ComponentKind::Agent) {
    if (auto c = lookup(map.agent_rules, span, assignment)) found = *c;
  } else {
    if (auto c = lookup(map.object_rules, span, assignment)) found = *c;
  }
  if (found) return *found;
  if (map.default_policy == DefaultPolicy::Error) {
    throw Error("unmapped " + std::string(to_string(kind)) + " component " + span.ref() +
                " \"" + span.text + "\"");
  }
  return OtherBucket{};
}

DeonticClass classify_deontic(std::string_view span_text) {
  static const std::array<std::string_view, 3> strong = {"must", "will", "shall"};
  static const std::array<std::string_view, 5> weak = {"may", "can", "should", "might", "could"};
  auto in = [](const auto& set, std::string_view w) {
    return std::find(set.begin(), set.end(), w) != set.end();
  };

  // Expand contractions so "won't" reads as "will not" and "cannot" as
  // "can not".
  std::vector<std::string> words;
  for (std::string w : words_of(span_text)) {
    if (w == "cannot") {
      words.emplace_back("can");
      words.emplace_back("not");
      continue;
    }
    if (w.size() > 3 && w.ends_with("n't")) {
      std::string base = w.substr(0, w.size() - 3);
      if (base == "wo") base = "will";
      else if (base == "ca") base = "can";
      else if (base == "sha") base = "shall";
      words.push_back(std::move(base));
      words.emplace_back("not");
      continue;
    }
    words.push_back(std::move(w));
  }

  auto is_modal = [&](const std::string& w) { return in(strong, w) || in(weak, w); };
  auto is_negator = [](const std::string& w) { return w == "not" || w == "never"; };
  for (std::size_t i = 0; i + 1 < words.size(); ++i) {
    if ((is_modal(words[i]) && is_negator(words[i + 1])) ||
        (is_negator(words[i]) && is_modal(words[i + 1]))) {
      return DeonticClass::Proscriptive;
    }
  }
  for (const std::string& w : words) {
    if (in(strong, w)) return DeonticClass::Strong;
    if (in(weak, w)) return DeonticClass::Weak;
  }
  for (const std::string& w : words) {
    if (w == "is" || w == "are" || w == "be" || w == "been") return DeonticClass::Stative;
  }
  return DeonticClass::Other;
}

}  // namespace igkit
