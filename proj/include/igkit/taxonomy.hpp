#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "igkit/classifier.hpp"
#include "igkit/clustering.hpp"

namespace igkit {

enum class AgentCategory { Authority, Participant };
enum class ObjectCategory { ProductManagement, ProjectManagement, Authority, Product, Participants };
enum class DeonticClass { Strong, Weak, Proscriptive, Stative, Other };

std::string_view to_string(AgentCategory c);
std::string_view to_string(ObjectCategory c);
std::string_view to_string(DeonticClass c);

std::optional<AgentCategory> parse_agent_category(std::string_view name);
std::optional<ObjectCategory> parse_object_category(std::string_view name);
std::optional<DeonticClass> parse_deontic_class(std::string_view name);

enum class ComponentKind { Agent, Object };
std::string_view to_string(ComponentKind kind);

/// What happens to a component no rule matches.
enum class DefaultPolicy { Error, OtherBucket };

struct CategoryMap {
  // Keys are "cluster:<id>" or lowercased literal terms.
  std::map<std::string, AgentCategory> agent_rules;
  std::map<std::string, ObjectCategory> object_rules;
  DefaultPolicy default_policy = DefaultPolicy::OtherBucket;
};

/// Flat key-value file:
///
///   # comment
///   default = other        ; or "error"; must precede any section
///   [agents]
///   mentor = Authority
///   cluster:3 = Participant
///   [objects]
///   vote = ProjectManagement
///
/// Throws igkit::Error naming unknown categories, duplicate keys and
/// malformed lines.
CategoryMap load_taxonomy(const std::filesystem::path& path);
CategoryMap parse_taxonomy(std::istream& in);

/// Marker for a component that fell through to the Other bucket.
struct OtherBucket {
  bool operator==(const OtherBucket&) const = default;
};

using Category = std::variant<AgentCategory, ObjectCategory, OtherBucket>;

std::string category_name(const Category& c);

/// Last lowercased word of the span text ("" when it has none).
std::string head_noun(std::string_view span_text);

/// Lookup order: the span's cluster rule ("cluster:<id>"), then the whole
/// lowercased text, then its head noun (last word), then the head noun
/// without a plural "s", then the default policy. Spans must carry label A
/// for agents and B for objects.
Category categorize_component(const ComponentSpan& span,
                              const ClusterAssignment& assignment,
                              const CategoryMap& map, ComponentKind kind);

/// Lowercases, then: a negator (not, never, n't) adjacent to a modal is
/// Proscriptive; else the first modal decides (must/will/shall Strong,
/// may/can/should/might/could Weak); else is/are/be/been is Stative; else
/// Other.
DeonticClass classify_deontic(std::string_view span_text);

}  // namespace igkit
