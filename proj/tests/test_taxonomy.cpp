#include <doctest.h>

#include <sstream>

#include "igkit/error.hpp"
#include "igkit/taxonomy.hpp"
#include "support.hpp"

using namespace igkit;

namespace {

CategoryMap parse(const std::string& text) {
  std::istringstream in(text);
  return parse_taxonomy(in);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

ComponentSpan agent(const std::string& text, std::size_t start = 0) {
  return {"s1", ComponentLabel::A, start, start + 2, text};
}

ComponentSpan object(const std::string& text) { return {"s1", ComponentLabel::B, 4, 6, text}; }

ClusterAssignment assignment_with(const std::string& ref, ClusterId id) {
  ClusterAssignment a;
  a.items.push_back({ref, id});
  return a;
}

}  // namespace

TEST_CASE("taxonomy parsing") {
  const CategoryMap map = parse(
      "# roles\n"
      "default = error\n"
      "[agents]\n"
      "mentor = Authority\n"
      "IPMC = Authority\n"
      "asf = Authority   # the foundation\n"
      "committer = Participant\n"
      "cluster:3 = Participant\n"
      "[objects]\n"
      "release manager = Participants\n");
  CHECK(map.default_policy == DefaultPolicy::Error);
  CHECK(map.agent_rules.size() == 5);
  CHECK(map.agent_rules.at("ipmc") == AgentCategory::Authority);
  CHECK(map.agent_rules.at("cluster:3") == AgentCategory::Participant);
  CHECK(map.object_rules.at("release manager") == ObjectCategory::Participants);

  const CategoryMap empty = parse("default = other\n");
  CHECK(empty.agent_rules.empty());
  CHECK(empty.default_policy == DefaultPolicy::OtherBucket);

  const CategoryMap fixture = load_taxonomy(test::fixture("taxonomy.conf"));
  CHECK(fixture.agent_rules.at("mentor") == AgentCategory::Authority);
}

TEST_CASE("taxonomy errors") {
  CHECK(error_of("[agents]\nmentor = Authority\nmentor = Participant\n").find("duplicate agent key \"mentor\"") !=
        std::string::npos);
  CHECK(error_of("[agents]\nmentor = Authority\nMentor = Authority\n").find("line 3") != std::string::npos);
  CHECK(error_of("[agents]\nmentor = Boss\n").find("Boss") != std::string::npos);
  CHECK(error_of("[objects]\nvote = Participant\n").find("Participant") != std::string::npos);
  CHECK(error_of("[people]\n").find("people") != std::string::npos);
  CHECK(error_of("[agents]\nno equals sign\n").find("line 2") != std::string::npos);
  CHECK(error_of("[agents]\ndefault = other\n").size() > 0);
  CHECK(error_of("default = sometimes\n").find("sometimes") != std::string::npos);
  CHECK_THROWS_AS(load_taxonomy("/nonexistent/taxonomy.conf"), Error);
}

TEST_CASE("categorize_component lookup order") {
  const CategoryMap map = parse(
      "default = other\n"
      "[agents]\n"
      "mentor = Authority\n"
      "release manager = Participant\n"
      "manager = Authority\n"
      "cluster:0 = Participant\n"
      "[objects]\n"
      "vote = ProjectManagement\n");
  const ClusterAssignment noise = assignment_with("s1:0-2", ClusterId::noise());
  const ClusterAssignment c0 = assignment_with("s1:0-2", ClusterId::of(0));
  const ClusterAssignment c1 = assignment_with("s1:0-2", ClusterId::of(1));

  CHECK(categorize_component(agent("the mentor"), noise, map, ComponentKind::Agent) ==
        Category{AgentCategory::Authority});
  CHECK(categorize_component(agent("All Mentors"), noise, map, ComponentKind::Agent) ==
        Category{AgentCategory::Authority});
  CHECK(categorize_component(agent("release manager"), noise, map, ComponentKind::Agent) ==
        Category{AgentCategory::Participant});
  CHECK(categorize_component(agent("the release manager"), noise, map, ComponentKind::Agent) ==
        Category{AgentCategory::Authority});
  // Cluster rule beats the literal.
  CHECK(categorize_component(agent("the mentor"), c0, map, ComponentKind::Agent) ==
        Category{AgentCategory::Participant});
  CHECK(categorize_component(agent("the mentor"), c1, map, ComponentKind::Agent) ==
        Category{AgentCategory::Authority});
  CHECK(categorize_component(agent("the champion"), noise, map, ComponentKind::Agent) ==
        Category{OtherBucket{}});
  CHECK(categorize_component(object("the votes"), ClusterAssignment{}, map, ComponentKind::Object) ==
        Category{ObjectCategory::ProjectManagement});

  CHECK_THROWS_AS(categorize_component(object("the vote"), noise, map, ComponentKind::Agent), Error);
  CHECK_THROWS_AS(categorize_component(agent("the mentor"), noise, map, ComponentKind::Object), Error);

  CategoryMap strict = map;
  strict.default_policy = DefaultPolicy::Error;
  CHECK_THROWS_AS(categorize_component(agent("the champion"), noise, strict, ComponentKind::Agent), Error);
  CHECK_NOTHROW(categorize_component(agent("the mentor"), noise, strict, ComponentKind::Agent));

  CHECK(category_name(Category{OtherBucket{}}) == "Other");
  CHECK(category_name(Category{ObjectCategory::ProductManagement}) == "ProductManagement");
  CHECK(head_noun("The Release Manager.") == "manager");
  CHECK(head_noun("") == "");
}

TEST_CASE("categorization ignores rule declaration order") {
  const CategoryMap a = parse("[agents]\nmentor = Authority\nmentors = Participant\n");
  const CategoryMap b = parse("[agents]\nmentors = Participant\nmentor = Authority\n");
  for (const std::string text : {"the mentor", "mentors", "a mentors", "Mentor"}) {
    CHECK(categorize_component(agent(text), {}, a, ComponentKind::Agent) ==
          categorize_component(agent(text), {}, b, ComponentKind::Agent));
  }
}

TEST_CASE("classify_deontic table") {
  const std::vector<std::pair<std::string, DeonticClass>> table = {
      {"must", DeonticClass::Strong},          {"will", DeonticClass::Strong},
      {"shall", DeonticClass::Strong},         {"may", DeonticClass::Weak},
      {"should", DeonticClass::Weak},          {"can", DeonticClass::Weak},
      {"could", DeonticClass::Weak},           {"might", DeonticClass::Weak},
      {"will not", DeonticClass::Proscriptive}, {"must not", DeonticClass::Proscriptive},
      {"won't", DeonticClass::Proscriptive},   {"cannot", DeonticClass::Proscriptive},
      {"should never", DeonticClass::Proscriptive}, {"shouldn't", DeonticClass::Proscriptive},
      {"is", DeonticClass::Stative},           {"are", DeonticClass::Stative},
      {"be", DeonticClass::Stative},           {"", DeonticClass::Other},
      {"ought", DeonticClass::Other},          {"MUST", DeonticClass::Strong},
      {"Will Not", DeonticClass::Proscriptive}, {"must also", DeonticClass::Strong},
  };
  for (const auto& [text, expected] : table) CHECK_MESSAGE(classify_deontic(text) == expected, text);
  CHECK(to_string(DeonticClass::Proscriptive) == "Proscriptive");
  CHECK(parse_deontic_class("Weak") == DeonticClass::Weak);
  CHECK_FALSE(parse_agent_category("Boss").has_value());
}
