// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <array>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cacaobpmn/cacao/codec.hpp"
#include "cacaobpmn/cacao/diff.hpp"
#include "cacaobpmn/cacao/inspect.hpp"
#include "cacaobpmn/cacao/model.hpp"
#include "cacaobpmn/cacao/validate.hpp"
#include "cacaobpmn/timestamp.hpp"
#include "test_support.hpp"

using namespace cacaobpmn;
using cacaobpmn::testing::read_fixture;

namespace {

constexpr std::array kRowFixtures = {
    "row01_playbook.json",     "row02_versioning.json",
    "row03_variables.json",    "row04_start.json",
    "row05_end.json",          "row06_action.json",
    "row07_playbook_action.json", "row08_parallel.json",
    "row09_if.json",           "row10_while.json",
    "row11_switch.json",       "row12_commands.json",
    "row13_agent_target.json", "row14_extensions.json",
    "row15_markings.json",     "row16_signatures.json",
};

bool has_code(const Violations& violations, std::string_view code) {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.code == code; });
}

cacao::Playbook fixture_playbook(std::string_view name) {
  return cacao::parse_playbook(read_fixture(name));
}

// Reorders every object's members without touching values, to show wire
// order is irrelevant to the canonical form.
nlohmann::ordered_json reverse_members(const nlohmann::ordered_json& value) {
  if (value.is_object()) {
    std::vector<std::pair<std::string, nlohmann::ordered_json>> members;
    for (const auto& [key, item] : value.items())
      members.emplace_back(key, reverse_members(item));
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (auto it = members.rbegin(); it != members.rend(); ++it)
      out[it->first] = std::move(it->second);
    return out;
  }
  if (value.is_array()) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& item : value) out.push_back(reverse_members(item));
    return out;
  }
  return value;
}

const cacao::WorkflowStep& step_of(const cacao::Playbook& pb,
                                   const std::string& id) {
  return pb.workflow.at(id);
}

}  // namespace

TEST_CASE("fixtures parse, validate clean, and serialize canonically") {
  for (const char* name : kRowFixtures) {
    CAPTURE(name);
    cacao::Playbook pb = fixture_playbook(name);
    CHECK(cacao::validate(pb).empty());
    std::string canonical = cacao::serialize_playbook(pb);
    cacao::Playbook again = cacao::parse_playbook(canonical);
    CHECK(again == pb);
    CHECK(cacao::serialize_playbook(again) == canonical);
  }
}

TEST_CASE("member order does not affect the canonical form") {
  for (const char* name : {"row06_action.json", "row16_signatures.json"}) {
    CAPTURE(name);
    std::string text = read_fixture(name);
    std::string permuted =
        reverse_members(nlohmann::ordered_json::parse(text)).dump(2);
    CHECK(permuted != text);  // the permutation actually changed the bytes
    CHECK(cacao::serialize_playbook(cacao::parse_playbook(permuted)) ==
          cacao::serialize_playbook(cacao::parse_playbook(text)));
  }
}

TEST_CASE("parse rejects structurally broken documents") {
  CHECK_THROWS_AS(cacao::parse_playbook("{"), cacao::CacaoError);
  CHECK_THROWS_AS(cacao::parse_playbook("[]"), cacao::CacaoError);
  CHECK_THROWS_AS(cacao::parse_playbook(R"({"type":"playbook"})"),
                  cacao::CacaoError);
  std::string wrong_version = read_fixture("row01_playbook.json");
  wrong_version.replace(wrong_version.find("cacao-2.0"), 9, "cacao-1.1");
  CHECK_THROWS_AS(cacao::parse_playbook(wrong_version), cacao::CacaoError);
}

TEST_CASE("timestamps keep millisecond precision") {
  CHECK(Timestamp::parse("2026-01-05T09:00:00Z").to_rfc3339() ==
        "2026-01-05T09:00:00.000Z");
  CHECK(Timestamp::parse("2026-01-05T09:00:00.123456Z").millis() ==
        Timestamp::parse("2026-01-05T09:00:00.123Z").millis());
  Timestamp t = Timestamp::from_millis(1767225600000);
  CHECK(t.to_rfc3339() == "2026-01-01T00:00:00.000Z");
  CHECK(Timestamp::parse(t.to_rfc3339()) == t);
  CHECK_THROWS_AS(Timestamp::parse("2026-01-05 09:00:00Z"),
                  std::invalid_argument);
  CHECK_THROWS_AS(Timestamp::parse("2026-13-05T09:00:00Z"),
                  std::invalid_argument);
}

TEST_CASE("identifier and variable name predicates") {
  CHECK(cacao::is_valid_identifier(
      "action--11111111-2222-4333-8444-555555555555"));
  CHECK(cacao::is_valid_identifier(
      "marking-tlp--00000000-0000-4000-8000-000000000001"));
  CHECK_FALSE(cacao::is_valid_identifier("action-11111111"));
  CHECK_FALSE(cacao::is_valid_identifier(
      "Action--11111111-2222-4333-8444-555555555555"));
  CHECK_FALSE(cacao::is_valid_identifier(
      "action--11111111-2222-4333-8444-55555555555X"));
  CHECK_FALSE(cacao::is_valid_identifier(
      "--11111111-2222-4333-8444-555555555555"));

  CHECK(cacao::is_valid_variable_name("__x__"));
  CHECK(cacao::is_valid_variable_name("__risk_score__"));
  CHECK_FALSE(cacao::is_valid_variable_name("____"));
  CHECK_FALSE(cacao::is_valid_variable_name("risk"));
  CHECK_FALSE(cacao::is_valid_variable_name("__risk"));
}

TEST_CASE("agent categorization drives task kinds downstream") {
  using cacao::AgentCategory;
  for (const char* human : {"individual", "group", "organization",
                            "location", "sector"})
    CHECK(cacao::category_of(human) == AgentCategory::HumanOrPlace);
  for (const char* device : {"http-api", "ssh", "security-category",
                             "net-address", "unknown-future-type"})
    CHECK(cacao::category_of(device) == AgentCategory::DeviceOrEquipment);
}

TEST_CASE("marking display text derivation") {
  std::string text = read_fixture("row15_markings.json");
  cacao::Playbook pb = cacao::parse_playbook(text);
  const cacao::DataMarking& tlp = pb.data_marking_definitions.begin()->second;
  CHECK(tlp.display_text == "TLP:AMBER");

  cacao::Json statement = {{"type", "marking-statement"},
                           {"statement", "Internal use only"}};
  auto parsed = cacao::markings_from_json(
      {{"marking-statement--00000000-0000-4000-8000-000000000001",
        statement}},
      "/data_marking_definitions");
  CHECK(parsed.begin()->second.display_text == "Internal use only");
}

TEST_CASE("validate reports each conformance defect class") {
  SUBCASE("versioning-missing") {
    cacao::Playbook pb = fixture_playbook("row01_playbook.json");
    pb.created.reset();
    CHECK(has_code(cacao::validate(pb), "versioning-missing"));
  }
  SUBCASE("versioning-order") {
    cacao::Playbook pb = fixture_playbook("row02_versioning.json");
    pb.created = Timestamp::from_millis(pb.modified->millis() + 1);
    CHECK(has_code(cacao::validate(pb), "versioning-order"));
  }
  SUBCASE("identifier-pattern") {
    cacao::Playbook pb = fixture_playbook("row01_playbook.json");
    pb.id = "playbook--not-a-uuid";
    CHECK(has_code(cacao::validate(pb), "identifier-pattern"));
  }
  SUBCASE("variable-name") {
    cacao::Playbook pb = fixture_playbook("row03_variables.json");
    auto node = pb.playbook_variables.begin()->second;
    pb.playbook_variables.clear();
    pb.playbook_variables["risk_score"] = node;
    CHECK(has_code(cacao::validate(pb), "variable-name"));
  }
  SUBCASE("empty-name") {
    cacao::Playbook pb = fixture_playbook("row06_action.json");
    pb.agent_definitions.begin()->second.name.clear();
    CHECK(has_code(cacao::validate(pb), "empty-name"));
  }
  SUBCASE("empty-commands") {
    cacao::Playbook pb = fixture_playbook("row06_action.json");
    auto& step = pb.workflow.at(
        "action--00000000-0000-4000-8000-000000000613");
    std::get<cacao::ActionPayload>(step.payload).commands.clear();
    CHECK(has_code(cacao::validate(pb), "empty-commands"));
  }
  SUBCASE("empty-condition") {
    cacao::Playbook pb = fixture_playbook("row09_if.json");
    auto& step = pb.workflow.at(
        "if-condition--00000000-0000-4000-8000-000000000913");
    std::get<cacao::IfConditionPayload>(step.payload).condition.clear();
    CHECK(has_code(cacao::validate(pb), "empty-condition"));
  }
  SUBCASE("empty-cases") {
    cacao::Playbook pb = fixture_playbook("row11_switch.json");
    auto& step = pb.workflow.at(
        "switch-condition--00000000-0000-4000-8000-000000001113");
    std::get<cacao::SwitchConditionPayload>(step.payload).cases.clear();
    CHECK(has_code(cacao::validate(pb), "empty-cases"));
  }
  SUBCASE("parallel-branches") {
    cacao::Playbook pb = fixture_playbook("row08_parallel.json");
    auto& step = pb.workflow.at(
        "parallel--00000000-0000-4000-8000-000000000813");
    std::get<cacao::ParallelPayload>(step.payload).next_steps.resize(1);
    CHECK(has_code(cacao::validate(pb), "parallel-branches"));
  }
  SUBCASE("start-count") {
    cacao::Playbook pb = fixture_playbook("row01_playbook.json");
    cacao::WorkflowStep extra =
        step_of(pb, "start--00000000-0000-4000-8000-000000000111");
    pb.workflow["start--00000000-0000-4000-8000-00000000f111"] = extra;
    CHECK(has_code(cacao::validate(pb), "start-count"));
  }
  SUBCASE("workflow-start-kind") {
    cacao::Playbook pb = fixture_playbook("row01_playbook.json");
    pb.workflow_start = "end--00000000-0000-4000-8000-000000000112";
    CHECK(has_code(cacao::validate(pb), "workflow-start-kind"));
  }
  SUBCASE("start-entry") {
    cacao::Playbook pb = fixture_playbook("row06_action.json");
    pb.workflow.at("action--00000000-0000-4000-8000-000000000615")
        .on_completion = "start--00000000-0000-4000-8000-000000000611";
    Violations violations = cacao::validate(pb);
    CHECK(has_code(violations, "start-entry"));
    CHECK(has_code(violations, "workflow-cycle"));
  }
  SUBCASE("dangling-reference on edges, agents, markings, extensions") {
    cacao::Playbook pb = fixture_playbook("row01_playbook.json");
    pb.workflow.at("start--00000000-0000-4000-8000-000000000111")
        .on_completion = "action--00000000-0000-4000-8000-0000000000ff";
    CHECK(has_code(cacao::validate(pb), "dangling-reference"));

    pb = fixture_playbook("row06_action.json");
    std::get<cacao::ActionPayload>(
        pb.workflow.at("action--00000000-0000-4000-8000-000000000614")
            .payload)
        .agent = "individual--00000000-0000-4000-8000-0000000000ff";
    CHECK(has_code(cacao::validate(pb), "dangling-reference"));

    pb = fixture_playbook("row15_markings.json");
    pb.data_marking_definitions.clear();
    CHECK(has_code(cacao::validate(pb), "dangling-reference"));

    pb = fixture_playbook("row14_extensions.json");
    pb.extension_definitions.clear();
    CHECK(has_code(cacao::validate(pb), "dangling-reference"));
  }
  SUBCASE("unreachable-step") {
    cacao::Playbook pb = fixture_playbook("row01_playbook.json");
    cacao::WorkflowStep island;
    island.payload = cacao::ActionPayload{};
    std::get<cacao::ActionPayload>(island.payload)
        .commands.push_back({"manual", "never reached", std::nullopt, {}});
    island.on_completion = "end--00000000-0000-4000-8000-000000000112";
    pb.workflow["action--00000000-0000-4000-8000-00000000ffff"] = island;
    Violations violations = cacao::validate(pb);
    CHECK(has_code(violations, "unreachable-step"));
    CHECK_FALSE(has_code(violations, "dangling-reference"));
  }
  SUBCASE("end-step-continuation") {
    cacao::Playbook pb = fixture_playbook("row08_parallel.json");
    pb.workflow.at("end--00000000-0000-4000-8000-000000000816")
        .on_completion = "end--00000000-0000-4000-8000-000000000812";
    CHECK(has_code(cacao::validate(pb), "end-step-continuation"));
  }
  SUBCASE("edge-conflict") {
    cacao::Playbook pb = fixture_playbook("row12_commands.json");
    pb.workflow.at("action--00000000-0000-4000-8000-000000001213")
        .on_success = "end--00000000-0000-4000-8000-000000001212";
    CHECK(has_code(cacao::validate(pb), "edge-conflict"));
  }
  SUBCASE("edge-style") {
    cacao::Playbook pb = fixture_playbook("row08_parallel.json");
    auto& fork = pb.workflow.at(
        "parallel--00000000-0000-4000-8000-000000000813");
    fork.on_success = fork.on_completion;
    fork.on_completion.reset();
    CHECK(has_code(cacao::validate(pb), "edge-style"));
  }
  SUBCASE("dangling-chain") {
    cacao::Playbook pb = fixture_playbook("row12_commands.json");
    pb.workflow.at("action--00000000-0000-4000-8000-000000001213")
        .on_completion.reset();
    CHECK(has_code(cacao::validate(pb), "dangling-chain"));
  }
  SUBCASE("workflow-cycle") {
    cacao::Playbook pb = fixture_playbook("row06_action.json");
    pb.workflow.at("action--00000000-0000-4000-8000-000000000615")
        .on_completion = "action--00000000-0000-4000-8000-000000000613";
    CHECK(has_code(cacao::validate(pb), "workflow-cycle"));
  }
  SUBCASE("signature-signee") {
    cacao::Playbook pb = fixture_playbook("row16_signatures.json");
    pb.signatures[0].signee = "Somebody Else";
    CHECK(has_code(cacao::validate(pb), "signature-signee"));
  }
}

TEST_CASE("reachability matches an independent BFS") {
  cacao::Playbook pb = fixture_playbook("row09_if.json");
  // Orphan the false branch: the conditional still names it, so it stays
  // reachable; orphan a fresh island instead and check both agree.
  cacao::WorkflowStep island;
  island.payload = cacao::ActionPayload{};
  std::get<cacao::ActionPayload>(island.payload)
      .commands.push_back({"manual", "unused", std::nullopt, {}});
  island.on_completion = "end--00000000-0000-4000-8000-000000000916";
  pb.workflow["action--00000000-0000-4000-8000-00000000aaaa"] = island;

  // Oracle: BFS over every edge kind from the start step.
  std::set<std::string> reached;
  std::vector<std::string> frontier{pb.workflow_start};
  while (!frontier.empty()) {
    std::string id = frontier.back();
    frontier.pop_back();
    if (!pb.workflow.contains(id) || !reached.insert(id).second) continue;
    const cacao::WorkflowStep& step = pb.workflow.at(id);
    for (const auto& edge : {step.on_completion, step.on_success,
                             step.on_failure})
      if (edge) frontier.push_back(*edge);
    if (const auto* p = std::get_if<cacao::ParallelPayload>(&step.payload))
      for (const auto& target : p->next_steps) frontier.push_back(target);
    if (const auto* p = std::get_if<cacao::IfConditionPayload>(&step.payload)) {
      frontier.push_back(p->on_true);
      if (p->on_false) frontier.push_back(*p->on_false);
    }
    if (const auto* p =
            std::get_if<cacao::WhileConditionPayload>(&step.payload))
      frontier.push_back(p->on_true);
    if (const auto* p =
            std::get_if<cacao::SwitchConditionPayload>(&step.payload))
      for (const auto& [label, target] : p->cases)
        frontier.push_back(target);
  }

  std::set<std::string> flagged;
  for (const Violation& v : cacao::validate(pb))
    if (v.code == "unreachable-step")
      flagged.insert(v.path.substr(std::string("/workflow/").size()));

  for (const auto& [id, step] : pb.workflow) {
    (void)step;
    CAPTURE(id);
    CHECK(reached.contains(id) == !flagged.contains(id));
  }
  CHECK(flagged.contains("action--00000000-0000-4000-8000-00000000aaaa"));
}

TEST_CASE("validate_document flags duplicates the parser collapses") {
  std::string dup_case = R"({
    "type": "playbook",
    "spec_version": "cacao-2.0",
    "id": "playbook--00000000-0000-4000-8000-000000001110",
    "name": "Tiered response",
    "created": "2026-01-05T09:00:00.000Z",
    "modified": "2026-01-05T09:00:00.000Z",
    "workflow_start": "start--00000000-0000-4000-8000-000000001111",
    "workflow": {
      "start--00000000-0000-4000-8000-000000001111": {
        "type": "start",
        "on_completion": "switch-condition--00000000-0000-4000-8000-000000001113"
      },
      "switch-condition--00000000-0000-4000-8000-000000001113": {
        "type": "switch-condition",
        "switch": "__tier__",
        "cases": {
          "high": "action--00000000-0000-4000-8000-000000001114",
          "high": "action--00000000-0000-4000-8000-000000001114"
        },
        "on_completion": "end--00000000-0000-4000-8000-000000001112"
      },
      "action--00000000-0000-4000-8000-000000001114": {
        "type": "action",
        "commands": [{ "type": "manual", "command": "Handle it" }],
        "on_completion": "end--00000000-0000-4000-8000-000000001116"
      },
      "end--00000000-0000-4000-8000-000000001116": { "type": "end" },
      "end--00000000-0000-4000-8000-000000001112": { "type": "end" }
    }
  })";
  Violations violations = cacao::validate_document(dup_case);
  REQUIRE(has_code(violations, "duplicate-case"));
  for (const Violation& v : violations)
    if (v.code == "duplicate-case")
      CHECK(v.path ==
            "/workflow/switch-condition--00000000-0000-4000-8000-"
            "000000001113/cases/high");

  SUBCASE("repeated ordinary members report duplicate-property") {
    std::string dup_name = read_fixture("row01_playbook.json");
    dup_name.insert(dup_name.find("  \"name\""),
                    "  \"name\": \"shadowed\",\n");
    Violations found = cacao::validate_document(dup_name);
    CHECK(has_code(found, "duplicate-property"));
  }

  SUBCASE("sibling objects may reuse keys") {
    for (const char* name : kRowFixtures)
      CHECK(cacao::validate_document(read_fixture(name)).empty());
  }
}

TEST_CASE("diff pinpoints differences by JSON pointer") {
  cacao::Playbook left = fixture_playbook("row12_commands.json");
  cacao::Playbook right = left;
  CHECK(cacao::diff(left, right).empty());

  right.name = "Renamed";
  auto renamed = cacao::diff(left, right);
  REQUIRE(renamed.size() == 1);
  CHECK(renamed[0].starts_with("/name: "));

  right = left;
  std::get<cacao::ActionPayload>(
      right.workflow.at("action--00000000-0000-4000-8000-000000001213")
          .payload)
      .commands[1]
      .content = "sudo isolate-host --id 43";
  auto changed = cacao::diff(left, right);
  REQUIRE(changed.size() == 1);
  CHECK(changed[0].starts_with(
      "/workflow/action--00000000-0000-4000-8000-000000001213/commands/1/"
      "command: "));

  SUBCASE("integer signedness is not a difference") {
    left.other_properties["priority"] = cacao::Json(7);
    right = left;
    right.other_properties["priority"] = cacao::Json(7u);
    CHECK(cacao::diff(left, right).empty());
    right.other_properties["priority"] = cacao::Json(7.0);
    CHECK(cacao::diff(left, right).size() == 1);
  }
}

TEST_CASE("inspect tallies the construct inventory in row order") {
  cacao::Playbook pb = fixture_playbook("row06_action.json");
  auto rows = cacao::inspect(pb);
  REQUIRE(rows.size() == 16);
  CHECK(rows[0] == std::pair<std::string, std::size_t>{"playbook", 1});
  CHECK(rows[1].second == 2);  // created + modified
  CHECK(rows[3] == std::pair<std::string, std::size_t>{"start", 1});
  CHECK(rows[4] == std::pair<std::string, std::size_t>{"end", 1});
  CHECK(rows[5] == std::pair<std::string, std::size_t>{"action", 3});
  CHECK(rows[11] == std::pair<std::string, std::size_t>{"command", 3});
  CHECK(rows[12] == std::pair<std::string, std::size_t>{"agent-target", 2});

  std::string report = cacao::format_inspect_report(pb);
  CHECK(report.starts_with("row 1 playbook: 1\n"));
  CHECK(report.find("row 6 action: 3\n") != std::string::npos);
  CHECK(report.find("row 16 signature: 0\n") != std::string::npos);
  CHECK(std::count(report.begin(), report.end(), '\n') == 16);
}

TEST_CASE("serialize refuses non-conformant playbooks") {
  cacao::Playbook pb = fixture_playbook("row01_playbook.json");
  pb.created.reset();
  CHECK_THROWS_AS(cacao::serialize_playbook(pb), cacao::CacaoError);
}
