// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "cacaobpmn/bpmn/well_formed.hpp"
#include "cacaobpmn/cacao/codec.hpp"
#include "cacaobpmn/cacao/validate.hpp"
#include "cacaobpmn/mapping/attributes.hpp"
#include "cacaobpmn/mapping/error.hpp"
#include "cacaobpmn/mapping/forward.hpp"
#include "test_support.hpp"

using namespace cacaobpmn;
using cacaobpmn::testing::annotation_texts;
using cacaobpmn::testing::census_of;
using cacaobpmn::testing::read_fixture;
using mapping::attr::kAgent;
using mapping::cacao_attr;

namespace {

bpmn::Definitions map_fixture(std::string_view name,
                              const mapping::MappingOptions& options = {}) {
  cacao::Playbook pb = cacao::parse_playbook(read_fixture(name));
  bpmn::Definitions defs = mapping::map_to_bpmn(pb, options);
  CHECK(bpmn::check_well_formed(defs).empty());
  return defs;
}

int count_prefixed(const std::vector<std::string>& texts,
                   std::string_view prefix) {
  return static_cast<int>(
      std::count_if(texts.begin(), texts.end(), [&](const std::string& t) {
        return t.starts_with(prefix);
      }));
}

}  // namespace

TEST_CASE("playbook becomes the process, keeping identity") {
  bpmn::Definitions defs = map_fixture("row01_playbook.json");
  CHECK(defs.process.id == "playbook--00000000-0000-4000-8000-000000000110");
  CHECK(defs.process.name == "Credential theft response");
  CHECK(defs.process.extensions.at(cacao_attr("description")) ==
        "Contain and document a confirmed credential theft.");
}

TEST_CASE("versioning metadata rides on extension attributes") {
  bpmn::Definitions defs = map_fixture("row02_versioning.json");
  const bpmn::ExtensionBag& bag = defs.process.extensions;
  CHECK(bag.at(cacao_attr("spec-version")) == "cacao-2.0");
  CHECK(bag.at(cacao_attr("created")) == "2026-01-05T09:00:00.000Z");
  CHECK(bag.at(cacao_attr("modified")) == "2026-02-10T16:45:30.500Z");
}

TEST_CASE("variables become item definitions plus process properties") {
  bpmn::Definitions defs = map_fixture("row03_variables.json");
  REQUIRE(defs.item_definitions.size() == 1);
  REQUIRE(defs.process.properties.size() == 1);
  const bpmn::ProcessProperty& property = defs.process.properties[0];
  CHECK(property.name == "__risk_score__");
  CHECK(property.item_subject_ref == defs.item_definitions[0].id);
  CHECK(defs.item_definitions[0].structure_ref.find("integer") !=
        std::string::npos);
  CHECK(property.extensions.at(cacao_attr("value")) == "0");
}

TEST_CASE("start and end steps become plain tasks, not events") {
  bpmn::Definitions defs = map_fixture("row04_start.json");
  const bpmn::FlowNode* start = testing::find_node(
      defs.process, "start--00000000-0000-4000-8000-000000000411");
  REQUIRE(start != nullptr);
  CHECK(std::get<bpmn::TaskPayload>(start->payload).kind ==
        bpmn::TaskKind::Abstract);
  CHECK(start->name == "Kickoff");
  CHECK(start->extensions.at(cacao_attr("step-type")) == "start");

  bpmn::Definitions end_defs = map_fixture("row05_end.json");
  const bpmn::FlowNode* end = testing::find_node(
      end_defs.process, "end--00000000-0000-4000-8000-000000000512");
  REQUIRE(end != nullptr);
  CHECK(std::get<bpmn::TaskPayload>(end->payload).kind ==
        bpmn::TaskKind::Abstract);
  CHECK(end->extensions.at(cacao_attr("step-type")) == "end");
}

TEST_CASE("agent category picks the task specialization") {
  bpmn::Definitions defs = map_fixture("row06_action.json");
  auto kind_of = [&](const char* id) {
    const bpmn::FlowNode* node = testing::find_node(defs.process, id);
    REQUIRE(node != nullptr);
    return std::get<bpmn::TaskPayload>(node->payload).kind;
  };
  // No agent: automation by default.
  CHECK(kind_of("action--00000000-0000-4000-8000-000000000613") ==
        bpmn::TaskKind::Service);
  // Individual agent: user task.
  CHECK(kind_of("action--00000000-0000-4000-8000-000000000614") ==
        bpmn::TaskKind::User);
  // HTTP API agent: service task.
  CHECK(kind_of("action--00000000-0000-4000-8000-000000000615") ==
        bpmn::TaskKind::Service);

  const bpmn::FlowNode* with_agent = testing::find_node(
      defs.process, "action--00000000-0000-4000-8000-000000000614");
  CHECK(with_agent->extensions.at(cacao_attr(kAgent)) ==
        "individual--00000000-0000-4000-8000-000000000631");
  CHECK(defs.process.extensions.contains(cacao_attr("agent-definitions")));
}

TEST_CASE("playbook-action becomes a call activity") {
  bpmn::Definitions defs = map_fixture("row07_playbook_action.json");
  testing::Census c = census_of(defs.process);
  CHECK(c.call_activity == 1);
  const bpmn::FlowNode* call = testing::find_node(
      defs.process, "playbook-action--00000000-0000-4000-8000-000000000713");
  REQUIRE(call != nullptr);
  CHECK(std::get<bpmn::CallActivityPayload>(call->payload).called_element ==
        "playbook--99999999-9999-4999-8999-999999999999");
}

TEST_CASE("parallel renders as a gateway pair or a sub-process box") {
  bpmn::Definitions pair = map_fixture("row08_parallel.json");
  testing::Census c = census_of(pair.process);
  CHECK(c.pg_diverging == 1);
  CHECK(c.pg_converging == 1);
  CHECK(c.sub_process == 0);

  mapping::MappingOptions boxed;
  boxed.parallel_style = mapping::BranchStyle::SubProcess;
  bpmn::Definitions box = map_fixture("row08_parallel.json", boxed);
  testing::Census cb = census_of(box.process);
  CHECK(cb.sub_process == 1);
  CHECK(cb.pg_diverging == 1);  // the pair moves inside the box
  CHECK(cb.pg_converging == 1);

  // The box interior fork/join are synthesized, to vanish on reverse.
  const bpmn::FlowNode* boxed_step = testing::find_node(
      box.process, "parallel--00000000-0000-4000-8000-000000000813");
  REQUIRE(boxed_step != nullptr);
  const auto& sub = std::get<bpmn::SubProcessPayload>(boxed_step->payload);
  int synthesized = 0;
  for (const bpmn::FlowNode& inner : sub.nodes)
    if (inner.extensions.contains(cacao_attr("synthesized"))) ++synthesized;
  CHECK(synthesized >= 1);
}

TEST_CASE("if-condition renders as an exclusive pair with labeled flows") {
  bpmn::Definitions defs = map_fixture("row09_if.json");
  testing::Census c = census_of(defs.process);
  CHECK(c.xg_diverging == 1);
  CHECK(c.xg_converging == 1);

  bool saw_true = false, saw_false = false;
  for (const bpmn::SequenceFlow& flow : defs.process.sequence_flows) {
    if (flow.source_ref !=
        "if-condition--00000000-0000-4000-8000-000000000913")
      continue;
    auto kind = flow.extensions.find(cacao_attr("edge-kind"));
    REQUIRE(kind != flow.extensions.end());
    if (kind->second == "true") {
      saw_true = true;
      CHECK(flow.name == "true");
      REQUIRE(flow.condition.has_value());
      CHECK(flow.condition->text == "__infected__ = true");
      CHECK(flow.condition->language == bpmn::kConditionLanguage);
    } else if (kind->second == "false") {
      saw_false = true;
      CHECK_FALSE(flow.condition.has_value());
    }
  }
  CHECK(saw_true);
  CHECK(saw_false);

  mapping::MappingOptions boxed;
  boxed.conditional_style = mapping::BranchStyle::SubProcess;
  bpmn::Definitions box = map_fixture("row09_if.json", boxed);
  CHECK(census_of(box.process).sub_process == 1);
}

TEST_CASE("while-condition becomes a looping sub-process") {
  bpmn::Definitions defs = map_fixture("row10_while.json");
  testing::Census c = census_of(defs.process);
  CHECK(c.sub_process == 1);
  CHECK(c.sub_process_loop == 1);
  const bpmn::FlowNode* loop = testing::find_node(
      defs.process, "while-condition--00000000-0000-4000-8000-000000001013");
  REQUIRE(loop != nullptr);
  const auto& sub = std::get<bpmn::SubProcessPayload>(loop->payload);
  REQUIRE(sub.loop.has_value());
  CHECK(sub.loop->condition_text == "__queue_depth__ > 0");
  CHECK(sub.loop->test_before);
}

TEST_CASE("switch-condition renders case-labeled flows into a join") {
  bpmn::Definitions defs = map_fixture("row11_switch.json");
  testing::Census c = census_of(defs.process);
  CHECK(c.xg_diverging == 1);
  CHECK(c.xg_converging == 1);

  std::vector<std::string> labels;
  for (const bpmn::SequenceFlow& flow : defs.process.sequence_flows) {
    auto label = flow.extensions.find(cacao_attr("case-label"));
    if (label == flow.extensions.end()) continue;
    labels.push_back(label->second);
    CHECK(flow.extensions.at(cacao_attr("edge-kind")) == "case");
    CHECK(flow.name == label->second);
  }
  std::sort(labels.begin(), labels.end());
  CHECK(labels == std::vector<std::string>{"high", "low"});
}

TEST_CASE("commands are mirrored as Command Data annotations") {
  bpmn::Definitions defs = map_fixture("row12_commands.json");
  std::vector<std::string> texts = annotation_texts(defs.process);
  CHECK(count_prefixed(texts, "Command Data\n") == 2);
  CHECK(std::any_of(texts.begin(), texts.end(), [](const std::string& t) {
    return t == "Command Data\nmanual: Confirm the alert is still firing";
  }));
  CHECK(std::any_of(texts.begin(), texts.end(), [](const std::string& t) {
    return t == "Command Data\nssh: sudo isolate-host --id 42";
  }));

  // Annotations associate back to the action's task.
  int to_action = 0;
  for (const bpmn::Association& assoc : defs.process.associations)
    if (assoc.source_ref ==
        "action--00000000-0000-4000-8000-000000001213")
      ++to_action;
  CHECK(to_action >= 2);
}

TEST_CASE("agent and target mirror as Agent-Target Data annotations") {
  bpmn::Definitions defs = map_fixture("row13_agent_target.json");
  std::vector<std::string> texts = annotation_texts(defs.process);
  REQUIRE(count_prefixed(texts, "Agent-Target Data\n") == 1);
  auto it = std::find_if(texts.begin(), texts.end(), [](const std::string& t) {
    return t.starts_with("Agent-Target Data\n");
  });
  CHECK(it->find("agent: SOC analyst (individual)") != std::string::npos);
  CHECK(it->find("target: SIEM search API (http-api)") != std::string::npos);
}

TEST_CASE("extension definitions ride extension attributes") {
  bpmn::Definitions defs = map_fixture("row14_extensions.json");
  const std::string& encoded =
      defs.process.extensions.at(cacao_attr("extension-definitions"));
  cacao::Json decoded = cacao::Json::parse(encoded);
  CHECK(decoded.contains(
      "extension-definition--00000000-0000-4000-8000-000000001471"));

  const bpmn::FlowNode* action = testing::find_node(
      defs.process, "action--00000000-0000-4000-8000-000000001413");
  REQUIRE(action != nullptr);
  CHECK(action->extensions.contains(cacao_attr("step-extensions")));
}

TEST_CASE("markings wrap the process in a labeled group") {
  bpmn::Definitions defs = map_fixture("row15_markings.json");
  REQUIRE(defs.process.groups.size() == 1);
  REQUIRE(defs.categories.size() == 1);
  CHECK(defs.categories[0].value == "Data Markings");
  CHECK(defs.process.groups[0].category_value_ref ==
        defs.categories[0].value_id);
  std::vector<std::string> texts = annotation_texts(defs.process);
  CHECK(count_prefixed(texts, "Data Markings\n") == 1);
  auto it = std::find_if(texts.begin(), texts.end(), [](const std::string& t) {
    return t.starts_with("Data Markings\n");
  });
  CHECK(it->find("TLP:AMBER") != std::string::npos);
}

TEST_CASE("signatures wrap the process in a labeled group") {
  bpmn::Definitions defs = map_fixture("row16_signatures.json");
  REQUIRE(defs.process.groups.size() == 1);
  REQUIRE(defs.categories.size() == 1);
  CHECK(defs.categories[0].value == "Digital Signatures");
  std::vector<std::string> texts = annotation_texts(defs.process);
  REQUIRE(count_prefixed(texts, "Digital Signatures\n") == 1);
  auto it = std::find_if(texts.begin(), texts.end(), [](const std::string& t) {
    return t.starts_with("Digital Signatures\n");
  });
  CHECK(it->find("Example SOC") != std::string::npos);
  CHECK(defs.process.extensions.contains(cacao_attr("signatures")));
}

TEST_CASE("success and failure edges keep their kind on flows") {
  cacao::Playbook pb =
      cacao::parse_playbook(read_fixture("row12_commands.json"));
  auto& action = pb.workflow.at(
      "action--00000000-0000-4000-8000-000000001213");
  cacao::WorkflowStep fallback;
  fallback.payload = cacao::EndPayload{};
  pb.workflow["end--00000000-0000-4000-8000-0000000012ff"] = fallback;
  action.on_success = action.on_completion;
  action.on_failure = "end--00000000-0000-4000-8000-0000000012ff";
  action.on_completion.reset();
  REQUIRE(cacao::validate(pb).empty());

  bpmn::Definitions defs = mapping::map_to_bpmn(pb);
  bool saw_success = false, saw_failure = false;
  for (const bpmn::SequenceFlow& flow : defs.process.sequence_flows) {
    auto kind = flow.extensions.find(cacao_attr("edge-kind"));
    if (kind == flow.extensions.end()) continue;
    if (kind->second == "success") {
      saw_success = true;
      CHECK(flow.name == "success");
    }
    if (kind->second == "failure") {
      saw_failure = true;
      CHECK(flow.name == "failure");
    }
  }
  CHECK(saw_success);
  CHECK(saw_failure);
}

TEST_CASE("mapping refuses non-conformant playbooks") {
  cacao::Playbook pb =
      cacao::parse_playbook(read_fixture("row01_playbook.json"));
  pb.created.reset();
  CHECK_THROWS_AS(mapping::map_to_bpmn(pb), mapping::MappingError);
}
