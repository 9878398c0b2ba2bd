// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <string>

#include "cacaobpmn/bpmn/codec.hpp"
#include "cacaobpmn/cacao/codec.hpp"
#include "cacaobpmn/cacao/diff.hpp"
#include "cacaobpmn/cacao/validate.hpp"
#include "cacaobpmn/mapping/forward.hpp"
#include "cacaobpmn/mapping/reverse.hpp"
#include "test_support.hpp"

using namespace cacaobpmn;
using cacaobpmn::testing::read_fixture;

namespace {

mapping::ImportPolicy best_effort() {
  mapping::ImportPolicy policy;
  policy.mode = mapping::ImportMode::BestEffort;
  return policy;
}

const cacao::WorkflowStep* step_of_kind(const cacao::Playbook& pb,
                                        cacao::StepKind kind,
                                        std::size_t index = 0) {
  std::size_t seen = 0;
  for (const auto& [id, step] : pb.workflow)
    if (step.kind() == kind && seen++ == index) return &step;
  return nullptr;
}

std::size_t kind_count(const cacao::Playbook& pb, cacao::StepKind kind) {
  std::size_t n = 0;
  for (const auto& [id, step] : pb.workflow)
    if (step.kind() == kind) ++n;
  return n;
}

}  // namespace

TEST_CASE("uuid5 matches the RFC 4122 reference vector") {
  CHECK(mapping::uuid5("6ba7b810-9dad-11d1-80b4-00c04fd430c8",
                       "www.example.com") ==
        "2ed6657d-e927-568b-95e1-2665a8aea6a2");
  // Stable and distinct per name.
  CHECK(mapping::uuid5("6ba7b810-9dad-11d1-80b4-00c04fd430c8", "a") !=
        mapping::uuid5("6ba7b810-9dad-11d1-80b4-00c04fd430c8", "b"));
}

TEST_CASE("strict reverse inverts forward exactly") {
  for (const char* name :
       {"row06_action.json", "row08_parallel.json", "row09_if.json",
        "row10_while.json", "row11_switch.json", "row15_markings.json",
        "row16_signatures.json"}) {
    CAPTURE(name);
    cacao::Playbook pb = cacao::parse_playbook(read_fixture(name));
    cacao::Playbook back = mapping::map_to_cacao(mapping::map_to_bpmn(pb));
    CHECK(cacao::diff(pb, back).empty());
    CHECK(back == pb);
  }
}

TEST_CASE("gateway-pair and box encodings import identically") {
  for (const char* name : {"row08_parallel.json", "row09_if.json"}) {
    CAPTURE(name);
    cacao::Playbook pb = cacao::parse_playbook(read_fixture(name));

    mapping::MappingOptions boxed;
    boxed.parallel_style = mapping::BranchStyle::SubProcess;
    boxed.conditional_style = mapping::BranchStyle::SubProcess;

    cacao::Playbook from_pair =
        mapping::map_to_cacao(mapping::map_to_bpmn(pb));
    cacao::Playbook from_box =
        mapping::map_to_cacao(mapping::map_to_bpmn(pb, boxed));
    CHECK(from_pair == from_box);
    CHECK(from_pair == pb);
  }
}

TEST_CASE("strict mode refuses models without conversion metadata") {
  bpmn::Definitions defs =
      bpmn::parse_definitions(read_fixture("foreign_chain.bpmn"));
  CHECK_THROWS_AS(mapping::map_to_cacao(defs), mapping::MappingError);
}

TEST_CASE("best-effort imports a foreign task chain cleanly") {
  bpmn::Definitions defs =
      bpmn::parse_definitions(read_fixture("foreign_chain.bpmn"));
  cacao::Playbook pb = mapping::map_to_cacao(defs, best_effort());

  CHECK(cacao::validate(pb).empty());
  CHECK(kind_count(pb, cacao::StepKind::Start) == 1);
  CHECK(kind_count(pb, cacao::StepKind::Action) == 3);
  CHECK(kind_count(pb, cacao::StepKind::End) == 1);
  CHECK(pb.workflow.size() == 5);
  CHECK(pb.name == "Incident response");
  CHECK(pb.created == Timestamp::from_millis(1767225600000));
  CHECK(pb.modified == pb.created);

  // The task name becomes a manual command, keeping intent readable.
  const cacao::WorkflowStep* action =
      step_of_kind(pb, cacao::StepKind::Action);
  REQUIRE(action != nullptr);
  const auto& payload = std::get<cacao::ActionPayload>(action->payload);
  REQUIRE(payload.commands.size() == 1);
  CHECK(payload.commands[0].command_type == "manual");

  SUBCASE("importing twice yields identical documents") {
    cacao::Playbook again = mapping::map_to_cacao(defs, best_effort());
    CHECK(again == pb);
    CHECK(cacao::serialize_playbook(again) == cacao::serialize_playbook(pb));
  }
}

TEST_CASE("best-effort specializes agents by task kind") {
  bpmn::Definitions defs = bpmn::parse_definitions(R"(<?xml version="1.0"?>
<definitions xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL"
             targetNamespace="urn:example:tasks">
  <process id="p" name="Mixed tasks">
    <userTask id="ut" name="Approve the change"/>
    <serviceTask id="st" name="Push the block rule"/>
    <sequenceFlow id="f1" sourceRef="ut" targetRef="st"/>
  </process>
</definitions>)");
  cacao::Playbook pb = mapping::map_to_cacao(defs, best_effort());
  CHECK(cacao::validate(pb).empty());

  std::string user_agent_type, service_agent_type;
  for (const auto& [id, step] : pb.workflow) {
    const auto* action = std::get_if<cacao::ActionPayload>(&step.payload);
    if (action == nullptr) continue;
    REQUIRE_FALSE(action->agent.empty());
    const cacao::AgentTarget& agent = pb.agent_definitions.at(action->agent);
    if (step.name == "Approve the change") user_agent_type = agent.at_type;
    if (step.name == "Push the block rule") service_agent_type = agent.at_type;
  }
  CHECK(user_agent_type == "individual");
  CHECK(service_agent_type == "http-api");
}

TEST_CASE("best-effort refines a bare exclusive gateway by its flows") {
  const char* labeled = R"(<?xml version="1.0"?>
<definitions xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL"
             targetNamespace="urn:example:xg">
  <process id="p" name="Branching">
    <task id="t0" name="Triage"/>
    <exclusiveGateway id="g1" gatewayDirection="Diverging"/>
    <task id="t1" name="Contain"/>
    <task id="t2" name="Dismiss"/>
    <exclusiveGateway id="g2" gatewayDirection="Converging"/>
    <task id="t3" name="Report"/>
    <sequenceFlow id="f0" sourceRef="t0" targetRef="g1"/>
    <sequenceFlow id="f1" name="true" sourceRef="g1" targetRef="t1"/>
    <sequenceFlow id="f2" name="false" sourceRef="g1" targetRef="t2"/>
    <sequenceFlow id="f3" sourceRef="t1" targetRef="g2"/>
    <sequenceFlow id="f4" sourceRef="t2" targetRef="g2"/>
    <sequenceFlow id="f5" sourceRef="g2" targetRef="t3"/>
  </process>
</definitions>)";
  cacao::Playbook pb =
      mapping::map_to_cacao(bpmn::parse_definitions(labeled), best_effort());
  CHECK(cacao::validate(pb).empty());
  CHECK(kind_count(pb, cacao::StepKind::IfCondition) == 1);
  CHECK(kind_count(pb, cacao::StepKind::SwitchCondition) == 0);
  const cacao::WorkflowStep* branch =
      step_of_kind(pb, cacao::StepKind::IfCondition);
  const auto& payload = std::get<cacao::IfConditionPayload>(branch->payload);
  CHECK_FALSE(payload.on_true.empty());
  CHECK(payload.on_false.has_value());

  // Unlabeled flows leave no basis for an if: the gateway imports as a
  // switch with case labels derived from the flows.
  const char* unlabeled = R"(<?xml version="1.0"?>
<definitions xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL"
             targetNamespace="urn:example:xg">
  <process id="p" name="Routing">
    <task id="t0" name="Classify"/>
    <exclusiveGateway id="g1" gatewayDirection="Diverging"/>
    <task id="t1" name="Queue A"/>
    <task id="t2" name="Queue B"/>
    <exclusiveGateway id="g2" gatewayDirection="Converging"/>
    <task id="t3" name="Archive"/>
    <sequenceFlow id="f0" sourceRef="t0" targetRef="g1"/>
    <sequenceFlow id="f1" name="bulk" sourceRef="g1" targetRef="t1"/>
    <sequenceFlow id="f2" name="urgent" sourceRef="g1" targetRef="t2"/>
    <sequenceFlow id="f3" sourceRef="t1" targetRef="g2"/>
    <sequenceFlow id="f4" sourceRef="t2" targetRef="g2"/>
    <sequenceFlow id="f5" sourceRef="g2" targetRef="t3"/>
  </process>
</definitions>)";
  cacao::Playbook routed = mapping::map_to_cacao(
      bpmn::parse_definitions(unlabeled), best_effort());
  CHECK(cacao::validate(routed).empty());
  CHECK(kind_count(routed, cacao::StepKind::SwitchCondition) == 1);
  const cacao::WorkflowStep* chooser =
      step_of_kind(routed, cacao::StepKind::SwitchCondition);
  const auto& cases =
      std::get<cacao::SwitchConditionPayload>(chooser->payload).cases;
  CHECK(cases.contains("bulk"));
  CHECK(cases.contains("urgent"));
}

TEST_CASE("strict rejects extra processes; parse records them") {
  const char* two = R"(<?xml version="1.0"?>
<definitions xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL"
             targetNamespace="urn:example:two">
  <process id="first" name="First">
    <task id="a" name="Only step"/>
  </process>
  <process id="second" name="Second">
    <task id="b" name="Ignored"/>
  </process>
</definitions>)";
  bpmn::Definitions defs = bpmn::parse_definitions(two);
  CHECK(defs.process.id == "first");
  CHECK(defs.ignored_process_ids == std::vector<std::string>{"second"});

  CHECK_THROWS_AS(mapping::map_to_cacao(defs), mapping::MappingError);
  cacao::Playbook pb = mapping::map_to_cacao(defs, best_effort());
  CHECK(cacao::validate(pb).empty());
  CHECK(kind_count(pb, cacao::StepKind::Action) == 1);
}

TEST_CASE("synthesized gateways and ids never leak into the playbook") {
  cacao::Playbook pb =
      cacao::parse_playbook(read_fixture("row08_parallel.json"));
  cacao::Playbook back = mapping::map_to_cacao(mapping::map_to_bpmn(pb));
  for (const auto& [id, step] : back.workflow) {
    (void)step;
    CAPTURE(id);
    CHECK(pb.workflow.contains(id));
  }
}

TEST_CASE("corrupt metadata is reported, not guessed at, in strict mode") {
  cacao::Playbook pb =
      cacao::parse_playbook(read_fixture("row09_if.json"));
  bpmn::Definitions defs = mapping::map_to_bpmn(pb);
  for (bpmn::FlowNode& node : defs.process.flow_nodes)
    node.extensions.erase(
        xml::QName{std::string(bpmn::kCacaoNs), "step-type"});
  CHECK_THROWS_AS(mapping::map_to_cacao(defs), mapping::MappingError);
}
