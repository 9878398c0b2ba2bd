// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cacaobpmn/cacao/model.hpp"
#include "cacaobpmn/timestamp.hpp"

namespace cacaobpmn::testing {

/// Deterministic random playbooks for the round-trip and conformance
/// suites. Every playbook passes validate() and stays inside the mapped
/// subset: tree-shaped branching, nesting depth of at most three, at most
/// twenty-five workflow steps, all eight step kinds and both edge styles
/// reachable.
class PlaybookGenerator {
 public:
  explicit PlaybookGenerator(std::uint64_t seed) : rng_(seed) {}

  cacao::Playbook generate() {
    pb_ = {};
    agent_ids_.clear();
    target_ids_.clear();
    extension_ids_.clear();
    budget_ = 3 + static_cast<int>(pick(22));
    reserved_ = 0;

    pb_.id = make_id("playbook");
    pb_.name = "Generated playbook " + hex(8);
    if (chance(40)) pb_.description = "Exercises the mapped construct set.";
    std::int64_t created = 1700000000000 + static_cast<std::int64_t>(
                                               pick(3'000'000'000));
    pb_.created = Timestamp::from_millis(created);
    pb_.modified = Timestamp::from_millis(
        created + static_cast<std::int64_t>(pick(100'000'000)));
    if (chance(25)) pb_.other_properties["priority"] = int(pick(100));
    if (chance(20))
      pb_.other_properties["labels"] =
          cacao::Json::array({"generated", "corpus"});

    make_definitions();

    std::string start_id = make_id("start");
    cacao::WorkflowStep start;
    start.payload = cacao::StartPayload{};
    if (chance(30)) start.name = "Start";
    ++reserved_;
    start.on_completion = build_chain(0);
    pb_.workflow.emplace(start_id, std::move(start));
    pb_.workflow_start = start_id;
    return std::move(pb_);
  }

 private:
  std::size_t pick(std::size_t n) { return n == 0 ? 0 : rng_() % n; }
  bool chance(int percent) {
    return pick(100) < static_cast<std::size_t>(percent);
  }

  std::string hex(int digits) {
    static constexpr char kAlphabet[] = "0123456789abcdef";
    std::string out;
    for (int i = 0; i < digits; ++i) out += kAlphabet[pick(16)];
    return out;
  }

  std::string make_id(const std::string& type) {
    return type + "--" + hex(8) + "-" + hex(4) + "-" + hex(4) + "-" + hex(4) +
           "-" + hex(12);
  }

  void make_definitions() {
    static const char* kAgentTypes[] = {"individual", "group", "organization",
                                        "security-category"};
    static const char* kTargetTypes[] = {"http-api", "ssh", "net-address",
                                         "security-category"};
    std::size_t agents = pick(3);
    for (std::size_t i = 0; i < agents; ++i) {
      cacao::AgentTarget agent;
      agent.at_type = kAgentTypes[pick(4)];
      agent.name = "Agent " + std::to_string(i);
      if (chance(30))
        agent.other_properties["x_contact"] =
            "agent" + std::to_string(i) + "@example.org";
      agent_ids_.push_back(make_id(agent.at_type));
      pb_.agent_definitions.emplace(agent_ids_.back(), std::move(agent));
    }
    std::size_t targets = pick(3);
    for (std::size_t i = 0; i < targets; ++i) {
      cacao::AgentTarget target;
      target.at_type = kTargetTypes[pick(4)];
      target.name = "Target " + std::to_string(i);
      target_ids_.push_back(make_id(target.at_type));
      pb_.target_definitions.emplace(target_ids_.back(), std::move(target));
    }
    std::size_t markings = pick(3);
    for (std::size_t i = 0; i < markings; ++i) {
      cacao::DataMarking marking;
      if (chance(60)) {
        static const char* kLevels[] = {"TLP:RED", "TLP:AMBER", "TLP:GREEN",
                                        "TLP:CLEAR"};
        std::string level = kLevels[pick(4)];
        marking.marking_type = "marking-tlp";
        marking.display_text = level;
        marking.other_properties["tlp_level"] = level;
      } else {
        std::string statement = "Internal use only (" + hex(4) + ")";
        marking.marking_type = "marking-statement";
        marking.display_text = statement;
        marking.other_properties["statement"] = statement;
      }
      marking.id = make_id(marking.marking_type);
      pb_.markings.push_back(marking.id);
      pb_.data_marking_definitions.emplace(marking.id, std::move(marking));
    }
    if (chance(35)) {
      cacao::ExtensionDefinition definition;
      definition.id = make_id("extension-definition");
      definition.name = "Tracking extension";
      if (chance(50))
        definition.schema_ref = "https://example.org/schemas/tracking.json";
      if (chance(50)) definition.version = "1.0.0";
      extension_ids_.push_back(definition.id);
      pb_.extension_definitions.emplace(definition.id, std::move(definition));
    }
    if (chance(30)) {
      cacao::Signature signature;
      signature.signee = "Example SOC";
      signature.record = {{"type", "jss"},
                          {"id", make_id("jss")},
                          {"signee", "Example SOC"},
                          {"value", hex(32)}};
      pb_.signatures.push_back(std::move(signature));
    }
    std::size_t variables = pick(3);
    for (std::size_t i = 0; i < variables; ++i) {
      static const char* kVarTypes[] = {"string", "integer", "ipv4-addr"};
      cacao::Variable variable;
      variable.var_type = kVarTypes[pick(3)];
      if (chance(60)) variable.value = "value-" + hex(4);
      if (chance(30)) variable.description = "Generated variable";
      variable.constant = chance(25);
      variable.external = chance(25);
      pb_.playbook_variables.emplace(
          "__playbook_var_" + std::to_string(i) + "__", std::move(variable));
    }
  }

  cacao::ActionPayload make_action() {
    static const char* kCommandTypes[] = {"manual", "bash", "ssh", "http-api",
                                          "caldera-cmd"};
    cacao::ActionPayload payload;
    std::size_t commands = 1 + pick(2);
    for (std::size_t i = 0; i < commands; ++i) {
      cacao::Command command;
      command.command_type = kCommandTypes[pick(5)];
      command.content = "run task " + hex(6);
      if (chance(25)) command.description = "Generated command";
      if (chance(10)) command.other_properties["x_retries"] = int(pick(5));
      payload.commands.push_back(std::move(command));
    }
    if (!agent_ids_.empty() && chance(50))
      payload.agent = agent_ids_[pick(agent_ids_.size())];
    if (!target_ids_.empty() && chance(40))
      payload.targets.push_back(target_ids_[pick(target_ids_.size())]);
    return payload;
  }

  void decorate(cacao::WorkflowStep& step) {
    if (chance(30)) step.name = "Step " + hex(4);
    if (chance(25)) step.description = "Generated step";
    if (chance(15)) step.delay = static_cast<std::int64_t>(pick(5000));
    if (chance(15))
      step.timeout = static_cast<std::int64_t>(1000 + pick(60000));
    if (chance(12)) {
      cacao::Variable variable;
      variable.var_type = "string";
      variable.value = "local-" + hex(4);
      step.step_variables.emplace("__step_var_0__", std::move(variable));
    }
    if (!extension_ids_.empty() && chance(15))
      step.step_extensions[extension_ids_.front()] = {
          {"x_sla_minutes", int(pick(120))}};
    if (chance(12))
      step.other_properties["x_owner"] = "tier-" + std::to_string(1 + pick(3));
  }

  std::string condition_text() {
    return "__playbook_var_0__:value = '" + hex(4) + "'";
  }

  // budget_ counts steps this playbook may still create; reserved_ counts
  // end steps owed to chains that were promised but not built yet. Every
  // creation keeps budget_ >= reserved_, so a promised chain can always
  // materialize at least its end step and the step cap holds exactly.
  int spare() const { return budget_ - reserved_; }

  // One linear run of steps ending in its own end step. Branching steps fork
  // into sub-chains and continue within this chain afterwards. The caller
  // must have reserved one step for the chain's end.
  std::string build_chain(int depth) {
    --reserved_;
    --budget_;
    std::vector<std::pair<std::string, cacao::WorkflowStep>> steps;
    std::size_t attempts = pick(4);
    for (std::size_t i = 0; i < attempts && spare() >= 1; ++i)
      steps.push_back(make_step(depth));

    std::string end_id = make_id("end");
    cacao::WorkflowStep end;
    end.payload = cacao::EndPayload{};
    if (chance(20)) end.name = "Done";

    std::string next = end_id;
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
      cacao::WorkflowStep& step = it->second;
      if (step.kind() == cacao::StepKind::Action && chance(25)) {
        step.on_success = next;
        if (spare() >= 1 && chance(70)) {
          ++reserved_;
          step.on_failure = build_chain(depth);
        }
      } else {
        step.on_completion = next;
      }
      next = it->first;
    }

    pb_.workflow.emplace(end_id, std::move(end));
    for (auto& [id, step] : steps) pb_.workflow.emplace(id, std::move(step));
    return next;
  }

  // Requires spare() >= 1 and consumes one step for itself; branch chains
  // are reserved before they are built.
  std::pair<std::string, cacao::WorkflowStep> make_step(int depth) {
    cacao::WorkflowStep step;
    decorate(step);

    int roll = static_cast<int>(pick(100));
    bool forks_allowed = depth < 3 && spare() >= 7;
    if (!forks_allowed) roll = roll % 55;
    --budget_;

    if (roll < 45) {
      step.payload = make_action();
      return {make_id("action"), std::move(step)};
    }
    if (roll < 55) {
      cacao::PlaybookActionPayload payload;
      payload.playbook_id = make_id("playbook");
      if (chance(30))
        payload.playbook_version = Timestamp::from_millis(1700000000000);
      step.payload = std::move(payload);
      return {make_id("playbook-action"), std::move(step)};
    }
    if (roll < 68) {
      std::size_t branches = 2 + pick(2);
      cacao::ParallelPayload payload;
      reserved_ += static_cast<int>(branches);
      for (std::size_t i = 0; i < branches; ++i)
        payload.next_steps.push_back(build_chain(depth + 1));
      step.payload = std::move(payload);
      return {make_id("parallel"), std::move(step)};
    }
    if (roll < 81) {
      cacao::IfConditionPayload payload;
      payload.condition = condition_text();
      bool with_else = chance(55);
      reserved_ += with_else ? 2 : 1;
      payload.on_true = build_chain(depth + 1);
      if (with_else) payload.on_false = build_chain(depth + 1);
      step.payload = std::move(payload);
      return {make_id("if-condition"), std::move(step)};
    }
    if (roll < 92) {
      static const char* kLabels[] = {"low", "medium", "high", "critical"};
      std::size_t cases = 1 + pick(3);
      cacao::SwitchConditionPayload payload;
      payload.switch_expression = condition_text();
      reserved_ += static_cast<int>(cases);
      for (std::size_t i = 0; i < cases; ++i)
        payload.cases.emplace(kLabels[i], build_chain(depth + 1));
      step.payload = std::move(payload);
      return {make_id("switch-condition"), std::move(step)};
    }
    cacao::WhileConditionPayload payload;
    payload.condition = condition_text();
    ++reserved_;
    payload.on_true = build_chain(depth + 1);
    step.payload = std::move(payload);
    return {make_id("while-condition"), std::move(step)};
  }

  std::mt19937_64 rng_;
  cacao::Playbook pb_;
  std::vector<std::string> agent_ids_;
  std::vector<std::string> target_ids_;
  std::vector<std::string> extension_ids_;
  int budget_ = 0;
  int reserved_ = 0;
};

}  // namespace cacaobpmn::testing
