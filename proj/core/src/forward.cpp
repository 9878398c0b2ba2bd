// SPDX-License-Identifier: Apache-2.0
#include "cacaobpmn/mapping/forward.hpp"

#include <set>

#include "cacaobpmn/cacao/codec.hpp"
#include "cacaobpmn/cacao/validate.hpp"
#include "cacaobpmn/mapping/attributes.hpp"

namespace cacaobpmn::mapping {

namespace {

using bpmn::ExtensionBag;
using bpmn::FlowNode;
using bpmn::GatewayDirection;
using bpmn::SequenceFlow;
using cacao::Playbook;
using cacao::StepKind;
using cacao::WorkflowStep;
using Json = cacao::Json;

constexpr const char* kTargetNamespace = "urn:cacao:bpmn:playbooks";

std::string first_line(const std::string& text) {
  auto pos = text.find('\n');
  return pos == std::string::npos ? text : text.substr(0, pos);
}

std::vector<std::string> continuation_targets(const WorkflowStep& step) {
  std::vector<std::string> targets;
  if (step.on_completion) targets.push_back(*step.on_completion);
  if (step.on_success) targets.push_back(*step.on_success);
  if (step.on_failure) targets.push_back(*step.on_failure);
  return targets;
}

std::vector<std::string> branch_entries(const WorkflowStep& step) {
  std::vector<std::string> entries;
  std::visit(
      [&entries](const auto& payload) {
        using T = std::decay_t<decltype(payload)>;
        if constexpr (std::is_same_v<T, cacao::ParallelPayload>) {
          entries = payload.next_steps;
        } else if constexpr (std::is_same_v<T, cacao::IfConditionPayload>) {
          entries.push_back(payload.on_true);
          if (payload.on_false) entries.push_back(*payload.on_false);
        } else if constexpr (std::is_same_v<T, cacao::WhileConditionPayload>) {
          entries.push_back(payload.on_true);
        } else if constexpr (std::is_same_v<T, cacao::SwitchConditionPayload>) {
          for (const auto& [label, target] : payload.cases) {
            (void)label;
            entries.push_back(target);
          }
        }
      },
      step.payload);
  return entries;
}

bool is_fork(StepKind kind) {
  return kind == StepKind::Parallel || kind == StepKind::IfCondition ||
         kind == StepKind::SwitchCondition;
}

struct Scope {
  std::vector<FlowNode> nodes;
  std::vector<SequenceFlow> flows;
  std::vector<bpmn::TextAnnotation> annotations;
  std::vector<bpmn::Association> associations;
};

class ForwardMapper {
 public:
  ForwardMapper(const Playbook& playbook, const MappingOptions& options)
      : pb_(playbook), options_(options) {}

  bpmn::Definitions run() {
    assign_owner(pb_.workflow_start, "");
    for (const auto& [id, step] : pb_.workflow) build_node(id, step);
    for (const auto& [id, step] : pb_.workflow) build_flows(id, step);
    build_variables();
    build_groups();

    bpmn::Definitions defs;
    defs.target_namespace = kTargetNamespace;
    defs.process.id = pb_.id;
    defs.process.name = pb_.name;
    defs.process.extensions = playbook_bag();
    defs.item_definitions = std::move(items_);
    defs.categories = std::move(categories_);
    defs.process.groups = std::move(groups_);
    defs.process.properties = std::move(properties_);
    Scope root = assemble("");
    defs.process.flow_nodes = std::move(root.nodes);
    defs.process.sequence_flows = std::move(root.flows);
    defs.process.annotations = std::move(root.annotations);
    defs.process.associations = std::move(root.associations);
    return defs;
  }

 private:
  std::string fresh(const std::string& prefix) {
    return prefix + "-" + std::to_string(++counters_[prefix]);
  }

  BranchStyle style_for(const WorkflowStep& step) const {
    if (step.kind() == StepKind::Parallel) return options_.parallel_style;
    if (step.kind() == StepKind::IfCondition)
      return options_.conditional_style;
    return BranchStyle::GatewayPair;
  }

  // Every step belongs to exactly one container: the workflow itself ("")
  // or the fork/loop step whose branches hold it. A step claimed by two
  // containers has no structured BPMN rendering.
  void assign_owner(const std::string& id, const std::string& container) {
    auto it = owner_.find(id);
    if (it != owner_.end()) {
      if (it->second != container)
        throw MappingError(
            "step \"" + id + "\" is shared between \"" +
            (it->second.empty() ? std::string("the top-level workflow")
                                : it->second) +
            "\" and \"" +
            (container.empty() ? std::string("the top-level workflow")
                               : container) +
            "\"; steps may only be shared by branches of the same fork");
      return;
    }
    owner_.emplace(id, container);
    const WorkflowStep& step = pb_.workflow.at(id);
    for (const std::string& target : continuation_targets(step))
      assign_owner(target, container);
    for (const std::string& entry : branch_entries(step))
      assign_owner(entry, id);
  }

  // The sub-process element a step's node nests in ("" = process body).
  // Loop bodies and box-style branches nest; gateway-pair branches stay in
  // the fork's own scope.
  const std::string& scope_of(const std::string& id) {
    auto it = scope_memo_.find(id);
    if (it != scope_memo_.end()) return it->second;
    const std::string& container = owner_.at(id);
    std::string scope;
    if (!container.empty()) {
      const WorkflowStep& fork = pb_.workflow.at(container);
      if (fork.kind() == StepKind::WhileCondition ||
          style_for(fork) == BranchStyle::SubProcess)
        scope = container;
      else
        scope = scope_of(container);
    }
    return scope_memo_.emplace(id, std::move(scope)).first->second;
  }

  void common_bag(const WorkflowStep& step, ExtensionBag& bag) const {
    bag[cacao_attr(attr::kStepType)] = std::string(to_string(step.kind()));
    if (step.description) bag[cacao_attr(attr::kDescription)] = *step.description;
    if (step.delay) bag[cacao_attr(attr::kDelay)] = std::to_string(*step.delay);
    if (step.timeout)
      bag[cacao_attr(attr::kTimeout)] = std::to_string(*step.timeout);
    if (!step.step_variables.empty()) {
      Json variables = Json::object();
      for (const auto& [name, variable] : step.step_variables)
        variables[name] = cacao::to_json(variable);
      bag[cacao_attr(attr::kStepVariables)] = variables.dump();
    }
    if (!step.step_extensions.empty())
      bag[cacao_attr(attr::kStepExtensions)] =
          Json(step.step_extensions).dump();
    if (!step.other_properties.empty())
      bag[cacao_attr(attr::kOtherProperties)] =
          Json(step.other_properties).dump();
  }

  FlowNode make_gateway(std::string id, StepKind kind,
                        GatewayDirection direction) {
    FlowNode node;
    node.id = std::move(id);
    if (kind == StepKind::Parallel)
      node.payload = bpmn::ParallelGatewayPayload{direction};
    else
      node.payload = bpmn::ExclusiveGatewayPayload{direction, std::nullopt};
    return node;
  }

  void add_annotation(Scope& scope, const std::string& element_id,
                      std::string text) {
    bpmn::TextAnnotation annotation;
    annotation.id = fresh("annotation");
    annotation.text = std::move(text);
    bpmn::Association association;
    association.id = fresh("association");
    association.source_ref = element_id;
    association.target_ref = annotation.id;
    scope.annotations.push_back(std::move(annotation));
    scope.associations.push_back(std::move(association));
  }

  void build_node(const std::string& id, const WorkflowStep& step) {
    Scope& scope = scopes_[scope_of(id)];
    FlowNode node;
    node.id = id;
    node.name = step.name;
    common_bag(step, node.extensions);
    exit_of_[id] = id;

    switch (step.kind()) {
      case StepKind::Start:
      case StepKind::End:
        node.payload = bpmn::TaskPayload{bpmn::TaskKind::Abstract};
        break;
      case StepKind::Action: {
        const auto& payload = std::get<cacao::ActionPayload>(step.payload);
        bpmn::TaskKind kind = bpmn::TaskKind::Service;
        if (!payload.agent.empty() &&
            pb_.agent_definitions.at(payload.agent).category() ==
                cacao::AgentCategory::HumanOrPlace)
          kind = bpmn::TaskKind::User;
        node.payload = bpmn::TaskPayload{kind};
        if (!payload.agent.empty())
          node.extensions[cacao_attr(attr::kAgent)] = payload.agent;
        if (!payload.targets.empty())
          node.extensions[cacao_attr(attr::kTargets)] =
              Json(payload.targets).dump();
        Json commands = Json::array();
        for (const cacao::Command& command : payload.commands)
          commands.push_back(cacao::to_json(command));
        node.extensions[cacao_attr(attr::kCommands)] = commands.dump();
        break;
      }
      case StepKind::PlaybookAction: {
        const auto& payload =
            std::get<cacao::PlaybookActionPayload>(step.payload);
        node.payload = bpmn::CallActivityPayload{payload.playbook_id};
        if (payload.playbook_version)
          node.extensions[cacao_attr(attr::kPlaybookVersion)] =
              payload.playbook_version->to_rfc3339();
        break;
      }
      case StepKind::Parallel: {
        const auto& payload = std::get<cacao::ParallelPayload>(step.payload);
        node.extensions[cacao_attr(attr::kNextSteps)] =
            Json(payload.next_steps).dump();
        build_fork_node(id, step, std::move(node), scope);
        return;
      }
      case StepKind::IfCondition: {
        const auto& payload =
            std::get<cacao::IfConditionPayload>(step.payload);
        node.extensions[cacao_attr(attr::kCondition)] = payload.condition;
        node.extensions[cacao_attr(attr::kOnTrue)] = payload.on_true;
        if (payload.on_false)
          node.extensions[cacao_attr(attr::kOnFalse)] = *payload.on_false;
        build_fork_node(id, step, std::move(node), scope);
        return;
      }
      case StepKind::SwitchCondition: {
        const auto& payload =
            std::get<cacao::SwitchConditionPayload>(step.payload);
        node.extensions[cacao_attr(attr::kCondition)] =
            payload.switch_expression;
        Json cases = Json::array();
        for (const auto& [label, target] : payload.cases)
          cases.push_back(Json::array({label, target}));
        node.extensions[cacao_attr(attr::kCases)] = cases.dump();
        build_fork_node(id, step, std::move(node), scope);
        return;
      }
      case StepKind::WhileCondition: {
        const auto& payload =
            std::get<cacao::WhileConditionPayload>(step.payload);
        node.extensions[cacao_attr(attr::kCondition)] = payload.condition;
        node.extensions[cacao_attr(attr::kOnTrue)] = payload.on_true;
        bpmn::SubProcessPayload sub;
        sub.loop = bpmn::LoopCharacteristics{payload.condition, true};
        node.payload = std::move(sub);
        scope.nodes.push_back(std::move(node));
        return;
      }
    }

    if (const auto* action = std::get_if<cacao::ActionPayload>(&step.payload)) {
      scope.nodes.push_back(std::move(node));
      build_action_annotations(scope, id, *action);
      return;
    }
    scope.nodes.push_back(std::move(node));
  }

  // Forks come in two renderings. Gateway pair: the fork gateway reuses the
  // step id and a synthesized join closes the region in the same scope.
  // Sub-process box: the step id names the box; a synthesized fork/join
  // pair brackets the branches inside.
  void build_fork_node(const std::string& id, const WorkflowStep& step,
                       FlowNode node, Scope& scope) {
    StepKind kind = step.kind();
    if (style_for(step) == BranchStyle::GatewayPair) {
      FlowNode gateway = make_gateway(id, kind, GatewayDirection::Diverging);
      gateway.name = std::move(node.name);
      gateway.extensions = std::move(node.extensions);
      FlowNode join = make_gateway(fresh("join"), kind,
                                   GatewayDirection::Converging);
      join.extensions[cacao_attr(attr::kSynthesized)] = "join";
      fork_el_[id] = id;
      join_el_[id] = join.id;
      exit_of_[id] = join.id;
      scope.nodes.push_back(std::move(gateway));
      scope.nodes.push_back(std::move(join));
      return;
    }
    node.payload = bpmn::SubProcessPayload{};
    scope.nodes.push_back(std::move(node));
    Scope& interior = scopes_[id];
    FlowNode fork = make_gateway(fresh("fork"), kind,
                                 GatewayDirection::Diverging);
    fork.extensions[cacao_attr(attr::kSynthesized)] = "fork";
    FlowNode join = make_gateway(fresh("join"), kind,
                                 GatewayDirection::Converging);
    join.extensions[cacao_attr(attr::kSynthesized)] = "join";
    fork_el_[id] = fork.id;
    join_el_[id] = join.id;
    exit_of_[id] = id;
    interior.nodes.push_back(std::move(fork));
    interior.nodes.push_back(std::move(join));
  }

  void build_action_annotations(Scope& scope, const std::string& id,
                                const cacao::ActionPayload& payload) {
    for (const cacao::Command& command : payload.commands) {
      std::string detail = command.description
                               ? *command.description
                               : first_line(command.content);
      add_annotation(scope, id,
                     "Command Data\n" + command.command_type + ": " + detail);
    }
    if (payload.agent.empty() && payload.targets.empty()) return;
    std::string text = "Agent-Target Data";
    if (!payload.agent.empty()) {
      const cacao::AgentTarget& agent = pb_.agent_definitions.at(payload.agent);
      text += "\nagent: " + agent.name + " (" + agent.at_type + ")";
    }
    for (const std::string& target_id : payload.targets) {
      const cacao::AgentTarget& target = pb_.target_definitions.at(target_id);
      text += "\ntarget: " + target.name + " (" + target.at_type + ")";
    }
    add_annotation(scope, id, text);
  }

  SequenceFlow& add_flow(Scope& scope, const std::string& source,
                         const std::string& target) {
    SequenceFlow flow;
    flow.id = fresh("flow");
    flow.source_ref = source;
    flow.target_ref = target;
    scope.flows.push_back(std::move(flow));
    return scope.flows.back();
  }

  FlowNode& node_in(Scope& scope, const std::string& id) {
    for (FlowNode& node : scope.nodes)
      if (node.id == id) return node;
    throw MappingError("internal: node \"" + id + "\" missing from scope");
  }

  // End steps a branch drains into, following continuation edges only;
  // nested forks contribute their continuations, not their branch interiors.
  std::set<std::string> terminal_ends(const std::string& entry) const {
    std::set<std::string> ends;
    std::set<std::string> seen;
    std::vector<std::string> stack = {entry};
    while (!stack.empty()) {
      std::string id = std::move(stack.back());
      stack.pop_back();
      if (!seen.insert(id).second) continue;
      const WorkflowStep& step = pb_.workflow.at(id);
      if (step.kind() == StepKind::End) {
        ends.insert(id);
        continue;
      }
      for (const std::string& target : continuation_targets(step))
        stack.push_back(target);
    }
    return ends;
  }

  void add_return_edges(Scope& scope, const std::vector<std::string>& entries,
                        const std::string& join_id) {
    for (const std::string& entry : entries)
      for (const std::string& end_id : terminal_ends(entry))
        add_flow(scope, end_id, join_id);
  }

  void build_flows(const std::string& id, const WorkflowStep& step) {
    if (is_fork(step.kind())) {
      bool boxed = style_for(step) == BranchStyle::SubProcess;
      Scope& scope = scopes_[boxed ? id : scope_of(id)];
      const std::string& fork_id = fork_el_.at(id);
      const std::string& join_id = join_el_.at(id);
      switch (step.kind()) {
        case StepKind::Parallel: {
          const auto& payload = std::get<cacao::ParallelPayload>(step.payload);
          for (const std::string& target : payload.next_steps)
            add_flow(scope, fork_id, target);
          add_return_edges(scope, payload.next_steps, join_id);
          break;
        }
        case StepKind::IfCondition: {
          const auto& payload =
              std::get<cacao::IfConditionPayload>(step.payload);
          SequenceFlow& true_flow = add_flow(scope, fork_id, payload.on_true);
          true_flow.name = "true";
          true_flow.extensions[cacao_attr(attr::kEdgeKind)] = "true";
          true_flow.condition = bpmn::ConditionExpression{
              payload.condition, std::string(bpmn::kConditionLanguage)};
          std::string default_id;
          if (payload.on_false) {
            SequenceFlow& false_flow =
                add_flow(scope, fork_id, *payload.on_false);
            false_flow.name = "false";
            false_flow.extensions[cacao_attr(attr::kEdgeKind)] = "false";
            default_id = false_flow.id;
          } else {
            default_id = add_flow(scope, fork_id, join_id).id;
          }
          std::get<bpmn::ExclusiveGatewayPayload>(
              node_in(scope, fork_id).payload)
              .default_flow = default_id;
          add_return_edges(scope, branch_entries(step), join_id);
          break;
        }
        case StepKind::SwitchCondition: {
          const auto& payload =
              std::get<cacao::SwitchConditionPayload>(step.payload);
          for (const auto& [label, target] : payload.cases) {
            SequenceFlow& flow = add_flow(scope, fork_id, target);
            flow.name = label;
            flow.extensions[cacao_attr(attr::kEdgeKind)] = "case";
            flow.extensions[cacao_attr(attr::kCaseLabel)] = label;
            flow.condition = bpmn::ConditionExpression{
                label, std::string(bpmn::kConditionLanguage)};
          }
          // A no-match path keeps the gateway sound even when every case
          // fails at run time.
          std::string default_id = add_flow(scope, fork_id, join_id).id;
          std::get<bpmn::ExclusiveGatewayPayload>(
              node_in(scope, fork_id).payload)
              .default_flow = default_id;
          add_return_edges(scope, branch_entries(step), join_id);
          break;
        }
        default:
          break;
      }
    }

    Scope& scope = scopes_[scope_of(id)];
    const std::string& source = exit_of_.at(id);
    if (step.on_completion) add_flow(scope, source, *step.on_completion);
    if (step.on_success) {
      SequenceFlow& flow = add_flow(scope, source, *step.on_success);
      flow.name = "success";
      flow.extensions[cacao_attr(attr::kEdgeKind)] = "success";
    }
    if (step.on_failure) {
      SequenceFlow& flow = add_flow(scope, source, *step.on_failure);
      flow.name = "failure";
      flow.extensions[cacao_attr(attr::kEdgeKind)] = "failure";
    }
  }

  void build_variables() {
    for (const auto& [name, variable] : pb_.playbook_variables) {
      bpmn::ItemDefinition item;
      item.id = fresh("item");
      item.structure_ref = variable.var_type;
      bpmn::ProcessProperty property;
      property.id = fresh("property");
      property.name = name;
      property.item_subject_ref = item.id;
      if (variable.description)
        property.extensions[cacao_attr(attr::kDescription)] =
            *variable.description;
      if (variable.value)
        property.extensions[cacao_attr(attr::kValue)] = *variable.value;
      if (variable.constant)
        property.extensions[cacao_attr(attr::kConstant)] = "true";
      if (variable.external)
        property.extensions[cacao_attr(attr::kExternal)] = "true";
      if (!variable.other_properties.empty())
        property.extensions[cacao_attr(attr::kOtherProperties)] =
            Json(variable.other_properties).dump();
      items_.push_back(std::move(item));
      properties_.push_back(std::move(property));
    }
  }

  void build_group(const std::string& label, const std::string& body) {
    bpmn::Category category;
    category.id = fresh("category");
    category.value_id = fresh("category-value");
    category.value = label;
    bpmn::Group group;
    group.id = fresh("group");
    group.category_value_ref = category.value_id;
    categories_.push_back(std::move(category));
    add_annotation(scopes_[""], groups_.emplace_back(group).id,
                   label + "\n" + body);
  }

  void build_groups() {
    if (!pb_.markings.empty()) {
      std::string body;
      for (const std::string& marking_id : pb_.markings) {
        if (!body.empty()) body += "\n";
        body += pb_.data_marking_definitions.at(marking_id).display_text;
      }
      build_group("Data Markings", body);
    }
    if (!pb_.signatures.empty()) {
      std::string body;
      for (const cacao::Signature& signature : pb_.signatures) {
        if (!body.empty()) body += "\n";
        body += signature.signee;
      }
      build_group("Digital Signatures", body);
    }
  }

  ExtensionBag playbook_bag() const {
    ExtensionBag bag;
    bag[cacao_attr(attr::kSpecVersion)] = std::string(cacao::kSpecVersion);
    if (pb_.created)
      bag[cacao_attr(attr::kCreated)] = pb_.created->to_rfc3339();
    if (pb_.modified)
      bag[cacao_attr(attr::kModified)] = pb_.modified->to_rfc3339();
    if (pb_.description)
      bag[cacao_attr(attr::kDescription)] = *pb_.description;
    if (!pb_.agent_definitions.empty()) {
      Json obj = Json::object();
      for (const auto& [agent_id, agent] : pb_.agent_definitions)
        obj[agent_id] = cacao::to_json(agent);
      bag[cacao_attr(attr::kAgentDefinitions)] = obj.dump();
    }
    if (!pb_.target_definitions.empty()) {
      Json obj = Json::object();
      for (const auto& [target_id, target] : pb_.target_definitions)
        obj[target_id] = cacao::to_json(target);
      bag[cacao_attr(attr::kTargetDefinitions)] = obj.dump();
    }
    if (!pb_.data_marking_definitions.empty()) {
      Json obj = Json::object();
      for (const auto& [marking_id, marking] : pb_.data_marking_definitions)
        obj[marking_id] = cacao::to_json(marking);
      bag[cacao_attr(attr::kDataMarkingDefinitions)] = obj.dump();
    }
    if (!pb_.markings.empty())
      bag[cacao_attr(attr::kMarkings)] = Json(pb_.markings).dump();
    if (!pb_.extension_definitions.empty()) {
      Json obj = Json::object();
      for (const auto& [def_id, def] : pb_.extension_definitions)
        obj[def_id] = cacao::to_json(def);
      bag[cacao_attr(attr::kExtensionDefinitions)] = obj.dump();
    }
    if (!pb_.signatures.empty()) {
      Json arr = Json::array();
      for (const cacao::Signature& signature : pb_.signatures)
        arr.push_back(signature.record);
      bag[cacao_attr(attr::kSignatures)] = arr.dump();
    }
    if (!pb_.other_properties.empty())
      bag[cacao_attr(attr::kOtherProperties)] =
          Json(pb_.other_properties).dump();
    return bag;
  }

  Scope assemble(const std::string& key) {
    Scope scope = std::move(scopes_[key]);
    for (FlowNode& node : scope.nodes) {
      auto* sub = std::get_if<bpmn::SubProcessPayload>(&node.payload);
      if (sub == nullptr || !scopes_.contains(node.id)) continue;
      Scope interior = assemble(node.id);
      sub->nodes = std::move(interior.nodes);
      sub->flows = std::move(interior.flows);
      sub->annotations = std::move(interior.annotations);
      sub->associations = std::move(interior.associations);
    }
    return scope;
  }

  const Playbook& pb_;
  MappingOptions options_;
  std::map<std::string, std::string> owner_;
  std::map<std::string, std::string> scope_memo_;
  std::map<std::string, Scope> scopes_;
  std::map<std::string, std::string> exit_of_;
  std::map<std::string, std::string> fork_el_;
  std::map<std::string, std::string> join_el_;
  std::map<std::string, int> counters_;
  std::vector<bpmn::ItemDefinition> items_;
  std::vector<bpmn::ProcessProperty> properties_;
  std::vector<bpmn::Category> categories_;
  std::vector<bpmn::Group> groups_;
};

}  // namespace

bpmn::Definitions map_to_bpmn(const cacao::Playbook& playbook,
                              const MappingOptions& options) {
  Violations violations = cacao::validate(playbook);
  if (!violations.empty())
    throw MappingError("playbook is not conformant: " +
                       violations.front().code + " at " +
                       violations.front().path + ": " +
                       violations.front().message);
  return ForwardMapper(playbook, options).run();
}

}  // namespace cacaobpmn::mapping
