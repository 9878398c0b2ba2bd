// SPDX-License-Identifier: Apache-2.0
#include "cacaobpmn/mapping/reverse.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cacaobpmn/cacao/codec.hpp"
#include "cacaobpmn/mapping/attributes.hpp"
#include "cacaobpmn/mapping/regions.hpp"

namespace cacaobpmn::mapping {
namespace {

class Sha1 {
 public:
  void update(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const std::uint8_t*>(data);
    total_ += size;
    append(bytes, size);
  }

  std::array<std::uint8_t, 20> digest() {
    const std::uint64_t bits = total_ * 8;
    std::uint8_t byte = 0x80;
    append(&byte, 1);
    byte = 0;
    while (fill_ != 56) append(&byte, 1);
    for (int shift = 56; shift >= 0; shift -= 8) {
      byte = static_cast<std::uint8_t>(bits >> shift);
      append(&byte, 1);
    }
    std::array<std::uint8_t, 20> out{};
    for (int i = 0; i < 5; ++i)
      for (int b = 0; b < 4; ++b)
        out[4 * i + b] = static_cast<std::uint8_t>(state_[i] >> (24 - 8 * b));
    return out;
  }

 private:
  void append(const std::uint8_t* data, std::size_t size) {
    for (std::size_t i = 0; i < size; ++i) {
      block_[fill_++] = data[i];
      if (fill_ == 64) {
        process();
        fill_ = 0;
      }
    }
  }

  static std::uint32_t rol(std::uint32_t value, int by) {
    return (value << by) | (value >> (32 - by));
  }

  void process() {
    std::uint32_t w[80];
    for (int i = 0; i < 16; ++i)
      w[i] = (std::uint32_t(block_[4 * i]) << 24) |
             (std::uint32_t(block_[4 * i + 1]) << 16) |
             (std::uint32_t(block_[4 * i + 2]) << 8) |
             std::uint32_t(block_[4 * i + 3]);
    for (int i = 16; i < 80; ++i)
      w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
    std::uint32_t a = state_[0], b = state_[1], c = state_[2], d = state_[3],
                  e = state_[4];
    for (int i = 0; i < 80; ++i) {
      std::uint32_t f, k;
      if (i < 20) {
        f = (b & c) | (~b & d);
        k = 0x5a827999;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ed9eba1;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8f1bbcdc;
      } else {
        f = b ^ c ^ d;
        k = 0xca62c1d6;
      }
      std::uint32_t t = rol(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rol(b, 30);
      b = a;
      a = t;
    }
    state_[0] += a;
    state_[1] += b;
    state_[2] += c;
    state_[3] += d;
    state_[4] += e;
  }

  std::uint32_t state_[5] = {0x67452301, 0xefcdab89, 0x98badcfe, 0x10325476,
                             0xc3d2e1f0};
  std::uint8_t block_[64] = {};
  std::size_t fill_ = 0;
  std::uint64_t total_ = 0;
};

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::array<std::uint8_t, 16> parse_uuid(std::string_view text) {
  std::array<std::uint8_t, 16> bytes{};
  std::size_t have = 0;
  int pending = -1;
  for (char c : text) {
    if (c == '-') continue;
    int digit = hex_digit(c);
    if (digit < 0 || have == 16)
      throw MappingError("\"" + std::string(text) + "\" is not a UUID");
    if (pending < 0) {
      pending = digit;
    } else {
      bytes[have++] = static_cast<std::uint8_t>((pending << 4) | digit);
      pending = -1;
    }
  }
  if (have != 16 || pending >= 0)
    throw MappingError("\"" + std::string(text) + "\" is not a UUID");
  return bytes;
}

}  // namespace

std::string uuid5(std::string_view namespace_uuid, std::string_view name) {
  std::array<std::uint8_t, 16> ns = parse_uuid(namespace_uuid);
  Sha1 sha;
  sha.update(ns.data(), ns.size());
  sha.update(name.data(), name.size());
  std::array<std::uint8_t, 20> hash = sha.digest();
  std::array<std::uint8_t, 16> raw{};
  std::copy_n(hash.begin(), 16, raw.begin());
  raw[6] = static_cast<std::uint8_t>((raw[6] & 0x0f) | 0x50);
  raw[8] = static_cast<std::uint8_t>((raw[8] & 0x3f) | 0x80);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(36);
  for (int i = 0; i < 16; ++i) {
    if (i == 4 || i == 6 || i == 8 || i == 10) out += '-';
    out += hex[raw[i] >> 4];
    out += hex[raw[i] & 0x0f];
  }
  return out;
}

namespace {

using bpmn::FlowNode;
using bpmn::SequenceFlow;
using cacao::Json;
using cacao::Playbook;
using cacao::StepKind;
using cacao::WorkflowStep;

const std::string* bag_value(const bpmn::ExtensionBag& bag,
                             const char* local) {
  auto it = bag.find(cacao_attr(local));
  return it == bag.end() ? nullptr : &it->second;
}

bool is_converging(const FlowNode& node) {
  if (const auto* xg =
          std::get_if<bpmn::ExclusiveGatewayPayload>(&node.payload))
    return xg->direction == bpmn::GatewayDirection::Converging;
  if (const auto* pg =
          std::get_if<bpmn::ParallelGatewayPayload>(&node.payload))
    return pg->direction == bpmn::GatewayDirection::Converging;
  return false;
}

// Flow classification splits by position. On a continuation only the
// metadata attribute or a success/failure name means anything; true/false
// names stay plain so foreign diagrams keep their flows. On a gateway
// branch the true/false names matter too.
std::string continuation_kind(const SequenceFlow& flow) {
  if (const std::string* v = bag_value(flow.extensions, attr::kEdgeKind))
    return *v;
  if (flow.name && (*flow.name == "success" || *flow.name == "failure"))
    return *flow.name;
  return "";
}

std::string branch_kind(const SequenceFlow& flow) {
  if (const std::string* v = bag_value(flow.extensions, attr::kEdgeKind))
    return *v;
  if (flow.name && (*flow.name == "true" || *flow.name == "false"))
    return *flow.name;
  return "";
}

enum class ScopeRole { Root, LoopBody, Box };

struct BranchRef {
  const SequenceFlow* flow;
  std::string entry_step;
};

struct ScopeResult {
  std::string entry_node;
  std::vector<BranchRef> branches;  // Box scopes: the entry gateway's branches
};

class ReverseMapper {
 public:
  ReverseMapper(const bpmn::Definitions& defs, const ImportPolicy& policy)
      : defs_(defs), policy_(policy) {}

  Playbook run() {
    if (strict() && !defs_.ignored_process_ids.empty())
      corrupt("the document holds multiple processes; strict import converts "
              "exactly one");
    read_process_bag();
    read_variables();

    ScopeResult root = handle_scope(defs_.process.flow_nodes,
                                    defs_.process.sequence_flows,
                                    "the process", ScopeRole::Root, "");
    std::string first = entry_step(root.entry_node);
    if (pb_.workflow.at(first).kind() == StepKind::Start) {
      pb_.workflow_start = first;
    } else if (strict()) {
      corrupt("the process entry \"" + root.entry_node +
              "\" is not a start step");
    } else {
      std::string id = "start--" + synth_uuid("synthesized:start");
      WorkflowStep step;
      step.payload = cacao::StartPayload{};
      step.on_completion = first;
      pb_.workflow.emplace(id, std::move(step));
      pb_.workflow_start = std::move(id);
    }
    return std::move(pb_);
  }

 private:
  bool strict() const { return policy_.mode == ImportMode::Strict; }

  [[noreturn]] void corrupt(const std::string& message) const {
    throw MappingError(message);
  }

  std::string synth_uuid(const std::string& name) const {
    return uuid5(policy_.id_synthesis_namespace, name);
  }

  Json parse_bag_json(const std::string& text, const char* key) const {
    Json value = Json::parse(text, nullptr, false);
    if (value.is_discarded())
      corrupt(std::string("attribute cacao:") + key +
              " does not hold valid JSON");
    return value;
  }

  std::vector<std::string> string_array(const Json& value,
                                        const char* key) const {
    if (!value.is_array())
      corrupt(std::string("attribute cacao:") + key +
              " must hold a JSON array of strings");
    std::vector<std::string> out;
    for (const Json& entry : value) {
      if (!entry.is_string())
        corrupt(std::string("attribute cacao:") + key +
                " must hold a JSON array of strings");
      out.push_back(entry.get<std::string>());
    }
    return out;
  }

  cacao::JsonMap json_map(const Json& value, const char* key) const {
    if (!value.is_object())
      corrupt(std::string("attribute cacao:") + key +
              " must hold a JSON object");
    cacao::JsonMap map;
    for (const auto& [name, entry] : value.items()) map.emplace(name, entry);
    return map;
  }

  Timestamp parse_time(const std::string& text, const char* key) const {
    try {
      return Timestamp::parse(text);
    } catch (const std::invalid_argument&) {
      corrupt(std::string("attribute cacao:") + key +
              " is not an RFC 3339 timestamp");
    }
  }

  std::int64_t parse_millis(const std::string& text, const FlowNode& node,
                            const char* key) const {
    std::int64_t value = 0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end)
      corrupt("element \"" + node.id + "\": attribute cacao:" + key +
              " is not a number");
    return value;
  }

  std::string entry_step(const std::string& node_id) const {
    auto it = step_of_node_.find(node_id);
    if (it == step_of_node_.end())
      corrupt("element \"" + node_id +
              "\" opens a scope but does not import as a step");
    return it->second;
  }

  void read_process_bag() {
    const bpmn::Process& process = defs_.process;
    const bpmn::ExtensionBag& bag = process.extensions;

    const std::string* spec = bag_value(bag, attr::kSpecVersion);
    if (strict()) {
      if (spec == nullptr)
        corrupt("the process carries no conversion metadata; use best-effort "
                "import for foreign models");
      if (*spec != cacao::kSpecVersion)
        corrupt("unsupported spec version \"" + *spec + "\"");
    }

    if (cacao::is_valid_identifier(process.id) &&
        process.id.starts_with("playbook--"))
      pb_.id = process.id;
    else if (strict())
      corrupt("process id \"" + process.id +
              "\" is not a playbook identifier");
    else
      pb_.id = "playbook--" + synth_uuid("playbook:" + process.id);

    if (process.name && !process.name->empty())
      pb_.name = *process.name;
    else if (strict())
      corrupt("the process has no name");
    else
      pb_.name = "Imported playbook";

    if (const std::string* v = bag_value(bag, attr::kDescription))
      pb_.description = *v;
    if (const std::string* v = bag_value(bag, attr::kCreated))
      pb_.created = parse_time(*v, attr::kCreated);
    if (const std::string* v = bag_value(bag, attr::kModified))
      pb_.modified = parse_time(*v, attr::kModified);
    if (!strict()) {
      if (!pb_.created) pb_.created = policy_.clock;
      if (!pb_.modified) pb_.modified = policy_.clock;
    }

    try {
      if (const std::string* v = bag_value(bag, attr::kAgentDefinitions))
        pb_.agent_definitions = cacao::agent_targets_from_json(
            parse_bag_json(*v, attr::kAgentDefinitions),
            "cacao:agent-definitions");
      if (const std::string* v = bag_value(bag, attr::kTargetDefinitions))
        pb_.target_definitions = cacao::agent_targets_from_json(
            parse_bag_json(*v, attr::kTargetDefinitions),
            "cacao:target-definitions");
      if (const std::string* v = bag_value(bag, attr::kDataMarkingDefinitions))
        pb_.data_marking_definitions = cacao::markings_from_json(
            parse_bag_json(*v, attr::kDataMarkingDefinitions),
            "cacao:data-marking-definitions");
      if (const std::string* v = bag_value(bag, attr::kMarkings))
        pb_.markings = string_array(parse_bag_json(*v, attr::kMarkings),
                                    attr::kMarkings);
      if (const std::string* v = bag_value(bag, attr::kExtensionDefinitions))
        pb_.extension_definitions = cacao::extension_definitions_from_json(
            parse_bag_json(*v, attr::kExtensionDefinitions),
            "cacao:extension-definitions");
      if (const std::string* v = bag_value(bag, attr::kSignatures))
        pb_.signatures = cacao::signatures_from_json(
            parse_bag_json(*v, attr::kSignatures), "cacao:signatures");
      if (const std::string* v = bag_value(bag, attr::kOtherProperties))
        pb_.other_properties =
            json_map(parse_bag_json(*v, attr::kOtherProperties),
                     attr::kOtherProperties);
    } catch (const cacao::CacaoError& error) {
      corrupt(std::string("invalid conversion metadata: ") + error.what());
    }
  }

  void read_variables() {
    std::map<std::string, std::string> item_types;
    for (const bpmn::ItemDefinition& item : defs_.item_definitions)
      item_types[item.id] = item.structure_ref;
    for (const bpmn::ProcessProperty& property : defs_.process.properties) {
      cacao::Variable variable;
      auto type_it = item_types.find(property.item_subject_ref);
      if (type_it != item_types.end() && !type_it->second.empty())
        variable.var_type = type_it->second;
      else if (strict())
        corrupt("property \"" + property.id +
                "\" references no item definition");
      else
        variable.var_type = "string";

      std::string name = property.name;
      if (!cacao::is_valid_variable_name(name)) {
        if (strict())
          corrupt("property name \"" + name + "\" is not a variable name");
        name = "__" + (name.empty() ? property.id : name) + "__";
      }

      const bpmn::ExtensionBag& bag = property.extensions;
      if (const std::string* v = bag_value(bag, attr::kDescription))
        variable.description = *v;
      if (const std::string* v = bag_value(bag, attr::kValue))
        variable.value = *v;
      if (const std::string* v = bag_value(bag, attr::kConstant))
        variable.constant = *v == "true";
      if (const std::string* v = bag_value(bag, attr::kExternal))
        variable.external = *v == "true";
      try {
        if (const std::string* v = bag_value(bag, attr::kOtherProperties))
          variable.other_properties = json_map(
              parse_bag_json(*v, attr::kOtherProperties),
              attr::kOtherProperties);
      } catch (const cacao::CacaoError& error) {
        corrupt(std::string("invalid conversion metadata: ") + error.what());
      }
      if (!pb_.playbook_variables.emplace(name, std::move(variable)).second)
        corrupt("two properties import as variable \"" + name + "\"");
    }
  }

  ScopeResult handle_scope(const std::vector<FlowNode>& nodes,
                           const std::vector<SequenceFlow>& flows,
                           const std::string& label, ScopeRole role,
                           const std::string& host_id) {
    ScopeGraph graph(nodes, flows, label);
    ScopeResult result;
    result.entry_node = graph.entry();

    // Joins and synthesized forks are scaffolding, not steps; so is the
    // entry gateway of a box-rendered fork, which belongs to the box.
    std::set<std::string> joins;
    std::vector<const FlowNode*> step_nodes;
    const FlowNode* box_gateway = nullptr;
    for (const std::string& id : graph.topological_order()) {
      const FlowNode& node = graph.node(id);
      if (role == ScopeRole::Box && id == graph.entry()) {
        if (!node.is_gateway() || is_converging(node))
          corrupt(label + " must open with a diverging gateway");
        box_gateway = &node;
        continue;
      }
      if (is_converging(node)) {
        joins.insert(id);
        continue;
      }
      if (const std::string* synth =
              bag_value(node.extensions, attr::kSynthesized)) {
        if (*synth == "join") {
          joins.insert(id);
          continue;
        }
        corrupt("element \"" + id +
                "\" is marked synthesized outside a sub-process entry");
      }
      step_nodes.push_back(&node);
    }

    std::vector<std::string> scope_steps;
    for (const FlowNode* node : step_nodes)
      scope_steps.push_back(create_step(graph, *node));

    for (const FlowNode* node : step_nodes) wire_step(*node, graph, joins);

    // A process body or loop body may simply stop; a playbook may not, so
    // trailing steps continue into a synthesized end.
    if (role != ScopeRole::Box) {
      for (const std::string& step_id : scope_steps) {
        WorkflowStep& step = pb_.workflow.at(step_id);
        if (step.kind() == StepKind::End) continue;
        if (step.on_completion || step.on_success || step.on_failure)
          continue;
        if (strict())
          corrupt("step \"" + step_id + "\" reaches no end step");
        step.on_completion = ensure_end(role == ScopeRole::Root
                                            ? "synthesized:end"
                                            : "sub-end:" + host_id);
      }
    }

    if (role == ScopeRole::Box) {
      const std::string& join = graph.join_of(box_gateway->id);
      if (!graph.out_flows(join).empty())
        corrupt(label + " continues past its converging gateway");
      for (const SequenceFlow* flow : graph.out_flows(box_gateway->id)) {
        if (flow->target_ref == join) continue;
        result.branches.push_back({flow, entry_step(flow->target_ref)});
      }
    }
    return result;
  }

  std::string create_step(const mapping::ScopeGraph& graph,
                          const FlowNode& node) {
    StepKind kind = step_kind(graph, node);
    std::string step_id;
    if (cacao::is_valid_identifier(node.id))
      step_id = node.id;
    else if (strict())
      corrupt("element id \"" + node.id + "\" is not a step identifier");
    else
      step_id = std::string(cacao::to_string(kind)) + "--" +
                synth_uuid("element:" + node.id);

    WorkflowStep step;
    step.name = node.name;
    try {
      read_common(node, step);
      step.payload = build_payload(node, kind);
    } catch (const cacao::CacaoError& error) {
      corrupt("element \"" + node.id + "\": invalid conversion metadata: " +
              error.what());
    }

    if (!pb_.workflow.emplace(step_id, std::move(step)).second)
      corrupt("two elements import as step \"" + step_id + "\"");
    step_of_node_.emplace(node.id, step_id);
    return step_id;
  }

  StepKind step_kind(const mapping::ScopeGraph& graph,
                     const FlowNode& node) const {
    if (const std::string* text =
            bag_value(node.extensions, attr::kStepType)) {
      std::optional<StepKind> kind = cacao::step_kind_from_string(*text);
      if (!kind)
        corrupt("element \"" + node.id + "\" declares unknown step type \"" +
                *text + "\"");
      return *kind;
    }
    if (strict())
      corrupt("element \"" + node.id +
              "\" carries no step metadata; use best-effort import for "
              "foreign models");

    if (std::holds_alternative<bpmn::TaskPayload>(node.payload))
      return StepKind::Action;
    if (std::holds_alternative<bpmn::CallActivityPayload>(node.payload))
      return StepKind::PlaybookAction;
    if (std::holds_alternative<bpmn::ParallelGatewayPayload>(node.payload))
      return StepKind::Parallel;
    if (std::holds_alternative<bpmn::ExclusiveGatewayPayload>(node.payload)) {
      for (const SequenceFlow* flow : graph.out_flows(node.id))
        if (branch_kind(*flow) == "true") return StepKind::IfCondition;
      return StepKind::SwitchCondition;
    }
    const auto& sub = std::get<bpmn::SubProcessPayload>(node.payload);
    if (sub.loop) return StepKind::WhileCondition;
    return foreign_box_kind(sub);
  }

  // A foreign sub-process that opens with a diverging gateway imports as
  // that gateway's fork; anything else collapses to a manual action.
  StepKind foreign_box_kind(const bpmn::SubProcessPayload& sub) const {
    std::map<std::string, int> in_degree;
    for (const FlowNode& inner : sub.nodes) in_degree[inner.id] = 0;
    for (const SequenceFlow& flow : sub.flows) {
      auto it = in_degree.find(flow.target_ref);
      if (it != in_degree.end()) ++it->second;
    }
    const FlowNode* entry = nullptr;
    for (const FlowNode& inner : sub.nodes) {
      if (in_degree[inner.id] != 0) continue;
      if (entry != nullptr) return StepKind::Action;
      entry = &inner;
    }
    if (entry == nullptr || !entry->is_gateway() || is_converging(*entry))
      return StepKind::Action;
    if (std::holds_alternative<bpmn::ParallelGatewayPayload>(entry->payload))
      return StepKind::Parallel;
    for (const SequenceFlow& flow : sub.flows)
      if (flow.source_ref == entry->id && branch_kind(flow) == "true")
        return StepKind::IfCondition;
    return StepKind::SwitchCondition;
  }

  void read_common(const FlowNode& node, WorkflowStep& step) {
    const bpmn::ExtensionBag& bag = node.extensions;
    if (const std::string* v = bag_value(bag, attr::kDescription))
      step.description = *v;
    if (const std::string* v = bag_value(bag, attr::kDelay))
      step.delay = parse_millis(*v, node, attr::kDelay);
    if (const std::string* v = bag_value(bag, attr::kTimeout))
      step.timeout = parse_millis(*v, node, attr::kTimeout);
    if (const std::string* v = bag_value(bag, attr::kStepVariables))
      step.step_variables = cacao::variables_from_json(
          parse_bag_json(*v, attr::kStepVariables), "cacao:step-variables");
    if (const std::string* v = bag_value(bag, attr::kStepExtensions))
      step.step_extensions = json_map(
          parse_bag_json(*v, attr::kStepExtensions), attr::kStepExtensions);
    if (const std::string* v = bag_value(bag, attr::kOtherProperties))
      step.other_properties =
          json_map(parse_bag_json(*v, attr::kOtherProperties),
                   attr::kOtherProperties);
  }

  cacao::StepPayload build_payload(const FlowNode& node, StepKind kind) {
    switch (kind) {
      case StepKind::Start:
      case StepKind::End:
        if (!std::holds_alternative<bpmn::TaskPayload>(node.payload))
          corrupt("element \"" + node.id + "\" cannot carry a " +
                  std::string(cacao::to_string(kind)) + " step");
        if (kind == StepKind::Start) return cacao::StartPayload{};
        return cacao::EndPayload{};
      case StepKind::Action:
        return action_payload(node);
      case StepKind::PlaybookAction:
        return playbook_action_payload(node);
      case StepKind::Parallel:
      case StepKind::IfCondition:
      case StepKind::SwitchCondition:
        return fork_payload(node, kind);
      case StepKind::WhileCondition:
        return while_payload(node);
    }
    corrupt("element \"" + node.id + "\" has no step kind");
  }

  cacao::StepPayload action_payload(const FlowNode& node) {
    const auto* task = std::get_if<bpmn::TaskPayload>(&node.payload);
    bool foreign = bag_value(node.extensions, attr::kStepType) == nullptr;
    if (task == nullptr &&
        !(foreign &&
          std::holds_alternative<bpmn::SubProcessPayload>(node.payload)))
      corrupt("element \"" + node.id + "\" cannot carry an action step");

    cacao::ActionPayload payload;
    if (const std::string* v = bag_value(node.extensions, attr::kAgent))
      payload.agent = *v;
    else if (foreign)
      payload.agent =
          ensure_agent(task != nullptr ? task->kind : bpmn::TaskKind::Service);
    if (const std::string* v = bag_value(node.extensions, attr::kTargets))
      payload.targets =
          string_array(parse_bag_json(*v, attr::kTargets), attr::kTargets);
    if (const std::string* v = bag_value(node.extensions, attr::kCommands))
      payload.commands = cacao::commands_from_json(
          parse_bag_json(*v, attr::kCommands), "cacao:commands");
    else if (strict())
      corrupt("element \"" + node.id + "\" lacks its commands");
    else {
      cacao::Command command;
      command.command_type = "manual";
      command.content =
          node.name && !node.name->empty() ? *node.name : node.id;
      payload.commands.push_back(std::move(command));
    }
    return payload;
  }

  cacao::StepPayload playbook_action_payload(const FlowNode& node) {
    const auto* call = std::get_if<bpmn::CallActivityPayload>(&node.payload);
    if (call == nullptr)
      corrupt("element \"" + node.id +
              "\" cannot carry a playbook-action step");
    cacao::PlaybookActionPayload payload;
    if (cacao::is_valid_identifier(call->called_element) &&
        call->called_element.starts_with("playbook--"))
      payload.playbook_id = call->called_element;
    else if (strict())
      corrupt("element \"" + node.id + "\" calls \"" + call->called_element +
              "\", which is not a playbook identifier");
    else
      payload.playbook_id =
          "playbook--" + synth_uuid("playbook:" + call->called_element);
    if (const std::string* v =
            bag_value(node.extensions, attr::kPlaybookVersion))
      payload.playbook_version = parse_time(*v, attr::kPlaybookVersion);
    return payload;
  }

  cacao::StepPayload fork_payload(const FlowNode& node, StepKind kind) {
    const auto* sub = std::get_if<bpmn::SubProcessPayload>(&node.payload);
    if (sub == nullptr) {
      bool shape_fits = false;
      if (kind == StepKind::Parallel) {
        const auto* pg =
            std::get_if<bpmn::ParallelGatewayPayload>(&node.payload);
        shape_fits =
            pg != nullptr && pg->direction == bpmn::GatewayDirection::Diverging;
      } else {
        const auto* xg =
            std::get_if<bpmn::ExclusiveGatewayPayload>(&node.payload);
        shape_fits =
            xg != nullptr && xg->direction == bpmn::GatewayDirection::Diverging;
      }
      if (!shape_fits)
        corrupt("element \"" + node.id + "\" cannot carry a " +
                std::string(cacao::to_string(kind)) + " step");
    } else if (sub->loop) {
      corrupt("element \"" + node.id +
              "\" loops but is not a while-condition step");
    }

    cacao::StepPayload payload;
    bool have_refs = true;
    if (std::optional<cacao::StepPayload> bagged =
            fork_payload_from_bag(node, kind)) {
      payload = std::move(*bagged);
    } else if (strict()) {
      corrupt("element \"" + node.id + "\" lacks its branch metadata");
    } else {
      have_refs = false;
      if (kind == StepKind::Parallel)
        payload = cacao::ParallelPayload{};
      else if (kind == StepKind::IfCondition)
        payload = cacao::IfConditionPayload{};
      else
        payload = cacao::SwitchConditionPayload{};
    }

    if (sub != nullptr) {
      ScopeResult interior =
          handle_scope(sub->nodes, sub->flows,
                       "sub-process \"" + node.id + "\"", ScopeRole::Box,
                       node.id);
      if (!have_refs) apply_structural_refs(payload, interior.branches, node);
    }
    // Gateway-rendered forks without metadata are wired from their flows
    // once the whole scope has steps.
    return payload;
  }

  std::optional<cacao::StepPayload> fork_payload_from_bag(const FlowNode& node,
                                                          StepKind kind) {
    const bpmn::ExtensionBag& bag = node.extensions;
    if (kind == StepKind::Parallel) {
      const std::string* v = bag_value(bag, attr::kNextSteps);
      if (v == nullptr) return std::nullopt;
      cacao::ParallelPayload payload;
      payload.next_steps =
          string_array(parse_bag_json(*v, attr::kNextSteps), attr::kNextSteps);
      return cacao::StepPayload(std::move(payload));
    }
    if (kind == StepKind::IfCondition) {
      const std::string* on_true = bag_value(bag, attr::kOnTrue);
      if (on_true == nullptr) return std::nullopt;
      cacao::IfConditionPayload payload;
      payload.on_true = *on_true;
      if (const std::string* v = bag_value(bag, attr::kCondition))
        payload.condition = *v;
      else if (strict())
        corrupt("element \"" + node.id + "\" lacks its branch condition");
      else
        payload.condition = "true";
      if (const std::string* v = bag_value(bag, attr::kOnFalse))
        payload.on_false = *v;
      return cacao::StepPayload(std::move(payload));
    }
    const std::string* cases_text = bag_value(bag, attr::kCases);
    if (cases_text == nullptr) return std::nullopt;
    cacao::SwitchConditionPayload payload;
    Json cases = parse_bag_json(*cases_text, attr::kCases);
    if (!cases.is_array())
      corrupt("element \"" + node.id +
              "\": attribute cacao:cases must hold [label, step] pairs");
    for (const Json& entry : cases) {
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() ||
          !entry[1].is_string())
        corrupt("element \"" + node.id +
                "\": attribute cacao:cases must hold [label, step] pairs");
      if (!payload.cases
               .emplace(entry[0].get<std::string>(),
                        entry[1].get<std::string>())
               .second)
        corrupt("element \"" + node.id + "\" repeats the case label \"" +
                entry[0].get<std::string>() + "\"");
    }
    if (const std::string* v = bag_value(bag, attr::kCondition))
      payload.switch_expression = *v;
    else if (strict())
      corrupt("element \"" + node.id + "\" lacks its switch expression");
    else
      payload.switch_expression =
          node.name && !node.name->empty() ? *node.name : "case";
    return cacao::StepPayload(std::move(payload));
  }

  cacao::StepPayload while_payload(const FlowNode& node) {
    const auto* sub = std::get_if<bpmn::SubProcessPayload>(&node.payload);
    if (sub == nullptr)
      corrupt("element \"" + node.id +
              "\" cannot carry a while-condition step");
    ScopeResult body =
        handle_scope(sub->nodes, sub->flows, "the body of \"" + node.id + "\"",
                     ScopeRole::LoopBody, node.id);
    cacao::WhileConditionPayload payload;
    if (const std::string* v = bag_value(node.extensions, attr::kOnTrue))
      payload.on_true = *v;
    else if (strict())
      corrupt("element \"" + node.id + "\" lacks its branch metadata");
    else
      payload.on_true = entry_step(body.entry_node);
    if (const std::string* v = bag_value(node.extensions, attr::kCondition))
      payload.condition = *v;
    else if (strict())
      corrupt("element \"" + node.id + "\" lacks its loop condition");
    else if (sub->loop && !sub->loop->condition_text.empty())
      payload.condition = sub->loop->condition_text;
    else
      payload.condition = "true";
    return payload;
  }

  std::string ensure_agent(bpmn::TaskKind kind) {
    const bool human = kind != bpmn::TaskKind::Service;
    const std::string at_type = human ? "individual" : "http-api";
    std::string id = at_type + "--" + synth_uuid("agent:" + at_type);
    auto [it, inserted] =
        pb_.agent_definitions.emplace(id, cacao::AgentTarget{});
    if (inserted) {
      it->second.at_type = at_type;
      it->second.name = human ? "Imported operator" : "Imported service";
    }
    return id;
  }

  std::string ensure_end(const std::string& name) {
    std::string id = "end--" + synth_uuid(name);
    if (!pb_.workflow.contains(id)) {
      WorkflowStep step;
      step.payload = cacao::EndPayload{};
      pb_.workflow.emplace(id, std::move(step));
    }
    return id;
  }

  bool fork_needs_refs(const WorkflowStep& step) const {
    if (const auto* p = std::get_if<cacao::ParallelPayload>(&step.payload))
      return p->next_steps.empty();
    if (const auto* p = std::get_if<cacao::IfConditionPayload>(&step.payload))
      return p->on_true.empty();
    if (const auto* p =
            std::get_if<cacao::SwitchConditionPayload>(&step.payload))
      return p->cases.empty();
    return false;
  }

  void wire_step(const FlowNode& node, const ScopeGraph& graph,
                 const std::set<std::string>& joins) {
    const std::string& step_id = step_of_node_.at(node.id);
    WorkflowStep& step = pb_.workflow.at(step_id);
    const bool gateway_fork = node.is_gateway();

    if (gateway_fork && fork_needs_refs(step)) {
      std::vector<BranchRef> branches;
      const std::string& join = graph.join_of(node.id);
      for (const SequenceFlow* flow : graph.out_flows(node.id)) {
        if (flow->target_ref == join) continue;
        branches.push_back({flow, resolve_step(*flow)});
      }
      apply_structural_refs(step.payload, branches, node);
    }

    const std::string& exit =
        gateway_fork ? graph.join_of(node.id) : node.id;
    for (const SequenceFlow* flow : graph.out_flows(exit)) {
      if (joins.contains(flow->target_ref)) {
        // Draining into a join is how branches return; only end steps may
        // do it silently. Anything else gets a synthesized end to land on.
        if (step.kind() == StepKind::End) continue;
        if (strict())
          corrupt("flow \"" + flow->id + "\" leaves \"" + node.id +
                  "\" into a converging gateway without an end step");
        std::string end_id = ensure_end("branch-end:" + node.id);
        if (step.on_completion && *step.on_completion == end_id) continue;
        assign_continuation(step, "", std::move(end_id), node);
        continue;
      }
      assign_continuation(step, continuation_kind(*flow), resolve_step(*flow),
                          node);
    }
  }

  std::string resolve_step(const SequenceFlow& flow) const {
    auto it = step_of_node_.find(flow.target_ref);
    if (it == step_of_node_.end())
      corrupt("flow \"" + flow.id + "\" targets \"" + flow.target_ref +
              "\", which does not import as a step");
    return it->second;
  }

  void assign_continuation(WorkflowStep& step, const std::string& kind,
                           std::string target, const FlowNode& node) {
    std::optional<std::string>* slot = nullptr;
    if (kind.empty())
      slot = &step.on_completion;
    else if (kind == "success")
      slot = &step.on_success;
    else if (kind == "failure")
      slot = &step.on_failure;
    else
      corrupt("element \"" + node.id + "\" has an outgoing \"" + kind +
              "\" flow outside a gateway");
    if (slot->has_value())
      corrupt("element \"" + node.id + "\" has two outgoing " +
              (kind.empty() ? "completion" : kind) + " flows");
    *slot = std::move(target);
  }

  void apply_structural_refs(cacao::StepPayload& payload,
                             const std::vector<BranchRef>& branches,
                             const FlowNode& node) {
    if (auto* parallel = std::get_if<cacao::ParallelPayload>(&payload)) {
      for (const BranchRef& branch : branches)
        parallel->next_steps.push_back(branch.entry_step);
      if (parallel->next_steps.empty())
        corrupt("element \"" + node.id + "\" forks into no branches");
      return;
    }
    if (auto* when = std::get_if<cacao::IfConditionPayload>(&payload)) {
      for (const BranchRef& branch : branches) {
        std::string kind = branch_kind(*branch.flow);
        if (kind == "true") {
          if (!when->on_true.empty())
            corrupt("element \"" + node.id + "\" has two true branches");
          when->on_true = branch.entry_step;
          if (branch.flow->condition &&
              !branch.flow->condition->text.empty())
            when->condition = branch.flow->condition->text;
        } else if (kind == "false") {
          if (when->on_false)
            corrupt("element \"" + node.id + "\" has two false branches");
          when->on_false = branch.entry_step;
        } else {
          corrupt("flow \"" + branch.flow->id +
                  "\" is neither the true nor the false branch");
        }
      }
      if (when->on_true.empty())
        corrupt("element \"" + node.id + "\" has no true branch");
      if (when->condition.empty()) when->condition = "true";
      return;
    }
    auto& chooser = std::get<cacao::SwitchConditionPayload>(payload);
    int index = 0;
    for (const BranchRef& branch : branches) {
      ++index;
      std::string label;
      if (const std::string* v =
              bag_value(branch.flow->extensions, attr::kCaseLabel))
        label = *v;
      else if (branch.flow->name && !branch.flow->name->empty())
        label = *branch.flow->name;
      else
        label = "case-" + std::to_string(index);
      std::string candidate = label;
      int suffix = 2;
      while (chooser.cases.contains(candidate))
        candidate = label + "-" + std::to_string(suffix++);
      chooser.cases.emplace(std::move(candidate), branch.entry_step);
    }
    if (chooser.cases.empty())
      corrupt("element \"" + node.id + "\" forks into no branches");
    if (chooser.switch_expression.empty())
      chooser.switch_expression =
          node.name && !node.name->empty() ? *node.name : "case";
  }

  const bpmn::Definitions& defs_;
  ImportPolicy policy_;
  Playbook pb_;
  std::map<std::string, std::string> step_of_node_;
};

}  // namespace

Playbook map_to_cacao(const bpmn::Definitions& definitions,
                      const ImportPolicy& policy) {
  return ReverseMapper(definitions, policy).run();
}

}  // namespace cacaobpmn::mapping
