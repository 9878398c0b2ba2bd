// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cacaobpmn/xml.hpp"

namespace cacaobpmn::bpmn {

inline constexpr std::string_view kModelNs =
    "http://www.omg.org/spec/BPMN/20100524/MODEL";
inline constexpr std::string_view kDiNs =
    "http://www.omg.org/spec/BPMN/20100524/DI";
inline constexpr std::string_view kDcNs =
    "http://www.omg.org/spec/DD/20100524/DC";
inline constexpr std::string_view kDdNs =
    "http://www.omg.org/spec/DD/20100524/DI";
inline constexpr std::string_view kXsiNs =
    "http://www.w3.org/2001/XMLSchema-instance";
inline constexpr std::string_view kCacaoNs = "urn:cacao:bpmn:2.0";
inline constexpr std::string_view kConditionLanguage = "urn:cacao:condition";

/// Namespaced attributes carried on an element beyond the BPMN-defined
/// ones. Sorted so serialization is reproducible.
using ExtensionBag = std::map<xml::QName, std::string>;

enum class TaskKind { Abstract, User, Service };
enum class GatewayDirection { Diverging, Converging };

struct ConditionExpression {
  std::string text;
  std::string language;
};

struct SequenceFlow {
  std::string id;
  std::string source_ref;
  std::string target_ref;
  std::optional<std::string> name;
  std::optional<ConditionExpression> condition;
  ExtensionBag extensions;
};

struct TextAnnotation {
  std::string id;
  std::string text;
};

struct Association {
  std::string id;
  std::string source_ref;
  std::string target_ref;
};

struct Group {
  std::string id;
  std::string category_value_ref;  // empty when the group is uncategorized
};

struct Category {
  std::string id;
  std::string value_id;
  std::string value;
};

struct ItemDefinition {
  std::string id;
  std::string structure_ref;
};

struct ProcessProperty {
  std::string id;
  std::string name;
  std::string item_subject_ref;
  ExtensionBag extensions;
};

struct LoopCharacteristics {
  std::string condition_text;
  bool test_before = true;
};

struct TaskPayload {
  TaskKind kind = TaskKind::Abstract;
};

struct CallActivityPayload {
  std::string called_element;
};

struct ExclusiveGatewayPayload {
  GatewayDirection direction = GatewayDirection::Diverging;
  std::optional<std::string> default_flow;
};

struct ParallelGatewayPayload {
  GatewayDirection direction = GatewayDirection::Diverging;
};

struct FlowNode;

struct SubProcessPayload {
  std::vector<FlowNode> nodes;
  std::vector<SequenceFlow> flows;
  std::vector<TextAnnotation> annotations;
  std::vector<Association> associations;
  std::optional<LoopCharacteristics> loop;
};

using NodePayload =
    std::variant<TaskPayload, CallActivityPayload, ExclusiveGatewayPayload,
                 ParallelGatewayPayload, SubProcessPayload>;

struct FlowNode {
  std::string id;
  std::optional<std::string> name;
  ExtensionBag extensions;
  NodePayload payload;

  bool is_gateway() const {
    return std::holds_alternative<ExclusiveGatewayPayload>(payload) ||
           std::holds_alternative<ParallelGatewayPayload>(payload);
  }
};

struct Process {
  std::string id;
  std::optional<std::string> name;
  std::vector<FlowNode> flow_nodes;
  std::vector<SequenceFlow> sequence_flows;
  std::vector<TextAnnotation> annotations;
  std::vector<Association> associations;
  std::vector<Group> groups;
  std::vector<ProcessProperty> properties;
  ExtensionBag extensions;
};

struct Bounds {
  double x = 0;
  double y = 0;
  double width = 0;
  double height = 0;
};

struct Waypoint {
  double x = 0;
  double y = 0;
};

struct DiagramShape {
  std::string id;
  std::string bpmn_element;
  Bounds bounds;
  bool is_expanded = false;
};

struct DiagramEdge {
  std::string id;
  std::string bpmn_element;
  std::vector<Waypoint> waypoints;
};

struct Diagram {
  std::string id;
  std::string plane_id;
  std::string bpmn_element;  // the process the plane depicts
  std::vector<DiagramShape> shapes;
  std::vector<DiagramEdge> edges;
};

struct Definitions {
  std::string target_namespace;
  Process process;
  std::vector<ItemDefinition> item_definitions;
  std::vector<Category> categories;
  std::optional<Diagram> diagram;
  // Processes beyond the first are not converted; strict imports reject
  // documents where this is non-empty.
  std::vector<std::string> ignored_process_ids;
};

}  // namespace cacaobpmn::bpmn
