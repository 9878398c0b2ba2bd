// SPDX-License-Identifier: Apache-2.0
#include "cacaobpmn/bpmn/codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <utility>

namespace cacaobpmn::bpmn {

namespace {

using xml::Element;
using xml::QName;

QName model(const char* local) { return QName{std::string(kModelNs), local}; }
QName plain(const char* local) { return QName{std::string(), local}; }
QName bpmndi(const char* local) { return QName{std::string(kDiNs), local}; }
QName dc(const char* local) { return QName{std::string(kDcNs), local}; }
QName dd(const char* local) { return QName{std::string(kDdNs), local}; }

[[noreturn]] void fail(const Element& element, const std::string& what) {
  throw BpmnError("<" + element.name.local + "> at line " +
                  std::to_string(element.line) + ": " + what);
}

const std::string* attr(const Element& element, const char* local) {
  return element.find_attribute(QName{std::string(), local});
}

std::string require_attr(const Element& element, const char* local) {
  if (const std::string* value = attr(element, local)) return *value;
  fail(element, "missing attribute \"" + std::string(local) + "\"");
}

double number_attr(const Element& element, const char* local) {
  std::string text = require_attr(element, local);
  const char* begin = text.c_str();
  char* end = nullptr;
  double value = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size() || !std::isfinite(value))
    fail(element, "attribute \"" + std::string(local) +
                      "\" is not a number: \"" + text + "\"");
  return value;
}

void collect_extensions(const Element& element, ExtensionBag& bag) {
  for (const xml::Attribute& attribute : element.attributes) {
    if (attribute.name.ns.empty() || attribute.name.ns == kXsiNs) continue;
    bag.emplace(attribute.name, attribute.value);
  }
}

bool skippable(const Element& element) {
  if (element.name.ns != kModelNs) return false;
  const std::string& local = element.name.local;
  return local == "documentation" || local == "extensionElements" ||
         local == "incoming" || local == "outgoing";
}

bool untriggered_event(const Element& element) {
  for (const Element& child : element.children)
    if (!skippable(child)) return false;
  return true;
}

std::optional<ConditionExpression> parse_condition(const Element& element) {
  ConditionExpression condition;
  condition.text = element.text;
  if (const std::string* language = attr(element, "language"))
    condition.language = *language;
  return condition;
}

class Parser {
 public:
  Definitions run(const Element& root) {
    if (root.name != model("definitions")) {
      if (root.name.ns != kModelNs)
        fail(root, "root element is not in the BPMN model namespace");
      fail(root, "root element must be <definitions>");
    }
    Definitions definitions;
    if (const std::string* tns = attr(root, "targetNamespace"))
      definitions.target_namespace = *tns;

    bool have_process = false;
    bool have_diagram = false;
    for (const Element& child : root.children) {
      if (skippable(child)) continue;
      if (child.name == model("itemDefinition")) {
        ItemDefinition item;
        item.id = require_attr(child, "id");
        if (const std::string* ref = attr(child, "structureRef"))
          item.structure_ref = *ref;
        definitions.item_definitions.push_back(std::move(item));
      } else if (child.name == model("category")) {
        definitions.categories.push_back(parse_category(child));
      } else if (child.name == model("process")) {
        if (have_process) {
          definitions.ignored_process_ids.push_back(require_attr(child, "id"));
        } else {
          definitions.process = parse_process(child);
          have_process = true;
        }
      } else if (child.name == bpmndi("BPMNDiagram")) {
        if (!have_diagram) {
          definitions.diagram = parse_diagram(child);
          have_diagram = true;
        }
      } else {
        fail(child, "unsupported element");
      }
    }
    if (!have_process) fail(root, "document contains no <process>");
    if (definitions.diagram) filter_diagram(*definitions.diagram);
    return definitions;
  }

 private:
  Category parse_category(const Element& element) {
    Category category;
    category.id = require_attr(element, "id");
    for (const Element& child : element.children) {
      if (skippable(child)) continue;
      if (child.name != model("categoryValue")) fail(child, "unsupported element");
      category.value_id = require_attr(child, "id");
      if (const std::string* value = attr(child, "value"))
        category.value = *value;
    }
    return category;
  }

  Process parse_process(const Element& element) {
    Process process;
    process.id = require_attr(element, "id");
    if (const std::string* name = attr(element, "name")) process.name = *name;
    collect_extensions(element, process.extensions);
    parse_scope(element, process.flow_nodes, process.sequence_flows,
                process.annotations, process.associations, &process);
    return process;
  }

  void parse_scope(const Element& element, std::vector<FlowNode>& nodes,
                   std::vector<SequenceFlow>& flows,
                   std::vector<TextAnnotation>& annotations,
                   std::vector<Association>& associations, Process* process) {
    std::set<std::string> dropped;
    std::vector<std::string> inferred_gateways;
    for (const Element& child : element.children) {
      if (skippable(child)) continue;
      if (child.name.ns != kModelNs) fail(child, "unsupported element");
      const std::string& local = child.name.local;
      if (local == "task" || local == "userTask" || local == "serviceTask") {
        TaskKind kind = local == "userTask"  ? TaskKind::User
                        : local == "serviceTask" ? TaskKind::Service
                                                 : TaskKind::Abstract;
        nodes.push_back(parse_node(child, TaskPayload{kind}));
      } else if (local == "callActivity") {
        CallActivityPayload payload;
        if (const std::string* called = attr(child, "calledElement"))
          payload.called_element = *called;
        nodes.push_back(parse_node(child, std::move(payload)));
      } else if (local == "exclusiveGateway" || local == "parallelGateway") {
        bool inferred = false;
        GatewayDirection direction = parse_direction(child, inferred);
        FlowNode node;
        if (local == "exclusiveGateway") {
          ExclusiveGatewayPayload payload;
          payload.direction = direction;
          if (const std::string* def = attr(child, "default"))
            payload.default_flow = *def;
          node = parse_node(child, std::move(payload));
        } else {
          node = parse_node(child, ParallelGatewayPayload{direction});
        }
        if (inferred) inferred_gateways.push_back(node.id);
        nodes.push_back(std::move(node));
      } else if (local == "subProcess") {
        nodes.push_back(parse_subprocess(child));
      } else if (local == "sequenceFlow") {
        flows.push_back(parse_flow(child));
      } else if (local == "textAnnotation") {
        annotations.push_back(parse_annotation(child));
      } else if (local == "association") {
        Association association;
        association.id = require_attr(child, "id");
        association.source_ref = require_attr(child, "sourceRef");
        association.target_ref = require_attr(child, "targetRef");
        associations.push_back(std::move(association));
      } else if (local == "startEvent" || local == "endEvent") {
        if (!untriggered_event(child))
          fail(child, "events with triggers are not supported");
        dropped.insert(require_attr(child, "id"));
      } else if (local == "group" && process != nullptr) {
        Group group;
        group.id = require_attr(child, "id");
        if (const std::string* ref = attr(child, "categoryValueRef"))
          group.category_value_ref = *ref;
        process->groups.push_back(std::move(group));
      } else if (local == "property" && process != nullptr) {
        ProcessProperty property;
        property.id = require_attr(child, "id");
        if (const std::string* name = attr(child, "name"))
          property.name = *name;
        if (const std::string* item = attr(child, "itemSubjectRef"))
          property.item_subject_ref = *item;
        collect_extensions(child, property.extensions);
        process->properties.push_back(std::move(property));
      } else if (local == "laneSet" || local == "lane") {
        fail(child, "lanes are not supported");
      } else {
        fail(child, "unsupported element");
      }
    }

    if (!dropped.empty()) {
      for (const SequenceFlow& flow : flows)
        if (dropped.contains(flow.source_ref) ||
            dropped.contains(flow.target_ref))
          dropped_ids_.insert(flow.id);
      std::erase_if(flows, [&dropped](const SequenceFlow& flow) {
        return dropped.contains(flow.source_ref) ||
               dropped.contains(flow.target_ref);
      });
      std::erase_if(associations, [&dropped](const Association& association) {
        return dropped.contains(association.source_ref) ||
               dropped.contains(association.target_ref);
      });
      dropped_ids_.insert(dropped.begin(), dropped.end());
    }

    for (const std::string& id : inferred_gateways) {
      std::size_t in = 0;
      std::size_t out = 0;
      for (const SequenceFlow& flow : flows) {
        if (flow.source_ref == id) ++out;
        if (flow.target_ref == id) ++in;
      }
      GatewayDirection direction = in > out ? GatewayDirection::Converging
                                            : GatewayDirection::Diverging;
      for (FlowNode& node : nodes) {
        if (node.id != id) continue;
        if (auto* xg = std::get_if<ExclusiveGatewayPayload>(&node.payload))
          xg->direction = direction;
        else if (auto* pg = std::get_if<ParallelGatewayPayload>(&node.payload))
          pg->direction = direction;
      }
    }
  }

  GatewayDirection parse_direction(const Element& element, bool& inferred) {
    const std::string* value = attr(element, "gatewayDirection");
    if (value == nullptr || *value == "Unspecified") {
      inferred = true;
      return GatewayDirection::Diverging;
    }
    if (*value == "Diverging") return GatewayDirection::Diverging;
    if (*value == "Converging") return GatewayDirection::Converging;
    fail(element, "unsupported gateway direction \"" + *value + "\"");
  }

  template <typename Payload>
  FlowNode parse_node(const Element& element, Payload payload) {
    for (const Element& child : element.children)
      if (!skippable(child)) fail(child, "unsupported element");
    FlowNode node;
    node.id = require_attr(element, "id");
    if (const std::string* name = attr(element, "name")) node.name = *name;
    collect_extensions(element, node.extensions);
    node.payload = std::move(payload);
    return node;
  }

  FlowNode parse_subprocess(const Element& element) {
    FlowNode node;
    node.id = require_attr(element, "id");
    if (const std::string* name = attr(element, "name")) node.name = *name;
    collect_extensions(element, node.extensions);
    SubProcessPayload payload;

    // Loop characteristics sit among the children; pull them out first so
    // parse_scope only sees flow elements.
    Element stripped = element;
    std::erase_if(stripped.children, [&](const Element& child) {
      if (child.name != model("standardLoopCharacteristics")) {
        if (child.name == model("multiInstanceLoopCharacteristics"))
          fail(child, "multi-instance loops are not supported");
        return false;
      }
      LoopCharacteristics loop;
      if (const std::string* test = attr(child, "testBefore"))
        loop.test_before = *test == "true";
      else
        loop.test_before = false;
      for (const Element& inner : child.children) {
        if (skippable(inner)) continue;
        if (inner.name != model("loopCondition"))
          fail(inner, "unsupported element");
        loop.condition_text = inner.text;
      }
      payload.loop = std::move(loop);
      return true;
    });
    parse_scope(stripped, payload.nodes, payload.flows, payload.annotations,
                payload.associations, nullptr);
    node.payload = std::move(payload);
    return node;
  }

  SequenceFlow parse_flow(const Element& element) {
    SequenceFlow flow;
    flow.id = require_attr(element, "id");
    flow.source_ref = require_attr(element, "sourceRef");
    flow.target_ref = require_attr(element, "targetRef");
    if (const std::string* name = attr(element, "name")) flow.name = *name;
    collect_extensions(element, flow.extensions);
    for (const Element& child : element.children) {
      if (skippable(child)) continue;
      if (child.name != model("conditionExpression"))
        fail(child, "unsupported element");
      flow.condition = parse_condition(child);
    }
    return flow;
  }

  TextAnnotation parse_annotation(const Element& element) {
    TextAnnotation annotation;
    annotation.id = require_attr(element, "id");
    for (const Element& child : element.children) {
      if (skippable(child)) continue;
      if (child.name != model("text")) fail(child, "unsupported element");
      annotation.text = child.text;
    }
    return annotation;
  }

  Diagram parse_diagram(const Element& element) {
    Diagram diagram;
    if (const std::string* id = attr(element, "id")) diagram.id = *id;
    if (diagram.id.empty()) diagram.id = "diagram";
    for (const Element& child : element.children) {
      if (child.name != bpmndi("BPMNPlane")) continue;
      if (const std::string* id = attr(child, "id")) diagram.plane_id = *id;
      if (diagram.plane_id.empty()) diagram.plane_id = "plane";
      if (const std::string* ref = attr(child, "bpmnElement"))
        diagram.bpmn_element = *ref;
      for (const Element& item : child.children) {
        if (item.name == bpmndi("BPMNShape")) {
          DiagramShape shape;
          shape.bpmn_element = require_attr(item, "bpmnElement");
          if (const std::string* id = attr(item, "id")) shape.id = *id;
          if (shape.id.empty()) shape.id = "shape-" + shape.bpmn_element;
          if (const std::string* expanded = attr(item, "isExpanded"))
            shape.is_expanded = *expanded == "true";
          bool have_bounds = false;
          for (const Element& inner : item.children) {
            if (inner.name != dc("Bounds")) continue;
            shape.bounds.x = number_attr(inner, "x");
            shape.bounds.y = number_attr(inner, "y");
            shape.bounds.width = number_attr(inner, "width");
            shape.bounds.height = number_attr(inner, "height");
            have_bounds = true;
          }
          if (!have_bounds) fail(item, "shape is missing <dc:Bounds>");
          diagram.shapes.push_back(std::move(shape));
        } else if (item.name == bpmndi("BPMNEdge")) {
          DiagramEdge edge;
          edge.bpmn_element = require_attr(item, "bpmnElement");
          if (const std::string* id = attr(item, "id")) edge.id = *id;
          if (edge.id.empty()) edge.id = "edge-" + edge.bpmn_element;
          for (const Element& inner : item.children) {
            if (inner.name != dd("waypoint")) continue;
            edge.waypoints.push_back(
                Waypoint{number_attr(inner, "x"), number_attr(inner, "y")});
          }
          diagram.edges.push_back(std::move(edge));
        }
        // Labels and other presentational detail carry no model content.
      }
    }
    return diagram;
  }

  void filter_diagram(Diagram& diagram) {
    if (dropped_ids_.empty()) return;
    std::erase_if(diagram.shapes, [this](const DiagramShape& shape) {
      return dropped_ids_.contains(shape.bpmn_element);
    });
    std::erase_if(diagram.edges, [this](const DiagramEdge& edge) {
      return dropped_ids_.contains(edge.bpmn_element);
    });
  }

  std::set<std::string> dropped_ids_;
};

void add_extensions(Element& element, const ExtensionBag& bag) {
  for (const auto& [name, value] : bag) element.set_attribute(name, value);
}

void append_condition(Element& parent, const char* local,
                      const ConditionExpression& condition) {
  Element& expr = parent.add_child(model(local));
  expr.set_attribute(QName{std::string(kXsiNs), "type"},
                     "bpmn:tFormalExpression");
  if (!condition.language.empty())
    expr.set_attribute(plain("language"), condition.language);
  expr.text = condition.text;
}

template <typename T>
std::vector<const T*> sorted_by_id(const std::vector<T>& items) {
  std::vector<const T*> out;
  out.reserve(items.size());
  for (const T& item : items) out.push_back(&item);
  std::sort(out.begin(), out.end(),
            [](const T* a, const T* b) { return a->id < b->id; });
  return out;
}

void append_scope(Element& parent, const std::vector<FlowNode>& nodes,
                  const std::vector<SequenceFlow>& flows,
                  const std::vector<TextAnnotation>& annotations,
                  const std::vector<Association>& associations);

void append_node(Element& parent, const FlowNode& node) {
  std::visit(
      [&](const auto& payload) {
        using T = std::decay_t<decltype(payload)>;
        if constexpr (std::is_same_v<T, TaskPayload>) {
          const char* local = payload.kind == TaskKind::User      ? "userTask"
                              : payload.kind == TaskKind::Service ? "serviceTask"
                                                                  : "task";
          Element& el = parent.add_child(model(local));
          el.set_attribute(plain("id"), node.id);
          if (node.name) el.set_attribute(plain("name"), *node.name);
          add_extensions(el, node.extensions);
        } else if constexpr (std::is_same_v<T, CallActivityPayload>) {
          Element& el = parent.add_child(model("callActivity"));
          el.set_attribute(plain("id"), node.id);
          if (node.name) el.set_attribute(plain("name"), *node.name);
          el.set_attribute(plain("calledElement"), payload.called_element);
          add_extensions(el, node.extensions);
        } else if constexpr (std::is_same_v<T, ExclusiveGatewayPayload>) {
          Element& el = parent.add_child(model("exclusiveGateway"));
          el.set_attribute(plain("id"), node.id);
          if (node.name) el.set_attribute(plain("name"), *node.name);
          el.set_attribute(plain("gatewayDirection"),
                           payload.direction == GatewayDirection::Diverging
                               ? "Diverging"
                               : "Converging");
          if (payload.default_flow)
            el.set_attribute(plain("default"), *payload.default_flow);
          add_extensions(el, node.extensions);
        } else if constexpr (std::is_same_v<T, ParallelGatewayPayload>) {
          Element& el = parent.add_child(model("parallelGateway"));
          el.set_attribute(plain("id"), node.id);
          if (node.name) el.set_attribute(plain("name"), *node.name);
          el.set_attribute(plain("gatewayDirection"),
                           payload.direction == GatewayDirection::Diverging
                               ? "Diverging"
                               : "Converging");
          add_extensions(el, node.extensions);
        } else if constexpr (std::is_same_v<T, SubProcessPayload>) {
          Element& el = parent.add_child(model("subProcess"));
          el.set_attribute(plain("id"), node.id);
          if (node.name) el.set_attribute(plain("name"), *node.name);
          add_extensions(el, node.extensions);
          if (payload.loop) {
            Element& loop = el.add_child(model("standardLoopCharacteristics"));
            loop.set_attribute(plain("testBefore"),
                               payload.loop->test_before ? "true" : "false");
            append_condition(loop, "loopCondition",
                             ConditionExpression{payload.loop->condition_text,
                                                 std::string(
                                                     kConditionLanguage)});
          }
          append_scope(el, payload.nodes, payload.flows, payload.annotations,
                       payload.associations);
        }
      },
      node.payload);
}

void append_scope(Element& parent, const std::vector<FlowNode>& nodes,
                  const std::vector<SequenceFlow>& flows,
                  const std::vector<TextAnnotation>& annotations,
                  const std::vector<Association>& associations) {
  for (const FlowNode* node : sorted_by_id(nodes)) append_node(parent, *node);
  for (const SequenceFlow* flow : sorted_by_id(flows)) {
    Element& el = parent.add_child(model("sequenceFlow"));
    el.set_attribute(plain("id"), flow->id);
    if (flow->name) el.set_attribute(plain("name"), *flow->name);
    el.set_attribute(plain("sourceRef"), flow->source_ref);
    el.set_attribute(plain("targetRef"), flow->target_ref);
    add_extensions(el, flow->extensions);
    if (flow->condition)
      append_condition(el, "conditionExpression", *flow->condition);
  }
  for (const TextAnnotation* annotation : sorted_by_id(annotations)) {
    Element& el = parent.add_child(model("textAnnotation"));
    el.set_attribute(plain("id"), annotation->id);
    Element& text = el.add_child(model("text"));
    text.text = annotation->text;
  }
  for (const Association* association : sorted_by_id(associations)) {
    Element& el = parent.add_child(model("association"));
    el.set_attribute(plain("id"), association->id);
    el.set_attribute(plain("sourceRef"), association->source_ref);
    el.set_attribute(plain("targetRef"), association->target_ref);
  }
}

}  // namespace

Definitions parse_definitions(std::string_view text) {
  return Parser().run(xml::parse(text));
}

std::string format_number(double value) {
  double rounded = std::round(value);
  if (std::abs(value - rounded) < 1e-9 && std::abs(value) < 9e15) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%lld",
                  static_cast<long long>(std::llround(value)));
    return buffer;
  }
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.3f", value);
  std::string out = buffer;
  while (out.back() == '0') out.pop_back();
  if (out.back() == '.') out.pop_back();
  return out;
}

std::string serialize_definitions(const Definitions& definitions) {
  Element root;
  root.name = model("definitions");
  if (!definitions.target_namespace.empty())
    root.set_attribute(plain("targetNamespace"), definitions.target_namespace);

  for (const ItemDefinition* item : sorted_by_id(definitions.item_definitions)) {
    Element& el = root.add_child(model("itemDefinition"));
    el.set_attribute(plain("id"), item->id);
    if (!item->structure_ref.empty())
      el.set_attribute(plain("structureRef"), item->structure_ref);
  }
  for (const Category* category : sorted_by_id(definitions.categories)) {
    Element& el = root.add_child(model("category"));
    el.set_attribute(plain("id"), category->id);
    Element& value = el.add_child(model("categoryValue"));
    value.set_attribute(plain("id"), category->value_id);
    value.set_attribute(plain("value"), category->value);
  }

  const Process& process = definitions.process;
  Element& proc = root.add_child(model("process"));
  proc.set_attribute(plain("id"), process.id);
  if (process.name) proc.set_attribute(plain("name"), *process.name);
  add_extensions(proc, process.extensions);
  for (const ProcessProperty* property : sorted_by_id(process.properties)) {
    Element& el = proc.add_child(model("property"));
    el.set_attribute(plain("id"), property->id);
    if (!property->name.empty())
      el.set_attribute(plain("name"), property->name);
    if (!property->item_subject_ref.empty())
      el.set_attribute(plain("itemSubjectRef"), property->item_subject_ref);
    add_extensions(el, property->extensions);
  }
  append_scope(proc, process.flow_nodes, process.sequence_flows,
               process.annotations, process.associations);
  for (const Group* group : sorted_by_id(process.groups)) {
    Element& el = proc.add_child(model("group"));
    el.set_attribute(plain("id"), group->id);
    if (!group->category_value_ref.empty())
      el.set_attribute(plain("categoryValueRef"), group->category_value_ref);
  }

  if (definitions.diagram) {
    const Diagram& diagram = *definitions.diagram;
    Element& dg = root.add_child(bpmndi("BPMNDiagram"));
    dg.set_attribute(plain("id"), diagram.id);
    Element& plane = dg.add_child(bpmndi("BPMNPlane"));
    plane.set_attribute(plain("id"), diagram.plane_id);
    plane.set_attribute(plain("bpmnElement"), diagram.bpmn_element);
    for (const DiagramShape* shape : sorted_by_id(diagram.shapes)) {
      Element& el = plane.add_child(bpmndi("BPMNShape"));
      el.set_attribute(plain("id"), shape->id);
      el.set_attribute(plain("bpmnElement"), shape->bpmn_element);
      if (shape->is_expanded) el.set_attribute(plain("isExpanded"), "true");
      Element& bounds = el.add_child(dc("Bounds"));
      bounds.set_attribute(plain("x"), format_number(shape->bounds.x));
      bounds.set_attribute(plain("y"), format_number(shape->bounds.y));
      bounds.set_attribute(plain("width"), format_number(shape->bounds.width));
      bounds.set_attribute(plain("height"),
                           format_number(shape->bounds.height));
    }
    for (const DiagramEdge* edge : sorted_by_id(diagram.edges)) {
      Element& el = plane.add_child(bpmndi("BPMNEdge"));
      el.set_attribute(plain("id"), edge->id);
      el.set_attribute(plain("bpmnElement"), edge->bpmn_element);
      for (const Waypoint& waypoint : edge->waypoints) {
        Element& wp = el.add_child(dd("waypoint"));
        wp.set_attribute(plain("x"), format_number(waypoint.x));
        wp.set_attribute(plain("y"), format_number(waypoint.y));
      }
    }
  }

  xml::PrefixMap prefixes;
  prefixes.uri_to_prefix = {
      {std::string(kModelNs), "bpmn"}, {std::string(kDiNs), "bpmndi"},
      {std::string(kDcNs), "dc"},      {std::string(kDdNs), "di"},
      {std::string(kXsiNs), "xsi"},    {std::string(kCacaoNs), "cacao"},
  };
  return xml::write(root, prefixes);
}

}  // namespace cacaobpmn::bpmn
