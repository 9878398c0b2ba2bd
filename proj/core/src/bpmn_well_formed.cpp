// SPDX-License-Identifier: Apache-2.0
#include "cacaobpmn/bpmn/well_formed.hpp"

#include <map>
#include <set>

namespace cacaobpmn::bpmn {

namespace {

class Checker {
 public:
  explicit Checker(const Definitions& definitions) : defs_(definitions) {}

  Violations run() {
    collect_ids();
    check_scope(defs_.process.flow_nodes, defs_.process.sequence_flows,
                defs_.process.annotations, defs_.process.associations,
                "/" + defs_.process.id, true);
    check_references();
    check_diagram();
    return std::move(violations_);
  }

 private:
  void add(std::string code, std::string path, std::string message) {
    violations_.push_back(
        {std::move(code), std::move(path), std::move(message)});
  }

  void record_id(const std::string& id) { ++id_counts_[id]; }

  void collect_scope_ids(const std::vector<FlowNode>& nodes,
                         const std::vector<SequenceFlow>& flows,
                         const std::vector<TextAnnotation>& annotations,
                         const std::vector<Association>& associations) {
    for (const FlowNode& node : nodes) {
      record_id(node.id);
      model_ids_.insert(node.id);
      if (const auto* sub = std::get_if<SubProcessPayload>(&node.payload))
        collect_scope_ids(sub->nodes, sub->flows, sub->annotations,
                          sub->associations);
    }
    for (const SequenceFlow& flow : flows) {
      record_id(flow.id);
      model_ids_.insert(flow.id);
    }
    for (const TextAnnotation& annotation : annotations) {
      record_id(annotation.id);
      model_ids_.insert(annotation.id);
    }
    for (const Association& association : associations) {
      record_id(association.id);
      model_ids_.insert(association.id);
    }
  }

  void collect_ids() {
    record_id(defs_.process.id);
    collect_scope_ids(defs_.process.flow_nodes, defs_.process.sequence_flows,
                      defs_.process.annotations,
                      defs_.process.associations);
    for (const Group& group : defs_.process.groups) {
      record_id(group.id);
      model_ids_.insert(group.id);
    }
    for (const ProcessProperty& property : defs_.process.properties)
      record_id(property.id);
    for (const ItemDefinition& item : defs_.item_definitions)
      record_id(item.id);
    for (const Category& category : defs_.categories) {
      record_id(category.id);
      record_id(category.value_id);
    }
    for (const auto& [id, count] : id_counts_)
      if (count > 1)
        add("duplicate-id", "/" + id,
            "id is used by " + std::to_string(count) + " elements");
  }

  static const GatewayDirection* gateway_direction(const FlowNode& node) {
    if (const auto* xg = std::get_if<ExclusiveGatewayPayload>(&node.payload))
      return &xg->direction;
    if (const auto* pg = std::get_if<ParallelGatewayPayload>(&node.payload))
      return &pg->direction;
    return nullptr;
  }

  void check_scope(const std::vector<FlowNode>& nodes,
                   const std::vector<SequenceFlow>& flows,
                   const std::vector<TextAnnotation>& annotations,
                   const std::vector<Association>& associations,
                   const std::string& base, bool is_process_scope) {
    std::map<std::string, const FlowNode*> by_id;
    for (const FlowNode& node : nodes) by_id.emplace(node.id, &node);

    std::map<std::string, std::size_t> in_degree;
    std::map<std::string, std::size_t> out_degree;
    for (const SequenceFlow& flow : flows) {
      const std::string path = base + "/" + flow.id;
      if (!by_id.contains(flow.source_ref))
        add("dangling-flow-source", path,
            "source \"" + flow.source_ref + "\" is not a flow node here");
      else
        ++out_degree[flow.source_ref];
      if (!by_id.contains(flow.target_ref))
        add("dangling-flow-target", path,
            "target \"" + flow.target_ref + "\" is not a flow node here");
      else
        ++in_degree[flow.target_ref];
    }

    for (const auto& [id, node] : by_id) {
      const GatewayDirection* direction = gateway_direction(*node);
      if (direction == nullptr) continue;
      std::size_t in = in_degree.contains(id) ? in_degree.at(id) : 0;
      std::size_t out = out_degree.contains(id) ? out_degree.at(id) : 0;
      const std::string path = base + "/" + id;
      if (*direction == GatewayDirection::Diverging) {
        if (out < 2)
          add("gateway-degree", path,
              "diverging gateway needs at least two outgoing flows, has " +
                  std::to_string(out));
      } else if (in < 2) {
        add("gateway-degree", path,
            "converging gateway needs at least two incoming flows, has " +
                std::to_string(in));
      }
    }

    for (const SequenceFlow& flow : flows) {
      if (!flow.condition) continue;
      const std::string path = base + "/" + flow.id;
      auto it = by_id.find(flow.source_ref);
      const auto* source_payload =
          it == by_id.end()
              ? nullptr
              : std::get_if<ExclusiveGatewayPayload>(&it->second->payload);
      if (source_payload == nullptr ||
          source_payload->direction != GatewayDirection::Diverging)
        add("condition-placement", path,
            "conditions belong on flows leaving a diverging exclusive "
            "gateway");
      if (!flow.condition->language.empty() &&
          flow.condition->language != kConditionLanguage)
        add("condition-language", path,
            "unsupported condition language \"" + flow.condition->language +
                "\"");
    }

    std::set<std::string> association_targets;
    for (const FlowNode& node : nodes) association_targets.insert(node.id);
    for (const SequenceFlow& flow : flows) association_targets.insert(flow.id);
    for (const TextAnnotation& annotation : annotations) {
      association_targets.insert(annotation.id);
      if (annotation.text.empty())
        add("annotation-empty", base + "/" + annotation.id,
            "text annotation has no text");
    }
    if (is_process_scope)
      for (const Group& group : defs_.process.groups)
        association_targets.insert(group.id);
    for (const Association& association : associations) {
      const std::string path = base + "/" + association.id;
      if (!association_targets.contains(association.source_ref))
        add("dangling-association", path,
            "source \"" + association.source_ref + "\" does not exist here");
      if (!association_targets.contains(association.target_ref))
        add("dangling-association", path,
            "target \"" + association.target_ref + "\" does not exist here");
    }

    for (const auto& [id, node] : by_id) {
      const auto* sub = std::get_if<SubProcessPayload>(&node->payload);
      if (sub == nullptr) continue;
      const std::string path = base + "/" + id;
      check_subprocess_shape(*sub, path);
      check_scope(sub->nodes, sub->flows, sub->annotations, sub->associations,
                  path, false);
    }
  }

  void check_subprocess_shape(const SubProcessPayload& sub,
                              const std::string& path) {
    if (sub.nodes.empty()) {
      add("subprocess-structure", path, "sub-process has no flow nodes");
      return;
    }
    std::map<std::string, std::size_t> index;
    for (const FlowNode& node : sub.nodes)
      index.emplace(node.id, index.size());

    std::vector<std::set<std::size_t>> undirected(sub.nodes.size());
    std::set<std::string> has_incoming;
    std::set<std::string> has_outgoing;
    for (const SequenceFlow& flow : sub.flows) {
      auto s = index.find(flow.source_ref);
      auto t = index.find(flow.target_ref);
      if (s == index.end() || t == index.end()) continue;
      undirected[s->second].insert(t->second);
      undirected[t->second].insert(s->second);
      has_outgoing.insert(flow.source_ref);
      has_incoming.insert(flow.target_ref);
    }

    std::size_t entries = 0;
    std::size_t exits = 0;
    for (const FlowNode& node : sub.nodes) {
      if (!has_incoming.contains(node.id)) ++entries;
      if (!has_outgoing.contains(node.id)) ++exits;
    }
    if (entries != 1)
      add("subprocess-structure", path,
          "sub-process needs exactly one entry node, found " +
              std::to_string(entries));
    if (exits == 0)
      add("subprocess-structure", path, "sub-process has no exit node");

    std::vector<bool> seen(sub.nodes.size(), false);
    std::vector<std::size_t> stack = {0};
    seen[0] = true;
    while (!stack.empty()) {
      std::size_t current = stack.back();
      stack.pop_back();
      for (std::size_t next : undirected[current]) {
        if (!seen[next]) {
          seen[next] = true;
          stack.push_back(next);
        }
      }
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (!seen[i]) {
        add("subprocess-structure", path, "sub-process interior is not connected");
        break;
      }
  }

  void check_references() {
    std::set<std::string> category_values;
    for (const Category& category : defs_.categories)
      category_values.insert(category.value_id);
    for (const Group& group : defs_.process.groups)
      if (!group.category_value_ref.empty() &&
          !category_values.contains(group.category_value_ref))
        add("dangling-category-ref", "/" + defs_.process.id + "/" + group.id,
            "category value \"" + group.category_value_ref +
                "\" is not defined");

    std::set<std::string> items;
    for (const ItemDefinition& item : defs_.item_definitions)
      items.insert(item.id);
    for (const ProcessProperty& property : defs_.process.properties)
      if (!property.item_subject_ref.empty() &&
          !items.contains(property.item_subject_ref))
        add("dangling-item-ref", "/" + defs_.process.id + "/" + property.id,
            "item definition \"" + property.item_subject_ref +
                "\" is not defined");
  }

  void collect_coverage(const std::vector<FlowNode>& nodes,
                        const std::vector<SequenceFlow>& flows,
                        std::set<std::string>& expected_shapes,
                        std::set<std::string>& expected_edges) {
    for (const FlowNode& node : nodes) {
      expected_shapes.insert(node.id);
      if (const auto* sub = std::get_if<SubProcessPayload>(&node.payload))
        collect_coverage(sub->nodes, sub->flows, expected_shapes,
                         expected_edges);
    }
    for (const SequenceFlow& flow : flows) expected_edges.insert(flow.id);
  }

  void check_diagram() {
    if (!defs_.diagram) return;
    const Diagram& diagram = *defs_.diagram;
    const std::string base = "/" + diagram.id;
    if (diagram.bpmn_element != defs_.process.id)
      add("dangling-diagram-ref", base + "/" + diagram.plane_id,
          "plane depicts \"" + diagram.bpmn_element +
              "\", not the process \"" + defs_.process.id + "\"");

    std::map<std::string, std::size_t> shape_counts;
    for (const DiagramShape& shape : diagram.shapes) {
      if (!model_ids_.contains(shape.bpmn_element))
        add("dangling-diagram-ref", base + "/" + shape.id,
            "shape depicts unknown element \"" + shape.bpmn_element + "\"");
      ++shape_counts[shape.bpmn_element];
    }
    std::map<std::string, std::size_t> edge_counts;
    for (const DiagramEdge& edge : diagram.edges) {
      if (!model_ids_.contains(edge.bpmn_element))
        add("dangling-diagram-ref", base + "/" + edge.id,
            "edge depicts unknown element \"" + edge.bpmn_element + "\"");
      ++edge_counts[edge.bpmn_element];
    }

    std::set<std::string> expected_shapes;
    std::set<std::string> expected_edges;
    collect_coverage(defs_.process.flow_nodes, defs_.process.sequence_flows,
                     expected_shapes, expected_edges);
    for (const std::string& id : expected_shapes) {
      auto it = shape_counts.find(id);
      if (it == shape_counts.end())
        add("diagram-coverage", base, "no shape for \"" + id + "\"");
      else if (it->second > 1)
        add("diagram-coverage", base,
            std::to_string(it->second) + " shapes for \"" + id + "\"");
    }
    for (const std::string& id : expected_edges) {
      auto it = edge_counts.find(id);
      if (it == edge_counts.end())
        add("diagram-coverage", base, "no edge for \"" + id + "\"");
      else if (it->second > 1)
        add("diagram-coverage", base,
            std::to_string(it->second) + " edges for \"" + id + "\"");
    }
  }

  const Definitions& defs_;
  std::map<std::string, std::size_t> id_counts_;
  std::set<std::string> model_ids_;
  Violations violations_;
};

}  // namespace

Violations check_well_formed(const Definitions& definitions) {
  return Checker(definitions).run();
}

bool tolerable_on_import(const Violation& violation) {
  return violation.code == "dangling-diagram-ref" ||
         violation.code == "diagram-coverage" ||
         violation.code == "condition-language";
}

}  // namespace cacaobpmn::bpmn
