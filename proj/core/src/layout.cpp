// SPDX-License-Identifier: Apache-2.0
#include "cacaobpmn/layout/layout.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cacaobpmn::layout {
namespace {

using bpmn::Association;
using bpmn::Bounds;
using bpmn::FlowNode;
using bpmn::SequenceFlow;
using bpmn::TextAnnotation;

struct Fragment {
  std::map<std::string, Bounds> shapes;  // scope-relative, nested included
  double width = 0;
  double height = 0;
};

class Layouter {
 public:
  Layouter(bpmn::Definitions& defs, const LayoutConfig& cfg)
      : defs_(defs), cfg_(cfg) {}

  void run() {
    const bpmn::Process& process = defs_.process;

    // Annotations hanging off a group describe the wrap, not the flow;
    // they lay out beside the groups at the end.
    std::set<std::string> group_ids;
    for (const bpmn::Group& group : process.groups) group_ids.insert(group.id);
    std::set<std::string> beside_groups;
    for (const Association& association : process.associations) {
      if (group_ids.contains(association.source_ref))
        beside_groups.insert(association.target_ref);
      else if (group_ids.contains(association.target_ref))
        beside_groups.insert(association.source_ref);
    }
    std::vector<TextAnnotation> flow_annotations;
    std::vector<const TextAnnotation*> group_annotations;
    for (const TextAnnotation& annotation : process.annotations) {
      if (beside_groups.contains(annotation.id))
        group_annotations.push_back(&annotation);
      else
        flow_annotations.push_back(annotation);
    }

    Fragment fragment =
        layout_scope(process.flow_nodes, process.sequence_flows,
                     flow_annotations, process.associations);
    for (const auto& [id, bounds] : fragment.shapes)
      placed_.emplace(id, Bounds{bounds.x + cfg_.margin,
                                 bounds.y + cfg_.margin, bounds.width,
                                 bounds.height});

    // Groups wrap the whole process, one nesting ring per group.
    double wrap_right = cfg_.margin + fragment.width;
    double wrap_top = cfg_.margin;
    int ring = 0;
    for (const bpmn::Group& group : process.groups) {
      ++ring;
      double pad = std::min(cfg_.group_pad * ring, cfg_.margin);
      Bounds bounds{cfg_.margin - pad, cfg_.margin - pad,
                    fragment.width + 2 * pad, fragment.height + 2 * pad};
      wrap_right = std::max(wrap_right, bounds.x + bounds.width);
      wrap_top = std::min(wrap_top, bounds.y);
      placed_.emplace(group.id, bounds);
    }
    double stack_y = wrap_top;
    for (const TextAnnotation* annotation : group_annotations) {
      double height = annotation_height(*annotation);
      placed_.emplace(annotation->id,
                      Bounds{wrap_right + cfg_.stack_gap, stack_y,
                             cfg_.annotation_width, height});
      stack_y += height + cfg_.stack_gap;
    }

    std::map<std::string, std::vector<bpmn::Waypoint>> edges;
    walk_edges(process.flow_nodes, process.sequence_flows,
               process.associations, edges);

    bpmn::Diagram diagram;
    if (defs_.diagram) {
      diagram = *defs_.diagram;
    } else {
      diagram.id = "diagram-" + process.id;
      diagram.plane_id = "plane-" + process.id;
      diagram.bpmn_element = process.id;
    }
    std::set<std::string> shaped;
    std::set<std::string> edged;
    for (const bpmn::DiagramShape& shape : diagram.shapes)
      shaped.insert(shape.bpmn_element);
    for (const bpmn::DiagramEdge& edge : diagram.edges)
      edged.insert(edge.bpmn_element);
    for (const auto& [id, bounds] : placed_) {
      if (shaped.contains(id)) continue;
      bpmn::DiagramShape shape;
      shape.id = "shape-" + id;
      shape.bpmn_element = id;
      shape.bounds = bounds;
      shape.is_expanded = expanded_.contains(id);
      diagram.shapes.push_back(std::move(shape));
    }
    for (auto& [id, points] : edges) {
      if (edged.contains(id)) continue;
      diagram.edges.push_back(
          bpmn::DiagramEdge{"edge-" + id, id, std::move(points)});
    }
    defs_.diagram = std::move(diagram);
  }

 private:
  double annotation_height(const TextAnnotation& annotation) const {
    auto lines = 1 + std::count(annotation.text.begin(),
                                annotation.text.end(), '\n');
    return static_cast<double>(lines) * cfg_.annotation_line_height +
           cfg_.annotation_text_pad;
  }

  Fragment layout_scope(const std::vector<FlowNode>& nodes,
                        const std::vector<SequenceFlow>& flows,
                        const std::vector<TextAnnotation>& annotations,
                        const std::vector<Association>& associations) {
    Fragment fragment;
    if (nodes.empty() && annotations.empty()) return fragment;

    // Sizes; sub-process interiors lay out first and dictate their box.
    std::map<std::string, Fragment> interiors;
    std::map<std::string, Bounds> sizes;
    for (const FlowNode& node : nodes) {
      Bounds size;
      if (node.is_gateway()) {
        size.width = cfg_.gateway_size;
        size.height = cfg_.gateway_size;
      } else if (const auto* sub =
                     std::get_if<bpmn::SubProcessPayload>(&node.payload)) {
        Fragment interior = layout_scope(sub->nodes, sub->flows,
                                         sub->annotations, sub->associations);
        size.width = std::max(interior.width + 2 * cfg_.sub_process_pad,
                              cfg_.task_width);
        size.height = std::max(interior.height + 2 * cfg_.sub_process_pad,
                               cfg_.task_height);
        interiors.emplace(node.id, std::move(interior));
        expanded_.insert(node.id);
      } else {
        size.width = cfg_.task_width;
        size.height = cfg_.task_height;
      }
      sizes.emplace(node.id, size);
    }

    // Longest-path layering. Nodes a cycle keeps off the ready set land in
    // their own trailing columns instead of failing.
    std::map<std::string, int> layer;
    std::map<std::string, int> in_degree;
    std::map<std::string, std::vector<const SequenceFlow*>> out;
    for (const FlowNode& node : nodes) {
      layer[node.id] = 0;
      in_degree[node.id] = 0;
    }
    for (const SequenceFlow& flow : flows) {
      if (!in_degree.contains(flow.source_ref) ||
          !in_degree.contains(flow.target_ref))
        continue;
      out[flow.source_ref].push_back(&flow);
      ++in_degree[flow.target_ref];
    }
    std::set<std::string> ready;
    for (const auto& [id, degree] : in_degree)
      if (degree == 0) ready.insert(id);
    int deepest = 0;
    while (!ready.empty()) {
      std::string id = *ready.begin();
      ready.erase(ready.begin());
      deepest = std::max(deepest, layer[id]);
      for (const SequenceFlow* flow : out[id]) {
        layer[flow->target_ref] =
            std::max(layer[flow->target_ref], layer[id] + 1);
        if (--in_degree[flow->target_ref] == 0)
          ready.insert(flow->target_ref);
      }
    }
    for (const auto& [id, degree] : in_degree)
      if (degree > 0) layer[id] = ++deepest;

    // Which annotations sit above which node.
    std::set<std::string> annotation_ids;
    for (const TextAnnotation& annotation : annotations)
      annotation_ids.insert(annotation.id);
    std::map<std::string, std::string> host_of;
    for (const Association& association : associations) {
      std::string annotation_id, host;
      if (annotation_ids.contains(association.target_ref)) {
        annotation_id = association.target_ref;
        host = association.source_ref;
      } else if (annotation_ids.contains(association.source_ref)) {
        annotation_id = association.source_ref;
        host = association.target_ref;
      } else {
        continue;
      }
      if (sizes.contains(host)) host_of.try_emplace(annotation_id, host);
    }
    std::map<std::string, std::vector<const TextAnnotation*>> annos_of;
    std::vector<const TextAnnotation*> loose;
    for (const TextAnnotation& annotation : annotations) {
      auto it = host_of.find(annotation.id);
      if (it != host_of.end())
        annos_of[it->second].push_back(&annotation);
      else
        loose.push_back(&annotation);
    }

    std::map<int, std::vector<const FlowNode*>> columns;
    for (const FlowNode& node : nodes)
      columns[layer[node.id]].push_back(&node);

    double x = 0;
    for (auto& [depth, column] : columns) {
      (void)depth;
      std::sort(column.begin(), column.end(),
                [](const FlowNode* a, const FlowNode* b) {
                  return a->id < b->id;
                });
      double column_width = 0;
      for (const FlowNode* node : column)
        column_width = std::max(column_width, sizes.at(node->id).width);
      double y = 0;
      for (const FlowNode* node : column) {
        const Bounds& size = sizes.at(node->id);
        double offset = 0;
        for (const TextAnnotation* annotation : annos_of[node->id]) {
          double height = annotation_height(*annotation);
          fragment.shapes[annotation->id] =
              Bounds{x, y + offset, cfg_.annotation_width, height};
          offset += height + cfg_.stack_gap;
        }
        Bounds bounds{x + (column_width - size.width) / 2, y + offset,
                      size.width, size.height};
        fragment.shapes[node->id] = bounds;
        auto interior = interiors.find(node->id);
        if (interior != interiors.end()) {
          for (const auto& [inner_id, inner] : interior->second.shapes)
            fragment.shapes[inner_id] =
                Bounds{bounds.x + cfg_.sub_process_pad + inner.x,
                       bounds.y + cfg_.sub_process_pad + inner.y, inner.width,
                       inner.height};
        }
        double cell_height = offset + size.height;
        y += std::max(cfg_.min_row_pitch, cell_height + cfg_.row_gap);
      }
      x += std::max(cfg_.min_column_pitch, column_width + cfg_.column_gap);
    }

    for (const auto& [id, bounds] : fragment.shapes) {
      (void)id;
      fragment.width = std::max(fragment.width, bounds.x + bounds.width);
      fragment.height = std::max(fragment.height, bounds.y + bounds.height);
    }

    // Annotations nothing claims stack under the flow.
    if (!loose.empty()) {
      double y = fragment.height + (fragment.height > 0 ? cfg_.row_gap : 0);
      for (const TextAnnotation* annotation : loose) {
        double height = annotation_height(*annotation);
        fragment.shapes[annotation->id] =
            Bounds{0, y, cfg_.annotation_width, height};
        y += height + cfg_.stack_gap;
      }
      fragment.height = y - cfg_.stack_gap;
      fragment.width = std::max(fragment.width, cfg_.annotation_width);
    }
    return fragment;
  }

  const Bounds* find_bounds(const std::string& id) const {
    auto it = placed_.find(id);
    return it == placed_.end() ? nullptr : &it->second;
  }

  void walk_edges(const std::vector<FlowNode>& nodes,
                  const std::vector<SequenceFlow>& flows,
                  const std::vector<Association>& associations,
                  std::map<std::string, std::vector<bpmn::Waypoint>>& edges) {
    for (const SequenceFlow& flow : flows) {
      const Bounds* source = find_bounds(flow.source_ref);
      const Bounds* target = find_bounds(flow.target_ref);
      if (source == nullptr || target == nullptr) continue;
      double sx = source->x + source->width;
      double sy = source->y + source->height / 2;
      double tx = target->x;
      double ty = target->y + target->height / 2;
      std::vector<bpmn::Waypoint> points;
      points.push_back({sx, sy});
      if (sy != ty) {
        double mid = (sx + tx) / 2;
        points.push_back({mid, sy});
        points.push_back({mid, ty});
      }
      points.push_back({tx, ty});
      edges.emplace(flow.id, std::move(points));
    }
    for (const Association& association : associations) {
      const Bounds* source = find_bounds(association.source_ref);
      const Bounds* target = find_bounds(association.target_ref);
      if (source == nullptr || target == nullptr) continue;
      std::vector<bpmn::Waypoint> points;
      points.push_back({source->x + source->width / 2,
                        source->y + source->height / 2});
      points.push_back({target->x + target->width / 2,
                        target->y + target->height / 2});
      edges.emplace(association.id, std::move(points));
    }
    for (const FlowNode& node : nodes)
      if (const auto* sub = std::get_if<bpmn::SubProcessPayload>(&node.payload))
        walk_edges(sub->nodes, sub->flows, sub->associations, edges);
  }

  bpmn::Definitions& defs_;
  LayoutConfig cfg_;
  std::map<std::string, Bounds> placed_;
  std::set<std::string> expanded_;
};

}  // namespace

void attach_diagram(bpmn::Definitions& definitions,
                    const LayoutConfig& config) {
  Layouter(definitions, config).run();
}

}  // namespace cacaobpmn::layout
