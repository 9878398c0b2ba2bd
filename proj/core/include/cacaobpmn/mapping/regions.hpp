// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cacaobpmn/bpmn/model.hpp"
#include "cacaobpmn/mapping/error.hpp"

namespace cacaobpmn::mapping {

/// Control-flow analysis of one scope: a process body or a sub-process
/// interior. The scope must be an acyclic flow graph with a unique entry,
/// and every diverging gateway must open a single-entry/single-exit region
/// that a converging gateway of the same kind closes. Anything else throws
/// MappingError naming the offending element, because such graphs have no
/// playbook equivalent.
class ScopeGraph {
 public:
  ScopeGraph(const std::vector<bpmn::FlowNode>& nodes,
             const std::vector<bpmn::SequenceFlow>& flows,
             std::string scope_label);

  const std::string& entry() const { return entry_; }
  const std::string& label() const { return label_; }

  bool has_node(const std::string& id) const { return index_.contains(id); }
  const bpmn::FlowNode& node(const std::string& id) const;

  /// Flows leaving/entering a node, ordered by flow id.
  const std::vector<const bpmn::SequenceFlow*>& out_flows(
      const std::string& id) const;
  const std::vector<const bpmn::SequenceFlow*>& in_flows(
      const std::string& id) const;

  /// Entry first; every node exactly once.
  const std::vector<std::string>& topological_order() const { return order_; }

  /// The converging gateway that closes the region a diverging gateway
  /// opens: the nearest one on its postdominator chain.
  const std::string& join_of(const std::string& gateway_id) const;

  /// Nodes strictly between a diverging gateway and its join.
  const std::set<std::string>& region_of(const std::string& gateway_id) const;

 private:
  [[noreturn]] void unstructured(const std::string& gateway_id,
                                 const std::string& why) const;

  std::string label_;
  std::string entry_;
  std::map<std::string, const bpmn::FlowNode*> index_;
  std::map<std::string, std::vector<const bpmn::SequenceFlow*>> out_;
  std::map<std::string, std::vector<const bpmn::SequenceFlow*>> in_;
  std::vector<std::string> order_;
  std::map<std::string, std::string> joins_;
  std::map<std::string, std::set<std::string>> regions_;
};

}  // namespace cacaobpmn::mapping
