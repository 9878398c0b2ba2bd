// SPDX-License-Identifier: Apache-2.0
#include "cacaobpmn/mapping/regions.hpp"

#include <algorithm>

namespace cacaobpmn::mapping {

namespace {

enum class GatewayRole { None, Diverging, Converging };

GatewayRole role_of(const bpmn::FlowNode& node) {
  if (const auto* xg =
          std::get_if<bpmn::ExclusiveGatewayPayload>(&node.payload))
    return xg->direction == bpmn::GatewayDirection::Diverging
               ? GatewayRole::Diverging
               : GatewayRole::Converging;
  if (const auto* pg =
          std::get_if<bpmn::ParallelGatewayPayload>(&node.payload))
    return pg->direction == bpmn::GatewayDirection::Diverging
               ? GatewayRole::Diverging
               : GatewayRole::Converging;
  return GatewayRole::None;
}

bool same_gateway_kind(const bpmn::FlowNode& a, const bpmn::FlowNode& b) {
  return std::holds_alternative<bpmn::ExclusiveGatewayPayload>(a.payload) ==
         std::holds_alternative<bpmn::ExclusiveGatewayPayload>(b.payload);
}

}  // namespace

ScopeGraph::ScopeGraph(const std::vector<bpmn::FlowNode>& nodes,
                       const std::vector<bpmn::SequenceFlow>& flows,
                       std::string scope_label)
    : label_(std::move(scope_label)) {
  if (nodes.empty())
    throw MappingError("scope \"" + label_ + "\" has no flow nodes");
  for (const bpmn::FlowNode& node : nodes) {
    index_.emplace(node.id, &node);
    out_[node.id];
    in_[node.id];
  }
  for (const bpmn::SequenceFlow& flow : flows) {
    if (!index_.contains(flow.source_ref) || !index_.contains(flow.target_ref))
      throw MappingError("scope \"" + label_ + "\": flow \"" + flow.id +
                         "\" references a node outside the scope");
    out_[flow.source_ref].push_back(&flow);
    in_[flow.target_ref].push_back(&flow);
  }
  auto by_id = [](const bpmn::SequenceFlow* a, const bpmn::SequenceFlow* b) {
    return a->id < b->id;
  };
  for (auto& [id, list] : out_) std::sort(list.begin(), list.end(), by_id);
  for (auto& [id, list] : in_) std::sort(list.begin(), list.end(), by_id);

  std::vector<std::string> entries;
  for (const auto& [id, list] : in_)
    if (list.empty()) entries.push_back(id);
  if (entries.size() != 1) {
    std::string detail;
    for (const std::string& id : entries) {
      if (!detail.empty()) detail += ", ";
      detail += "\"" + id + "\"";
    }
    throw MappingError("scope \"" + label_ + "\" needs exactly one entry " +
                       "node, found " + std::to_string(entries.size()) +
                       (detail.empty() ? "" : " (" + detail + ")"));
  }
  entry_ = entries.front();

  // Kahn with an ordered ready set keeps the order reproducible.
  std::map<std::string, std::size_t> pending;
  for (const auto& [id, list] : in_) pending[id] = list.size();
  std::set<std::string> ready = {entry_};
  while (!ready.empty()) {
    std::string id = *ready.begin();
    ready.erase(ready.begin());
    order_.push_back(id);
    for (const bpmn::SequenceFlow* flow : out_.at(id))
      if (--pending.at(flow->target_ref) == 0)
        ready.insert(flow->target_ref);
  }
  if (order_.size() != index_.size()) {
    std::string stuck;
    for (const auto& [id, count] : pending)
      if (count > 0) {
        stuck = id;
        break;
      }
    throw MappingError("scope \"" + label_ +
                       "\" contains a flow cycle involving \"" + stuck + "\"");
  }

  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < order_.size(); ++i) position[order_[i]] = i;
  const std::size_t n = order_.size();
  const std::size_t kExit = n;

  // Immediate postdominators, sinks wired to a virtual exit. One sweep in
  // reverse topological order settles a DAG.
  std::vector<std::size_t> ipdom(n + 1, kExit);
  auto meet_up = [&ipdom](std::size_t a, std::size_t b) {
    while (a != b) {
      while (a < b) a = ipdom[a];
      while (b < a) b = ipdom[b];
    }
    return a;
  };
  for (std::size_t i = n; i-- > 0;) {
    const std::vector<const bpmn::SequenceFlow*>& outs = out_.at(order_[i]);
    if (outs.empty()) {
      ipdom[i] = kExit;
      continue;
    }
    std::size_t meet = position.at(outs.front()->target_ref);
    for (const bpmn::SequenceFlow* flow : outs)
      meet = meet_up(meet, position.at(flow->target_ref));
    ipdom[i] = meet;
  }

  // Immediate dominators from the entry, same single sweep forward.
  std::vector<std::size_t> idom(n, 0);
  auto meet_down = [&idom](std::size_t a, std::size_t b) {
    while (a != b) {
      while (a > b) a = idom[a];
      while (b > a) b = idom[b];
    }
    return a;
  };
  for (std::size_t i = 1; i < n; ++i) {
    const std::vector<const bpmn::SequenceFlow*>& ins = in_.at(order_[i]);
    std::size_t meet = position.at(ins.front()->source_ref);
    for (const bpmn::SequenceFlow* flow : ins)
      meet = meet_down(meet, position.at(flow->source_ref));
    idom[i] = meet;
  }
  auto dominates = [&idom](std::size_t g, std::size_t j) {
    while (j > g) j = idom[j];
    return j == g;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const bpmn::FlowNode& gateway = *index_.at(order_[i]);
    if (role_of(gateway) != GatewayRole::Diverging) continue;

    std::size_t j = ipdom[i];
    while (j != kExit && role_of(*index_.at(order_[j])) !=
                             GatewayRole::Converging)
      j = ipdom[j];
    if (j == kExit)
      unstructured(gateway.id, "no converging gateway joins its branches");
    const bpmn::FlowNode& join = *index_.at(order_[j]);
    if (!same_gateway_kind(gateway, join))
      unstructured(gateway.id, "its branches join at \"" + join.id +
                                   "\", a gateway of a different kind");
    if (!dominates(i, j))
      unstructured(gateway.id, "its join \"" + join.id +
                                   "\" is reachable around the gateway");

    std::set<std::string> region;
    std::vector<std::string> stack;
    for (const bpmn::SequenceFlow* flow : out_.at(gateway.id))
      if (flow->target_ref != join.id) stack.push_back(flow->target_ref);
    while (!stack.empty()) {
      std::string id = std::move(stack.back());
      stack.pop_back();
      if (id == join.id || !region.insert(id).second) continue;
      for (const bpmn::SequenceFlow* flow : out_.at(id))
        stack.push_back(flow->target_ref);
    }
    for (const std::string& id : region) {
      for (const bpmn::SequenceFlow* flow : in_.at(id))
        if (flow->source_ref != gateway.id && !region.contains(flow->source_ref))
          unstructured(gateway.id, "\"" + id + "\" is entered from \"" +
                                       flow->source_ref +
                                       "\" outside the region");
      for (const bpmn::SequenceFlow* flow : out_.at(id))
        if (flow->target_ref != join.id && !region.contains(flow->target_ref))
          unstructured(gateway.id, "\"" + id + "\" escapes to \"" +
                                       flow->target_ref +
                                       "\" outside the region");
    }
    for (const bpmn::SequenceFlow* flow : in_.at(join.id))
      if (flow->source_ref != gateway.id && !region.contains(flow->source_ref))
        unstructured(gateway.id, "its join \"" + join.id +
                                     "\" is entered from \"" +
                                     flow->source_ref +
                                     "\" outside the region");

    joins_.emplace(gateway.id, join.id);
    regions_.emplace(gateway.id, std::move(region));
  }
}

void ScopeGraph::unstructured(const std::string& gateway_id,
                              const std::string& why) const {
  throw MappingError("scope \"" + label_ + "\" has unstructured flow: gateway \"" +
                     gateway_id + "\": " + why);
}

const bpmn::FlowNode& ScopeGraph::node(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end())
    throw MappingError("scope \"" + label_ + "\" has no node \"" + id + "\"");
  return *it->second;
}

const std::vector<const bpmn::SequenceFlow*>& ScopeGraph::out_flows(
    const std::string& id) const {
  auto it = out_.find(id);
  if (it == out_.end())
    throw MappingError("scope \"" + label_ + "\" has no node \"" + id + "\"");
  return it->second;
}

const std::vector<const bpmn::SequenceFlow*>& ScopeGraph::in_flows(
    const std::string& id) const {
  auto it = in_.find(id);
  if (it == in_.end())
    throw MappingError("scope \"" + label_ + "\" has no node \"" + id + "\"");
  return it->second;
}

const std::string& ScopeGraph::join_of(const std::string& gateway_id) const {
  auto it = joins_.find(gateway_id);
  if (it == joins_.end())
    throw MappingError("scope \"" + label_ + "\": \"" + gateway_id +
                       "\" is not a diverging gateway");
  return it->second;
}

const std::set<std::string>& ScopeGraph::region_of(
    const std::string& gateway_id) const {
  auto it = regions_.find(gateway_id);
  if (it == regions_.end())
    throw MappingError("scope \"" + label_ + "\": \"" + gateway_id +
                       "\" is not a diverging gateway");
  return it->second;
}

}  // namespace cacaobpmn::mapping
