// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cacaobpmn/bpmn/model.hpp"
#include "cacaobpmn/violation.hpp"

namespace cacaobpmn::bpmn {

/// Structural well-formedness check over a parsed definitions document,
/// reported in a deterministic order.
///
/// Codes:
///   duplicate-id           id used by more than one element
///   dangling-flow-source   sequence flow source outside its scope
///   dangling-flow-target   sequence flow target outside its scope
///   gateway-degree         diverging gateway without 2+ outgoing flows,
///                          converging without 2+ incoming
///   condition-placement    condition on a flow not leaving a diverging
///                          exclusive gateway
///   condition-language     condition expression in an unsupported language
///   dangling-association   association endpoint does not exist
///   dangling-category-ref  group references a missing category value
///   dangling-item-ref      property references a missing item definition
///   subprocess-structure   sub-process interior empty, disconnected, or
///                          without a unique entry
///   annotation-empty       text annotation without text
///   dangling-diagram-ref   diagram element references a missing model
///                          element
///   diagram-coverage       diagram misses or duplicates a node or flow
Violations check_well_formed(const Definitions& definitions);

/// True for violations a best-effort import can work around: presentation
/// problems (diagram codes) and foreign condition languages.
bool tolerable_on_import(const Violation& violation);

}  // namespace cacaobpmn::bpmn
