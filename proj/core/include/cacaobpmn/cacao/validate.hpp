// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

#include "cacaobpmn/cacao/model.hpp"
#include "cacaobpmn/violation.hpp"

namespace cacaobpmn::cacao {

/// Conformance check over a structurally well-formed playbook. Returns the
/// complete list of violations in a deterministic order (empty means the
/// playbook is conformant and convertible).
///
/// Codes:
///   versioning-missing     created or modified absent
///   versioning-order       modified precedes created
///   identifier-pattern     id not shaped like "<type>--<uuid>"
///   variable-name          variable not named "__name__"
///   empty-name             blank playbook name
///   empty-commands         action step without commands
///   empty-condition        blank condition or switch expression
///   empty-cases            switch step without cases
///   parallel-branches      fewer than two distinct parallel branches
///   start-count            workflow has no or multiple start steps
///   workflow-start-kind    workflow_start is not a start step
///   start-entry            an edge targets a start step
///   dangling-reference     reference to a missing step or definition
///   unreachable-step       step not reachable from workflow_start
///   end-step-continuation  end step with outgoing edges
///   edge-conflict          on_completion mixed with on_success/on_failure
///   edge-style             on_success/on_failure on a non-action step
///   dangling-chain         non-end step with no outgoing edge
///   workflow-cycle         workflow graph is cyclic
///   signature-signee       signature without a signee
Violations validate(const Playbook& playbook);

/// Conformance check over raw document text. Adds checks only visible
/// before JSON parsing collapses repeated object members, then parses and
/// delegates to validate(). Throws CacaoError when the text is not a
/// structurally sound playbook document.
///
/// Additional codes:
///   duplicate-case         a switch case label is declared twice
///   duplicate-property     any other object member is declared twice
Violations validate_document(std::string_view text);

}  // namespace cacaobpmn::cacao
