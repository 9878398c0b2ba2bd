// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "cacaobpmn/bpmn/model.hpp"

namespace cacaobpmn::bpmn {

class BpmnError : public std::runtime_error {
 public:
  explicit BpmnError(const std::string& message)
      : std::runtime_error(message) {}
};

/// Parses a BPMN definitions document into the supported subset.
///
/// Leniencies (imported models rarely match our emission exactly):
/// untriggered start/end events are dropped together with their incident
/// flows, documentation/extensionElements/incoming/outgoing children and
/// diagram labels are skipped, and gateways without an explicit direction
/// get one inferred from their flow counts. Elements outside the subset
/// (triggered events, lanes, collaborations, unknown elements) raise
/// BpmnError with the offending line. XML syntax errors raise xml::XmlError.
Definitions parse_definitions(std::string_view text);

/// Canonical emission: fixed namespace prefixes, two-space indent, nodes
/// then flows each sorted by id, artifacts after flows, diagram last.
std::string serialize_definitions(const Definitions& definitions);

/// "123" for integral values, otherwise a fixed-point form with up to three
/// decimals ("417.5"). Shared by the serializer and the layout tests.
std::string format_number(double value);

}  // namespace cacaobpmn::bpmn
