// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "cacaobpmn/bpmn/model.hpp"

namespace cacaobpmn::mapping {

/// Builds a QName in the converter's extension namespace. Everything the
/// BPMN vocabulary cannot express natively travels in these attributes;
/// text annotations only mirror them for human readers.
inline xml::QName cacao_attr(const char* local) {
  return xml::QName{std::string(bpmn::kCacaoNs), local};
}

namespace attr {

// Process-level carriers.
inline constexpr const char* kSpecVersion = "spec-version";
inline constexpr const char* kCreated = "created";
inline constexpr const char* kModified = "modified";
inline constexpr const char* kDescription = "description";
inline constexpr const char* kAgentDefinitions = "agent-definitions";
inline constexpr const char* kTargetDefinitions = "target-definitions";
inline constexpr const char* kDataMarkingDefinitions =
    "data-marking-definitions";
inline constexpr const char* kMarkings = "markings";
inline constexpr const char* kExtensionDefinitions = "extension-definitions";
inline constexpr const char* kSignatures = "signatures";
inline constexpr const char* kOtherProperties = "other-properties";

// Step-level carriers.
inline constexpr const char* kStepType = "step-type";
inline constexpr const char* kDelay = "delay";
inline constexpr const char* kTimeout = "timeout";
inline constexpr const char* kStepVariables = "step-variables";
inline constexpr const char* kStepExtensions = "step-extensions";
inline constexpr const char* kAgent = "agent";
inline constexpr const char* kTargets = "targets";
inline constexpr const char* kCommands = "commands";
inline constexpr const char* kPlaybookVersion = "playbook-version";
inline constexpr const char* kNextSteps = "next-steps";
inline constexpr const char* kCondition = "condition";
inline constexpr const char* kOnTrue = "on-true";
inline constexpr const char* kOnFalse = "on-false";
inline constexpr const char* kCases = "cases";

// Flow- and variable-level carriers.
inline constexpr const char* kEdgeKind = "edge-kind";  // true false case
                                                       // success failure
inline constexpr const char* kCaseLabel = "case-label";
inline constexpr const char* kSynthesized = "synthesized";  // join fork
inline constexpr const char* kValue = "value";
inline constexpr const char* kConstant = "constant";
inline constexpr const char* kExternal = "external";

}  // namespace attr
}  // namespace cacaobpmn::mapping
