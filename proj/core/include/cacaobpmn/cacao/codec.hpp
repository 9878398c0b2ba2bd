// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "cacaobpmn/cacao/model.hpp"

namespace cacaobpmn::cacao {

class CacaoError : public std::runtime_error {
 public:
  explicit CacaoError(const std::string& message)
      : std::runtime_error(message) {}
};

/// Parses a CACAO 2.0 playbook document. Structural problems (bad JSON,
/// wrong spec version, missing required properties, malformed steps) throw
/// CacaoError; conformance problems are left to validate().
Playbook parse_playbook(std::string_view text);

/// Canonical emission: object keys sorted, two-space indent, trailing
/// newline. Identical playbooks serialize to identical bytes.
std::string serialize_playbook(const Playbook& playbook);

/// The document tree serialize_playbook() would emit, for callers that
/// post-process rather than write bytes.
Json to_json(const Playbook& playbook);

// Wire-format fragments. The mappers embed these in BPMN attributes and
// read them back; they follow the same conventions as the full document.
Json to_json(const Command& command);
Json to_json(const Variable& variable);
Json to_json(const AgentTarget& agent_target);
Json to_json(const DataMarking& marking);
Json to_json(const ExtensionDefinition& definition);

std::vector<Command> commands_from_json(const Json& value,
                                        const std::string& path);
std::map<std::string, Variable> variables_from_json(const Json& value,
                                                    const std::string& path);
std::map<std::string, AgentTarget> agent_targets_from_json(
    const Json& value, const std::string& path);
std::map<std::string, DataMarking> markings_from_json(const Json& value,
                                                      const std::string& path);
std::map<std::string, ExtensionDefinition> extension_definitions_from_json(
    const Json& value, const std::string& path);
std::vector<Signature> signatures_from_json(const Json& value,
                                            const std::string& path);

}  // namespace cacaobpmn::cacao
