// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "cacaobpmn/timestamp.hpp"

namespace cacaobpmn::cacao {

using Json = nlohmann::json;
/// Properties the model does not treat specially, preserved verbatim so a
/// re-serialized document reproduces the input (key order excepted).
using JsonMap = std::map<std::string, Json>;

inline constexpr std::string_view kTypeLabel = "playbook";
inline constexpr std::string_view kSpecVersion = "cacao-2.0";

enum class StepKind {
  Start,
  End,
  Action,
  PlaybookAction,
  Parallel,
  IfCondition,
  WhileCondition,
  SwitchCondition,
};

std::string_view to_string(StepKind kind);
std::optional<StepKind> step_kind_from_string(std::string_view text);

struct Command {
  std::string command_type;  // wire property "type": manual, bash, ssh, ...
  std::string content;       // wire property "command"
  std::optional<std::string> description;
  JsonMap other_properties;

  bool operator==(const Command&) const = default;
};

enum class AgentCategory { HumanOrPlace, DeviceOrEquipment };

/// Pure classification of an agent-target vocabulary value. Unknown values
/// count as devices, so automation is the default and human involvement is
/// always explicit.
AgentCategory category_of(std::string_view at_type);

struct AgentTarget {
  std::string at_type;  // wire property "type"
  std::string name;
  JsonMap other_properties;

  AgentCategory category() const { return category_of(at_type); }

  bool operator==(const AgentTarget&) const = default;
};

struct Variable {
  std::string var_type;  // wire property "type"
  std::optional<std::string> description;
  std::optional<std::string> value;
  bool constant = false;
  bool external = false;
  JsonMap other_properties;

  bool operator==(const Variable&) const = default;
};

struct DataMarking {
  std::string marking_type;  // wire property "type"
  std::string id;            // the definitions map key
  std::string display_text;  // derived, used for the marking annotation
  JsonMap other_properties;

  bool operator==(const DataMarking&) const = default;
};

/// Signature records are carried through verbatim; only the signee is
/// surfaced (for the signatures annotation).
struct Signature {
  std::string signee;
  Json record;  // the full signature object, including signee

  bool operator==(const Signature&) const = default;
};

struct ExtensionDefinition {
  std::string id;  // the definitions map key, "extension-definition--<uuid>"
  std::string name;
  std::optional<std::string> schema_ref;  // wire property "schema"
  std::optional<std::string> version;
  JsonMap other_properties;

  bool operator==(const ExtensionDefinition&) const = default;
};

struct StartPayload {
  bool operator==(const StartPayload&) const = default;
};
struct EndPayload {
  bool operator==(const EndPayload&) const = default;
};
struct ActionPayload {
  std::vector<Command> commands;
  std::string agent;
  std::vector<std::string> targets;

  bool operator==(const ActionPayload&) const = default;
};
struct PlaybookActionPayload {
  std::string playbook_id;
  std::optional<Timestamp> playbook_version;

  bool operator==(const PlaybookActionPayload&) const = default;
};
struct ParallelPayload {
  std::vector<std::string> next_steps;

  bool operator==(const ParallelPayload&) const = default;
};
struct IfConditionPayload {
  std::string condition;
  std::string on_true;
  std::optional<std::string> on_false;

  bool operator==(const IfConditionPayload&) const = default;
};
struct WhileConditionPayload {
  std::string condition;
  std::string on_true;

  bool operator==(const WhileConditionPayload&) const = default;
};
struct SwitchConditionPayload {
  std::string switch_expression;  // wire property "switch"
  // Case label -> branch entry step. The JSON wire format is an object, so
  // no order can survive a round trip; lexicographic order is canonical.
  std::map<std::string, std::string> cases;

  bool operator==(const SwitchConditionPayload&) const = default;
};

using StepPayload =
    std::variant<StartPayload, EndPayload, ActionPayload,
                 PlaybookActionPayload, ParallelPayload, IfConditionPayload,
                 WhileConditionPayload, SwitchConditionPayload>;

struct WorkflowStep {
  std::optional<std::string> name;
  std::optional<std::string> description;
  std::optional<std::string> on_completion;
  std::optional<std::string> on_success;
  std::optional<std::string> on_failure;
  std::map<std::string, Variable> step_variables;
  std::optional<std::int64_t> delay;    // milliseconds
  std::optional<std::int64_t> timeout;  // milliseconds
  JsonMap step_extensions;
  JsonMap other_properties;
  StepPayload payload;

  StepKind kind() const { return static_cast<StepKind>(payload.index()); }

  bool operator==(const WorkflowStep&) const = default;
};

struct Playbook {
  std::string id;  // "playbook--<uuid>"
  std::string name;
  std::optional<std::string> description;
  std::optional<Timestamp> created;   // absence is a conformance violation,
  std::optional<Timestamp> modified;  // not a parse error
  std::string workflow_start;
  std::map<std::string, WorkflowStep> workflow;
  std::map<std::string, Variable> playbook_variables;
  std::map<std::string, AgentTarget> agent_definitions;
  std::map<std::string, AgentTarget> target_definitions;
  std::map<std::string, DataMarking> data_marking_definitions;
  std::vector<std::string> markings;
  std::map<std::string, ExtensionDefinition> extension_definitions;
  std::vector<Signature> signatures;
  JsonMap other_properties;

  bool operator==(const Playbook&) const = default;
};

/// True for "<object-type>--<uuid>" shaped identifiers.
bool is_valid_identifier(std::string_view id);

/// True for "__name__" shaped variable names.
bool is_valid_variable_name(std::string_view name);

}  // namespace cacaobpmn::cacao
