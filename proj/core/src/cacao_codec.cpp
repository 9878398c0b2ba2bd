// SPDX-License-Identifier: Apache-2.0
#include "cacaobpmn/cacao/codec.hpp"

#include <array>
#include <cctype>
#include <utility>

#include "cacaobpmn/cacao/validate.hpp"

namespace cacaobpmn::cacao {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw CacaoError((path.empty() ? std::string("document") : path) + ": " +
                   what);
}

std::string json_type_name(const Json& value) {
  switch (value.type()) {
    case Json::value_t::null: return "null";
    case Json::value_t::object: return "an object";
    case Json::value_t::array: return "an array";
    case Json::value_t::string: return "a string";
    case Json::value_t::boolean: return "a boolean";
    case Json::value_t::binary: return "binary data";
    default: return "a number";
  }
}

std::optional<std::string> take_string_opt(Json& obj, const char* key,
                                           const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  if (!it->is_string())
    fail(path + "/" + key, "expected a string, found " + json_type_name(*it));
  std::string value = it->get<std::string>();
  obj.erase(it);
  return value;
}

std::string take_string(Json& obj, const char* key, const std::string& path) {
  auto value = take_string_opt(obj, key, path);
  if (!value) fail(path + "/" + key, "missing required property");
  return *std::move(value);
}

std::optional<std::int64_t> take_integer_opt(Json& obj, const char* key,
                                             const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  if (!it->is_number_integer())
    fail(path + "/" + key,
         "expected an integer, found " + json_type_name(*it));
  std::int64_t value = it->get<std::int64_t>();
  obj.erase(it);
  return value;
}

bool take_bool(Json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return false;
  if (!it->is_boolean())
    fail(path + "/" + key, "expected a boolean, found " + json_type_name(*it));
  bool value = it->get<bool>();
  obj.erase(it);
  return value;
}

std::optional<Timestamp> take_timestamp_opt(Json& obj, const char* key,
                                            const std::string& path) {
  auto text = take_string_opt(obj, key, path);
  if (!text) return std::nullopt;
  try {
    return Timestamp::parse(*text);
  } catch (const std::invalid_argument& error) {
    fail(path + "/" + key, error.what());
  }
}

std::vector<std::string> take_string_array(Json& obj, const char* key,
                                           const std::string& path,
                                           bool required) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) fail(path + "/" + key, "missing required property");
    return {};
  }
  if (!it->is_array())
    fail(path + "/" + key, "expected an array, found " + json_type_name(*it));
  std::vector<std::string> values;
  std::size_t index = 0;
  for (const Json& item : *it) {
    if (!item.is_string())
      fail(path + "/" + key + "/" + std::to_string(index),
           "expected a string, found " + json_type_name(item));
    values.push_back(item.get<std::string>());
    ++index;
  }
  obj.erase(it);
  return values;
}

JsonMap take_remainder(Json& obj) {
  JsonMap rest;
  for (auto& [key, value] : obj.items()) rest.emplace(key, std::move(value));
  return rest;
}

JsonMap take_json_map(Json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return {};
  if (!it->is_object())
    fail(path + "/" + key, "expected an object, found " + json_type_name(*it));
  JsonMap values;
  for (auto& [k, v] : it->items()) values.emplace(k, std::move(v));
  obj.erase(it);
  return values;
}

template <typename T, typename Parser>
std::map<std::string, T> take_object_map(Json& obj, const char* key,
                                         const std::string& path,
                                         Parser parser) {
  auto it = obj.find(key);
  if (it == obj.end()) return {};
  if (!it->is_object())
    fail(path + "/" + key, "expected an object, found " + json_type_name(*it));
  std::map<std::string, T> values;
  for (auto& [k, v] : it->items()) {
    std::string item_path = path + "/" + key + "/" + k;
    if (!v.is_object())
      fail(item_path, "expected an object, found " + json_type_name(v));
    values.emplace(k, parser(k, std::move(v), item_path));
  }
  obj.erase(it);
  return values;
}

Variable parse_variable(Json obj, const std::string& path) {
  Variable variable;
  variable.var_type = take_string(obj, "type", path);
  variable.description = take_string_opt(obj, "description", path);
  variable.value = take_string_opt(obj, "value", path);
  variable.constant = take_bool(obj, "constant", path);
  variable.external = take_bool(obj, "external", path);
  variable.other_properties = take_remainder(obj);
  return variable;
}

std::map<std::string, Variable> take_variable_map(Json& obj, const char* key,
                                                  const std::string& path) {
  return take_object_map<Variable>(
      obj, key, path,
      [](const std::string&, Json value, const std::string& item_path) {
        return parse_variable(std::move(value), item_path);
      });
}

AgentTarget parse_agent_target(Json obj, const std::string& path) {
  AgentTarget at;
  at.at_type = take_string(obj, "type", path);
  at.name = take_string(obj, "name", path);
  at.other_properties = take_remainder(obj);
  return at;
}

std::string marking_display_text(const std::string& marking_type,
                                 const Json& obj) {
  if (marking_type == "marking-tlp") {
    auto it = obj.find("tlp_level");
    if (it != obj.end() && it->is_string()) {
      std::string level = it->get<std::string>();
      if (level.rfind("TLP:", 0) == 0) return level;
      for (char& c : level)
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      return "TLP:" + level;
    }
  }
  if (marking_type == "marking-statement") {
    auto it = obj.find("statement");
    if (it != obj.end() && it->is_string()) return it->get<std::string>();
  }
  auto it = obj.find("name");
  if (it != obj.end() && it->is_string()) return it->get<std::string>();
  return marking_type;
}

DataMarking parse_marking(const std::string& id, Json obj,
                          const std::string& path) {
  DataMarking marking;
  marking.id = id;
  marking.marking_type = take_string(obj, "type", path);
  marking.display_text = marking_display_text(marking.marking_type, obj);
  marking.other_properties = take_remainder(obj);
  return marking;
}

ExtensionDefinition parse_extension_definition(const std::string& id, Json obj,
                                               const std::string& path) {
  ExtensionDefinition def;
  def.id = id;
  def.name = take_string(obj, "name", path);
  def.schema_ref = take_string_opt(obj, "schema", path);
  def.version = take_string_opt(obj, "version", path);
  def.other_properties = take_remainder(obj);
  return def;
}

Command parse_command(Json obj, const std::string& path) {
  Command command;
  command.command_type = take_string(obj, "type", path);
  command.content = take_string(obj, "command", path);
  command.description = take_string_opt(obj, "description", path);
  command.other_properties = take_remainder(obj);
  return command;
}

Signature parse_signature(Json obj, const std::string& path) {
  if (!obj.is_object())
    fail(path, "expected an object, found " + json_type_name(obj));
  Signature signature;
  if (auto it = obj.find("signee"); it != obj.end() && it->is_string())
    signature.signee = it->get<std::string>();
  signature.record = std::move(obj);
  return signature;
}

StepPayload parse_payload(StepKind kind, Json& obj, const std::string& path) {
  switch (kind) {
    case StepKind::Start:
      return StartPayload{};
    case StepKind::End:
      return EndPayload{};
    case StepKind::Action: {
      ActionPayload payload;
      auto it = obj.find("commands");
      if (it == obj.end())
        fail(path + "/commands", "missing required property");
      if (!it->is_array())
        fail(path + "/commands",
             "expected an array, found " + json_type_name(*it));
      std::size_t index = 0;
      for (Json& item : *it) {
        std::string item_path = path + "/commands/" + std::to_string(index);
        if (!item.is_object())
          fail(item_path, "expected an object, found " + json_type_name(item));
        payload.commands.push_back(parse_command(std::move(item), item_path));
        ++index;
      }
      obj.erase(it);
      if (auto agent = take_string_opt(obj, "agent", path))
        payload.agent = *std::move(agent);
      payload.targets = take_string_array(obj, "targets", path, false);
      return payload;
    }
    case StepKind::PlaybookAction: {
      PlaybookActionPayload payload;
      payload.playbook_id = take_string(obj, "playbook_id", path);
      payload.playbook_version =
          take_timestamp_opt(obj, "playbook_version", path);
      return payload;
    }
    case StepKind::Parallel: {
      ParallelPayload payload;
      payload.next_steps = take_string_array(obj, "next_steps", path, true);
      return payload;
    }
    case StepKind::IfCondition: {
      IfConditionPayload payload;
      payload.condition = take_string(obj, "condition", path);
      payload.on_true = take_string(obj, "on_true", path);
      payload.on_false = take_string_opt(obj, "on_false", path);
      return payload;
    }
    case StepKind::WhileCondition: {
      WhileConditionPayload payload;
      payload.condition = take_string(obj, "condition", path);
      payload.on_true = take_string(obj, "on_true", path);
      return payload;
    }
    case StepKind::SwitchCondition: {
      SwitchConditionPayload payload;
      payload.switch_expression = take_string(obj, "switch", path);
      auto it = obj.find("cases");
      if (it == obj.end()) fail(path + "/cases", "missing required property");
      if (!it->is_object())
        fail(path + "/cases",
             "expected an object, found " + json_type_name(*it));
      for (auto& [label, target] : it->items()) {
        if (!target.is_string())
          fail(path + "/cases/" + label,
               "expected a string, found " + json_type_name(target));
        payload.cases.emplace(label, target.get<std::string>());
      }
      obj.erase(it);
      return payload;
    }
  }
  fail(path, "unsupported workflow step kind");
}

WorkflowStep parse_step(Json obj, const std::string& path) {
  std::string type = take_string(obj, "type", path);
  auto kind = step_kind_from_string(type);
  if (!kind)
    fail(path + "/type", "unknown workflow step type \"" + type + "\"");
  WorkflowStep step;
  step.name = take_string_opt(obj, "name", path);
  step.description = take_string_opt(obj, "description", path);
  step.on_completion = take_string_opt(obj, "on_completion", path);
  step.on_success = take_string_opt(obj, "on_success", path);
  step.on_failure = take_string_opt(obj, "on_failure", path);
  step.delay = take_integer_opt(obj, "delay", path);
  step.timeout = take_integer_opt(obj, "timeout", path);
  step.step_variables = take_variable_map(obj, "step_variables", path);
  step.step_extensions = take_json_map(obj, "step_extensions", path);
  step.payload = parse_payload(*kind, obj, path);
  step.other_properties = take_remainder(obj);
  return step;
}

Json variable_map_to_json(const std::map<std::string, Variable>& variables) {
  Json obj = Json::object();
  for (const auto& [name, variable] : variables)
    obj[name] = to_json(variable);
  return obj;
}

Json step_to_json(const WorkflowStep& step) {
  Json obj = Json::object();
  obj["type"] = std::string(to_string(step.kind()));
  if (step.name) obj["name"] = *step.name;
  if (step.description) obj["description"] = *step.description;
  if (step.on_completion) obj["on_completion"] = *step.on_completion;
  if (step.on_success) obj["on_success"] = *step.on_success;
  if (step.on_failure) obj["on_failure"] = *step.on_failure;
  if (step.delay) obj["delay"] = *step.delay;
  if (step.timeout) obj["timeout"] = *step.timeout;
  if (!step.step_variables.empty())
    obj["step_variables"] = variable_map_to_json(step.step_variables);
  if (!step.step_extensions.empty()) {
    Json exts = Json::object();
    for (const auto& [key, value] : step.step_extensions) exts[key] = value;
    obj["step_extensions"] = exts;
  }
  std::visit(
      [&obj](const auto& payload) {
        using T = std::decay_t<decltype(payload)>;
        if constexpr (std::is_same_v<T, ActionPayload>) {
          Json commands = Json::array();
          for (const Command& command : payload.commands)
            commands.push_back(to_json(command));
          obj["commands"] = commands;
          if (!payload.agent.empty()) obj["agent"] = payload.agent;
          if (!payload.targets.empty()) obj["targets"] = payload.targets;
        } else if constexpr (std::is_same_v<T, PlaybookActionPayload>) {
          obj["playbook_id"] = payload.playbook_id;
          if (payload.playbook_version)
            obj["playbook_version"] = payload.playbook_version->to_rfc3339();
        } else if constexpr (std::is_same_v<T, ParallelPayload>) {
          obj["next_steps"] = payload.next_steps;
        } else if constexpr (std::is_same_v<T, IfConditionPayload>) {
          obj["condition"] = payload.condition;
          obj["on_true"] = payload.on_true;
          if (payload.on_false) obj["on_false"] = *payload.on_false;
        } else if constexpr (std::is_same_v<T, WhileConditionPayload>) {
          obj["condition"] = payload.condition;
          obj["on_true"] = payload.on_true;
        } else if constexpr (std::is_same_v<T, SwitchConditionPayload>) {
          obj["switch"] = payload.switch_expression;
          Json cases = Json::object();
          for (const auto& [label, target] : payload.cases)
            cases[label] = target;
          obj["cases"] = cases;
        }
      },
      step.payload);
  for (const auto& [key, value] : step.other_properties)
    if (!obj.contains(key)) obj[key] = value;
  return obj;
}

}  // namespace

std::string_view to_string(StepKind kind) {
  switch (kind) {
    case StepKind::Start: return "start";
    case StepKind::End: return "end";
    case StepKind::Action: return "action";
    case StepKind::PlaybookAction: return "playbook-action";
    case StepKind::Parallel: return "parallel";
    case StepKind::IfCondition: return "if-condition";
    case StepKind::WhileCondition: return "while-condition";
    case StepKind::SwitchCondition: return "switch-condition";
  }
  return "start";
}

std::optional<StepKind> step_kind_from_string(std::string_view text) {
  if (text == "start") return StepKind::Start;
  if (text == "end") return StepKind::End;
  if (text == "action") return StepKind::Action;
  if (text == "playbook-action") return StepKind::PlaybookAction;
  if (text == "parallel") return StepKind::Parallel;
  if (text == "if-condition") return StepKind::IfCondition;
  if (text == "while-condition") return StepKind::WhileCondition;
  if (text == "switch-condition") return StepKind::SwitchCondition;
  return std::nullopt;
}

AgentCategory category_of(std::string_view at_type) {
  static constexpr std::array<std::string_view, 5> human_or_place = {
      "group", "individual", "location", "organization", "sector"};
  for (std::string_view candidate : human_or_place)
    if (at_type == candidate) return AgentCategory::HumanOrPlace;
  return AgentCategory::DeviceOrEquipment;
}

bool is_valid_identifier(std::string_view id) {
  constexpr std::size_t uuid_len = 36;
  if (id.size() < uuid_len + 3) return false;
  std::size_t split = id.size() - uuid_len - 2;
  if (id.substr(split, 2) != "--") return false;
  std::string_view prefix = id.substr(0, split);
  if (prefix.empty() || prefix.front() < 'a' || prefix.front() > 'z')
    return false;
  if (prefix.back() == '-') return false;
  for (char c : prefix)
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-'))
      return false;
  std::string_view uuid = id.substr(split + 2);
  for (std::size_t i = 0; i < uuid_len; ++i) {
    char c = uuid[i];
    if (i == 8 || i == 13 || i == 18 || i == 23) {
      if (c != '-') return false;
    } else if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) {
      return false;
    }
  }
  return true;
}

bool is_valid_variable_name(std::string_view name) {
  if (name.size() < 5) return false;
  if (name.substr(0, 2) != "__" || name.substr(name.size() - 2) != "__")
    return false;
  return name.size() > 4;
}

Playbook parse_playbook(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& error) {
    throw CacaoError(std::string("invalid JSON: ") + error.what());
  }
  if (!doc.is_object())
    fail("", "expected a JSON object, found " + json_type_name(doc));

  Json obj = std::move(doc);
  std::string type = take_string(obj, "type", "");
  if (type != kTypeLabel)
    fail("/type", "expected \"playbook\", found \"" + type + "\"");
  std::string spec_version = take_string(obj, "spec_version", "");
  if (spec_version != kSpecVersion)
    fail("/spec_version",
         "unsupported spec version \"" + spec_version + "\" (need \"" +
             std::string(kSpecVersion) + "\")");

  Playbook playbook;
  playbook.id = take_string(obj, "id", "");
  playbook.name = take_string(obj, "name", "");
  playbook.description = take_string_opt(obj, "description", "");
  playbook.created = take_timestamp_opt(obj, "created", "");
  playbook.modified = take_timestamp_opt(obj, "modified", "");
  playbook.workflow_start = take_string(obj, "workflow_start", "");

  {
    auto it = obj.find("workflow");
    if (it == obj.end()) fail("/workflow", "missing required property");
    if (!it->is_object())
      fail("/workflow", "expected an object, found " + json_type_name(*it));
    for (auto& [id, value] : it->items()) {
      std::string path = "/workflow/" + id;
      if (!value.is_object())
        fail(path, "expected an object, found " + json_type_name(value));
      playbook.workflow.emplace(id, parse_step(std::move(value), path));
    }
    obj.erase(it);
  }

  playbook.playbook_variables =
      take_variable_map(obj, "playbook_variables", "");
  playbook.agent_definitions = take_object_map<AgentTarget>(
      obj, "agent_definitions", "",
      [](const std::string&, Json value, const std::string& path) {
        return parse_agent_target(std::move(value), path);
      });
  playbook.target_definitions = take_object_map<AgentTarget>(
      obj, "target_definitions", "",
      [](const std::string&, Json value, const std::string& path) {
        return parse_agent_target(std::move(value), path);
      });
  playbook.data_marking_definitions = take_object_map<DataMarking>(
      obj, "data_marking_definitions", "", parse_marking);
  playbook.markings = take_string_array(obj, "markings", "", false);
  playbook.extension_definitions = take_object_map<ExtensionDefinition>(
      obj, "extension_definitions", "", parse_extension_definition);

  if (auto it = obj.find("signatures"); it != obj.end()) {
    if (!it->is_array())
      fail("/signatures", "expected an array, found " + json_type_name(*it));
    std::size_t index = 0;
    for (Json& item : *it) {
      playbook.signatures.push_back(parse_signature(
          std::move(item), "/signatures/" + std::to_string(index)));
      ++index;
    }
    obj.erase(it);
  }

  playbook.other_properties = take_remainder(obj);
  return playbook;
}

Json to_json(const Playbook& playbook) {
  Json obj = Json::object();
  obj["type"] = std::string(kTypeLabel);
  obj["spec_version"] = std::string(kSpecVersion);
  obj["id"] = playbook.id;
  obj["name"] = playbook.name;
  if (playbook.description) obj["description"] = *playbook.description;
  if (playbook.created) obj["created"] = playbook.created->to_rfc3339();
  if (playbook.modified) obj["modified"] = playbook.modified->to_rfc3339();
  obj["workflow_start"] = playbook.workflow_start;

  Json workflow = Json::object();
  for (const auto& [id, step] : playbook.workflow)
    workflow[id] = step_to_json(step);
  obj["workflow"] = workflow;

  if (!playbook.playbook_variables.empty())
    obj["playbook_variables"] =
        variable_map_to_json(playbook.playbook_variables);
  if (!playbook.agent_definitions.empty()) {
    Json agents = Json::object();
    for (const auto& [id, agent] : playbook.agent_definitions)
      agents[id] = to_json(agent);
    obj["agent_definitions"] = agents;
  }
  if (!playbook.target_definitions.empty()) {
    Json targets = Json::object();
    for (const auto& [id, target] : playbook.target_definitions)
      targets[id] = to_json(target);
    obj["target_definitions"] = targets;
  }
  if (!playbook.data_marking_definitions.empty()) {
    Json markings = Json::object();
    for (const auto& [id, marking] : playbook.data_marking_definitions)
      markings[id] = to_json(marking);
    obj["data_marking_definitions"] = markings;
  }
  if (!playbook.markings.empty()) obj["markings"] = playbook.markings;
  if (!playbook.extension_definitions.empty()) {
    Json defs = Json::object();
    for (const auto& [id, def] : playbook.extension_definitions)
      defs[id] = to_json(def);
    obj["extension_definitions"] = defs;
  }
  if (!playbook.signatures.empty()) {
    Json signatures = Json::array();
    for (const Signature& signature : playbook.signatures)
      signatures.push_back(signature.record);
    obj["signatures"] = signatures;
  }
  for (const auto& [key, value] : playbook.other_properties)
    if (!obj.contains(key)) obj[key] = value;
  return obj;
}

Json to_json(const Command& command) {
  Json obj = Json::object();
  obj["type"] = command.command_type;
  obj["command"] = command.content;
  if (command.description) obj["description"] = *command.description;
  for (const auto& [key, value] : command.other_properties)
    if (!obj.contains(key)) obj[key] = value;
  return obj;
}

Json to_json(const Variable& variable) {
  Json obj = Json::object();
  obj["type"] = variable.var_type;
  if (variable.description) obj["description"] = *variable.description;
  if (variable.value) obj["value"] = *variable.value;
  if (variable.constant) obj["constant"] = true;
  if (variable.external) obj["external"] = true;
  for (const auto& [key, value] : variable.other_properties)
    if (!obj.contains(key)) obj[key] = value;
  return obj;
}

Json to_json(const AgentTarget& agent_target) {
  Json obj = Json::object();
  obj["type"] = agent_target.at_type;
  obj["name"] = agent_target.name;
  for (const auto& [key, value] : agent_target.other_properties)
    if (!obj.contains(key)) obj[key] = value;
  return obj;
}

Json to_json(const DataMarking& marking) {
  Json obj = Json::object();
  obj["type"] = marking.marking_type;
  for (const auto& [key, value] : marking.other_properties)
    if (!obj.contains(key)) obj[key] = value;
  return obj;
}

Json to_json(const ExtensionDefinition& definition) {
  Json obj = Json::object();
  obj["name"] = definition.name;
  if (definition.schema_ref) obj["schema"] = *definition.schema_ref;
  if (definition.version) obj["version"] = *definition.version;
  for (const auto& [key, value] : definition.other_properties)
    if (!obj.contains(key)) obj[key] = value;
  return obj;
}

std::vector<Command> commands_from_json(const Json& value,
                                        const std::string& path) {
  if (!value.is_array())
    fail(path, "expected an array, found " + json_type_name(value));
  std::vector<Command> commands;
  std::size_t index = 0;
  for (const Json& item : value) {
    std::string item_path = path + "/" + std::to_string(index);
    if (!item.is_object())
      fail(item_path, "expected an object, found " + json_type_name(item));
    commands.push_back(parse_command(item, item_path));
    ++index;
  }
  return commands;
}

namespace {

template <typename T, typename Parser>
std::map<std::string, T> map_from_json(const Json& value,
                                       const std::string& path,
                                       Parser parser) {
  if (!value.is_object())
    fail(path, "expected an object, found " + json_type_name(value));
  std::map<std::string, T> out;
  for (const auto& [key, item] : value.items()) {
    std::string item_path = path + "/" + key;
    if (!item.is_object())
      fail(item_path, "expected an object, found " + json_type_name(item));
    out.emplace(key, parser(key, item, item_path));
  }
  return out;
}

}  // namespace

std::map<std::string, Variable> variables_from_json(const Json& value,
                                                    const std::string& path) {
  return map_from_json<Variable>(
      value, path,
      [](const std::string&, const Json& item, const std::string& item_path) {
        return parse_variable(item, item_path);
      });
}

std::map<std::string, AgentTarget> agent_targets_from_json(
    const Json& value, const std::string& path) {
  return map_from_json<AgentTarget>(
      value, path,
      [](const std::string&, const Json& item, const std::string& item_path) {
        return parse_agent_target(item, item_path);
      });
}

std::map<std::string, DataMarking> markings_from_json(
    const Json& value, const std::string& path) {
  return map_from_json<DataMarking>(value, path, parse_marking);
}

std::map<std::string, ExtensionDefinition> extension_definitions_from_json(
    const Json& value, const std::string& path) {
  return map_from_json<ExtensionDefinition>(value, path,
                                            parse_extension_definition);
}

std::vector<Signature> signatures_from_json(const Json& value,
                                            const std::string& path) {
  if (!value.is_array())
    fail(path, "expected an array, found " + json_type_name(value));
  std::vector<Signature> signatures;
  std::size_t index = 0;
  for (const Json& item : value) {
    signatures.push_back(
        parse_signature(item, path + "/" + std::to_string(index)));
    ++index;
  }
  return signatures;
}

std::string serialize_playbook(const Playbook& playbook) {
  Violations violations = validate(playbook);
  if (!violations.empty())
    throw CacaoError("refusing to serialize a non-conformant playbook: " +
                     violations.front().code + " at " +
                     violations.front().path + ": " +
                     violations.front().message);
  return to_json(playbook).dump(2) + "\n";
}

}  // namespace cacaobpmn::cacao
