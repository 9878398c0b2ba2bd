// SPDX-License-Identifier: Apache-2.0
#include "cacaobpmn/cacao/validate.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "cacaobpmn/cacao/codec.hpp"

namespace cacaobpmn::cacao {

namespace {

class Checker {
 public:
  explicit Checker(const Playbook& playbook) : pb_(playbook) {}

  Violations run() {
    check_document();
    check_steps();
    check_definitions();
    check_graph();
    return std::move(violations_);
  }

 private:
  void add(std::string code, std::string path, std::string message) {
    violations_.push_back(
        {std::move(code), std::move(path), std::move(message)});
  }

  void check_identifier(const std::string& id, const std::string& path,
                        std::string_view expected_prefix = {}) {
    if (!is_valid_identifier(id)) {
      add("identifier-pattern", path,
          "\"" + id + "\" is not shaped like \"<type>--<uuid>\"");
      return;
    }
    if (!expected_prefix.empty() &&
        id.rfind(std::string(expected_prefix) + "--", 0) != 0)
      add("identifier-pattern", path,
          "\"" + id + "\" must use the \"" + std::string(expected_prefix) +
              "\" prefix");
  }

  void check_variables(const std::map<std::string, Variable>& variables,
                       const std::string& base) {
    for (const auto& [name, variable] : variables) {
      if (!is_valid_variable_name(name))
        add("variable-name", base + "/" + name,
            "variable names must be shaped like \"__name__\"");
      if (variable.var_type.empty())
        add("variable-name", base + "/" + name + "/type",
            "variable type must not be blank");
    }
  }

  void check_document() {
    check_identifier(pb_.id, "/id", "playbook");
    if (pb_.name.empty())
      add("empty-name", "/name", "playbook name must not be blank");
    if (!pb_.created)
      add("versioning-missing", "/created",
          "playbook is missing the created timestamp");
    if (!pb_.modified)
      add("versioning-missing", "/modified",
          "playbook is missing the modified timestamp");
    if (pb_.created && pb_.modified && *pb_.modified < *pb_.created)
      add("versioning-order", "/modified",
          "modified (" + pb_.modified->to_rfc3339() + ") precedes created (" +
              pb_.created->to_rfc3339() + ")");
    check_variables(pb_.playbook_variables, "/playbook_variables");
    for (const std::string& marking : pb_.markings)
      if (!pb_.data_marking_definitions.contains(marking))
        add("dangling-reference",
            "/markings/" +
                std::to_string(&marking - pb_.markings.data()),
            "marking \"" + marking + "\" is not defined");
    std::size_t index = 0;
    for (const Signature& signature : pb_.signatures) {
      const std::string path = "/signatures/" + std::to_string(index);
      if (signature.signee.empty()) {
        add("signature-signee", path, "signature is missing a signee");
      } else if (auto it = signature.record.find("signee");
                 it == signature.record.end() || !it->is_string() ||
                 it->get<std::string>() != signature.signee) {
        add("signature-signee", path,
            "signee \"" + signature.signee +
                "\" does not match the signed record");
      }
      ++index;
    }
  }

  void check_step_reference(const std::string& target,
                            const std::string& path) {
    if (!pb_.workflow.contains(target))
      add("dangling-reference", path,
          "step \"" + target + "\" is not part of the workflow");
  }

  void check_steps() {
    std::size_t start_steps = 0;
    for (const auto& [id, step] : pb_.workflow) {
      const std::string base = "/workflow/" + id;
      check_identifier(id, base);
      if (step.kind() == StepKind::Start) ++start_steps;
      check_variables(step.step_variables, base + "/step_variables");
      for (const auto& [extension_id, value] : step.step_extensions) {
        (void)value;
        if (!pb_.extension_definitions.contains(extension_id))
          add("dangling-reference", base + "/step_extensions/" + extension_id,
              "extension \"" + extension_id + "\" is not defined");
      }

      if (step.on_completion)
        check_step_reference(*step.on_completion, base + "/on_completion");
      if (step.on_success)
        check_step_reference(*step.on_success, base + "/on_success");
      if (step.on_failure)
        check_step_reference(*step.on_failure, base + "/on_failure");
      if (step.on_completion && (step.on_success || step.on_failure))
        add("edge-conflict", base,
            "on_completion cannot be combined with on_success/on_failure");
      bool allows_outcome_edges = step.kind() == StepKind::Action ||
                                  step.kind() == StepKind::PlaybookAction;
      if ((step.on_success || step.on_failure) && !allows_outcome_edges)
        add("edge-style", base,
            "on_success/on_failure are only valid on action and "
            "playbook-action steps");
      if (step.kind() == StepKind::End) {
        if (step.on_completion || step.on_success || step.on_failure)
          add("end-step-continuation", base,
              "end steps cannot have outgoing edges");
      } else if (!step.on_completion && !step.on_success &&
                 !step.on_failure) {
        add("dangling-chain", base,
            "non-end step needs on_completion or on_success/on_failure");
      }

      check_payload(id, step, base);
    }
    if (start_steps != 1)
      add("start-count", "/workflow",
          "workflow must contain exactly one start step, found " +
              std::to_string(start_steps));
    if (auto it = pb_.workflow.find(pb_.workflow_start);
        it == pb_.workflow.end()) {
      add("dangling-reference", "/workflow_start",
          "step \"" + pb_.workflow_start + "\" is not part of the workflow");
    } else if (it->second.kind() != StepKind::Start) {
      add("workflow-start-kind", "/workflow_start",
          "workflow_start must reference a start step, found " +
              std::string(to_string(it->second.kind())));
    }
  }

  void check_payload(const std::string& id, const WorkflowStep& step,
                     const std::string& base) {
    (void)id;
    switch (step.kind()) {
      case StepKind::Action: {
        const auto& payload = std::get<ActionPayload>(step.payload);
        if (payload.commands.empty())
          add("empty-commands", base + "/commands",
              "action steps need at least one command");
        if (!payload.agent.empty() &&
            !pb_.agent_definitions.contains(payload.agent))
          add("dangling-reference", base + "/agent",
              "agent \"" + payload.agent + "\" is not defined");
        std::size_t index = 0;
        for (const std::string& target : payload.targets) {
          if (!pb_.target_definitions.contains(target))
            add("dangling-reference",
                base + "/targets/" + std::to_string(index),
                "target \"" + target + "\" is not defined");
          ++index;
        }
        break;
      }
      case StepKind::PlaybookAction: {
        const auto& payload = std::get<PlaybookActionPayload>(step.payload);
        check_identifier(payload.playbook_id, base + "/playbook_id",
                         "playbook");
        break;
      }
      case StepKind::Parallel: {
        const auto& payload = std::get<ParallelPayload>(step.payload);
        std::set<std::string> distinct(payload.next_steps.begin(),
                                       payload.next_steps.end());
        if (distinct.size() < 2)
          add("parallel-branches", base + "/next_steps",
              "parallel steps need at least two distinct branches");
        std::size_t index = 0;
        for (const std::string& target : payload.next_steps) {
          check_step_reference(target,
                               base + "/next_steps/" + std::to_string(index));
          ++index;
        }
        break;
      }
      case StepKind::IfCondition: {
        const auto& payload = std::get<IfConditionPayload>(step.payload);
        if (payload.condition.empty())
          add("empty-condition", base + "/condition",
              "condition must not be blank");
        check_step_reference(payload.on_true, base + "/on_true");
        if (payload.on_false)
          check_step_reference(*payload.on_false, base + "/on_false");
        break;
      }
      case StepKind::WhileCondition: {
        const auto& payload = std::get<WhileConditionPayload>(step.payload);
        if (payload.condition.empty())
          add("empty-condition", base + "/condition",
              "condition must not be blank");
        check_step_reference(payload.on_true, base + "/on_true");
        break;
      }
      case StepKind::SwitchCondition: {
        const auto& payload = std::get<SwitchConditionPayload>(step.payload);
        if (payload.switch_expression.empty())
          add("empty-condition", base + "/switch",
              "switch expression must not be blank");
        if (payload.cases.empty())
          add("empty-cases", base + "/cases",
              "switch steps need at least one case");
        for (const auto& [label, target] : payload.cases)
          check_step_reference(target, base + "/cases/" + label);
        break;
      }
      case StepKind::Start:
      case StepKind::End:
        break;
    }
  }

  void check_definitions() {
    for (const auto& [id, agent] : pb_.agent_definitions) {
      check_identifier(id, "/agent_definitions/" + id);
      if (agent.name.empty())
        add("empty-name", "/agent_definitions/" + id + "/name",
            "agent name must not be blank");
    }
    for (const auto& [id, target] : pb_.target_definitions) {
      check_identifier(id, "/target_definitions/" + id);
      if (target.name.empty())
        add("empty-name", "/target_definitions/" + id + "/name",
            "target name must not be blank");
    }
    for (const auto& [id, marking] : pb_.data_marking_definitions) {
      (void)marking;
      check_identifier(id, "/data_marking_definitions/" + id);
    }
    for (const auto& [id, def] : pb_.extension_definitions) {
      check_identifier(id, "/extension_definitions/" + id,
                       "extension-definition");
      if (def.name.empty())
        add("empty-name", "/extension_definitions/" + id + "/name",
            "extension name must not be blank");
    }
  }

  std::vector<std::string> outgoing(const WorkflowStep& step) const {
    std::vector<std::string> targets;
    if (step.on_completion) targets.push_back(*step.on_completion);
    if (step.on_success) targets.push_back(*step.on_success);
    if (step.on_failure) targets.push_back(*step.on_failure);
    std::visit(
        [&targets](const auto& payload) {
          using T = std::decay_t<decltype(payload)>;
          if constexpr (std::is_same_v<T, ParallelPayload>) {
            for (const std::string& target : payload.next_steps)
              targets.push_back(target);
          } else if constexpr (std::is_same_v<T, IfConditionPayload>) {
            targets.push_back(payload.on_true);
            if (payload.on_false) targets.push_back(*payload.on_false);
          } else if constexpr (std::is_same_v<T, WhileConditionPayload>) {
            targets.push_back(payload.on_true);
          } else if constexpr (std::is_same_v<T, SwitchConditionPayload>) {
            for (const auto& [label, target] : payload.cases) {
              (void)label;
              targets.push_back(target);
            }
          }
        },
        step.payload);
    return targets;
  }

  void check_graph() {
    std::set<std::string> reached;
    std::deque<std::string> queue;
    if (pb_.workflow.contains(pb_.workflow_start)) {
      reached.insert(pb_.workflow_start);
      queue.push_back(pb_.workflow_start);
    }
    while (!queue.empty()) {
      std::string id = std::move(queue.front());
      queue.pop_front();
      for (const std::string& target : outgoing(pb_.workflow.at(id)))
        if (pb_.workflow.contains(target) && reached.insert(target).second)
          queue.push_back(target);
    }
    for (const auto& [id, step] : pb_.workflow) {
      (void)step;
      if (!reached.contains(id))
        add("unreachable-step", "/workflow/" + id,
            "step is not reachable from workflow_start");
    }

    // A start step with an incoming edge leaves the process without a
    // unique entry element, which the reverse mapping depends on.
    for (const auto& [id, step] : pb_.workflow) {
      for (const std::string& target : outgoing(step)) {
        auto it = pb_.workflow.find(target);
        if (it != pb_.workflow.end() && it->second.kind() == StepKind::Start)
          add("start-entry", "/workflow/" + id,
              "edge targets the start step \"" + target + "\"");
      }
    }

    // Kahn trim; whatever survives sits on or behind a cycle.
    std::map<std::string, std::size_t> in_degree;
    for (const auto& [id, step] : pb_.workflow) {
      (void)step;
      in_degree.emplace(id, 0);
    }
    for (const auto& [id, step] : pb_.workflow) {
      (void)id;
      for (const std::string& target : outgoing(step)) {
        auto it = in_degree.find(target);
        if (it != in_degree.end()) ++it->second;
      }
    }
    std::deque<std::string> ready;
    for (const auto& [id, degree] : in_degree)
      if (degree == 0) ready.push_back(id);
    std::size_t removed = 0;
    while (!ready.empty()) {
      std::string id = std::move(ready.front());
      ready.pop_front();
      ++removed;
      for (const std::string& target : outgoing(pb_.workflow.at(id))) {
        auto it = in_degree.find(target);
        if (it != in_degree.end() && --it->second == 0)
          ready.push_back(target);
      }
    }
    if (removed != in_degree.size()) {
      for (const auto& [id, degree] : in_degree) {
        if (degree > 0) {
          add("workflow-cycle", "/workflow/" + id,
              "workflow graph contains a cycle");
          break;
        }
      }
    }
  }

  const Playbook& pb_;
  Violations violations_;
};

// JSON parsing keeps only the last occurrence of a repeated object member,
// so repeats are detectable only while the text streams by.
class DuplicateScanner : public nlohmann::json_sax<Json> {
 public:
  Violations take() { return std::move(violations_); }

  bool null() override { return finish_value(); }
  bool boolean(bool) override { return finish_value(); }
  bool number_integer(number_integer_t) override { return finish_value(); }
  bool number_unsigned(number_unsigned_t) override { return finish_value(); }
  bool number_float(number_float_t, const string_t&) override {
    return finish_value();
  }
  bool string(string_t&) override { return finish_value(); }
  bool binary(binary_t&) override { return finish_value(); }

  bool start_object(std::size_t) override {
    push(true);
    return true;
  }
  bool start_array(std::size_t) override {
    push(false);
    return true;
  }
  bool end_object() override {
    frames_.pop_back();
    return finish_value();
  }
  bool end_array() override {
    frames_.pop_back();
    return finish_value();
  }

  bool key(string_t& name) override {
    Frame& frame = frames_.back();
    if (!frame.seen.insert(name).second) {
      if (frame.entered_by == "cases")
        violations_.push_back({"duplicate-case", pointer_to(name),
                               "case \"" + name + "\" is declared twice"});
      else
        violations_.push_back({"duplicate-property", pointer_to(name),
                               "property \"" + name + "\" is declared twice"});
    }
    frame.pending_key = name;
    return true;
  }

  bool parse_error(std::size_t, const std::string&,
                   const nlohmann::detail::exception&) override {
    return false;
  }

 private:
  struct Frame {
    bool object = false;
    std::string entered_by;
    std::string pending_key;
    std::set<std::string> seen;
    std::size_t index = 0;
  };

  void push(bool object) {
    Frame frame;
    frame.object = object;
    if (!frames_.empty()) frame.entered_by = component();
    frames_.push_back(std::move(frame));
  }

  std::string component() const {
    const Frame& parent = frames_.back();
    return parent.object ? parent.pending_key : std::to_string(parent.index);
  }

  bool finish_value() {
    if (!frames_.empty() && !frames_.back().object) ++frames_.back().index;
    return true;
  }

  std::string pointer_to(const std::string& leaf) const {
    std::string path;
    for (std::size_t i = 1; i < frames_.size(); ++i)
      path += "/" + escape(frames_[i].entered_by);
    return path + "/" + escape(leaf);
  }

  static std::string escape(const std::string& component) {
    std::string out;
    for (char c : component) {
      if (c == '~')
        out += "~0";
      else if (c == '/')
        out += "~1";
      else
        out += c;
    }
    return out;
  }

  std::vector<Frame> frames_;
  Violations violations_;
};

}  // namespace

Violations validate(const Playbook& playbook) {
  return Checker(playbook).run();
}

Violations validate_document(std::string_view text) {
  Playbook playbook = parse_playbook(text);
  DuplicateScanner scanner;
  Json::sax_parse(text, &scanner);
  Violations violations = scanner.take();
  Violations conformance = validate(playbook);
  violations.insert(violations.end(), conformance.begin(), conformance.end());
  return violations;
}

}  // namespace cacaobpmn::cacao
