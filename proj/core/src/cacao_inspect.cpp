// SPDX-License-Identifier: Apache-2.0
#include "cacaobpmn/cacao/inspect.hpp"

namespace cacaobpmn::cacao {

std::vector<std::pair<std::string, std::size_t>> inspect(
    const Playbook& playbook) {
  std::size_t versioning = (playbook.created ? 1 : 0) +
                           (playbook.modified ? 1 : 0);
  std::size_t variables = playbook.playbook_variables.size();
  std::size_t commands = 0;
  std::size_t kinds[8] = {};
  for (const auto& [id, step] : playbook.workflow) {
    (void)id;
    ++kinds[static_cast<std::size_t>(step.kind())];
    variables += step.step_variables.size();
    if (const auto* action = std::get_if<ActionPayload>(&step.payload))
      commands += action->commands.size();
  }
  return {
      {"playbook", 1},
      {"versioning", versioning},
      {"variable", variables},
      {"start", kinds[static_cast<std::size_t>(StepKind::Start)]},
      {"end", kinds[static_cast<std::size_t>(StepKind::End)]},
      {"action", kinds[static_cast<std::size_t>(StepKind::Action)]},
      {"playbook-action",
       kinds[static_cast<std::size_t>(StepKind::PlaybookAction)]},
      {"parallel", kinds[static_cast<std::size_t>(StepKind::Parallel)]},
      {"if-condition",
       kinds[static_cast<std::size_t>(StepKind::IfCondition)]},
      {"while-condition",
       kinds[static_cast<std::size_t>(StepKind::WhileCondition)]},
      {"switch-condition",
       kinds[static_cast<std::size_t>(StepKind::SwitchCondition)]},
      {"command", commands},
      {"agent-target",
       playbook.agent_definitions.size() + playbook.target_definitions.size()},
      {"extension", playbook.extension_definitions.size()},
      {"data-marking", playbook.data_marking_definitions.size()},
      {"signature", playbook.signatures.size()},
  };
}

std::string format_inspect_report(const Playbook& playbook) {
  std::string out;
  std::size_t row = 1;
  for (const auto& [label, count] : inspect(playbook)) {
    out += "row " + std::to_string(row) + " " + label + ": " +
           std::to_string(count) + "\n";
    ++row;
  }
  return out;
}

}  // namespace cacaobpmn::cacao
