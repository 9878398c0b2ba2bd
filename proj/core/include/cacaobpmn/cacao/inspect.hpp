// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "cacaobpmn/cacao/model.hpp"

namespace cacaobpmn::cacao {

/// Counts each mappable construct. Returns exactly sixteen (label, count)
/// rows in a fixed order: playbook, versioning, variable, start, end,
/// action, playbook-action, parallel, if-condition, while-condition,
/// switch-condition, command, agent-target, extension, data-marking,
/// signature.
std::vector<std::pair<std::string, std::size_t>> inspect(
    const Playbook& playbook);

/// One "row N <label>: <count>" line per construct, newline-terminated.
std::string format_inspect_report(const Playbook& playbook);

}  // namespace cacaobpmn::cacao
