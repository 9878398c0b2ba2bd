// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "cacaobpmn/cacao/model.hpp"

namespace cacaobpmn::cacao {

/// Structural comparison of two playbooks over their canonical document
/// trees. Each entry is "<json-pointer>: <difference>"; an empty result
/// means the playbooks serialize identically.
std::vector<std::string> diff(const Playbook& left, const Playbook& right);

}  // namespace cacaobpmn::cacao
