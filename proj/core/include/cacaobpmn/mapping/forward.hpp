// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cacaobpmn/bpmn/model.hpp"
#include "cacaobpmn/cacao/model.hpp"
#include "cacaobpmn/mapping/error.hpp"

namespace cacaobpmn::mapping {

/// How branching steps are rendered: as a diverging/converging gateway pair
/// in the parent scope, or folded into an embedded sub-process.
enum class BranchStyle { GatewayPair, SubProcess };

struct MappingOptions {
  BranchStyle parallel_style = BranchStyle::GatewayPair;
  // Applies to if-condition steps. Switches always use a gateway pair:
  // a sub-process cannot label its case branches.
  BranchStyle conditional_style = BranchStyle::GatewayPair;
};

/// Maps a conformant playbook onto BPMN. The result carries every playbook
/// property, either natively or in extension attributes, and has no
/// diagram; layout adds one. Throws MappingError for non-conformant input
/// and for workflows whose steps are shared across branches of different
/// forks (those have no structured BPMN form).
bpmn::Definitions map_to_bpmn(const cacao::Playbook& playbook,
                              const MappingOptions& options = {});

}  // namespace cacaobpmn::mapping
